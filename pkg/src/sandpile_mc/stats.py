"""Mergeable Monte Carlo tallies, z-score comparisons, chi-square uniformity.

Estimates are plain per-label counts with binomial (Wald) standard errors;
all comparison gates in this project use k-sigma bands with k >= 3, where
Wald is adequate at the sample sizes involved.  Tables merge by count
addition, so results are independent of how work was split across streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class IncompatibleTablesError(ValueError):
    """Tables differ in labels or non-volatile metadata."""


class TooFewSamplesError(ValueError):
    """Expected cell counts too small for a valid chi-square test."""


#: metadata keys allowed to differ between mergeable tables
VOLATILE_KEYS = ("seed", "stream")


@dataclass
class EstimateTable:
    """Per-label Monte Carlo counts with derived proportions and errors.

    ``metadata`` holds the run parameters and must match for two tables to
    merge (seed/stream excluded); ``diagnostics`` holds additive integer
    counters (e.g. capped-walk counts) that merge by addition.
    """

    labels: tuple
    counts: tuple
    metadata: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.counts = tuple(int(c) for c in self.counts)
        if len(self.labels) != len(self.counts):
            raise ValueError("labels and counts length mismatch")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def proportions(self) -> tuple:
        n = self.total
        if n == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(c / n for c in self.counts)

    @property
    def stderrs(self) -> tuple:
        """Wald standard error sqrt(p(1-p)/n) per label."""
        n = self.total
        if n == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(math.sqrt(c / n * (1 - c / n) / n) for c in self.counts)

    def proportion(self, label) -> float:
        return self.proportions[self.labels.index(label)]

    def stderr(self, label) -> float:
        return self.stderrs[self.labels.index(label)]

    def moment(self, r: int) -> float:
        """r-th raw moment of the label distribution (numeric labels)."""
        return sum((lab**r) * p for lab, p in zip(self.labels, self.proportions))

    def moment_stderr(self, r: int) -> float:
        """Standard error of the r-th raw moment estimate."""
        m_r = self.moment(r)
        m_2r = self.moment(2 * r)
        var = max(m_2r - m_r * m_r, 0.0)
        n = self.total
        return math.sqrt(var / n) if n else 0.0


def _mergeable_meta(meta: dict) -> dict:
    return {k: v for k, v in meta.items() if k not in VOLATILE_KEYS}


def merge(a: EstimateTable, b: EstimateTable) -> EstimateTable:
    """Add two tables cell-wise; associative and commutative."""
    if a.labels != b.labels:
        raise IncompatibleTablesError(f"label mismatch: {a.labels} vs {b.labels}")
    if _mergeable_meta(a.metadata) != _mergeable_meta(b.metadata):
        raise IncompatibleTablesError("parameter metadata mismatch")
    meta = dict(_mergeable_meta(a.metadata))
    if a.metadata.get("seed") == b.metadata.get("seed") and "seed" in a.metadata:
        meta["seed"] = a.metadata["seed"]
    diag = dict(a.diagnostics)
    for k, v in b.diagnostics.items():
        diag[k] = diag.get(k, 0) + v
    counts = tuple(x + y for x, y in zip(a.counts, b.counts))
    return EstimateTable(a.labels, counts, meta, diag)


@dataclass
class ComparisonVerdict:
    """Per-label z-scores against a reference; passes iff all z <= k."""

    labels: tuple
    z_scores: tuple
    k: float
    passed: bool
    worst_label: object
    worst_z: float


def compare_values(labels, values, stderrs, ref_values, k: float, se_floor: float) -> ComparisonVerdict:
    """z-score verdict for arbitrary per-label values with known errors."""
    if k <= 0:
        raise ValueError("k must be positive")
    labels = tuple(labels)
    zs = []
    for v, se, rv in zip(values, stderrs, ref_values):
        combined = max(se, se_floor)
        zs.append(abs(v - rv) / combined)
    worst = max(range(len(zs)), key=zs.__getitem__)
    return ComparisonVerdict(
        labels=labels,
        z_scores=tuple(zs),
        k=k,
        passed=all(z <= k for z in zs),
        worst_label=labels[worst],
        worst_z=zs[worst],
    )


def compare(est: EstimateTable, ref, k: float, ref_stderr=None) -> ComparisonVerdict:
    """z-score comparison of estimated proportions against reference values.

    ``ref`` maps labels to reference values (dict) or is a sequence aligned
    with est.labels; ``ref_stderr`` optionally gives the reference's own
    uncertainty, combined in quadrature.  Standard errors are floored at
    1/total so zero-count cells never divide by zero.
    """
    if isinstance(ref, dict):
        if set(ref) != set(est.labels):
            raise IncompatibleTablesError("reference labels do not match estimate labels")
        ref_vals = [ref[lab] for lab in est.labels]
    else:
        ref_vals = list(ref)
        if len(ref_vals) != len(est.labels):
            raise IncompatibleTablesError("reference length does not match estimate labels")
    if ref_stderr is None:
        ref_se = [0.0] * len(ref_vals)
    elif isinstance(ref_stderr, dict):
        ref_se = [ref_stderr.get(lab, 0.0) for lab in est.labels]
    else:
        ref_se = list(ref_stderr)
    n = est.total
    floor = 1.0 / n if n else 1.0
    combined = [math.sqrt(se * se + rse * rse) for se, rse in zip(est.stderrs, ref_se)]
    return compare_values(est.labels, est.proportions, combined, ref_vals, k, floor)


def chi_square_uniform(counts) -> tuple:
    """Pearson statistic of observed counts against the uniform null.

    Returns (statistic, degrees of freedom).  Requires at least two cells
    and expected count >= 5 per cell.
    """
    counts = [int(c) for c in counts]
    cells = len(counts)
    if cells < 2:
        raise ValueError("need at least 2 cells")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be nonnegative")
    total = sum(counts)
    expected = total / cells
    if expected < 5:
        raise TooFewSamplesError(
            f"expected count {expected:.2f} per cell below 5; draw more samples"
        )
    stat = sum((c - expected) ** 2 for c in counts) / expected
    return stat, cells - 1


#: upper 1% critical values of the chi-square distribution, df = 1..32
CHI2_CRITICAL_01 = {
    1: 6.635, 2: 9.210, 3: 11.345, 4: 13.277, 5: 15.086, 6: 16.812,
    7: 18.475, 8: 20.090, 9: 21.666, 10: 23.209, 11: 24.725, 12: 26.217,
    13: 27.688, 14: 29.141, 15: 30.578, 16: 32.000, 17: 33.409, 18: 34.805,
    19: 36.191, 20: 37.566, 21: 38.932, 22: 40.289, 23: 41.638, 24: 42.980,
    25: 44.314, 26: 45.642, 27: 46.963, 28: 48.278, 29: 49.588, 30: 50.892,
    31: 52.191, 32: 53.486,
}

_Z_99 = 2.3263478740408408  # standard normal 99th percentile


def chi_square_critical(df: int, significance: float = 0.01) -> float:
    """Critical value at the given significance (only 0.01 is supported).

    Values for df <= 32 come from the embedded table; larger df use the
    Wilson-Hilferty cube approximation, accurate to well under 1% there.
    """
    if significance != 0.01:
        raise ValueError("only significance 0.01 is shipped")
    if df < 1:
        raise ValueError("df must be >= 1")
    if df <= 32:
        return CHI2_CRITICAL_01[df]
    h = 2.0 / (9.0 * df)
    return df * (1.0 - h + _Z_99 * math.sqrt(h)) ** 3
