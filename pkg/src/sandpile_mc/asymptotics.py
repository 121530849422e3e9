"""Closed-form evaluators for the height and neighbor-degree distributions.

The large-dimension form of the single-site height law is a cumulative sum
of Poisson(1) weights with per-term denominators 2d-j, constant (a plateau)
above sqrt(d).  The exact finite-volume identity p(i) = sum_{j<=i} q(j)/(2d-j)
converts any neighbor-degree distribution q into a height distribution p.
A Bethe-lattice closed form is included for comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .stats import EstimateTable


class OutOfRangeError(ValueError):
    """Index or dimension outside the domain of a closed-form evaluator."""


def poisson_weight(j: int) -> float:
    """Poisson(1) probability e^{-1}/j!, evaluated in log space for large j."""
    if j < 0:
        raise OutOfRangeError(f"j must be >= 0, got {j}")
    if j <= 20:
        return math.exp(-1.0) / math.factorial(j)
    return math.exp(-1.0 - math.lgamma(j + 1))


def height_plateau_index(d: int) -> int:
    """Index floor(sqrt(d)) above which the asymptotic height law is flat."""
    return math.isqrt(d)


def formula_p(d: int, i: int, variant: str = "exact-sum") -> float:
    """Asymptotic height probability at the origin in dimension d.

    For i <= sqrt(d) this is sum_{j=0}^{i} e^{-1}/j! / (2d-j); above sqrt(d)
    the value plateaus at i = floor(sqrt(d)).  The 'leading' variant replaces
    every denominator by 2d.  Neglected corrections are O(i/d^2) below the
    plateau and O(d^{-3/2}) on it; see formula_error_order.
    """
    if d < 1:
        raise OutOfRangeError(f"dimension must be >= 1, got {d}")
    if i < 0 or i >= 2 * d:
        raise OutOfRangeError(f"height {i} outside 0..{2 * d - 1}")
    if variant not in ("exact-sum", "leading"):
        raise ValueError(f"unknown variant {variant!r}")
    i_eff = min(i, height_plateau_index(d))
    if variant == "exact-sum":
        return sum(poisson_weight(j) / (2 * d - j) for j in range(i_eff + 1))
    return sum(poisson_weight(j) for j in range(i_eff + 1)) / (2 * d)


def formula_error_order(d: int, i: int) -> str:
    """Symbolic order of the correction term dropped by formula_p."""
    return "O(i/d^2)" if i <= height_plateau_index(d) else "O(d^-3/2)"


def bethe_p(d: int, i: int) -> float:
    """Single-site height law on the degree-d Bethe lattice, taken verbatim.

    Evaluates [1/((d^2-1) d^d)] * sum_{j=0}^{i} C(d+1,j) (d-1)^{d-j+1} with
    each summand computed in log space.  Summed over i = 0..d-1 the printed
    form does not total 1 (136/216 at d=3); it is reported as printed, never
    renormalized, and the total mass is surfaced in table metadata.
    """
    if d < 2:
        raise OutOfRangeError(f"Bethe formula needs degree >= 2, got {d}")
    if i < 0:
        raise OutOfRangeError(f"height must be >= 0, got {i}")
    log_norm = math.log(d * d - 1) + d * math.log(d)
    acc = 0.0
    for j in range(min(i, d + 1) + 1):  # C(d+1, j) vanishes beyond j = d+1
        log_term = (
            math.lgamma(d + 2)
            - math.lgamma(j + 1)
            - math.lgamma(d + 2 - j)
            + (d - j + 1) * math.log(d - 1)
            - log_norm
        )
        acc += math.exp(log_term)
    return acc


@dataclass
class FormulaTable:
    """Closed-form (or derived) values per height index.

    ``stderr`` is populated when the values were derived from Monte Carlo
    estimates (the p-from-q route) and is None for exact formulas.
    """

    dim: int
    values: dict
    variant: str
    stderr: dict | None = None
    metadata: dict = field(default_factory=dict)

    def value(self, i: int) -> float:
        return self.values[i]


def formula_table(d: int, max_i: int, variant: str = "exact-sum") -> FormulaTable:
    """Tabulate formula_p for i = 0..max_i with its error-order metadata."""
    values = {i: formula_p(d, i, variant) for i in range(max_i + 1)}
    meta = {
        "plateau_index": height_plateau_index(d),
        "error_order_below_plateau": "O(i/d^2)",
        "error_order_on_plateau": "O(d^-3/2)",
    }
    name = "thm1-exact-sum" if variant == "exact-sum" else "thm1-leading"
    return FormulaTable(dim=d, values=values, variant=name, metadata=meta)


def bethe_table(d: int, max_i: int) -> FormulaTable:
    """Tabulate the Bethe-lattice law; metadata flags its total mass."""
    values = {i: bethe_p(d, i) for i in range(max_i + 1)}
    total_mass = sum(bethe_p(d, i) for i in range(d))
    meta = {
        "total_mass_i_0_to_dm1": total_mass,
        "note": "formula reported verbatim; it does not normalize to 1",
    }
    return FormulaTable(dim=d, values=values, variant="bethe", metadata=meta)


def p_from_q(q, d: int) -> FormulaTable:
    """Height law from a neighbor-degree law via p(i) = sum_{j<=i} q(j)/(2d-j).

    ``q`` is either an EstimateTable over degrees 0..2d-1 (standard errors
    propagate in quadrature) or a plain sequence of 2d nonnegative reals.
    When q sums to 1 the returned values telescope to total 1.
    """
    if d < 1:
        raise OutOfRangeError(f"dimension must be >= 1, got {d}")
    if isinstance(q, EstimateTable):
        q_vals = list(q.proportions)
        q_errs = list(q.stderrs)
    else:
        q_vals = [float(x) for x in q]
        q_errs = None
    if len(q_vals) != 2 * d:
        raise ValueError(f"q must have {2 * d} entries, got {len(q_vals)}")
    if any(x < 0 for x in q_vals):
        raise ValueError("q entries must be nonnegative")
    values, errors = {}, {}
    acc = 0.0
    var = 0.0
    for i in range(2 * d):
        w = 1.0 / (2 * d - i)
        acc += q_vals[i] * w
        values[i] = acc
        if q_errs is not None:
            var += (q_errs[i] * w) ** 2
            errors[i] = math.sqrt(var)
    return FormulaTable(
        dim=d,
        values=values,
        variant="p-from-q",
        stderr=errors if q_errs is not None else None,
    )
