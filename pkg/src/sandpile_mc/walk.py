"""Simple random walk on Z^d, chronological loop-erasure, return estimators.

Walk positions are plain coordinate tuples; nothing about the infinite
lattice is ever materialized, so dimension 32 costs the same per step as
dimension 2.  Loop-erasure follows the chronological rule: trace the path,
and at the first revisit of an earlier vertex delete the whole loop,
then continue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Point, direction_step, origin
from .rng import SplitMix64
from .stats import EstimateTable


class MalformedPathError(ValueError):
    """Consecutive path vertices are not lattice neighbors."""


@dataclass(frozen=True)
class HitSet:
    """Stop when the walk is at a vertex of the set; reason 'hit'."""

    vertices: frozenset


@dataclass(frozen=True)
class ExitRadius:
    """Stop when the sup-norm reaches the radius; reason 'escaped'."""

    radius: int


@dataclass(frozen=True)
class FixedLength:
    """Stop after exactly this many steps; reason 'capped'."""

    steps: int


def sup_norm(p: Point) -> int:
    return max(abs(c) for c in p)


def _rule_fires(stop, point: Point, steps_taken: int) -> str | None:
    if isinstance(stop, HitSet):
        return "hit" if point in stop.vertices else None
    if isinstance(stop, ExitRadius):
        return "escaped" if sup_norm(point) >= stop.radius else None
    if isinstance(stop, FixedLength):
        return "capped" if steps_taken >= stop.steps else None
    raise TypeError(f"unknown stopping rule {stop!r}")


def run_srw(start: Point, stop, max_steps: int, rng: SplitMix64):
    """Run a simple random walk until the stopping rule fires.

    Each step is uniform over the 2d unit directions.  Returns the full
    path (starting at `start`) and the termination reason: 'hit' or
    'escaped' set by the rule, 'capped' when max_steps (or a FixedLength
    rule) ended the walk first.  The rule is checked at every time
    including 0.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    d = len(start)
    path = [tuple(start)]
    pos = list(start)
    steps = 0
    while True:
        reason = _rule_fires(stop, tuple(pos), steps)
        if reason is not None:
            return path, reason
        if steps >= max_steps:
            return path, "capped"
        direction = rng.next_below(2 * d)
        axis = direction >> 1
        pos[axis] += 1 if (direction & 1) == 0 else -1
        steps += 1
        path.append(tuple(pos))


def loop_erase(path) -> list:
    """Chronological loop-erasure of a lattice path.

    Scans the path once; whenever the current vertex was already kept, the
    loop since its earlier occurrence is deleted.  The result is
    self-avoiding and keeps the original endpoints.
    """
    if not path:
        raise MalformedPathError("empty path")
    d = len(path[0])
    for a, b in zip(path, path[1:]):
        if len(b) != d or sum(abs(x - y) for x, y in zip(a, b)) != 1:
            raise MalformedPathError(f"{a} -> {b} is not a lattice step")
    kept = [path[0]]
    position = {path[0]: 0}
    for v in path[1:]:
        if v in position:
            # delete the loop [v ... v]; later entries fall off the stack
            cut = position[v]
            for u in kept[cut + 1:]:
                del position[u]
            del kept[cut + 1:]
        else:
            position[v] = len(kept)
            kept.append(v)
    return kept


def fourier_bound(d: int, n: int) -> float:
    """The (pi*d/(4n))^{d/2} dominating bound on n-step return probability.

    Evaluated as exp((d/2)(ln pi + ln d - ln 4 - ln n)) so it neither
    overflows nor underflows at large d.
    """
    if d < 1 or n < 1:
        raise ValueError("d and n must be >= 1")
    return math.exp(0.5 * d * (math.log(math.pi) + math.log(d) - math.log(4.0) - math.log(n)))


def _return_window_pure(d: int, n_min: int, horizon: int, samples: int, rng: SplitMix64) -> int:
    """Reference implementation of the windowed-return counter."""
    hits = 0
    for _ in range(samples):
        pos = [0] * d
        nonzero = 0
        for step in range(1, horizon + 1):
            direction = rng.next_below(2 * d)
            axis = direction >> 1
            old = pos[axis]
            new = old + (1 if (direction & 1) == 0 else -1)
            pos[axis] = new
            nonzero += (new != 0) - (old != 0)
            if nonzero == 0 and step >= n_min:
                hits += 1
                break
    return hits


def estimate_return(d: int, n_min: int, horizon: int, samples: int, rng: SplitMix64) -> EstimateTable:
    """Monte Carlo estimate of P[walk returns to the origin in [n_min, horizon]].

    A lower bound on the untruncated return event; the horizon is recorded
    in the metadata so the truncation is auditable.  Labels: 1 = returned
    within the window, 0 = did not.
    """
    if n_min not in (2, 4):
        raise ValueError(f"n_min must be 2 or 4, got {n_min}")
    if horizon < n_min:
        raise ValueError("horizon must be >= n_min")
    if samples < 1 or d < 1:
        raise ValueError("need samples >= 1 and d >= 1")
    from . import _kernels

    hits, state = _kernels.return_window(d, n_min, horizon, samples, np.uint64(rng.state))
    rng.state = int(state)
    return EstimateTable(
        labels=(0, 1),
        counts=(samples - int(hits), int(hits)),
        metadata={"kind": "rw-return", "dim": d, "n_min": n_min, "horizon": horizon},
    )


def return_frequency_at(d: int, n: int, samples: int, rng: SplitMix64) -> EstimateTable:
    """Empirical frequency of the walk being back at the origin at step n."""
    if d < 1 or n < 1 or samples < 1:
        raise ValueError("d, n and samples must be >= 1")
    from . import _kernels

    hits, state = _kernels.return_at(d, n, samples, np.uint64(rng.state))
    rng.state = int(state)
    return EstimateTable(
        labels=(0, 1),
        counts=(samples - int(hits), int(hits)),
        metadata={"kind": "rw-return-at", "dim": d, "n": n},
    )
