"""Wilson's algorithm on the wired box and a truncated rooted-at-infinity variant.

Finite mode samples a uniform spanning tree of the box oriented toward the
sink by attaching loop-erased walks vertex by vertex.  Infinite mode builds
only the local piece of the uniform spanning forest around the origin in
d >= 3: a walk from the origin is loop-erased to get its path toward
infinity, truncated at a kill radius; each neighbor's walk then runs until
it merges into the existing forest or leaves the same ball (treated as
escape to infinity).  The statistic of interest is how many of the 2d
lattice neighbors have their forest path pass through the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import BoxLattice, InvalidVertexError, make_box, origin
from .rng import SplitMix64
from .stats import EstimateTable
from .walk import loop_erase, sup_norm


@dataclass
class OrientedForest:
    """Parent-pointer spanning structure oriented toward the sink."""

    box: BoxLattice
    parent: np.ndarray  # int64, length interior_count + 1; parent[sink] = -1

    def in_forest(self, v: int) -> bool:
        return 0 <= v <= self.box.interior_count


def wilson_box(box: BoxLattice, rng: SplitMix64, order=None) -> OrientedForest:
    """Sample a uniform spanning tree of the wired box, rooted at the sink.

    Vertices are processed in ``order`` (ids, default 0..N-1); from each
    vertex not yet in the tree a walk runs until it hits the tree and its
    loop-erasure is attached.  The sampled distribution does not depend on
    the order.
    """
    n = box.interior_count
    two_d = 2 * box.dim
    in_tree = np.zeros(n + 1, dtype=bool)
    in_tree[box.sink] = True
    parent = np.full(n + 1, -1, dtype=np.int64)
    for v0 in range(n) if order is None else order:
        if in_tree[v0]:
            continue
        path = [v0]
        cur = v0
        while not in_tree[cur]:
            cur = box.neighbor_or_sink(cur, rng.next_below(two_d))
            path.append(cur)
        erased = _loop_erase_ids(path)
        for a, b in zip(erased, erased[1:]):
            parent[a] = b
            in_tree[a] = True
    return OrientedForest(box, parent)


def _loop_erase_ids(path):
    """Chronological loop-erasure on hashable vertex ids."""
    kept = [path[0]]
    position = {path[0]: 0}
    for v in path[1:]:
        if v in position:
            cut = position[v]
            for u in kept[cut + 1:]:
                del position[u]
            del kept[cut + 1:]
        else:
            position[v] = len(kept)
            kept.append(v)
    return kept


def path_to_root(f: OrientedForest, v: int):
    """The parent-pointer path from v (inclusive) to the sink."""
    if not 0 <= v <= f.box.interior_count:
        raise InvalidVertexError(f"vertex {v} not in the forest")
    path = [v]
    while path[-1] != f.box.sink:
        path.append(int(f.parent[path[-1]]))
    return path


def w_degree(f: OrientedForest, box: BoxLattice) -> int:
    """Number of lattice neighbors of the origin whose path passes the origin.

    Neighbors merged into the sink never count, and the neighbor the
    origin's own path steps to first cannot count, so the result is at
    most 2d - 1.
    """
    o = box.origin_index()
    deg = 0
    for k in range(2 * box.dim):
        nb = box.neighbor_or_sink(o, k)
        if nb == box.sink:
            continue
        cur = nb
        while cur != box.sink:
            if cur == o:
                deg += 1
                break
            cur = int(f.parent[cur])
    return deg


def estimate_q_finite(d: int, L: int, samples: int, rng: SplitMix64) -> EstimateTable:
    """Empirical distribution of w_degree over independent spanning trees."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    box = make_box(d, L)
    from . import _kernels

    counts, state = _kernels.wilson_degree_counts(d, L, samples, np.uint64(rng.state))
    rng.state = int(state)
    return EstimateTable(
        labels=tuple(range(2 * d)),
        counts=tuple(int(x) for x in counts),
        metadata={"kind": "w-degree-box", "dim": d, "radius": L},
    )


@dataclass(frozen=True)
class WDegreeSample:
    """One local-forest draw: the degree statistic plus a truncation flag."""

    degree: int
    truncated: bool


MAX_KILL_RADIUS = 120  # kernel stores coordinates as int8


def _check_infinite_args(d, kill_radius, max_steps):
    if d < 3:
        raise ValueError(f"rooted-at-infinity sampling needs d >= 3 (transience), got {d}")
    if not 2 <= kill_radius <= MAX_KILL_RADIUS:
        raise ValueError(f"kill_radius must be in 2..{MAX_KILL_RADIUS}, got {kill_radius}")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")


def wilson_local_infinite(d: int, kill_radius: int, max_steps: int, rng: SplitMix64) -> WDegreeSample:
    """One sample of the local forest picture at the origin (reference code).

    The origin's walk is loop-erased into its truncated path to infinity;
    each of the 2d neighbors (in +e1, -e1, ... order) then walks until it
    hits the forest or exits the sup-norm ball of the kill radius.  A walk
    stopped by max_steps is treated as escaped and flags the sample as
    truncated.
    """
    _check_infinite_args(d, kill_radius, max_steps)
    o = origin(d)
    forest: dict = {}
    truncated = False
    degree = 0
    for w in range(-1, 2 * d):
        if w < 0:
            start = o
        else:
            step = [0] * d
            step[w >> 1] = 1 if (w & 1) == 0 else -1
            start = tuple(step)
            if start in forest:
                degree += forest[start]
                continue
        status, path = _walk_until(start, forest, kill_radius, max_steps, rng)
        if status == "capped":
            truncated = True
        erased = loop_erase(path)
        if status == "hit":
            carry = forest[erased[-1]]
        else:
            carry = False
            forest[erased[-1]] = erased[-1] == o
        for p in reversed(erased[:-1]):
            if p == o:
                carry = True
            forest[p] = carry
        if w >= 0:
            degree += forest[start]
    return WDegreeSample(degree=degree, truncated=truncated)


def _walk_until(start, forest, kill_radius, max_steps, rng):
    """Walk until the forest is hit, the ball is exited, or the cap fires."""
    d = len(start)
    pos = list(start)
    path = [start]
    steps = 0
    while True:
        if steps >= max_steps:
            return "capped", path
        direction = rng.next_below(2 * d)
        axis = direction >> 1
        pos[axis] += 1 if (direction & 1) == 0 else -1
        steps += 1
        p = tuple(pos)
        path.append(p)
        if p in forest:
            return "hit", path
        if abs(pos[axis]) >= kill_radius:
            return "escaped", path


def estimate_q_infinite(
    d: int, kill_radius: int, max_steps: int, samples: int, rng: SplitMix64
) -> EstimateTable:
    """Aggregate w-degree counts from the truncated rooted-at-infinity sampler.

    Diagnostics report how walks terminated (escaped / hit / capped) and
    how many samples contained a capped walk; the capped fraction is the
    truncation-bias indicator that must stay tiny at the defaults.
    """
    _check_infinite_args(d, kill_radius, max_steps)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    from . import _kernels

    counts, truncated_samples, esc, hit, cap, state = _kernels.local_wilson_counts(
        d, kill_radius, max_steps, samples, np.uint64(rng.state)
    )
    rng.state = int(state)
    walks_total = int(esc) + int(hit) + int(cap)
    return EstimateTable(
        labels=tuple(range(2 * d)),
        counts=tuple(int(x) for x in counts),
        metadata={
            "kind": "w-degree-usf",
            "dim": d,
            "kill_radius": kill_radius,
            "max_steps": max_steps,
        },
        diagnostics={
            "samples_truncated": int(truncated_samples),
            "walks_total": walks_total,
            "walks_escaped": int(esc),
            "walks_hit": int(hit),
            "walks_capped": int(cap),
        },
    )
