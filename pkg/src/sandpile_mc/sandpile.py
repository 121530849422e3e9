"""Height configurations on the wired box: toppling, the grain chain, recurrence.

A configuration assigns a nonnegative particle count to every interior
vertex; it is stable when every count is below 2d.  An unstable vertex
topples by sending one particle along each of its 2d edges (sink edges
lose the particle), and stabilization repeats topplings until stable --
the final state does not depend on the order.  The grain-addition Markov
chain drops one particle at a uniformly random vertex and stabilizes;
its stationary law is uniform on the recurrent configurations, which the
burning test recognizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import BoxLattice, make_box
from .rng import SplitMix64
from .stats import EstimateTable


class ToppleError(ValueError):
    """Toppled a vertex whose height is below 2d."""


class NotStableError(ValueError):
    """Operation requires a stable configuration."""


@dataclass
class HeightConfig:
    box: BoxLattice
    heights: np.ndarray  # int64, one entry per interior vertex

    def copy(self) -> "HeightConfig":
        return HeightConfig(self.box, self.heights.copy())


def config_from(box: BoxLattice, heights) -> HeightConfig:
    arr = np.asarray(heights, dtype=np.int64).copy()
    if arr.shape != (box.interior_count,):
        raise ValueError(f"need {box.interior_count} heights, got shape {arr.shape}")
    if (arr < 0).any():
        raise ValueError("heights must be nonnegative")
    return HeightConfig(box, arr)


def all_max_stable(box: BoxLattice) -> HeightConfig:
    """The all-(2d-1) configuration; stable and recurrent, the chain's start."""
    return HeightConfig(box, np.full(box.interior_count, 2 * box.dim - 1, dtype=np.int64))


def is_stable(c: HeightConfig) -> bool:
    return bool((c.heights < 2 * c.box.dim).all())


def topple(c: HeightConfig, v: int) -> HeightConfig:
    """Topple one vertex once; particles sent to the sink are discarded."""
    threshold = 2 * c.box.dim
    if c.heights[v] < threshold:
        raise ToppleError(f"vertex {v} has height {c.heights[v]} < {threshold}")
    out = c.copy()
    out.heights[v] -= threshold
    for nb in c.box.interior_neighbors(v):
        out.heights[nb] += 1
    return out


_STABILIZE_CAP = 10**12  # bug trap only; termination is guaranteed on the wired box


def stabilize(c: HeightConfig, order_rng: SplitMix64 | None = None):
    """Carry out all topplings until stable; returns (config, odometer).

    The odometer counts topplings per vertex.  When ``order_rng`` is given
    the next vertex to process is picked at random from the pending queue,
    which only reorders work: the result is the same by the Abelian
    property (and tests rely on exactly that).
    """
    box = c.box
    threshold = 2 * box.dim
    heights = c.heights.copy()
    odometer = np.zeros(box.interior_count, dtype=np.int64)
    queue = [int(v) for v in np.nonzero(heights >= threshold)[0]]
    queued = set(queue)
    work = 0
    while queue:
        if order_rng is None:
            u = queue.pop()
        else:
            i = order_rng.next_below(len(queue))
            queue[i], queue[-1] = queue[-1], queue[i]
            u = queue.pop()
        queued.discard(u)
        times = heights[u] // threshold
        if times == 0:
            continue
        heights[u] -= times * threshold
        odometer[u] += times
        for nb in box.interior_neighbors(u):
            heights[nb] += times
            if heights[nb] >= threshold and nb not in queued:
                queue.append(nb)
                queued.add(nb)
        work += int(times)
        if work > _STABILIZE_CAP:
            raise RuntimeError("stabilization exceeded the internal toppling cap (bug)")
    return HeightConfig(box, heights), odometer


def mc_step(c: HeightConfig, rng: SplitMix64) -> HeightConfig:
    """One chain step: add a particle at a uniform vertex, then stabilize."""
    if not is_stable(c):
        raise NotStableError("chain steps start from a stable configuration")
    v = rng.next_below(c.box.interior_count)
    out = c.copy()
    out.heights[v] += 1
    stabilized, _ = stabilize(out)
    return stabilized


def is_recurrent(c: HeightConfig) -> bool:
    """Burning test: burn v once its height reaches 2d minus its burnt edges.

    Sink edges count as burnt from the start.  The configuration is
    recurrent iff the fire spreads to every vertex.
    """
    if not is_stable(c):
        raise NotStableError("burning test is defined for stable configurations")
    box = c.box
    threshold = 2 * box.dim
    burnt_edges = np.array(
        [box.sink_multiplicity(v) for v in range(box.interior_count)], dtype=np.int64
    )
    burnt = np.zeros(box.interior_count, dtype=bool)
    stack = [v for v in range(box.interior_count) if c.heights[v] >= threshold - burnt_edges[v]]
    for v in stack:
        burnt[v] = True
    while stack:
        u = stack.pop()
        for nb in box.interior_neighbors(u):
            if burnt[nb]:
                continue
            burnt_edges[nb] += 1
            if c.heights[nb] >= threshold - burnt_edges[nb]:
                burnt[nb] = True
                stack.append(nb)
    return bool(burnt.all())


def default_burn_in(box: BoxLattice) -> int:
    """10 * interior_count * 2d chain steps; conservative for boxes in scope."""
    return 10 * box.interior_count * 2 * box.dim


def default_thin(box: BoxLattice) -> int:
    """interior_count chain steps between recorded samples."""
    return box.interior_count


def sample_heights(
    d: int,
    L: int,
    burn_in: int | None,
    thin: int | None,
    n: int,
    rng: SplitMix64,
) -> EstimateTable:
    """Tally the origin's height over the stationary grain-addition chain.

    Runs the chain from the all-(2d-1) configuration (already recurrent, so
    burn-in only has to mix within the recurrent class), discards
    ``burn_in`` steps, then records the origin height every ``thin`` steps,
    ``n`` times.
    """
    box = make_box(d, L)
    if burn_in is None:
        burn_in = default_burn_in(box)
    if thin is None:
        thin = default_thin(box)
    if burn_in < 0 or thin < 1 or n < 1:
        raise ValueError("need burn_in >= 0, thin >= 1, n >= 1")
    from . import _kernels

    counts, state = _kernels.chain_counts(d, L, burn_in, thin, n, np.uint64(rng.state))
    rng.state = int(state)
    return EstimateTable(
        labels=tuple(range(2 * d)),
        counts=tuple(int(x) for x in counts),
        metadata={"kind": "heights", "dim": d, "radius": L, "burn_in": burn_in, "thin": thin},
    )


def _chain_counts_pure(d, L, burn_in, thin, n, rng: SplitMix64):
    """Reference chain, step-for-step comparable with the compiled kernel."""
    box = make_box(d, L)
    c = all_max_stable(box)
    center = box.origin_index()
    counts = [0] * (2 * d)
    for _ in range(burn_in):
        c = mc_step(c, rng)
    for _ in range(n):
        for _ in range(thin):
            c = mc_step(c, rng)
        counts[int(c.heights[center])] += 1
    return counts
