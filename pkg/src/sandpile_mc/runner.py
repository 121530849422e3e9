"""Partition a sample budget across deterministic worker streams.

Worker k draws from stream k of the run seed; partial tables merge by
count addition in stream order, so the final table depends only on
(seed, workers), never on scheduling.  Workers run on threads: the
compiled kernels release the GIL.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from .rng import SplitMix64
from .stats import EstimateTable, merge


def partition(total: int, workers: int) -> list[int]:
    """Split a sample count into near-equal positive chunks."""
    if total < 1 or workers < 1:
        raise ValueError("need total >= 1 and workers >= 1")
    workers = min(workers, total)
    base, extra = divmod(total, workers)
    return [base + (1 if k < extra else 0) for k in range(workers)]


def run_partitioned(task, samples: int, seed: int, workers: int = 1) -> EstimateTable:
    """Run ``task(samples_k, rng_k)`` once per stream and merge the tables.

    ``task`` must return an EstimateTable whose metadata does not depend on
    the stream.  The merge happens in stream order.
    """
    chunks = partition(samples, workers)
    rngs = [SplitMix64.from_seed(seed, stream=k) for k in range(len(chunks))]
    if len(chunks) == 1:
        tables = [task(chunks[0], rngs[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(task, c, r) for c, r in zip(chunks, rngs)]
            tables = [f.result() for f in futures]
    out = tables[0]
    for t in tables[1:]:
        out = merge(out, t)
    out.metadata["seed"] = seed
    return out
