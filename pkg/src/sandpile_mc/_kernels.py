"""Compiled Monte Carlo kernels (numba).

Every kernel consumes and returns an explicit SplitMix64 state and draws
bit-identically to ``rng.SplitMix64``, so the pure reference implementations
can be compared with the compiled paths draw for draw.  Kernels release the
GIL; the runner may execute independent streams on threads.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MAXU = np.uint64(0xFFFFFFFFFFFFFFFF)
_U0 = np.uint64(0)
_U1 = np.uint64(1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True, inline="always")
def _mix64(z):
    z ^= z >> _S30
    z *= _MIX1
    z ^= z >> _S27
    z *= _MIX2
    z ^= z >> _S31
    return z


@njit(cache=True, inline="always")
def _next_u64(state):
    state += _GOLDEN
    return _mix64(state), state


@njit(cache=True, inline="always")
def _next_below_rem(state, nn, rem):
    # rem = 2^64 mod nn, precomputed; rejection keeps the draw unbiased
    if rem == _U0:
        z, state = _next_u64(state)
        return np.int64(z % nn), state
    threshold = _U0 - rem
    while True:
        z, state = _next_u64(state)
        if z < threshold:
            return np.int64(z % nn), state


@njit(cache=True, inline="always")
def _rem_for(nn):
    return (_MAXU % nn + _U1) % nn


@njit(cache=True)
def rng_sequence(state_in, count):
    """Raw 64-bit draws; test hook for cross-checking the Python generator."""
    state = np.uint64(state_in)
    out = np.empty(count, np.uint64)
    for i in range(count):
        z, state = _next_u64(state)
        out[i] = z
    return out, state


@njit(cache=True)
def below_sequence(state_in, n, count):
    """Bounded draws in [0, n); test hook matching SplitMix64.next_below."""
    state = np.uint64(state_in)
    nn = np.uint64(n)
    rem = _rem_for(nn)
    out = np.empty(count, np.int64)
    for i in range(count):
        v, state = _next_below_rem(state, nn, rem)
        out[i] = v
    return out, state


# ---------------------------------------------------------------------------
# sandpile chain on the wired box


@njit(cache=True, nogil=True)
def chain_counts(d, L, burn_in, thin, n, state_in):
    """Origin-height tallies from the grain-addition chain.

    Starts from the all-(2d-1) configuration, runs burn_in steps, then
    records the origin height every ``thin`` steps, ``n`` times.  Avalanches
    use a FIFO queue with multi-topplings; the Abelian property makes the
    processing order irrelevant.
    """
    state = np.uint64(state_in)
    width = 2 * L + 1
    N = 1
    for _ in range(d):
        N *= width
    two_d = 2 * d
    strides = np.empty(d, np.int64)
    s = 1
    for a in range(d - 1, -1, -1):
        strides[a] = s
        s *= width
    heights = np.full(N, two_d - 1, np.int64)
    queue = np.empty(N + 1, np.int64)
    in_q = np.zeros(N, np.uint8)
    counts = np.zeros(two_d, np.int64)
    center = (N - 1) // 2
    nn = np.uint64(N)
    rem = _rem_for(nn)
    total_steps = burn_in + n * thin
    for i in range(total_steps):
        v, state = _next_below_rem(state, nn, rem)
        heights[v] += 1
        if heights[v] >= two_d and in_q[v] == 0:
            queue[0] = v
            in_q[v] = 1
            head = 0
            tail = 1
            while head != tail:
                u = queue[head]
                head += 1
                if head == N + 1:
                    head = 0
                in_q[u] = 0
                times = heights[u] // two_d
                if times == 0:
                    continue
                heights[u] -= times * two_d
                for a in range(d):
                    st = strides[a]
                    digit = (u // st) % width
                    if digit < width - 1:
                        nb = u + st
                        heights[nb] += times
                        if heights[nb] >= two_d and in_q[nb] == 0:
                            queue[tail] = nb
                            in_q[nb] = 1
                            tail += 1
                            if tail == N + 1:
                                tail = 0
                    if digit > 0:
                        nb = u - st
                        heights[nb] += times
                        if heights[nb] >= two_d and in_q[nb] == 0:
                            queue[tail] = nb
                            in_q[nb] = 1
                            tail += 1
                            if tail == N + 1:
                                tail = 0
        if i >= burn_in and (i - burn_in + 1) % thin == 0:
            counts[heights[center]] += 1
    return counts, state


# ---------------------------------------------------------------------------
# Wilson's algorithm on the wired box


@njit(cache=True, inline="always")
def _box_step(cur, direction, strides, width, sink, d):
    a = direction >> 1
    st = strides[a]
    digit = (cur // st) % width
    if (direction & 1) == 0:
        return cur + st if digit < width - 1 else sink
    return cur - st if digit > 0 else sink


@njit(cache=True, nogil=True)
def wilson_degree_counts(d, L, samples, state_in):
    """Counts of the origin's W-degree over independent spanning trees."""
    state = np.uint64(state_in)
    width = 2 * L + 1
    N = 1
    for _ in range(d):
        N *= width
    two_d = 2 * d
    sink = N
    strides = np.empty(d, np.int64)
    s = 1
    for a in range(d - 1, -1, -1):
        strides[a] = s
        s *= width
    next_idx = np.empty(N, np.int64)
    in_tree_st = np.zeros(N + 1, np.int64)
    parent = np.full(N + 1, -1, np.int64)
    toward_st = np.zeros(N + 1, np.int64)
    toward_val = np.zeros(N + 1, np.uint8)
    chain_buf = np.empty(N, np.int64)
    counts = np.zeros(two_d, np.int64)
    center = (N - 1) // 2
    nn = np.uint64(two_d)
    rem = _rem_for(nn)
    for smp in range(samples):
        epoch = smp + 1
        in_tree_st[sink] = epoch
        for v0 in range(N):
            if in_tree_st[v0] == epoch:
                continue
            cur = v0
            while in_tree_st[cur] != epoch:
                direction, state = _next_below_rem(state, nn, rem)
                nxt = _box_step(cur, direction, strides, width, sink, d)
                next_idx[cur] = nxt
                cur = nxt
            t = v0
            while in_tree_st[t] != epoch:
                parent[t] = next_idx[t]
                in_tree_st[t] = epoch
                t = next_idx[t]
        deg = 0
        for k in range(two_d):
            a = k >> 1
            st = strides[a]
            nb = center + st if (k & 1) == 0 else center - st
            c = nb
            m = 0
            val = np.uint8(0)
            while True:
                if c == center:
                    val = np.uint8(1)
                    break
                if c == sink:
                    val = np.uint8(0)
                    break
                if toward_st[c] == epoch:
                    val = toward_val[c]
                    break
                chain_buf[m] = c
                m += 1
                c = parent[c]
            for i in range(m):
                toward_st[chain_buf[i]] = epoch
                toward_val[chain_buf[i]] = val
            deg += val
        counts[deg] += 1
    return counts, state


@njit(cache=True, nogil=True)
def wilson_trees_batch(d, L, order, samples, state_in):
    """Parent arrays of sampled spanning trees (one row per tree).

    ``order`` is the vertex enumeration used by the algorithm.  Row entries
    are parents of interior vertices 0..N-1; the sink appears as N.
    Intended for small boxes (uniformity and exchange tests).
    """
    state = np.uint64(state_in)
    width = 2 * L + 1
    N = 1
    for _ in range(d):
        N *= width
    two_d = 2 * d
    sink = N
    strides = np.empty(d, np.int64)
    s = 1
    for a in range(d - 1, -1, -1):
        strides[a] = s
        s *= width
    next_idx = np.empty(N, np.int64)
    in_tree_st = np.zeros(N + 1, np.int64)
    out = np.empty((samples, N), np.int32)
    nn = np.uint64(two_d)
    rem = _rem_for(nn)
    for smp in range(samples):
        epoch = smp + 1
        in_tree_st[sink] = epoch
        for oi in range(N):
            v0 = order[oi]
            if in_tree_st[v0] == epoch:
                continue
            cur = v0
            while in_tree_st[cur] != epoch:
                direction, state = _next_below_rem(state, nn, rem)
                nxt = _box_step(cur, direction, strides, width, sink, d)
                next_idx[cur] = nxt
                cur = nxt
            t = v0
            while in_tree_st[t] != epoch:
                out[smp, t] = np.int32(next_idx[t])
                in_tree_st[t] = epoch
                t = next_idx[t]
    return out, state


# ---------------------------------------------------------------------------
# truncated rooted-at-infinity Wilson sampling

_TABLE_BITS = 18
_TABLE_SLOTS = 1 << _TABLE_BITS
_TABLE_MAX_POINTS = (_TABLE_SLOTS // 5) * 3
_FNV_OFFSET = np.uint64(1469598103934665603)
_FNV_PRIME = np.uint64(1099511628211)


@njit(cache=True, inline="always")
def _table_slot(coords_tab, stamp, epoch, cur, d, mask):
    """Find or claim the open-addressing slot of the current point.

    Returns (slot, inserted).  Slots are valid for one sample epoch only,
    so the table never needs clearing.
    """
    h = _FNV_OFFSET
    for k in range(d):
        h ^= np.uint64(cur[k] + 128)
        h *= _FNV_PRIME
    slot = np.int64(h & mask)
    while True:
        if stamp[slot] != epoch:
            stamp[slot] = epoch
            for k in range(d):
                coords_tab[slot, k] = np.int8(cur[k])
            return slot, True
        match = True
        for k in range(d):
            if coords_tab[slot, k] != cur[k]:
                match = False
                break
        if match:
            return slot, False
        slot += 1
        if slot == _TABLE_SLOTS:
            slot = 0


@njit(cache=True, nogil=True)
def local_wilson_counts(d, kill_radius, max_steps, samples, state_in):
    """W-degree counts from the local forest picture at the origin.

    Per sample: loop-erase a walk from the origin killed at the sup-norm
    ball of the kill radius, then attach each neighbor's walk when it hits
    the forest or exits the ball (escape to infinity).  Walks stopped by
    max_steps are treated as escapes and counted.  Successor overwriting
    realizes the chronological loop-erasure.
    """
    state = np.uint64(state_in)
    two_d = 2 * d
    mask = np.uint64(_TABLE_SLOTS - 1)
    coords_tab = np.zeros((_TABLE_SLOTS, d), np.int8)
    stamp = np.zeros(_TABLE_SLOTS, np.int64)
    forest_stamp = np.zeros(_TABLE_SLOTS, np.int64)
    to_o = np.zeros(_TABLE_SLOTS, np.uint8)
    succ = np.zeros(_TABLE_SLOTS, np.int32)
    seq = np.empty(_TABLE_SLOTS, np.int32)
    cur = np.empty(d, np.int64)
    counts = np.zeros(two_d, np.int64)
    truncated_samples = 0
    walks_escaped = 0
    walks_hit = 0
    walks_capped = 0
    nn = np.uint64(two_d)
    rem = _rem_for(nn)
    for smp in range(samples):
        epoch = smp + 1
        used = 0
        for k in range(d):
            cur[k] = 0
        o_slot, ins = _table_slot(coords_tab, stamp, epoch, cur, d, mask)
        used += 1
        truncated = False
        deg = 0
        for w in range(-1, two_d):
            for k in range(d):
                cur[k] = 0
            if w < 0:
                start_slot = o_slot
            else:
                cur[w >> 1] = 1 if (w & 1) == 0 else -1
                start_slot, ins = _table_slot(coords_tab, stamp, epoch, cur, d, mask)
                if ins:
                    used += 1
                if forest_stamp[start_slot] == epoch:
                    deg += to_o[start_slot]
                    continue
            cur_slot = start_slot
            steps = 0
            status = 0  # 0 hit, 1 escaped, 2 capped
            while True:
                if steps >= max_steps:
                    status = 2
                    break
                direction, state = _next_below_rem(state, nn, rem)
                axis = direction >> 1
                if (direction & 1) == 0:
                    cur[axis] += 1
                else:
                    cur[axis] -= 1
                steps += 1
                nxt_slot, ins = _table_slot(coords_tab, stamp, epoch, cur, d, mask)
                if ins:
                    used += 1
                    if used > _TABLE_MAX_POINTS:
                        raise RuntimeError(
                            "local forest table overflow; lower kill radius or max steps"
                        )
                succ[cur_slot] = np.int32(nxt_slot)
                cur_slot = nxt_slot
                if forest_stamp[nxt_slot] == epoch:
                    status = 0
                    break
                if cur[axis] >= kill_radius or cur[axis] <= -kill_radius:
                    status = 1
                    break
            end_slot = cur_slot
            if status == 0:
                walks_hit += 1
            elif status == 1:
                walks_escaped += 1
            else:
                walks_capped += 1
                truncated = True
            n_seq = 0
            t = start_slot
            while t != end_slot:
                seq[n_seq] = np.int32(t)
                n_seq += 1
                t = succ[t]
            if status == 0:
                carry = to_o[end_slot]
            else:
                carry = np.uint8(1) if end_slot == o_slot else np.uint8(0)
                forest_stamp[end_slot] = epoch
                to_o[end_slot] = carry
            for i in range(n_seq - 1, -1, -1):
                sl = seq[i]
                if sl == o_slot:
                    carry = np.uint8(1)
                forest_stamp[sl] = epoch
                to_o[sl] = carry
            if w >= 0:
                deg += to_o[start_slot]
        counts[deg] += 1
        if truncated:
            truncated_samples += 1
    return counts, truncated_samples, walks_escaped, walks_hit, walks_capped, state


# ---------------------------------------------------------------------------
# random walk return estimators


@njit(cache=True, nogil=True)
def return_window(d, n_min, horizon, samples, state_in):
    """Count walks that revisit the origin at some step in [n_min, horizon]."""
    state = np.uint64(state_in)
    two_d = 2 * d
    nn = np.uint64(two_d)
    rem = _rem_for(nn)
    pos = np.zeros(d, np.int64)
    hits = 0
    for _ in range(samples):
        for k in range(d):
            pos[k] = 0
        nonzero = 0
        for step in range(1, horizon + 1):
            direction, state = _next_below_rem(state, nn, rem)
            axis = direction >> 1
            old = pos[axis]
            new = old + 1 if (direction & 1) == 0 else old - 1
            pos[axis] = new
            if old == 0:
                nonzero += 1
            elif new == 0:
                nonzero -= 1
            if nonzero == 0 and step >= n_min:
                hits += 1
                break
    return hits, state


@njit(cache=True, nogil=True)
def return_at(d, n, samples, state_in):
    """Count walks located at the origin after exactly n steps."""
    state = np.uint64(state_in)
    two_d = 2 * d
    nn = np.uint64(two_d)
    rem = _rem_for(nn)
    pos = np.zeros(d, np.int64)
    hits = 0
    for _ in range(samples):
        for k in range(d):
            pos[k] = 0
        nonzero = 0
        for _step in range(n):
            direction, state = _next_below_rem(state, nn, rem)
            axis = direction >> 1
            old = pos[axis]
            new = old + 1 if (direction & 1) == 0 else old - 1
            pos[axis] = new
            if old == 0:
                nonzero += 1
            elif new == 0:
                nonzero -= 1
        if nonzero == 0:
            hits += 1
    return hits, state
