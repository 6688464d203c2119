"""Numba kernels: union-find event evaluation and the Monte Carlo trial loop.

Event kinds are encoded as small integers so one kernel serves every
experiment:

    0  crossing(seg_a, seg_b)
    1  triple_connection(seg_1, seg_2, seg_3)
    2  center_to_shell          (param = center vertex, seg_1 = shell)
    3  majority                 (param = threshold; open count > threshold)
    4  contains_element         (param = element index)

Events are evaluated directly on a trial's color array: element ``e`` is
open for an event when bit ``colors[e]`` of the event's mask is set.  The
trial loop is blocked: block ``b`` of an experiment owns the counter-based
stream ``(master_seed, b)`` and accumulates integer hit counts into its own
row, so the merged totals are identical for any worker count.

Color sampling consumes the stream in one of two documented ways: uniform
power-of-two alphabets slice ``64 // bits`` colors out of each 64-bit draw;
every other distribution spends one draw per element and scans the
cumulative weights.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .rng import next_u64, stream_state, u64_to_unit

BLOCK_SIZE = 16384

KIND_CROSSING = 0
KIND_TRIPLE = 1
KIND_CENTER_SHELL = 2
KIND_MAJORITY = 3
KIND_CONTAINS = 4

MODE_BOND = 0
MODE_SITE = 1


@njit(cache=True)
def fill_colors_packed(state, colors, bits):
    """Uniform colors over a 2**bits alphabet, 64//bits colors per draw."""
    per = 64 // bits
    lo = np.uint64((1 << bits) - 1)
    n = len(colors)
    i = 0
    while i < n:
        state, x = next_u64(state)
        k = 0
        while k < per and i < n:
            colors[i] = np.uint8(x & lo)
            x >>= np.uint64(bits)
            i += 1
            k += 1
    return state


@njit(cache=True)
def fill_colors_scan(state, colors, cum_weights):
    """General weights: one draw per element, scan cumulative weights."""
    m = len(cum_weights)
    for i in range(len(colors)):
        state, x = next_u64(state)
        u = u64_to_unit(x)
        c = m - 1
        for k in range(m - 1):
            if u < cum_weights[k]:
                c = k
                break
        colors[i] = c
    return state


@njit(cache=True)
def _find(parent, x):
    # path halving
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def _union(parent, size, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]


@njit(cache=True)
def _reset(parent, size, n):
    for i in range(n):
        parent[i] = i
        size[i] = 1


@njit(cache=True)
def eval_event(kind, mode, num_vertices, edges, indptr, indices,
               colors, mb, param, seg1, seg2, seg3, parent, size, flags):
    """Evaluate one event on one coloring under mask bits ``mb``.

    ``parent``/``size``/``flags`` are caller-owned scratch of length
    num_vertices + 2 (the two extra slots are virtual terminals).
    """
    one = np.uint8(1)

    if kind == KIND_MAJORITY:
        cnt = 0
        for e in range(len(colors)):
            cnt += (mb >> colors[e]) & one
        return cnt > param

    if kind == KIND_CONTAINS:
        return ((mb >> colors[param]) & one) != 0

    va = num_vertices
    vb = num_vertices + 1
    _reset(parent, size, num_vertices + 2)

    if kind == KIND_CROSSING:
        if mode == MODE_BOND:
            for i in range(len(seg1)):
                _union(parent, size, seg1[i], va)
            for i in range(len(seg2)):
                _union(parent, size, seg2[i], vb)
            for e in range(len(edges)):
                if (mb >> colors[e]) & one:
                    _union(parent, size, edges[e, 0], edges[e, 1])
        else:
            any_a = False
            for i in range(len(seg1)):
                if (mb >> colors[seg1[i]]) & one:
                    _union(parent, size, seg1[i], va)
                    any_a = True
            if not any_a:
                return False
            any_b = False
            for i in range(len(seg2)):
                if (mb >> colors[seg2[i]]) & one:
                    _union(parent, size, seg2[i], vb)
                    any_b = True
            if not any_b:
                return False
            _union_open_sites(parent, size, indptr, indices, colors, mb)
        return _find(parent, va) == _find(parent, vb)

    if kind == KIND_CENTER_SHELL:
        if mode == MODE_BOND:
            for i in range(len(seg1)):
                _union(parent, size, seg1[i], va)
            for e in range(len(edges)):
                if (mb >> colors[e]) & one:
                    _union(parent, size, edges[e, 0], edges[e, 1])
        else:
            if not (mb >> colors[param]) & one:
                return False
            any_shell = False
            for i in range(len(seg1)):
                if (mb >> colors[seg1[i]]) & one:
                    _union(parent, size, seg1[i], va)
                    any_shell = True
            if not any_shell:
                return False
            _union_open_sites(parent, size, indptr, indices, colors, mb)
        return _find(parent, param) == _find(parent, va)

    # triple connection: some open site joined to all three segments
    # (site mode only; segment sites count when they are themselves open)
    _union_open_sites(parent, size, indptr, indices, colors, mb)
    for i in range(num_vertices):
        flags[i] = 0
    for i in range(len(seg1)):
        if (mb >> colors[seg1[i]]) & one:
            flags[_find(parent, seg1[i])] |= 1
    for i in range(len(seg2)):
        if (mb >> colors[seg2[i]]) & one:
            flags[_find(parent, seg2[i])] |= 2
    for i in range(len(seg3)):
        if (mb >> colors[seg3[i]]) & one:
            if flags[_find(parent, seg3[i])] & 3 == 3:
                return True
    return False


@njit(cache=True)
def _union_open_sites(parent, size, indptr, indices, colors, mb):
    one = np.uint8(1)
    for s in range(len(indptr) - 1):
        if (mb >> colors[s]) & one:
            for k in range(indptr[s], indptr[s + 1]):
                t = indices[k]
                if t > s and (mb >> colors[t]) & one:
                    _union(parent, size, s, t)


@njit(cache=True)
def build_event_table(kind, mode, num_vertices, num_elements,
                      edges, indptr, indices, param, seg1, seg2, seg3):
    """Membership of the event over all 2**num_elements subsets.

    Used by the exact-enumeration module; num_elements must be small.
    Subsets are fed through the color path as 0/1 colorings under mask
    {1}, which makes "open" mean "bit set".
    """
    n = num_elements
    out = np.zeros(1 << n, dtype=np.bool_)
    colors = np.empty(n, dtype=np.uint8)
    parent = np.empty(num_vertices + 2, dtype=np.int32)
    size = np.empty(num_vertices + 2, dtype=np.int32)
    flags = np.empty(num_vertices + 2, dtype=np.uint8)
    mb = np.uint8(2)  # open iff color == 1
    for bits in range(1 << n):
        for e in range(n):
            colors[e] = (bits >> e) & 1
        out[bits] = eval_event(kind, mode, num_vertices, edges, indptr, indices,
                               colors, mb, param, seg1, seg2, seg3,
                               parent, size, flags)
    return out


@njit(cache=True, parallel=True)
def run_blocks(n_trials, master_seed, stream_offset,
               mode, num_vertices, num_elements,
               edges, indptr, indices,
               kinds, mask_bits, params, seg_ptr, seg_data,
               cum_weights, packed_bits, full_eval):
    """Monte Carlo trial loop over blocks.

    ``kinds``/``mask_bits``/``params`` describe one event each;
    ``seg_ptr[i]`` gives four offsets into ``seg_data`` delimiting the
    event's up-to-three segments.  ``packed_bits`` > 0 selects the packed
    uniform sampler for a 2**packed_bits alphabet.

    Returns (prefix, singles): per-block counts of trials on which events
    0..j all hold (prefix[:, j]) and on which event j holds alone
    (singles[:, j]).  With ``full_eval == 0`` the loop exits at the first
    failing event and ``singles`` is only valid for evaluated prefixes.
    """
    n_events = len(kinds)
    n_blocks = (n_trials + BLOCK_SIZE - 1) // BLOCK_SIZE
    prefix = np.zeros((n_blocks, n_events), dtype=np.int64)
    singles = np.zeros((n_blocks, n_events), dtype=np.int64)
    for b in prange(n_blocks):
        state = stream_state(np.uint64(master_seed), np.uint64(stream_offset + b))
        lo = b * BLOCK_SIZE
        hi = min(n_trials, lo + BLOCK_SIZE)
        colors = np.empty(num_elements, dtype=np.uint8)
        parent = np.empty(num_vertices + 2, dtype=np.int32)
        size = np.empty(num_vertices + 2, dtype=np.int32)
        flags = np.empty(num_vertices + 2, dtype=np.uint8)
        for _t in range(lo, hi):
            if packed_bits > 0:
                state = fill_colors_packed(state, colors, packed_bits)
            else:
                state = fill_colors_scan(state, colors, cum_weights)
            all_ok = True
            for j in range(n_events):
                s1 = seg_data[seg_ptr[j, 0]:seg_ptr[j, 1]]
                s2 = seg_data[seg_ptr[j, 1]:seg_ptr[j, 2]]
                s3 = seg_data[seg_ptr[j, 2]:seg_ptr[j, 3]]
                ok = eval_event(kinds[j], mode, num_vertices, edges, indptr,
                                indices, colors, mask_bits[j], params[j],
                                s1, s2, s3, parent, size, flags)
                if ok:
                    singles[b, j] += 1
                if all_ok and ok:
                    prefix[b, j] += 1
                elif not ok:
                    all_ok = False
                    if full_eval == 0:
                        break
    return prefix, singles
