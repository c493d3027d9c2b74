"""Inner loops over GL(n, q), compiled with numba when available.

A matrix h is built column by column: ``cols[j]`` is the code of h(e_{j+1}).
The k-subspaces of U^(m) only depend on the first m columns, and they form a
prefix of the encoding, so after fixing column m the corresponding encoding
segment of M∘ĥ is final and can be compared against a target right away.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit

CHECK = 0  # stop at the first strictly smaller image; count equal ones
COUNT = 1  # count images equal to the target (stabiliser size)
MINIMIZE = 2  # smallest image over the group

_BIG = 1 << 30


@njit
def orbit_sweep(mode, n, k, ref, kb, seg, join, koff, add, smul, first_lo, first_hi, best, best_cols):
    """Sweep matrices whose first column code lies in [first_lo, first_hi).

    ``ref`` holds the basis bits of M.  For CHECK and COUNT the target is
    ``ref`` itself; for MINIMIZE ``best`` is used as running target and
    must be filled with 2 on entry (2 acts as +infinity).  Returns
    ``(status, count)``: status is -1 when CHECK met a smaller image.
    """
    size = add.shape[0]
    q = smul.shape[0]
    K = ref.shape[0]
    cols = np.zeros(n, dtype=np.int64)
    nxt = np.zeros(n, dtype=np.int64)
    chosen = np.zeros(n, dtype=np.bool_)
    img = np.zeros(size, dtype=np.int64)
    mark = np.full(size, _BIG, dtype=np.int64)
    mark[0] = -1
    cur = np.zeros(K, dtype=np.uint8)
    qpow = np.ones(n + 1, dtype=np.int64)
    for j in range(1, n + 1):
        qpow[j] = qpow[j - 1] * q
    if mode == MINIMIZE:
        for i in range(seg[0]):
            best[i] = ref[i]
    count = 0
    if n == 0:
        return 0, 1
    j = 0
    nxt[0] = first_lo
    while j >= 0:
        if chosen[j]:
            for u in range(qpow[j], qpow[j + 1]):
                mark[img[u]] = _BIG
            chosen[j] = False
        hi = first_hi if j == 0 else size
        w = nxt[j]
        while w < hi and mark[w] != _BIG:
            w += 1
        if w >= hi:
            j -= 1
            continue
        nxt[j] = w + 1
        cols[j] = w
        chosen[j] = True
        for t in range(1, q):
            tw = smul[t, w]
            base = t * qpow[j]
            for v in range(qpow[j]):
                u = add[img[v], tw]
                img[base + v] = u
                mark[u] = j
        # encoding segment fixed by this column
        c = 0
        for i in range(seg[j], seg[j + 1]):
            idx = 0
            for r in range(k):
                idx = join[idx, img[kb[i, r]]]
            b = ref[idx - koff]
            cur[i] = b
            if c == 0:
                tb = ref[i] if mode != MINIMIZE else best[i]
                if b < tb:
                    c = -1
                    if mode != MINIMIZE:
                        break
                elif b > tb:
                    c = 1
                    break
        if c > 0:
            continue
        if c < 0:
            if mode == CHECK:
                return -1, count
            if mode == COUNT:
                continue
            for i in range(seg[j], seg[j + 1]):
                best[i] = cur[i]
            for i in range(seg[j + 1], K):
                best[i] = 2
            count = 0
        if j == n - 1:
            if mode == MINIMIZE and count == 0:
                for t in range(n):
                    best_cols[t] = cols[t]
            count += 1
            continue
        j += 1
        nxt[j] = 1
    return 0, count


@njit
def subspace_images(n, cols, add, smul, basis, join):
    """Global index of h(X) for every subspace X (rows given as codes).

    ``basis`` is an (N, n) array of row codes padded with -1.
    """
    size = add.shape[0]
    q = smul.shape[0]
    img = np.zeros(size, dtype=np.int64)
    step = 1
    for j in range(n):
        for t in range(1, q):
            tw = smul[t, cols[j]]
            for v in range(step):
                img[t * step + v] = add[img[v], tw]
        step *= q
    N = basis.shape[0]
    out = np.zeros(N, dtype=np.int64)
    for x in range(N):
        idx = 0
        for r in range(basis.shape[1]):
            c = basis[x, r]
            if c < 0:
                break
            idx = join[idx, img[c]]
        out[x] = idx
    return out


LEAF_COUNT = 0  # count selectors only
LEAF_COLLECT = 1  # record every selector
LEAF_CANONICAL = 2  # record selectors whose extension is canonical


@njit
def selector_search(
    mode, skip_trivial, masks, compat, first_lo, first_hi,
    fixed_bit, dep_w, dep_pos, dep_want,
    n1, k, kb, seg, join, koff, add, smul,
):
    """Depth-first search over modular cut selectors.

    ``compat[i, j, c]`` is the bitmask of cut indices admissible at new point
    j when point i takes cut c.  Allowed sets of later points are narrowed
    as choices are made, so dead branches are cut one level early.

    For LEAF_CANONICAL the basis bits of each extension are assembled from
    ``fixed_bit`` (subspaces inside the old space, -1 otherwise) and, for the
    rest, the flat position ``dep_pos`` of the closure of Z ∩ U^(n) and the
    required membership ``dep_want`` in the cut at new point ``dep_w``.

    Returns (count, choices) where choices holds one row of cut indices per
    recorded selector.
    """
    S = compat.shape[0]
    C = masks.shape[0]
    K = fixed_bit.shape[0]
    allowed = np.zeros((S + 1, S), dtype=np.int64)
    full = (np.int64(1) << C) - 1 if C < 63 else np.int64(-1)
    for j in range(S):
        allowed[0, j] = full
    lo_mask = np.int64(0)
    for c in range(first_lo, first_hi):
        lo_mask |= np.int64(1) << c
    allowed[0, 0] &= lo_mask
    choice = np.full(S, -1, dtype=np.int64)
    out = np.zeros((64, S), dtype=np.int16)
    ref = np.zeros(K, dtype=np.uint8)
    best = np.zeros(1, dtype=np.uint8)
    cols = np.zeros(max(n1, 1), dtype=np.int64)
    count = 0
    kept = 0
    i = 0
    while i >= 0:
        avail = allowed[i, i]
        c = choice[i] + 1
        while c < C and not (avail >> c) & 1:
            c += 1
        if c >= C:
            choice[i] = -1
            i -= 1
            continue
        choice[i] = c
        if i < S - 1:
            dead = False
            for j in range(i + 1, S):
                a = allowed[i, j] & compat[i, j, c]
                allowed[i + 1, j] = a
                if a == 0:
                    dead = True
                    break
            if not dead:
                i += 1
            continue
        # leaf
        if skip_trivial:
            trivial = True
            for t in range(S):
                if masks[choice[t]] != 0:
                    trivial = False
                    break
            if trivial:
                continue
        count += 1
        keep = mode == LEAF_COLLECT
        if mode == LEAF_CANONICAL:
            for z in range(K):
                fb = fixed_bit[z]
                if fb >= 0:
                    ref[z] = fb
                elif dep_w[z] < 0:
                    ref[z] = 0
                else:
                    inside = (masks[choice[dep_w[z]]] >> dep_pos[z]) & 1
                    ref[z] = 1 if inside == dep_want[z] else 0
            status, _ = orbit_sweep(CHECK, n1, k, ref, kb, seg, join, koff, add, smul, 1, add.shape[0], best, cols)
            keep = status >= 0
        if keep:
            if kept == out.shape[0]:
                grown = np.zeros((2 * kept, S), dtype=np.int16)
                grown[:kept] = out
                out = grown
            for t in range(S):
                out[kept, t] = choice[t]
            kept += 1
    return count, out[:kept]
