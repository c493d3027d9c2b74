"""Brute-force enumeration of q-matroids, used as an independent oracle.

Rank tables are filled in an order where every proper subspace of X comes
before X: by the largest vector code in X, then dimension.  A subspace is
thus visited as soon as all of its subspaces are known, which prunes early;
in particular U^(m) is settled before anything outside it.  Monotonicity
against the hyperplanes of X gives a lower bound; (R1), the unit-increase
bound and submodularity for every incomparable pair with A + B = X give
upper bounds.  Every instance of (R3) is checked exactly once, at its sum.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._accel import njit
from .gf import InputError, ambient, embedding
from .group import canonical_form
from .qmatroid import Encoding, QMatroid

MAX_SUBSPACES = 70  # F_2^4 has 67 subspaces, F_3^3 has 28


@lru_cache(maxsize=None)
def _tables(q: int, n: int):
    """Constraint tables with subspaces relabelled in fill order."""
    A = ambient(q, n)
    top = [int(v.max()) for v in A.vectors]
    order = sorted(range(A.N), key=lambda x: (top[x], A.dims[x]))
    slot = np.empty(A.N, dtype=np.int64)
    slot[order] = np.arange(A.N)
    leq = A.leq
    hyp_ptr = np.zeros(A.N + 1, dtype=np.int64)
    hyp = []
    pair_ptr = np.zeros(A.N + 1, dtype=np.int64)
    pairs = []
    for s, x in enumerate(order):
        below = np.flatnonzero(leq[:, x] & (A.dims == A.dims[x] - 1))
        hyp.extend(slot[below].tolist())
        hyp_ptr[s + 1] = len(hyp)
    sums = A.sum
    for s, x in enumerate(order):
        a_idx, b_idx = np.nonzero(np.triu(sums == x, 1))
        for a, b in zip(a_idx.tolist(), b_idx.tolist()):
            if leq[a, b] or leq[b, a]:
                continue
            pairs.append((slot[a], slot[b], slot[int(A.meet[a, b])]))
        pair_ptr[s + 1] = len(pairs)
    return (
        np.array(order, dtype=np.int64),
        np.ascontiguousarray(A.dims[order], dtype=np.int64),
        hyp_ptr,
        np.array(hyp, dtype=np.int64),
        pair_ptr,
        np.array(pairs, dtype=np.int64).reshape(-1, 3),
    )


@njit
def _enumerate(dims, hyp_ptr, hyp, pair_ptr, pairs, fixed, cap):
    N = dims.shape[0]
    out = np.zeros((cap, N), dtype=np.int8)
    count = 0
    val = np.zeros(N, dtype=np.int64)
    hi = np.zeros(N, dtype=np.int64)
    i = 0
    fresh = True
    while i >= 0:
        if fresh:
            lo = 0
            top = dims[i]
            for t in range(hyp_ptr[i], hyp_ptr[i + 1]):
                h = val[hyp[t]]
                if h > lo:
                    lo = h
                if h + 1 < top:
                    top = h + 1
            for t in range(pair_ptr[i], pair_ptr[i + 1]):
                b = val[pairs[t, 0]] + val[pairs[t, 1]] - val[pairs[t, 2]]
                if b < top:
                    top = b
            if fixed[i] >= 0:
                if fixed[i] < lo or fixed[i] > top:
                    lo, top = 1, 0
                else:
                    lo, top = fixed[i], fixed[i]
            val[i] = lo
            hi[i] = top
            if lo > top:
                i -= 1
                fresh = False
                continue
        else:
            val[i] += 1
            if val[i] > hi[i]:
                i -= 1
                continue
        if i == N - 1:
            if count == out.shape[0]:
                grown = np.zeros((2 * out.shape[0], N), dtype=np.int8)
                grown[:count] = out
                out = grown
            for t in range(N):
                out[count, t] = val[t]
            count += 1
            fresh = False
            continue
        i += 1
        fresh = True
    return out[:count]


def all_rank_tables(q: int, n: int, fixed=None) -> np.ndarray:
    """Every rank table on F_q^n satisfying (R1)-(R3), one per row.

    ``fixed`` optionally pins entries (``-1`` = free).
    """
    A = ambient(q, n)
    if A.N > MAX_SUBSPACES:
        raise InputError(f"F_{q}^{n} has {A.N} subspaces; brute force is limited to {MAX_SUBSPACES}")
    order, dims, hyp_ptr, hyp, pair_ptr, pairs = _tables(q, n)
    if fixed is None:
        fixed = np.full(A.N, -1, dtype=np.int64)
    fixed = np.ascontiguousarray(np.asarray(fixed, dtype=np.int64)[order])
    rows = _enumerate(dims, hyp_ptr, hyp, pair_ptr, pairs, fixed, 1024)
    out = np.empty_like(rows)
    out[:, order] = rows
    return out


def all_qmatroids(q: int, n: int) -> list[QMatroid]:
    A = ambient(q, n)
    return [QMatroid(A, row, validate=False) for row in all_rank_tables(q, n)]


def brute_force_extensions(M: QMatroid) -> list[QMatroid]:
    """All q-matroids on U^(n+1) whose restriction to U^(n) is M."""
    big = ambient(M.q, M.n + 1)
    fixed = np.full(big.N, -1, dtype=np.int64)
    fixed[embedding(M.ambient, big)] = M.rank
    return [QMatroid(big, row, validate=False) for row in all_rank_tables(M.q, M.n + 1, fixed)]


def brute_force_classify(q: int, n: int) -> dict[int, list[Encoding]]:
    """Canonical encodings per rank, from exhaustive enumeration."""
    seen: dict[int, set[str]] = {k: set() for k in range(n + 1)}
    for M in all_qmatroids(q, n):
        canon, _ = canonical_form(M)
        seen[canon.k].add(canon.encoding().bits)
    return {k: [Encoding(q, n, k, b) for b in sorted(bits)] for k, bits in seen.items()}
