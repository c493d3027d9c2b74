"""Modular cuts, modular cut selectors and one-dimensional extensions.

A q-matroid M lives on U^(n) and its extensions on U^(n+1).  The new points
are the points of U^(n+1) outside U^(n); in reverse-canonical form these are
the vectors with last coordinate 1, i.e. codes ``q**n + w`` for
``w = 0 .. q**n - 1``, and ``w`` is used as the new-point index throughout.

Cuts are bitmasks over the positions of M's flats (flat ``i`` is bit ``i``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import kernels
from .gf import InputError, SubspaceRep, ambient, embedding
from .qmatroid import QMatroid, flats


class _FlatData:
    """Per-matroid tables shared by the cut and selector routines."""

    def __init__(self, M: QMatroid):
        A = M.ambient
        F = flats(M)
        self.M = M
        self.family = F
        self.idx = F.indices
        self.count = len(F)
        self.pos = F.pos
        r = M.rank
        fi = self.idx
        self.up = [sum(1 << int(j) for j in np.flatnonzero(F.leq[i])) for i in range(self.count)]
        sums = A.sum[np.ix_(fi, fi)]
        meets = A.meet[np.ix_(fi, fi)]
        modular = r[sums] + r[meets] == r[fi][:, None] + r[fi][None, :]
        self.modular = modular
        self.meet_pos = np.vectorize(lambda x: self.pos[int(x)])(meets) if self.count else meets
        self.full = (1 << self.count) - 1

    def members(self, mask: int) -> list[int]:
        return [i for i in range(self.count) if mask >> i & 1]

    def upclose(self, mask: int) -> int:
        out = 0
        for i in self.members(mask):
            out |= self.up[i]
        return out

    def m2_closure(self, mask: int) -> int:
        """Smallest up-set containing ``mask`` that is closed under (M2)."""
        cur = self.upclose(mask)
        while True:
            mem = self.members(cur)
            add = 0
            for a_i, a in enumerate(mem):
                for b in mem[a_i + 1:]:
                    if self.modular[a, b]:
                        m = int(self.meet_pos[a, b])
                        if not cur >> m & 1:
                            add |= self.up[m]
            if not add:
                return cur
            cur |= add

    def is_cut(self, mask: int) -> bool:
        return self.upclose(mask) == mask and self.m2_closure(mask) == mask


def _data(M: QMatroid) -> _FlatData:
    d = M.__dict__.get("_flat_data")
    if d is None:
        d = _FlatData(M)
        M.__dict__["_flat_data"] = d
    return d


@dataclass(frozen=True, eq=False)
class ModularCut:
    owner: QMatroid
    members: int

    def __eq__(self, other) -> bool:
        return isinstance(other, ModularCut) and self.owner is other.owner and self.members == other.members

    def __hash__(self) -> int:
        return hash((id(self.owner), self.members))

    def bitstring(self) -> str:
        d = _data(self.owner)
        return "".join("1" if self.members >> i & 1 else "0" for i in range(d.count))

    def flats(self) -> list[SubspaceRep]:
        d = _data(self.owner)
        return [self.owner.ambient[int(d.idx[i])] for i in d.members(self.members)]

    def __len__(self) -> int:
        return bin(self.members).count("1")

    def __contains__(self, f: SubspaceRep) -> bool:
        d = _data(self.owner)
        i = d.pos.get(self.owner.ambient.index(f))
        return i is not None and bool(self.members >> i & 1)


def make_cut(M: QMatroid, flatset) -> ModularCut:
    d = _data(M)
    mask = 0
    for f in flatset:
        i = M.ambient.index(f) if isinstance(f, SubspaceRep) else int(f)
        if i not in d.pos:
            raise InputError(f"{M.ambient[i]} is not a flat")
        mask |= 1 << d.pos[i]
    return ModularCut(M, mask)


def minimal_members(cut: ModularCut) -> list[SubspaceRep]:
    d = _data(cut.owner)
    mem = d.members(cut.members)
    out = []
    for i in mem:
        below = cut.members & ~(1 << i)
        if not any(below >> j & 1 and d.up[j] >> i & 1 for j in mem if j != i):
            out.append(cut.owner.ambient[int(d.idx[i])])
    return out


def is_modular_cut(M: QMatroid, flatset) -> bool:
    cut = flatset if isinstance(flatset, ModularCut) else make_cut(M, flatset)
    return _data(M).is_cut(cut.members)


def modular_cuts(M: QMatroid, max_flats: int = 64) -> list[ModularCut]:
    """All modular cuts of M, sorted by membership bitstring.

    Antichains of flats are grown in flat order; a branch is abandoned as
    soon as the (M2)-closure of the current up-set needs a flat that lies
    before the current position (such a flat can no longer be reached).
    """
    d = _data(M)
    if d.count > max_flats:
        raise InputError(f"{d.count} flats exceed the guard of {max_flats}")
    found: list[int] = []

    def dfs(i: int, upset: int) -> None:
        if i == d.count:
            if d.m2_closure(upset) == upset:
                found.append(upset)
            return
        dfs(i + 1, upset)
        if upset >> i & 1:
            return
        new = upset | d.up[i]
        closed = d.m2_closure(new)
        lost = closed & ~new & ((1 << (i + 1)) - 1)
        if not lost:
            dfs(i + 1, new)

    dfs(0, 0)
    cuts = [ModularCut(M, m) for m in found]
    cuts.sort(key=ModularCut.bitstring)
    return cuts


# -- selectors ---------------------------------------------------------------

@lru_cache(maxsize=None)
def _lift_tables(q: int, n: int):
    """For every subspace Z of U^(n+1): index of Z ∩ U^(n) in F_q^n and the
    new-point index w of Z (or -1 when Z ≤ U^(n))."""
    small, big = ambient(q, n), ambient(q, n + 1)
    top = big.coordinate_index(n)
    inner_big = big.meet[:, top].astype(np.int64)
    k = big.dims[inner_big]
    inner = inner_big - big.offsets[k] + small.offsets[k]
    last = np.array([codes[-1] if codes else 0 for codes in big.row_codes], dtype=np.int64)
    w = np.where(last >= q ** n, last - q ** n, -1)
    return inner, w


def _flat_plus_point(M: QMatroid) -> np.ndarray:
    """fe[i, w] = index in U^(n+1) of (flat i) + e_w."""
    d = _data(M)
    big = ambient(M.q, M.n + 1)
    emb = embedding(M.ambient, big)[d.idx]
    codes = M.q ** M.n + np.arange(M.q ** M.n)
    return big.join[emb][:, codes]


@dataclass(frozen=True, eq=False)
class Selector:
    """Modular cut (as flat bitmask) assigned to each new point, in order."""

    owner: QMatroid
    values: tuple[int, ...]

    def __eq__(self, other) -> bool:
        return isinstance(other, Selector) and self.owner is other.owner and self.values == other.values

    def __hash__(self) -> int:
        return hash((id(self.owner), self.values))

    def cut(self, w: int) -> ModularCut:
        return ModularCut(self.owner, self.values[w])

    def is_trivial(self) -> bool:
        return not any(self.values)

    def points(self) -> list[SubspaceRep]:
        big = ambient(self.owner.q, self.owner.n + 1)
        base = self.owner.q ** self.owner.n
        return [big[big.span_index([base + w])] for w in range(len(self.values))]


def _same_masks(M: QMatroid) -> list[list[int]]:
    """same[i][j] = flats F with F + e_i == F + e_j."""
    fe = _flat_plus_point(M)
    S = fe.shape[1]
    weights = [1 << f for f in range(fe.shape[0])]
    out = []
    for i in range(S):
        eq = fe == fe[:, i : i + 1]
        out.append([sum(weights[int(f)] for f in np.flatnonzero(eq[:, j])) for j in range(S)])
    return out


def satisfies_qm(M: QMatroid, values) -> bool:
    """Check (QM) for every ordered pair of new points."""
    same = _same_masks(M)
    S = len(values)
    for i in range(S):
        for j in range(S):
            if i == j:
                continue
            a, b, s = values[i], values[j], same[i][j]
            # F in mu(e_i): F + e_i = F + e_j  <=>  F in mu(e_j)
            if (a & s) & ~b or (a & ~s) & b:
                return False
    return True


KERNEL_MAX_CUTS = 62


def _compat(M: QMatroid, masks: list[int]) -> np.ndarray:
    """compat[i, j, c] = bitmask of cuts admissible at point j given cut c at i."""
    same = np.array(_same_masks(M), dtype=np.int64)
    S, C = len(same), len(masks)
    m = np.array(masks, dtype=np.int64)
    a, b = m[:, None], m[None, :]
    pow2 = np.int64(1) << np.arange(C, dtype=np.int64)
    out = np.zeros((S, S, C), dtype=np.int64)
    for i in range(S):
        for j in range(S):
            if i != j:
                s = same[i, j]
                ok = (((a ^ b) & s) == 0) & ((a & b & ~s) == 0)
                out[i, j] = (ok * pow2).sum(axis=1)
    return out


def _leaf_tables(M: QMatroid):
    """Per k-subspace Z of U^(n+1): how its basis bit in an extension is decided."""
    from .group import _sweep_tables, _vector_tables

    q, n, k = M.q, M.n, M.k
    d = _data(M)
    big = ambient(q, n + 1)
    inner, w = _lift_tables(q, n)
    lo, hi = big.offsets[k], big.offsets[k] + big.counts[k]
    inner_k, w_k = inner[lo:hi], w[lo:hi]
    rin = M.rank[inner_k].astype(np.int64)
    flatpos = np.full(M.ambient.N, -1, dtype=np.int64)
    flatpos[d.idx] = np.arange(d.count)
    pos = flatpos[M.closure_table[inner_k]]
    fixed = np.where(w_k < 0, (rin == k).astype(np.int64), -1)
    live = (w_k >= 0) & ((rin == k) | (rin == k - 1))
    dep_w = np.where(live, w_k, -1)
    dep_want = (rin == k).astype(np.int64)
    add, smul, _, join = _vector_tables(q, n + 1)
    kb, seg, koff = _sweep_tables(q, n + 1, k)
    return fixed, dep_w, pos, dep_want, kb, seg, join, koff, add, smul


def search(M: QMatroid, mode: int, cuts: list[ModularCut] | None = None, first=None, skip_trivial=False):
    """Run the selector kernel; returns (leaf count, rows of cut indices).

    ``first`` is a (lo, hi) range of cut indices allowed at the first point.
    """
    if cuts is None:
        cuts = modular_cuts(M)
    masks = [c.members for c in cuts]
    if len(masks) > KERNEL_MAX_CUTS or _data(M).count > KERNEL_MAX_CUTS:
        raise InputError(f"{len(masks)} cuts on {_data(M).count} flats exceed the kernel limit of {KERNEL_MAX_CUTS}")
    lo, hi = first if first is not None else (0, len(masks))
    if mode == kernels.LEAF_CANONICAL:
        tables = _leaf_tables(M)
    else:
        empty = np.zeros(0, dtype=np.int64)
        z = np.zeros((1, 1), dtype=np.int64)
        tables = (empty, empty, empty, empty, z, np.zeros(2, dtype=np.int64), z, 0, z, z)
    fixed, dep_w, pos, want, kb, seg, join, koff, add, smul = tables
    count, rows = kernels.selector_search(
        mode, skip_trivial, np.array(masks, dtype=np.int64), _compat(M, masks), lo, hi,
        fixed, dep_w, pos, want, M.n + 1, M.k, kb, seg, join, koff, add, smul,
    )
    return int(count), rows


def selectors(M: QMatroid, cuts: list[ModularCut] | None = None, first: int | None = None) -> Iterator[Selector]:
    """All modular cut selectors of M, depth first over the new points.

    A cut C is admissible at e_i when, against every earlier e_j, flats in
    both C and mu(e_j) satisfy F + e_i = F + e_j and flats in exactly one of
    them do not.  ``first`` restricts mu(e_0) to ``cuts[first]``.
    """
    if cuts is None:
        cuts = modular_cuts(M)
    masks = [c.members for c in cuts]
    rng = None if first is None else (first, first + 1)
    _, rows = search(M, kernels.LEAF_COLLECT, cuts, rng)
    for row in rows:
        yield Selector(M, tuple(masks[int(c)] for c in row))


def count_selectors(M: QMatroid, cuts: list[ModularCut] | None = None) -> int:
    return search(M, kernels.LEAF_COUNT, cuts)[0]


def trivial_selector(M: QMatroid) -> Selector:
    return Selector(M, (0,) * (M.q ** M.n))


def extension_rank(M: QMatroid, values) -> np.ndarray:
    """Rank table of the extension defined by per-point cut bitmasks."""
    d = _data(M)
    inner, w = _lift_tables(M.q, M.n)
    S = M.q ** M.n
    member = np.zeros((S + 1, max(d.count, 1)), dtype=np.int8)
    for p, mask in enumerate(values):
        for f in d.members(mask):
            member[p, f] = 1
    flatpos = np.full(M.ambient.N, -1, dtype=np.int64)
    flatpos[d.idx] = np.arange(d.count)
    cl = flatpos[M.closure_table[inner]]
    wi = np.where(w >= 0, w, S)  # row S is all zero and unused
    delta = np.where(w >= 0, 1 - member[wi, cl], 0)
    return M.rank[inner] + delta


def extend(M: QMatroid, sel: Selector | tuple, validate: bool = False) -> QMatroid:
    values = sel.values if isinstance(sel, Selector) else tuple(sel)
    if len(values) != M.q ** M.n:
        raise InputError("a selector needs one cut per new point")
    return QMatroid(ambient(M.q, M.n + 1), extension_rank(M, values), validate=validate)


def trivial_extension(M: QMatroid) -> QMatroid:
    return extend(M, trivial_selector(M))


def lower_restriction(N: QMatroid) -> QMatroid:
    """N restricted to U^(n-1)."""
    if N.n == 0:
        raise InputError("no hyperplane in a zero-dimensional space")
    small = ambient(N.q, N.n - 1)
    return QMatroid(small, N.rank[embedding(small, N.ambient)], validate=False)


def selector_of(N: QMatroid) -> Selector:
    """The selector of N with respect to U^(n-1) (and its restriction M)."""
    M = lower_restriction(N)
    d = _data(M)
    fe = _flat_plus_point(M)
    big = N.ambient
    emb = embedding(M.ambient, big)[d.idx]
    ok = N.flat_mask[fe] & (N.rank[fe] == N.rank[emb][:, None])
    values = tuple(sum(1 << int(f) for f in np.flatnonzero(ok[:, w])) for w in range(fe.shape[1]))
    return Selector(M, values)
