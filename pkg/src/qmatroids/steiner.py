"""q-Steiner systems, the q-matroids they induce, and residual q-Fano checks.

Blocks of a q-Steiner system S_q(t, k, n) cover every t-subspace exactly
once.  Intersections of blocks form the flats of a q-matroid of rank t + 1.
Restricting a putative S_2(2, 3, 7) to a 5-space would leave a rank-3
q-matroid whose rank-2 flats are five planes and 120 lines; ``fano_scan``
looks for such matroids in a classification.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .gf import (
    InputError,
    SubspaceRep,
    ambient,
    check_field,
    full_space,
    gaussian_binomial,
    grassmannian,
    intersect,
    parse_subspace,
    reverse_canonical,
)
from .group import automorphism_order, is_isomorphic
from .qmatroid import Encoding, QMatroid, decode, flats, from_flats


@dataclass(frozen=True)
class SteinerSystem:
    q: int
    t: int
    k: int
    n: int
    blocks: tuple[SubspaceRep, ...]

    def __post_init__(self):
        check_field(self.q)
        if not 0 <= self.t <= self.k <= self.n:
            raise InputError(f"need 0 <= t <= k <= n, got t={self.t} k={self.k} n={self.n}")
        for b in self.blocks:
            if (b.q, b.n, b.k) != (self.q, self.n, self.k):
                raise InputError(f"block {b} is not a {self.k}-subspace of F_{self.q}^{self.n}")


def _t_subspaces(block: SubspaceRep, t: int) -> list[SubspaceRep]:
    """All t-subspaces of ``block``, via coordinates in its row basis."""
    rows = block.matrix()
    out = []
    for sub in grassmannian(block.k, t, block.q):
        coords = sub.matrix()
        out.append(reverse_canonical((coords @ rows % block.q).tolist(), block.q, block.n))
    return out


def is_q_steiner(q: int, t: int, k: int, n: int, blocks) -> bool:
    """True iff every t-subspace lies in exactly one block."""
    S = SteinerSystem(q, t, k, n, tuple(blocks))
    seen: set[tuple] = set()
    for b in S.blocks:
        for x in _t_subspaces(b, t):
            if x.rows in seen:
                return False
            seen.add(x.rows)
    return len(seen) == gaussian_binomial(n, t, q)


def steiner_flats(S: SteinerSystem) -> list[SubspaceRep]:
    """E together with all intersections of nonempty sets of blocks."""
    family = {full_space(S.n, S.q)}
    frontier = set(S.blocks) - family
    family |= frontier
    while frontier:
        new = set()
        for a in frontier:
            for b in S.blocks:
                x = intersect(a, b)
                if x not in family:
                    new.add(x)
        family |= new
        frontier = new
    return sorted(family)


def matroid_from_steiner(S: SteinerSystem) -> QMatroid:
    if not is_q_steiner(S.q, S.t, S.k, S.n, S.blocks):
        raise InputError("blocks do not form a q-Steiner system")
    return from_flats(S.q, S.n, steiner_flats(S))


def read_blocks(path, q: int) -> list[SubspaceRep]:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    return [parse_subspace(ln, q) for ln in lines if ln and not ln.startswith("#")]


# -- residual q-Fano candidates ----------------------------------------------

def rank2_flats(M: QMatroid) -> list[SubspaceRep]:
    F = flats(M)
    return [M.ambient[int(i)] for i in F.indices if M.rank[i] == 2]


def residual_candidate(M: QMatroid) -> bool:
    """Rank 3 on F_2^5 with rank-2 flats exactly five planes and 120 lines."""
    if (M.q, M.n) != (2, 5):
        raise InputError("residual q-Fano candidates live on F_2^5")
    if M.k != 3:
        return False
    dims = sorted(x.k for x in rank2_flats(M))
    return dims == [2] * 120 + [3] * 5


def intersection_points(planes) -> int:
    """Number of points lying in at least two of five 3-dim subspaces."""
    planes = list(planes)
    if len(planes) != 5 or any(p.k != 3 for p in planes):
        raise InputError("expected five 3-dimensional subspaces")
    A = ambient(planes[0].q, planes[0].n)
    sets = [A.pointsets[A.index(p)] for p in planes]
    hits = 0
    for p in range(A.P):
        bit = 1 << p
        if sum(1 for s in sets if s & bit) >= 2:
            hits += 1
    return hits


def candidate_flats(planes, q: int = 2, n: int = 5) -> list[SubspaceRep]:
    """Flats of the rank-3 q-matroid whose rank-2 flats are ``planes`` plus
    every line not inside one of them."""
    A = ambient(q, n)
    planes = [p if isinstance(p, SubspaceRep) else parse_subspace(p, q, n) for p in planes]
    pidx = [A.index(p) for p in planes]
    lines = [i for i in A.dim_range(2) if not any(A.leq[i, j] for j in pidx)]
    fam = [0] + list(A.dim_range(1)) + lines + pidx + [A.top]
    return [A[i] for i in sorted(set(fam))]


def candidate_matroid(planes) -> QMatroid:
    return from_flats(2, 5, candidate_flats(planes))


@dataclass(frozen=True)
class ResidualReport:
    matroid: Encoding
    three_dim_flats: tuple[SubspaceRep, ...]
    automorphism_order: int
    intersection_points: int

    def check(self) -> None:
        for a, b in combinations(self.three_dim_flats, 2):
            if intersect(a, b).k > 1:
                raise InputError(f"planes {a} and {b} share a line")


def report(M: QMatroid, jobs: int = 1) -> ResidualReport:
    planes = tuple(x for x in rank2_flats(M) if x.k == 3)
    rep = ResidualReport(M.encoding(), planes, automorphism_order(M, jobs), intersection_points(planes))
    rep.check()
    return rep


def fano_scan(encodings, jobs: int = 1) -> list[ResidualReport]:
    """Reports for every rank-3 class on F_2^5 that passes residual_candidate."""
    out = []
    for enc in encodings:
        if (enc.q, enc.n, enc.k) != (2, 5, 3):
            raise InputError("fano_scan expects rank-3 classes on F_2^5")
        M = decode(enc.q, enc.n, enc.k, enc)
        if residual_candidate(M):
            out.append(report(M, jobs))
    return sorted(out, key=lambda r: r.matroid)


# Five planes of each of the ten residual candidates, with the expected
# automorphism order and intersection-point count.
REFERENCE_CANDIDATES: tuple[tuple[tuple[str, ...], int, int], ...] = (
    (("10000;01000;00001", "00100;00010;00001", "10010;01100;00001", "10110;01010;00001", "10100;01110;00001"), 5760, 1),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10001;01010;00100", "10000;01011;00110"), 5, 10),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10001;01010;00100", "10010;01011;00110"), 8, 10),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10010;01011;00100", "10000;01011;00111"), 120, 10),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10001;01010;00100", "10010;01001;00110"), 3, 10),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10001;01010;00100", "10011;01011;00111"), 12, 10),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10010;01100;00001", "10011;01010;00100"), 2, 8),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10010;01100;00001", "10101;01100;00010"), 8, 6),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10010;01100;00001", "10001;01010;00100"), 2, 8),
    (("10100;01000;00010", "10000;01000;00001", "00100;00010;00001", "10010;01100;00001", "10100;01110;00001"), 48, 5),
)


def reference_matroids() -> list[QMatroid]:
    return [candidate_matroid(planes) for planes, _, _ in REFERENCE_CANDIDATES]


def match_reference(M: QMatroid) -> list[int]:
    """Indices (0-based) of reference candidates isomorphic to M."""
    return [i for i, R in enumerate(reference_matroids()) if is_isomorphic(M, R) is not None]
