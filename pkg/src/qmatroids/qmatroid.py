"""q-matroids stored as dense rank tables over the subspace lattice."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .gf import AmbientSpace, InputError, SubspaceRep, ambient, gaussian_binomial


class ValidationError(ValueError):
    """A rank table, basis family or flat family violates an axiom."""

    def __init__(self, axiom: str, message: str, witnesses=()):
        super().__init__(f"{axiom}: {message}")
        self.axiom = axiom
        self.witnesses = tuple(witnesses)


@dataclass(frozen=True, order=True)
class Encoding:
    """Basis indicator over the ordered k-subspaces of F_q^n.

    ``bits[i]`` is ``'1'`` iff the i-th k-subspace is a basis, so comparing
    ``bits`` as strings is the lexicographic order with ``0 < 1``.
    """

    q: int
    n: int
    k: int
    bits: str

    def __post_init__(self):
        K = gaussian_binomial(self.n, self.k, self.q)
        if len(self.bits) != K or set(self.bits) - {"0", "1"}:
            raise InputError(f"encoding must be a {K}-character 0/1 string")

    def array(self) -> np.ndarray:
        return np.frombuffer(self.bits.encode(), dtype=np.uint8) - ord("0")

    @classmethod
    def from_array(cls, q: int, n: int, k: int, arr) -> "Encoding":
        return cls(q, n, k, (np.asarray(arr, dtype=np.uint8) + ord("0")).tobytes().decode())

    def __str__(self) -> str:
        return self.bits


def _first_true(mask: np.ndarray):
    return tuple(int(i) for i in np.argwhere(mask)[0])


def check_rank_axioms(A: AmbientSpace, rank: np.ndarray) -> None:
    """Raise ValidationError on the first violation of (R1)-(R3)."""
    rank = np.asarray(rank)
    if rank.shape != (A.N,):
        raise InputError(f"rank table needs {A.N} entries, got {rank.shape}")
    bad = (rank < 0) | (rank > A.dims)
    if bad.any():
        (x,) = _first_true(bad)
        raise ValidationError("R1", f"r({A[x]}) = {rank[x]} outside [0, dim]", [A[x]])
    # monotonicity along covers X < X + v gives (R2) everywhere
    up = rank[A.point_join] < rank[:, None]
    if up.any():
        x, p = _first_true(up)
        y = int(A.point_join[x, p])
        raise ValidationError("R2", f"r({A[x]}) > r({A[y]})", [A[x], A[y]])
    lhs = rank[A.sum] + rank[A.meet]
    rhs = rank[:, None] + rank[None, :]
    bad = lhs > rhs
    if bad.any():
        x, y = _first_true(bad)
        raise ValidationError(
            "R3", f"r(X+Y) + r(X∩Y) = {lhs[x, y]} > {rhs[x, y]} = r(X) + r(Y)", [A[x], A[y]]
        )


class QMatroid:
    """A q-matroid on F_q^n.

    ``rank`` is indexed by the global subspace index of ``ambient``.  The
    object is immutable; derived data (closures, flats, bases) is cached.
    """

    def __init__(self, amb: AmbientSpace, rank, validate: bool = True):
        rank = np.array(rank, dtype=np.int8)
        if validate:
            check_rank_axioms(amb, rank)
        elif rank.shape != (amb.N,):
            raise InputError("rank table has the wrong length")
        rank.setflags(write=False)
        self.ambient = amb
        self.rank = rank
        self.q = amb.q
        self.n = amb.n
        self.k = int(rank[-1])

    def r(self, x) -> int:
        if isinstance(x, SubspaceRep):
            x = self.ambient.index(x)
        return int(self.rank[x])

    @cached_property
    def basis_bits(self) -> np.ndarray:
        lo, hi = self.ambient.offsets[self.k], self.ambient.offsets[self.k + 1]
        out = (self.rank[lo:hi] == self.k).astype(np.uint8)
        out.setflags(write=False)
        return out

    def encoding(self) -> Encoding:
        return Encoding.from_array(self.q, self.n, self.k, self.basis_bits)

    @cached_property
    def closure_table(self) -> np.ndarray:
        """closure_table[x] = index of cl(x)."""
        A = self.ambient
        same = self.rank[A.point_join] == self.rank[:, None]
        cl = np.arange(A.N)
        for p in range(A.P):
            cl = np.where(same[:, p], A.join[cl, A.point_codes[p]], cl)
        cl.setflags(write=False)
        return cl

    @cached_property
    def flat_mask(self) -> np.ndarray:
        A = self.ambient
        same = self.rank[A.point_join] == self.rank[:, None]
        outside = A.point_join != np.arange(A.N)[:, None]
        mask = ~np.any(same & outside, axis=1)
        mask.setflags(write=False)
        return mask

    @cached_property
    def flat_indices(self) -> np.ndarray:
        return np.flatnonzero(self.flat_mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatroid):
            return NotImplemented
        return (self.q, self.n) == (other.q, other.n) and np.array_equal(self.rank, other.rank)

    def __hash__(self) -> int:
        return hash((self.q, self.n, self.rank.tobytes()))

    def __repr__(self) -> str:
        return f"QMatroid(q={self.q}, n={self.n}, k={self.k}, enc={self.encoding().bits})"


def from_rank_table(q: int, n: int, table) -> QMatroid:
    return QMatroid(ambient(q, n), table)


def uniform(k: int, n: int, q: int) -> QMatroid:
    if not 0 <= k <= n:
        raise InputError(f"need 0 <= k <= n, got k={k}, n={n}")
    A = ambient(q, n)
    return QMatroid(A, np.minimum(A.dims, k), validate=False)


def free(n: int, q: int) -> QMatroid:
    return uniform(n, n, q)


def closure(M: QMatroid, x: SubspaceRep) -> SubspaceRep:
    return M.ambient[int(M.closure_table[M.ambient.index(x)])]


class FlatFamily:
    """The flats of a q-matroid (or a candidate flat family), in order."""

    def __init__(self, amb: AmbientSpace, indices, owner: QMatroid | None = None):
        self.ambient = amb
        self.owner = owner
        self.indices = np.array(sorted(set(int(i) for i in indices)), dtype=np.int64)
        self.pos = {int(f): i for i, f in enumerate(self.indices)}
        self.leq = amb.leq[np.ix_(self.indices, self.indices)]
        self.dims = amb.dims[self.indices]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return (self.ambient[int(i)] for i in self.indices)

    def __contains__(self, x) -> bool:
        if isinstance(x, SubspaceRep):
            x = self.ambient.index(x)
        return int(x) in self.pos

    def reps(self) -> list[SubspaceRep]:
        return list(self)

    @cached_property
    def covers(self) -> np.ndarray:
        """covers[i, j] is True iff flat j covers flat i in the family."""
        lt = self.leq & ~np.eye(len(self), dtype=bool)
        between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        return lt & ~between

    def check_axioms(self) -> None:
        """Raise ValidationError unless (F1)-(F3) hold."""
        A = self.ambient
        if A.top not in self.pos:
            raise ValidationError("F1", "the ambient space is not in the family", [A[A.top]])
        meets = A.meet[np.ix_(self.indices, self.indices)]
        for i in range(len(self)):
            for j in range(i + 1, len(self)):
                if int(meets[i, j]) not in self.pos:
                    f1, f2 = A[int(self.indices[i])], A[int(self.indices[j])]
                    raise ValidationError("F2", "intersection of two flats is missing", [f1, f2])
        cov = self.covers
        # pt_in[j, p]: point p lies in flat j
        pt_in = A.point_join[self.indices] == self.indices[:, None]
        for i in range(len(self)):
            up = np.flatnonzero(cov[i])
            counts = pt_in[up].sum(axis=0)
            outside = ~pt_in[i]
            bad = outside & (counts != 1)
            if bad.any():
                p = int(np.flatnonzero(bad)[0])
                raise ValidationError(
                    "F3",
                    f"{int(counts[p])} covers of the flat contain the point",
                    [A[int(self.indices[i])], A[A.point_global(p)]],
                )

    def __repr__(self) -> str:
        return f"FlatFamily({[str(x) for x in self]})"


def flats(M: QMatroid) -> FlatFamily:
    return FlatFamily(M.ambient, M.flat_indices, owner=M)


def bases(M: QMatroid) -> list[SubspaceRep]:
    off = int(M.ambient.offsets[M.k])
    return [M.ambient[off + int(i)] for i in np.flatnonzero(M.basis_bits)]


def encode(M: QMatroid) -> Encoding:
    return M.encoding()


def decode(q: int, n: int, k: int, bits) -> QMatroid:
    """Rebuild a q-matroid from its basis indicator; validates the result."""
    enc = bits if isinstance(bits, Encoding) else Encoding(q, n, k, "".join(str(int(b)) for b in bits))
    if (enc.q, enc.n, enc.k) != (q, n, k):
        raise InputError("encoding parameters do not match")
    A = ambient(q, n)
    arr = enc.array()
    if not arr.any():
        raise ValidationError("B1", "an encoding must mark at least one basis")
    basis_idx = int(A.offsets[k]) + np.flatnonzero(arr)
    rank = A.dims[A.meet[:, basis_idx]].max(axis=1)
    M = QMatroid(A, rank)
    if not np.array_equal(M.basis_bits, arr):
        raise ValidationError("B2", "the marked subspaces are not the bases of any q-matroid")
    return M


def restriction_map(M: QMatroid, sub: SubspaceRep) -> np.ndarray:
    """Index in M's ambient of every subspace of F_q^d, d = dim(sub).

    Coordinates are taken with respect to the reverse-canonical rows of
    ``sub``; for U^(d) this is the identity embedding.
    """
    A = M.ambient
    A.index(sub)
    d = sub.k
    small = ambient(M.q, d)
    rows = np.array(sub.codes, dtype=np.int64)
    img = np.zeros(small.size, dtype=np.int64)
    for c in range(small.size):
        vec = np.zeros(A.n, dtype=np.int64)
        for i, y in enumerate(small.digits[c]):
            if y:
                vec = (vec + y * A.digits[rows[i]]) % M.q
        img[c] = int(vec @ (M.q ** np.arange(A.n)))
    out = np.empty(small.N, dtype=np.int64)
    for k in range(d + 1):
        codes = small.basis_codes[k]
        idx = np.zeros(len(codes), dtype=np.int64)
        for j in range(k):
            idx = A.join[idx, img[codes[:, j]]]
        out[small.dim_range(k)] = idx
    return out


def restriction(M: QMatroid, sub: SubspaceRep) -> QMatroid:
    idx = restriction_map(M, sub)
    return QMatroid(ambient(M.q, sub.k), M.rank[idx], validate=False)


def dual(M: QMatroid) -> QMatroid:
    A = M.ambient
    rank = A.dims - M.k + M.rank[A.perp]
    return QMatroid(A, rank, validate=False)


def from_flats(q: int, n: int, family) -> QMatroid:
    """The q-matroid whose flats are ``family`` (subspaces or indices)."""
    A = ambient(q, n)
    idx = [A.index(f) if isinstance(f, SubspaceRep) else int(f) for f in family]
    fam = FlatFamily(A, idx)
    fam.check_axioms()
    height = np.zeros(len(fam), dtype=np.int64)
    for j in range(len(fam)):
        below = np.flatnonzero(fam.leq[:, j])
        below = below[below != j]
        if len(below):
            height[j] = height[below].max() + 1
    # closure of X in the family: the smallest member containing it
    member_leq = A.leq[:, fam.indices]
    dims = np.where(member_leq, fam.dims[None, :], n + 1)
    smallest = dims.argmin(axis=1)
    rank = height[smallest]
    M = QMatroid(A, rank)
    if not np.array_equal(M.flat_indices, fam.indices):
        raise ValidationError("F", "rank function built from the family has different flats")
    return M


def is_modular_pair(M: QMatroid, f1: SubspaceRep, f2: SubspaceRep) -> bool:
    A = M.ambient
    a, b = A.index(f1), A.index(f2)
    for f, i in ((f1, a), (f2, b)):
        if not M.flat_mask[i]:
            raise InputError(f"{f} is not a flat")
    r = M.rank
    return int(r[A.sum[a, b]]) + int(r[A.meet[a, b]]) == int(r[a]) + int(r[b])


# -- file format -------------------------------------------------------------

def dumps(M: QMatroid | Encoding) -> str:
    enc = M.encoding() if isinstance(M, QMatroid) else M
    return f"qmatroid v1\nq={enc.q} n={enc.n} k={enc.k}\nenc={enc.bits}\n"


def loads(text: str) -> Encoding:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if len(lines) != 3 or lines[0] != "qmatroid v1":
        raise InputError("not a 'qmatroid v1' file")
    try:
        params = dict(tok.split("=") for tok in lines[1].split())
        q, n, k = int(params["q"]), int(params["n"]), int(params["k"])
    except (ValueError, KeyError) as exc:
        raise InputError(f"bad parameter line {lines[1]!r}") from exc
    if not lines[2].startswith("enc="):
        raise InputError("missing enc= line")
    return Encoding(q, n, k, lines[2][4:])


def read_matroid(path) -> QMatroid:
    enc = loads(Path(path).read_text())
    return decode(enc.q, enc.n, enc.k, enc)


def write_matroid(M: QMatroid | Encoding, path) -> None:
    Path(path).write_text(dumps(M))
