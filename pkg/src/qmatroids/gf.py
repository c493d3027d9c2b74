"""Linear algebra over prime fields and the subspace lattice of F_q^n.

Vectors of F_q^n are handled as integer *codes*: coordinate ``i`` (1-based)
is the base-``q`` digit of weight ``q**(i-1)``.  With this convention the
reverse lexicographic order on vectors (last coordinate most significant)
is plain integer order, and ``U^(m)`` (vectors vanishing beyond coordinate
``m``) is exactly the code range ``[0, q**m)``.

A subspace is stored in reverse-canonical form: every row ends (reading left
to right) in a 1, the pivots strictly increase from row to row, and each
pivot column has a single nonzero entry.  Subspaces of equal dimension are
ordered by comparing the reversed row-major flattening, which amounts to
comparing the tuple of row codes taken from the last row backwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property, lru_cache

import numpy as np


class InputError(ValueError):
    """Malformed or mismatched linear-algebra input."""


class Cmp(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q ** 0.5) + 1))


def check_field(q: int) -> None:
    if not isinstance(q, (int, np.integer)) or not is_prime(int(q)):
        raise InputError(f"q={q!r} is not a prime (only prime fields are supported)")


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if n < 0 or k < 0 or k > n:
        raise InputError(f"need 0 <= k <= n, got n={n}, k={k}")
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def vec_code(v, q: int) -> int:
    return sum(int(x) * q ** i for i, x in enumerate(v))


def code_vec(c: int, q: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        c, d = divmod(c, q)
        out.append(d)
    return tuple(out)


def _reduce(rows: list[list[int]], q: int, n: int) -> list[list[int]]:
    """Trailing-pivot reduced echelon form of the span of ``rows``."""
    rows = [list(r) for r in rows]
    pivots: list[tuple[int, list[int]]] = []
    free = rows
    for col in range(n - 1, -1, -1):
        hit = next((r for r in free if r[col] % q), None)
        if hit is None:
            continue
        free = [r for r in free if r is not hit]
        inv = pow(hit[col], -1, q)
        for j in range(n):
            hit[j] = hit[j] * inv % q
        for r in free:
            c = r[col]
            if c:
                for j in range(n):
                    r[j] = (r[j] - c * hit[j]) % q
        for _, r in pivots:
            c = r[col]
            if c:
                for j in range(n):
                    r[j] = (r[j] - c * hit[j]) % q
        pivots.append((col, hit))
    pivots.sort()
    return [r for _, r in pivots]


@dataclass(frozen=True)
class SubspaceRep:
    """A subspace of F_q^n given by its reverse-canonical generator rows."""

    q: int
    n: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(vec_code(r, self.q) for r in self.rows)

    def key(self) -> tuple:
        """Sort key realising the order on subspaces."""
        return (self.k, tuple(reversed(self.codes)))

    def _check(self, other: "SubspaceRep") -> None:
        if not isinstance(other, SubspaceRep) or (self.q, self.n) != (other.q, other.n):
            raise InputError("subspaces live in different ambient spaces")

    def __lt__(self, other: "SubspaceRep") -> bool:
        self._check(other)
        return self.key() < other.key()

    def __le__(self, other: "SubspaceRep") -> bool:
        self._check(other)
        return self.key() <= other.key()

    def __str__(self) -> str:
        return format_subspace(self)

    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.k, self.n)


def reverse_canonical(rows, q: int, n: int | None = None) -> SubspaceRep:
    """Canonical representative of the row span of ``rows`` over F_q."""
    check_field(q)
    rows = [list(r) for r in rows]
    if n is None:
        if not rows:
            raise InputError("ambient dimension needed for an empty row list")
        n = len(rows[0])
    for r in rows:
        if len(r) != n:
            raise InputError(f"row {r} has length {len(r)}, expected {n}")
        for x in r:
            if not isinstance(x, (int, np.integer)) or not 0 <= x < q:
                raise InputError(f"entry {x!r} is not an element of F_{q}")
    red = _reduce([[int(x) for x in r] for r in rows], q, n)
    return SubspaceRep(q, n, tuple(tuple(r) for r in red))


def compare(a: SubspaceRep, b: SubspaceRep) -> Cmp:
    a._check(b)
    ka, kb = a.key(), b.key()
    if ka < kb:
        return Cmp.LT
    return Cmp.EQ if ka == kb else Cmp.GT


def zero_space(n: int, q: int) -> SubspaceRep:
    return SubspaceRep(q, n, ())


def full_space(n: int, q: int) -> SubspaceRep:
    return SubspaceRep(q, n, tuple(tuple(int(i == j) for i in range(n)) for j in range(n)))


def coordinate_space(m: int, n: int, q: int) -> SubspaceRep:
    """U^(m): vectors of F_q^n vanishing beyond coordinate m."""
    return SubspaceRep(q, n, tuple(tuple(int(i == j) for i in range(n)) for j in range(m)))


def _grassmannian_rows(n: int, k: int, q: int) -> list[tuple[tuple[int, ...], ...]]:
    out = []
    for piv in itertools.combinations(range(n), k):
        pset = set(piv)
        slots = [(j, c) for j, p in enumerate(piv) for c in range(p) if c not in pset]
        for vals in itertools.product(range(q), repeat=len(slots)):
            rows = [[0] * n for _ in range(k)]
            for j, p in enumerate(piv):
                rows[j][p] = 1
            for (j, c), v in zip(slots, vals):
                rows[j][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return out


def grassmannian(n: int, k: int, q: int) -> list[SubspaceRep]:
    """All k-subspaces of F_q^n in ascending order."""
    check_field(q)
    if not 0 <= k <= n:
        raise InputError(f"need 0 <= k <= n, got n={n}, k={k}")
    subs = [SubspaceRep(q, n, rows) for rows in _grassmannian_rows(n, k, q)]
    subs.sort(key=SubspaceRep.key)
    return subs


def nullspace(x: SubspaceRep) -> SubspaceRep:
    """Vectors v with <row, v> = 0 for every row of ``x``."""
    q, n = x.q, x.n
    pivots = {}
    for r in x.rows:
        p = max(i for i, c in enumerate(r) if c)
        pivots[p] = r
    basis = []
    for f in range(n):
        if f in pivots:
            continue
        v = [0] * n
        v[f] = 1
        for p, r in pivots.items():
            v[p] = (-r[f]) % q
        basis.append(v)
    return reverse_canonical(basis, q, n)


def orthogonal_complement(x: SubspaceRep) -> SubspaceRep:
    return nullspace(x)


def subspace_sum(a: SubspaceRep, b: SubspaceRep) -> SubspaceRep:
    a._check(b)
    return reverse_canonical(list(a.rows) + list(b.rows), a.q, a.n)


def intersect(a: SubspaceRep, b: SubspaceRep) -> SubspaceRep:
    a._check(b)
    return nullspace(subspace_sum(nullspace(a), nullspace(b)))


def contains(a: SubspaceRep, b: SubspaceRep) -> bool:
    """True iff ``b`` is a subspace of ``a``."""
    a._check(b)
    return subspace_sum(a, b).k == a.k


def new_points(n: int, q: int) -> list[SubspaceRep]:
    """Points of U^(n+1) outside U^(n), ascending.

    In reverse-canonical form these are exactly the vectors whose last
    coordinate is 1; there are q**n of them.
    """
    check_field(q)
    pts = []
    for c in range(q ** n):
        v = code_vec(c, q, n) + (1,)
        pts.append(SubspaceRep(q, n + 1, (v,)))
    return pts


def parse_subspace(text: str, q: int, n: int | None = None) -> SubspaceRep:
    """Parse ``10010;01100;00001`` (coordinates 1..n left to right)."""
    text = text.strip()
    if text in ("", "0"):
        if n is None:
            raise InputError("cannot infer ambient dimension of the zero space")
        return zero_space(n, q)
    rows = []
    for part in text.split(";"):
        part = part.strip()
        if not part.isdigit():
            raise InputError(f"bad subspace row {part!r}")
        rows.append([int(ch) for ch in part])
    if n is not None and any(len(r) != n for r in rows):
        raise InputError(f"rows of {text!r} do not have length {n}")
    if all(not any(r) for r in rows):
        return zero_space(len(rows[0]), q)
    return reverse_canonical(rows, q)


def format_subspace(x: SubspaceRep) -> str:
    if not x.rows:
        return "0" * x.n
    return ";".join("".join(str(c) for c in r) for r in x.rows)


class AmbientSpace:
    """All subspaces of F_q^n with lookup tables.

    Every subspace has a *global index*: subspaces are grouped by dimension
    (offset ``offsets[k]``) and ordered within a dimension.  Since dimension
    comes first in the order, global index order is the subspace order.
    Because the order on each Grassmannian lists the subspaces of U^(m)
    first, the subspaces of F_q^m keep their index when F_q^m is viewed as
    U^(m) inside F_q^n (within each dimension).
    """

    def __init__(self, q: int, n: int):
        check_field(q)
        if n < 0:
            raise InputError("negative dimension")
        self.q = q
        self.n = n
        self.size = q ** n
        self.grass = [grassmannian(n, k, q) for k in range(n + 1)]
        self.counts = np.array([len(g) for g in self.grass], dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.counts)]).astype(np.int64)
        self.subspaces: list[SubspaceRep] = [x for g in self.grass for x in g]
        self.N = len(self.subspaces)
        self.dims = np.repeat(np.arange(n + 1), self.counts).astype(np.int64)
        self._index = {x.codes: i for i, x in enumerate(self.subspaces)}

        self.digits = np.array([code_vec(c, q, n) for c in range(self.size)], dtype=np.int64).reshape(self.size, n)
        self.row_codes = [x.codes for x in self.subspaces]
        # per-dimension basis code arrays, shape (count_k, k)
        self.basis_codes = [
            np.array([x.codes for x in g], dtype=np.int64).reshape(len(g), k)
            for k, g in enumerate(self.grass)
        ]
        self.point_codes = self.basis_codes[1][:, 0].copy() if n else np.zeros(0, dtype=np.int64)
        self.P = len(self.point_codes)
        self.vec_point = np.full(self.size, -1, dtype=np.int64)
        for p, c in enumerate(self.point_codes):
            for s in range(1, q):
                self.vec_point[self._scale(int(c), s)] = p

        self.vectors = [self._span_codes(x.codes) for x in self.subspaces]
        self.pointsets = []
        for vs in self.vectors:
            bits = 0
            for c in vs:
                if c:
                    bits |= 1 << int(self.vec_point[c])
            self.pointsets.append(bits)
        self._by_pointset = {b: i for i, b in enumerate(self.pointsets)}
        self.join = self._build_join()
        for arr in (self.counts, self.offsets, self.dims, self.digits, self.point_codes, self.vec_point, self.join):
            arr.setflags(write=False)

    # -- construction helpers ------------------------------------------------
    def _scale(self, c: int, s: int) -> int:
        return vec_code([(s * d) % self.q for d in code_vec(c, self.q, self.n)], self.q)

    def _span_codes(self, codes) -> np.ndarray:
        k = len(codes)
        if k == 0:
            return np.zeros(1, dtype=np.int64)
        rows = self.digits[list(codes)]
        coeffs = np.array(list(itertools.product(range(self.q), repeat=k)), dtype=np.int64)
        vecs = coeffs @ rows % self.q
        return np.sort(vecs @ (self.q ** np.arange(self.n)))

    def _build_join(self) -> np.ndarray:
        join = np.empty((self.N, self.size), dtype=np.int32)
        q, n = self.q, self.n
        for i, x in enumerate(self.subspaces):
            inside = np.zeros(self.size, dtype=bool)
            inside[self.vectors[i]] = True
            base = [list(r) for r in x.rows]
            done: dict[int, int] = {}
            for v in range(self.size):
                if inside[v]:
                    join[i, v] = i
                    continue
                p = int(self.point_codes[self.vec_point[v]])
                if p not in done:
                    red = _reduce(base + [list(code_vec(p, q, n))], q, n)
                    done[p] = self._index[tuple(vec_code(r, q) for r in red)]
                join[i, v] = done[p]
        return join

    # -- lookups -------------------------------------------------------------
    def index(self, x: SubspaceRep) -> int:
        if (x.q, x.n) != (self.q, self.n):
            raise InputError(f"subspace of F_{x.q}^{x.n} used in F_{self.q}^{self.n}")
        return self._index[x.codes]

    def index_of_codes(self, codes) -> int:
        return self._index[tuple(codes)]

    def index_of_pointset(self, bits: int) -> int:
        return self._by_pointset[bits]

    def span_index(self, codes) -> int:
        i = 0
        for c in codes:
            i = int(self.join[i, int(c)])
        return i

    def __getitem__(self, i) -> SubspaceRep:
        return self.subspaces[i]

    def dim_range(self, k: int) -> range:
        return range(int(self.offsets[k]), int(self.offsets[k + 1]))

    def points(self) -> range:
        return self.dim_range(1)

    def point_global(self, p: int) -> int:
        return int(self.offsets[1]) + p

    @property
    def top(self) -> int:
        return self.N - 1

    def coordinate_index(self, m: int) -> int:
        """Global index of U^(m)."""
        return int(self.offsets[m])

    # -- lattice tables ------------------------------------------------------
    @cached_property
    def meet(self) -> np.ndarray:
        """meet[a, b] = index of a ∩ b."""
        N = self.N
        if self.P <= 64:
            ps = np.array(self.pointsets, dtype=np.uint64)
            order = np.argsort(ps)
            sorted_ps = ps[order]
            out = np.empty((N, N), dtype=np.int32)
            for a in range(N):
                inter = ps[a] & ps
                out[a] = order[np.searchsorted(sorted_ps, inter)]
        else:
            out = np.empty((N, N), dtype=np.int32)
            for a in range(N):
                pa = self.pointsets[a]
                for b in range(N):
                    out[a, b] = self._by_pointset[pa & self.pointsets[b]]
        out.setflags(write=False)
        return out

    @cached_property
    def sum(self) -> np.ndarray:
        """sum[a, b] = index of a + b."""
        out = np.empty((self.N, self.N), dtype=np.int32)
        allidx = np.arange(self.N)
        for b, codes in enumerate(self.row_codes):
            s = allidx
            for c in codes:
                s = self.join[s, c]
            out[:, b] = s
        out.setflags(write=False)
        return out

    @cached_property
    def leq(self) -> np.ndarray:
        """leq[a, b] is True iff a ≤ b."""
        out = self.meet == np.arange(self.N)[:, None]
        out.setflags(write=False)
        return out

    @cached_property
    def perp(self) -> np.ndarray:
        out = np.array([self.index(nullspace(x)) for x in self.subspaces], dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def point_join(self) -> np.ndarray:
        """point_join[a, p] = index of a + (p-th point)."""
        out = np.ascontiguousarray(self.join[:, self.point_codes])
        out.setflags(write=False)
        return out

    def __repr__(self) -> str:
        return f"AmbientSpace(q={self.q}, n={self.n})"


@lru_cache(maxsize=None)
def ambient(q: int, n: int) -> AmbientSpace:
    """Shared, immutable ambient space for F_q^n."""
    return AmbientSpace(q, n)


def embed_index(small: AmbientSpace, big: AmbientSpace, i: int) -> int:
    """Index in ``big`` of subspace ``i`` of ``small`` viewed inside U^(small.n)."""
    k = int(small.dims[i])
    return int(big.offsets[k]) + i - int(small.offsets[k])


def embedding(small: AmbientSpace, big: AmbientSpace) -> np.ndarray:
    """Vector of ``embed_index`` over all subspaces of ``small``."""
    k = small.dims
    return big.offsets[k] + np.arange(small.N) - small.offsets[k]
