"""GL(n, q) acting on subspaces and q-matroids.

Conventions: a group element is an invertible matrix G acting on column
vectors, g(v) = G v, so composition is matrix product.  ``transform(g, M)``
is the q-matroid with rank X -> r(g^-1 X), which makes transform a left
action.  Automorphism orders count matrices, scalars included.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .gf import AmbientSpace, InputError, SubspaceRep, ambient, gaussian_binomial, reverse_canonical
from .qmatroid import QMatroid, flats


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def _inv_mod(mat: np.ndarray, q: int) -> np.ndarray:
    n = mat.shape[0]
    a = np.concatenate([mat % q, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r, col] % q), None)
        if piv is None:
            raise InputError("matrix is singular")
        a[[col, piv]] = a[[piv, col]]
        a[col] = a[col] * pow(int(a[col, col]), -1, q) % q
        for r in range(n):
            if r != col and a[r, col]:
                a[r] = (a[r] - a[r, col] * a[col]) % q
    return a[:, n:]


@dataclass(frozen=True)
class GroupElement:
    q: int
    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def from_array(cls, q: int, arr) -> "GroupElement":
        arr = np.asarray(arr, dtype=np.int64) % q
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InputError("group elements are square matrices")
        g = cls(q, tuple(tuple(int(x) for x in row) for row in arr))
        _inv_mod(g.array(), q)  # raises on singular input
        return g

    @property
    def n(self) -> int:
        return len(self.matrix)

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.n, self.n)

    def inverse(self) -> "GroupElement":
        return GroupElement.from_array(self.q, _inv_mod(self.array(), self.q))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.from_array(self.q, self.array() @ other.array())

    def columns(self) -> list[int]:
        """Codes of g(e_1), ..., g(e_n)."""
        arr = self.array()
        w = self.q ** np.arange(self.n)
        return [int(arr[:, j] @ w) for j in range(self.n)]

    def __str__(self) -> str:
        return "\n".join("".join(str(x) for x in row) for row in self.matrix)


def identity(n: int, q: int) -> GroupElement:
    return GroupElement(q, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def random_element(n: int, q: int, rng: np.random.Generator) -> GroupElement:
    while True:
        arr = rng.integers(0, q, size=(n, n))
        try:
            return GroupElement.from_array(q, arr)
        except InputError:
            continue


def _from_columns(q: int, n: int, cols) -> GroupElement:
    A = ambient(q, n)
    arr = np.stack([A.digits[int(c)] for c in cols], axis=1)
    return GroupElement.from_array(q, arr)


def apply(g: GroupElement, x: SubspaceRep) -> SubspaceRep:
    if (g.q, g.n) != (x.q, x.n):
        raise InputError("group element and subspace have different parameters")
    if x.k == 0:
        return x
    rows = x.matrix() @ g.array().T % g.q
    return reverse_canonical(rows.tolist(), g.q, g.n)


@lru_cache(maxsize=None)
def _vector_tables(q: int, n: int):
    A = ambient(q, n)
    w = q ** np.arange(n)
    add = ((A.digits[:, None, :] + A.digits[None, :, :]) % q) @ w
    smul = np.stack([(t * A.digits % q) @ w for t in range(q)])
    padded = np.full((A.N, max(n, 1)), -1, dtype=np.int64)
    for i, codes in enumerate(A.row_codes):
        padded[i, : len(codes)] = codes
    join = np.ascontiguousarray(A.join.astype(np.int64))
    return add.astype(np.int64), smul.astype(np.int64), padded, join


@lru_cache(maxsize=None)
def _sweep_tables(q: int, n: int, k: int):
    A = ambient(q, n)
    seg = np.array([gaussian_binomial(m, k, q) if k <= m else 0 for m in range(n + 1)], dtype=np.int64)
    kb = np.ascontiguousarray(A.basis_codes[k]) if k else np.zeros((1, 0), dtype=np.int64)
    return kb, seg, int(A.offsets[k])


def subspace_permutation(g: GroupElement, A: AmbientSpace | None = None) -> np.ndarray:
    """perm[i] = global index of g(X_i)."""
    A = A or ambient(g.q, g.n)
    add, smul, padded, join = _vector_tables(A.q, A.n)
    cols = np.array(g.columns(), dtype=np.int64)
    return kernels.subspace_images(A.n, cols, add, smul, padded, join)


def transform(g: GroupElement, M: QMatroid) -> QMatroid:
    if (g.q, g.n) != (M.q, M.n):
        raise InputError("group element and q-matroid have different parameters")
    perm = subspace_permutation(g, M.ambient)
    rank = np.empty_like(M.rank)
    rank[perm] = M.rank
    return QMatroid(M.ambient, rank, validate=False)


def _run(mode: int, q: int, n: int, k: int, ref: np.ndarray, lo: int, hi: int):
    add, smul, _, join = _vector_tables(q, n)
    kb, seg, koff = _sweep_tables(q, n, k)
    best = np.full(len(ref), 2, dtype=np.uint8)
    cols = np.zeros(max(n, 1), dtype=np.int64)
    status, count = kernels.orbit_sweep(
        mode, n, k, ref, kb, seg, join, koff, add, smul, lo, hi, best, cols
    )
    return int(status), int(count), best, cols


def _run_packed(args):
    return _run(*args)


def default_jobs() -> int:
    env = os.environ.get("QMAT_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _partitions(q: int, n: int, jobs: int) -> list[tuple[int, int]]:
    size = q ** n
    jobs = max(1, min(jobs, size - 1))
    edges = np.linspace(1, size, jobs + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _sweep(mode: int, M: QMatroid, jobs: int = 1):
    ref = np.ascontiguousarray(M.basis_bits, dtype=np.uint8)
    parts = _partitions(M.q, M.n, jobs)
    args = [(mode, M.q, M.n, M.k, ref, lo, hi) for lo, hi in parts]
    if len(parts) == 1:
        return [_run(*args[0])]
    out = []
    with ProcessPoolExecutor(len(parts)) as ex:
        futures = [ex.submit(_run_packed, a) for a in args]
        for f in futures:
            res = f.result()
            out.append(res)
            if mode == kernels.CHECK and res[0] < 0:
                for other in futures:
                    other.cancel()
                break
    return out


def is_canonical(M: QMatroid, jobs: int = 1) -> bool:
    """True iff no element of GL(n, q) gives a smaller encoding."""
    if M.n == 0:
        return True
    return all(status >= 0 for status, *_ in _sweep(kernels.CHECK, M, jobs))


def automorphism_order(M: QMatroid, jobs: int = 1) -> int:
    if M.n == 0:
        return 1
    return sum(count for _, count, *_ in _sweep(kernels.COUNT, M, jobs))


def canonical_data(M: QMatroid, jobs: int = 1):
    """(canonical matroid, witness g with transform(g, M) = canonical, |Aut|)."""
    if M.n == 0:
        return M, identity(0, M.q), 1
    results = _sweep(kernels.MINIMIZE, M, jobs)
    best = min(r[2].tobytes() for r in results)
    winner = next(r for r in results if r[2].tobytes() == best)
    aut = sum(r[1] for r in results if r[2].tobytes() == best)
    h = _from_columns(M.q, M.n, winner[3])
    g = h.inverse()
    return transform(g, M), g, aut


def canonical_form(M: QMatroid, jobs: int = 1) -> tuple[QMatroid, GroupElement]:
    canon, g, _ = canonical_data(M, jobs)
    return canon, g


def invariants(M: QMatroid) -> tuple:
    """Isomorphism invariants: rank, number of bases, flat profile."""
    F = flats(M)
    profile = sorted(zip(F.dims.tolist(), M.rank[F.indices].tolist()))
    return (M.k, int(M.basis_bits.sum()), tuple(profile))


def is_isomorphic(M1: QMatroid, M2: QMatroid) -> GroupElement | None:
    """A witness g with transform(g, M1) = M2, or None."""
    if (M1.q, M1.n) != (M2.q, M2.n):
        raise InputError("q-matroids live in different ambient spaces")
    if invariants(M1) != invariants(M2):
        return None
    c1, g1 = canonical_form(M1)
    c2, g2 = canonical_form(M2)
    if c1 != c2:
        return None
    return g2.inverse() @ g1
