"""Classification of q-matroids up to GL(n, q) by one-dimensional extension.

Every canonical q-matroid of dimension n and rank k restricts to a canonical
one on U^(n-1), of rank k (non-trivial extension) or k - 1 (trivial
extension).  So the classes at (n, k) are the canonical non-trivial
extensions of the classes at (n - 1, k), plus the trivial extensions of the
classes at (n - 1, k - 1).

Work is split into tasks (parent, range of cuts at the first new point); a
task returns the canonical children it found and the results are merged into
a sorted set, so the output does not depend on the number of workers.
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .extension import extend, modular_cuts, search, trivial_extension
from .gf import InputError, check_field, gaussian_binomial
from .group import canonical_form, default_jobs, is_canonical
from .oracle import brute_force_classify
from .qmatroid import Encoding, QMatroid, decode, dual, free, uniform

__all__ = [
    "ClassTable",
    "IntegrityError",
    "brute_force_classify",
    "classify",
    "classify_full",
    "format_table",
    "load",
    "load_encodings",
    "save",
    "save_encodings",
]

log = logging.getLogger(__name__)

HEADER = "# qmat-classes v1"


class IntegrityError(ValueError):
    """A stored classification file is damaged or inconsistent."""


@dataclass
class ClassTable:
    q: int
    rows: dict[tuple[int, int], list[Encoding]] = field(default_factory=dict)
    meta: dict[tuple[int, int], dict] = field(default_factory=dict)

    def counts(self, n: int) -> tuple[int, ...]:
        return tuple(len(self.rows.get((n, k), ())) for k in range(n + 1))

    def matroids(self, n: int, k: int) -> list[QMatroid]:
        return [to_matroid(e) for e in self.rows[(n, k)]]

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassTable) and self.q == other.q and self.rows == other.rows


def to_matroid(enc: Encoding) -> QMatroid:
    return decode(enc.q, enc.n, enc.k, enc)


# -- the extension step ------------------------------------------------------

def _split(ncuts: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, ncuts))
    edges = np.linspace(0, ncuts, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _task(q: int, n: int, k: int, bits: str, lo: int, hi: int) -> tuple[int, list[str]]:
    """Canonical non-trivial extensions of one parent, first cut in [lo, hi)."""
    M = to_matroid(Encoding(q, n, k, bits))
    cuts = modular_cuts(M)
    count, rows = search(M, kernels.LEAF_CANONICAL, cuts, (lo, hi), skip_trivial=True)
    masks = [c.members for c in cuts]
    out = [extend(M, tuple(masks[int(c)] for c in row)).encoding().bits for row in rows]
    return count, out


def _task_packed(args):
    return _task(*args)


def _checkpoint_dir(out_dir: Path, q: int, n: int, k: int) -> Path:
    return out_dir / f".q{q}_n{n}_k{k}.parts"


def _extend_parents(q: int, n: int, k: int, parents: list[Encoding], jobs: int, ckpt: Path | None, resume: bool) -> set[str]:
    found: set[str] = set()
    todo = []
    for p_i, parent in enumerate(parents):
        part = ckpt / f"parent{p_i:05d}.txt" if ckpt else None
        if resume and part is not None and part.exists():
            found.update(ln for ln in part.read_text().split() if ln)
            log.info("(%d,%d,%d) parent %d restored from checkpoint", q, n, k, p_i)
            continue
        ncuts = len(modular_cuts(to_matroid(parent)))
        slices = _split(ncuts, jobs * 4 if jobs > 1 else 1)
        todo.append((p_i, part, [(q, n - 1, k, parent.bits, lo, hi) for lo, hi in slices]))

    def finish(p_i, part, results):
        children = sorted({b for _, bs in results for b in bs})
        nsel = sum(c for c, _ in results)
        log.info("(%d,%d,%d) parent %d/%d: %d selectors, %d canonical", q, n, k, p_i + 1, len(parents), nsel, len(children))
        if part is not None:
            part.parent.mkdir(parents=True, exist_ok=True)
            _atomic_write(part, "".join(b + "\n" for b in children))
        found.update(children)

    if jobs <= 1:
        for p_i, part, args in todo:
            finish(p_i, part, [_task(*a) for a in args])
        return found
    with ProcessPoolExecutor(jobs) as ex:
        futures = [(p_i, part, [ex.submit(_task_packed, a) for a in args]) for p_i, part, args in todo]
        for p_i, part, fs in futures:
            finish(p_i, part, [f.result() for f in fs])
    return found


_CACHE: dict[tuple[int, int, int], tuple[Encoding, ...]] = {}


def classify(q: int, n: int, k: int, jobs: int | None = None, out_dir=None, resume: bool = False) -> list[Encoding]:
    """Canonical representatives of all q-matroids of dimension n and rank k.

    With ``out_dir`` the result is written as ``q<q>_n<n>_k<k>.qmc`` and each
    finished parent is checkpointed; ``resume`` reuses both.
    """
    check_field(q)
    if not 0 <= k <= n:
        raise InputError(f"rank {k} outside 0..{n}")
    jobs = default_jobs() if jobs is None else max(1, jobs)
    key = (q, n, k)
    if key in _CACHE:
        return list(_CACHE[key])
    out_dir = Path(out_dir) if out_dir is not None else None
    target = out_dir / _filename(q, n, k) if out_dir else None
    if resume and target is not None and target.exists():
        encs = load_encodings(target, sample=0)
        _CACHE[key] = tuple(encs)
        return encs

    t0 = time.perf_counter()
    if k == 0:
        encs = [uniform(0, n, q).encoding()]
    elif k == n:
        encs = [free(n, q).encoding()]
    else:
        parents = classify(q, n - 1, k, jobs, out_dir, resume)
        lower = classify(q, n - 1, k - 1, jobs, out_dir, resume)
        ckpt = _checkpoint_dir(out_dir, q, n, k) if out_dir else None
        bits = _extend_parents(q, n, k, parents, jobs, ckpt, resume)
        for enc in lower:
            bits.add(trivial_extension(to_matroid(enc)).encoding().bits)
        encs = [Encoding(q, n, k, b) for b in sorted(bits)]
        log.info("(%d,%d,%d): %d classes in %.1fs", q, n, k, len(encs), time.perf_counter() - t0)
    _CACHE[key] = tuple(encs)
    if target is not None:
        save_encodings(encs, target, q, n, k)
        ckpt = _checkpoint_dir(out_dir, q, n, k)
        if ckpt.exists():
            for f in ckpt.iterdir():
                f.unlink()
            ckpt.rmdir()
    return encs


def dual_classes(encs: list[Encoding], jobs: int = 1) -> list[Encoding]:
    """Canonical forms of the duals, sorted."""
    out = set()
    for enc in encs:
        canon, _ = canonical_form(dual(to_matroid(enc)), jobs)
        out.add(canon.encoding())
    return sorted(out)


def classify_full(q: int, n: int, jobs: int | None = None, out_dir=None, resume: bool = False) -> ClassTable:
    """All ranks of dimension n: low ranks directly, high ranks by duality."""
    jobs = default_jobs() if jobs is None else max(1, jobs)
    table = ClassTable(q)
    direct = n // 2
    for k in range(direct + 1):
        t0 = time.perf_counter()
        table.rows[(n, k)] = classify(q, n, k, jobs, out_dir, resume)
        table.meta[(n, k)] = {"method": "extension", "seconds": round(time.perf_counter() - t0, 3)}
    for k in range(direct + 1, n + 1):
        t0 = time.perf_counter()
        path = Path(out_dir) / _filename(q, n, k) if out_dir else None
        if resume and path is not None and path.exists():
            encs = load_encodings(path, sample=0)
        else:
            encs = dual_classes(table.rows[(n, n - k)], jobs)
            if path is not None:
                save_encodings(encs, path, q, n, k)
        table.rows[(n, k)] = encs
        table.meta[(n, k)] = {"method": "dual", "seconds": round(time.perf_counter() - t0, 3)}
        _CACHE.setdefault((q, n, k), tuple(encs))
    return table


def format_table(table: ClassTable, max_n: int) -> str:
    """Counts with rank k down the side and dimension n across."""
    cols = list(range(1, max_n + 1))
    width = max(3, *(len(str(len(v))) for v in table.rows.values())) if table.rows else 3
    lines = ["k\\n " + " ".join(f"{n:>{width}}" for n in cols)]
    for k in range(max_n + 1):
        cells = []
        for n in cols:
            cells.append(f"{len(table.rows[(n, k)]):>{width}}" if (n, k) in table.rows and k <= n else " " * width)
        lines.append(f"{k:>3} " + " ".join(cells).rstrip())
    return "\n".join(lines)


# -- files -------------------------------------------------------------------

def _filename(q: int, n: int, k: int) -> str:
    return f"q{q}_n{n}_k{k}.qmc"


def _digest(lines: list[str]) -> str:
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def save_encodings(encs: list[Encoding], path, q: int, n: int, k: int) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    bits = [e.bits for e in encs]
    text = f"{HEADER} q={q} n={n} k={k} count={len(bits)}\n"
    text += "".join(b + "\n" for b in bits)
    text += f"# sha256={_digest(bits)}\n"
    _atomic_write(path, text)


def load_encodings(path, sample: int = 2, seed: int = 0) -> list[Encoding]:
    """Read a class file, checking header, checksum, order and lengths.

    ``sample`` entries (chosen with a fixed seed) are re-checked for
    canonicality.
    """
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith(HEADER):
        raise IntegrityError(f"{path}: missing header")
    try:
        params = dict(tok.split("=") for tok in lines[0][len(HEADER):].split())
        q, n, k, count = (int(params[x]) for x in ("q", "n", "k", "count"))
    except (KeyError, ValueError) as exc:
        raise IntegrityError(f"{path}: bad header {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if ln and not ln.startswith("#")]
    sums = [ln for ln in lines[1:] if ln.startswith("# sha256=")]
    if len(body) != count:
        raise IntegrityError(f"{path}: header says {count} entries, found {len(body)}")
    if not sums or sums[-1].split("=", 1)[1] != _digest(body):
        raise IntegrityError(f"{path}: checksum mismatch")
    if body != sorted(set(body)):
        raise IntegrityError(f"{path}: entries not strictly ascending")
    size = gaussian_binomial(n, k, q)
    encs = []
    for b in body:
        if len(b) != size or set(b) - {"0", "1"}:
            raise IntegrityError(f"{path}: malformed encoding {b!r}")
        encs.append(Encoding(q, n, k, b))
    rng = random.Random(seed)
    for enc in rng.sample(encs, min(sample, len(encs))):
        if not is_canonical(to_matroid(enc)):
            raise IntegrityError(f"{path}: {enc.bits} is not canonical")
    return encs


def save(table: ClassTable, out_dir) -> None:
    for (n, k), encs in sorted(table.rows.items()):
        save_encodings(encs, Path(out_dir) / _filename(table.q, n, k), table.q, n, k)


def load(out_dir, q: int | None = None, sample: int = 2) -> ClassTable:
    out_dir = Path(out_dir)
    files = sorted(out_dir.glob("q*_n*_k*.qmc"))
    table = None
    for f in files:
        encs = load_encodings(f, sample)
        head = dict(tok.split("=") for tok in f.read_text().splitlines()[0][len(HEADER):].split())
        fq, n, k = int(head["q"]), int(head["n"]), int(head["k"])
        if q is not None and fq != q:
            continue
        if table is None:
            table = ClassTable(fq)
        elif table.q != fq:
            raise IntegrityError(f"{out_dir}: mixed field sizes")
        table.rows[(n, k)] = encs
    if table is None:
        raise InputError(f"no class files in {out_dir}")
    return table


def shipped(q: int, n: int, k: int) -> Path:
    """Path of a class file bundled with the package."""
    return Path(__file__).parent / "data" / _filename(q, n, k)
