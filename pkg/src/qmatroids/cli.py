"""Command-line front end: ``qmat <command> ...``.

Exit status is 0 on success, 1 when the input is valid syntax but the
computation rejects it, and 2 for usage errors.  Progress messages go to
stderr, data to stdout.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import classify as cls
from .extension import extend, minimal_members, modular_cuts, selectors
from .gf import InputError, format_subspace, parse_subspace
from .group import automorphism_order, canonical_form, default_jobs
from .qmatroid import ValidationError, dual, dumps, read_matroid, restriction
from .steiner import SteinerSystem, fano_scan, is_q_steiner, matroid_from_steiner, read_blocks

DOMAIN_ERRORS = (InputError, ValidationError, cls.IntegrityError, OSError)


def _jobs(value: int | None) -> int:
    return default_jobs() if value is None else value


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _matroid_arg(f):
    return click.argument("path", type=click.Path(dir_okay=False))(f)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("-v", "--verbose", is_flag=True, help="Progress messages on stderr.")
def cli(verbose: bool) -> None:
    """Classify and inspect q-matroids over prime fields."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(message)s",
    )


@cli.command()
@click.option("--q", "q", type=int, required=True)
@click.option("--n", "n", type=click.IntRange(min=0), required=True)
@click.option("--k", "k", type=click.IntRange(min=0), required=True)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Directory for .qmc files.")
@click.option("--jobs", type=click.IntRange(min=1), default=None)
@click.option("--resume", is_flag=True, help="Reuse finished files and parent checkpoints.")
def classify(q, n, k, out, jobs, resume):
    """Canonical representatives of dimension N and rank K."""
    if k > n:
        raise click.BadParameter("rank exceeds dimension", param_hint="--k")
    if n // 2 < k < n:
        encs = cls.dual_classes(cls.classify(q, n, n - k, _jobs(jobs), out, resume), _jobs(jobs))
        if out:
            cls.save_encodings(encs, Path(out) / f"q{q}_n{n}_k{k}.qmc", q, n, k)
    else:
        encs = cls.classify(q, n, k, _jobs(jobs), out, resume)
    for e in encs:
        click.echo(e.bits)
    click.echo(f"{len(encs)} classes", err=True)


@cli.command()
@click.option("--q", "q", type=int, required=True)
@click.option("--max-n", "max_n", type=click.IntRange(min=1), required=True)
@click.option("--jobs", type=click.IntRange(min=1), default=None)
@click.option("--classes", type=click.Path(file_okay=False), default=None, help="Cache directory.")
def table(q, max_n, jobs, classes):
    """Number of classes for every n <= MAX_N and every rank."""
    t = cls.ClassTable(q)
    for n in range(1, max_n + 1):
        row = cls.classify_full(q, n, _jobs(jobs), classes, resume=classes is not None)
        t.rows.update(row.rows)
    click.echo(cls.format_table(t, max_n))


@cli.command()
@_matroid_arg
def cuts(path):
    """Modular cuts, one per line, as their minimal flats."""
    M = read_matroid(path)
    for c in modular_cuts(M, max_flats=1 << 16):
        mins = minimal_members(c)
        click.echo(",".join(format_subspace(x) for x in mins) if mins else "-")


@cli.command(name="selectors")
@_matroid_arg
def selectors_cmd(path):
    """Modular cut selectors as point=cut-index pairs."""
    M = read_matroid(path)
    all_cuts = modular_cuts(M, max_flats=1 << 16)
    index = {c.members: i for i, c in enumerate(all_cuts)}
    for sel in selectors(M, all_cuts):
        pts = sel.points()
        click.echo(" ".join(f"{format_subspace(p)}={index[v]}" for p, v in zip(pts, sel.values)))


@cli.command(name="extend")
@_matroid_arg
@click.option("--selector", "sel_idx", type=click.IntRange(min=0), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def extend_cmd(path, sel_idx, out):
    """The extension given by selector number IDX of the `selectors` listing."""
    M = read_matroid(path)
    total = 0
    for i, sel in enumerate(selectors(M, modular_cuts(M, max_flats=1 << 16))):
        if i == sel_idx:
            _emit(dumps(extend(M, sel, validate=True)), out)
            return
        total = i + 1
    raise InputError(f"selector index {sel_idx} out of range ({total} selectors)")


@cli.command()
@_matroid_arg
@click.option("--jobs", type=click.IntRange(min=1), default=None)
def canon(path, jobs):
    """Canonical form, with a witness matrix."""
    M = read_matroid(path)
    c, g = canonical_form(M, _jobs(jobs))
    click.echo(dumps(c), nl=False)
    click.echo(f"canonical: {'true' if c == M else 'false'}")
    click.echo("witness: " + ";".join("".join(str(x) for x in row) for row in g.matrix))


@cli.command()
@_matroid_arg
@click.option("--jobs", type=click.IntRange(min=1), default=None)
def aut(path, jobs):
    """Order of the automorphism group in GL(n, q)."""
    click.echo(automorphism_order(read_matroid(path), _jobs(jobs)))


@cli.command(name="dual")
@_matroid_arg
def dual_cmd(path):
    click.echo(dumps(dual(read_matroid(path))), nl=False)


@cli.command()
@_matroid_arg
@click.option("--subspace", required=True, help="Rows such as 10010;01100.")
def restrict(path, subspace):
    """Restriction to a subspace, in the coordinates of its rows."""
    M = read_matroid(path)
    click.echo(dumps(restriction(M, parse_subspace(subspace, M.q, M.n))), nl=False)


@cli.command(name="fano-scan")
@click.option("--classes", type=click.Path(file_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--jobs", type=click.IntRange(min=1), default=None)
def fano_scan_cmd(classes, out, jobs):
    """Scan the rank-3 classes on F_2^5 for residual q-Fano candidates."""
    d = Path(classes)
    f3 = d / "q2_n5_k3.qmc"
    if f3.exists():
        encs = cls.load_encodings(f3)
    else:
        f2 = d / "q2_n5_k2.qmc"
        if not f2.exists():
            raise InputError(f"{d} has neither q2_n5_k3.qmc nor q2_n5_k2.qmc")
        encs = cls.dual_classes(cls.load_encodings(f2), _jobs(jobs))
    reports = fano_scan(encs, _jobs(jobs))
    lines = ["encoding\taut_order\tintersection_points\tflats"]
    for r in reports:
        planes = ",".join(format_subspace(p) for p in r.three_dim_flats)
        lines.append(f"{r.matroid.bits}\t{r.automorphism_order}\t{r.intersection_points}\t{planes}")
    Path(out).write_text("\n".join(lines) + "\n")
    click.echo(f"{len(reports)} candidates", err=True)


@cli.command(name="steiner-check")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--q", "q", type=int, required=True)
@click.option("--t", "t", type=click.IntRange(min=0), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the induced q-matroid here.")
def steiner_check(path, q, t, out):
    """Check a blocks file; on success print the induced q-matroid."""
    blocks = read_blocks(path, q)
    if not blocks:
        raise InputError("no blocks")
    n, k = blocks[0].n, blocks[0].k
    ok = is_q_steiner(q, t, k, n, blocks)
    click.echo(f"steiner: {'true' if ok else 'false'}")
    if ok:
        M = matroid_from_steiner(SteinerSystem(q, t, k, n, tuple(blocks)))
        if out:
            Path(out).write_text(dumps(M))
        click.echo(f"rank: {M.k}")


def run(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="qmat", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 2 if isinstance(e, click.UsageError) else 1
    except click.Abort:
        return 1
    except DOMAIN_ERRORS as e:
        click.echo(f"error: {e}", err=True)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
