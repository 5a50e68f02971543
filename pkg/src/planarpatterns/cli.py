"""Command-line interface: ``planarpatterns <subcommand>``.

Every run writes a provenance header first: a ``provenance`` key for JSON
output, a ``# {...}`` comment line for CSV and text.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .asymptotics import (DEFAULT_PRECISION_BITS, build_bmj_system, constants_for_catalog,
                          solve_and_differentiate)
from .enumeration import CountTable, MarkingTerm, solve_map_dde, solve_marked_dde, tutte_count
from .intersections import enumerate_intersection_types
from .maps import MapError, Pattern, find_occurrences, load_pattern, parse_map_text
from .sampler import build_sampler_tables, empirical_stats, sample_uniform_map, worker_count
from .verify import SUITE_ALIASES, SUITES, run_suite


def _provenance(ctx: click.Context) -> dict:
    cfg = {}
    for k, v in ctx.params.items():
        if v is None:
            continue
        cfg[k] = list(v) if isinstance(v, tuple) else getattr(v, "name", v)
    return {"tool": "planarpatterns", "version": __version__, "command": ctx.info_name,
            "config": cfg,
            "threads": worker_count()}


def _emit(ctx: click.Context, fmt: str, payload, out=None):
    """Write ``payload`` (dict for json; str for csv/text) with the provenance header."""
    stream = out or sys.stdout
    prov = _provenance(ctx)
    if fmt == "json":
        stream.write(json.dumps({"provenance": prov, "result": payload}, indent=2, default=str) + "\n")
    else:
        stream.write("# " + json.dumps(prov, default=str) + "\n")
        stream.write(payload if payload.endswith("\n") else payload + "\n")


def _pattern(source: str) -> Pattern:
    try:
        return load_pattern(source)
    except (OSError, MapError, ValueError) as exc:
        raise click.BadParameter(f"cannot load pattern {source!r}: {exc}") from exc


def _parse_term(text: str, var: int) -> MarkingTerm:
    """``c,e,h[,upow][;s1,s2,...]`` into a marking term on variable ``var``."""
    head, _, tail = text.partition(";")
    parts = [int(x) for x in head.split(",")]
    if len(parts) not in (3, 4):
        raise click.BadParameter(f"term {text!r}: expected c,e,h[,upow][;s1,...]")
    s = tuple(int(x) for x in tail.split(",")) if tail else ()
    upow = parts[3] if len(parts) == 4 else None
    return MarkingTerm(var, parts[0], parts[1], parts[2], s, u_power=upow)


def _terms_for(pattern: str | None, term: tuple, direct: bool) -> list[MarkingTerm]:
    if term:
        return [_parse_term(t, i) for i, t in enumerate(term)]
    if pattern is None:
        return []
    pat = _pattern(pattern)
    if direct:
        return [MarkingTerm(0, pat.r0, pat.d0, pat.l0)]
    return enumerate_intersection_types(pat).marking_terms()


format_option = click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
                             default="json", show_default=True)
output_option = click.option("-o", "--output", type=click.File("w"), default=None,
                             help="Write here instead of standard output.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="planarpatterns")
def main():
    """Exact and asymptotic pattern counts in random rooted planar maps.

    Sampling uses as many worker processes as the PLANARPATTERNS_THREADS
    environment variable says (default 1).
    """


@main.command()
@click.option("--n-max", type=click.IntRange(0), default=10, show_default=True)
@click.option("--by-valency/--totals", default=False, help="Resolve counts by root-face valency.")
@format_option
@output_option
@click.pass_context
def counts(ctx, n_max, by_valency, fmt, output):
    """Number of rooted planar maps with n edges, n = 0..N-MAX."""
    fam = solve_map_dde(n_max)
    rows = [{"n": n, "count": fam.count(n), "closed_form_ok": fam.count(n) == tutte_count(n)}
            for n in range(n_max + 1)]
    if by_valency:
        for r in rows:
            r["by_valency"] = fam.valency_counts(r["n"])
    if fmt == "json":
        _emit(ctx, fmt, rows, output)
    elif fmt == "csv":
        text = CountTable.from_family(fam, with_marks=False).to_csv() if by_valency else \
            "n,count\n" + "".join(f"{r['n']},{r['count']}\n" for r in rows)
        _emit(ctx, fmt, text, output)
    else:
        _emit(ctx, fmt, "\n".join(f"m_{r['n']} = {r['count']}" for r in rows), output)


@main.command()
@click.option("--pattern", default=None, help="Mark the face classes of this pattern.")
@click.option("--term", multiple=True, help="Explicit marking term c,e,h[,upow][;s1,...]; repeatable.")
@click.option("--direct", is_flag=True, help="Mark the pattern itself (patterns that cannot self-intersect).")
@click.option("-N", "--order", "N", type=click.IntRange(0), default=10, show_default=True)
@click.option("-K", "--x-degree", "K", type=click.IntRange(0), default=2, show_default=True)
@click.option("--what", type=click.Choice(["M", "M1", "counts"]), default="M1", show_default=True)
@output_option
@click.pass_context
def series(ctx, pattern, term, direct, N, K, what, output):
    """Solve the (marked) map equation and dump the series.

    Lines read ``n j k1,...,kr num/den``; the k are degrees in y = x - 1.
    ``--what counts`` writes the CSV count table instead.
    """
    terms = _terms_for(pattern, term, direct)
    fam = solve_marked_dde(terms, N, K) if terms else solve_map_dde(N)
    if what == "counts":
        _emit(ctx, "csv", CountTable.from_family(fam).to_csv(), output)
    else:
        s = fam.M if what == "M" else fam.M_at_1
        _emit(ctx, "text", s.dumps(), output)


@main.command()
@click.argument("map_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("pattern")
@click.option("--ignore-root", is_flag=True, help="Also allow the host root face inside an occurrence.")
@format_option
@output_option
@click.pass_context
def occurrences(ctx, map_file, pattern, ignore_root, fmt, output):
    """Occurrences of PATTERN in the map stored in MAP_FILE."""
    with open(map_file) as fh:
        try:
            host, _ = parse_map_text(fh.read())
        except MapError as exc:
            raise click.BadParameter(str(exc), param_hint="MAP_FILE") from exc
    pat = _pattern(pattern)
    occs = find_occurrences(host, pat, respect_root=not ignore_root)
    rows = [{"edges": sorted([e, host.alpha[e]] for e in o.edges(host)), "vertices": sorted(o.vertices(host))}
            for o in occs]
    if fmt == "json":
        _emit(ctx, fmt, {"count": len(occs), "occurrences": rows}, output)
    else:
        _emit(ctx, fmt, f"count {len(occs)}\n" + "".join(f"{r['edges']}\n" for r in rows), output)


@main.command()
@click.argument("pattern")
@output_option
@click.pass_context
def intersections(ctx, pattern, output):
    """Intersection-type catalog of PATTERN as JSON."""
    cat = enumerate_intersection_types(_pattern(pattern))
    d = cat.to_dict()
    d["type_count"] = len(cat.types)
    d["face_class_count"] = len(cat.face_classes)
    _emit(ctx, "json", d, output)


@main.command()
@click.argument("pattern", required=False)
@click.option("--term", multiple=True, help="Explicit marking term c,e,h[,upow][;s1,...]; repeatable.")
@click.option("--direct", is_flag=True, help="Use the pattern's own equation instead of face classes.")
@click.option("--precision-bits", type=click.IntRange(64), default=DEFAULT_PRECISION_BITS, show_default=True)
@output_option
@click.pass_context
def constants(ctx, pattern, term, direct, precision_bits, output):
    """Singularity derivatives and the mean and variance slopes of PATTERN."""
    if pattern is None and not term:
        raise click.UsageError("give a PATTERN or at least one --term")
    if term or direct:
        rep = solve_and_differentiate(build_bmj_system(_terms_for(pattern, term, direct)), precision_bits)
    else:
        rep = constants_for_catalog(enumerate_intersection_types(_pattern(pattern)), precision_bits)
    _emit(ctx, "json", rep.to_dict(), output)


@main.command()
@click.option("-n", "--edges", "n", type=click.IntRange(0), required=True)
@click.option("--count", type=click.IntRange(1), default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Seed; the same seed gives the same maps.")
@output_option
@click.pass_context
def sample(ctx, n, count, seed, output):
    """Uniform random rooted maps with N edges, in the map text format."""
    from .sampler import make_rng
    tables = build_sampler_tables(n)
    rng = make_rng(seed)
    maps = [sample_uniform_map(n, tables=tables, rng=rng) for _ in range(count)]
    _emit(ctx, "text", "\n".join(m.to_text() for m in maps), output)


@main.command()
@click.argument("pattern")
@click.option("-n", "--edges", "n", type=click.IntRange(0), required=True)
@click.option("--trials", type=click.IntRange(1), default=1000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--level", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.99,
              show_default=True)
@click.option("--csv", "csv_out", type=click.File("w"), default=None, help="Per-trial counts as CSV.")
@output_option
@click.pass_context
def stats(ctx, pattern, n, trials, seed, level, csv_out, output):
    """Sample maps and summarise the number of occurrences of PATTERN."""
    rep = empirical_stats(_pattern(pattern), n, trials, seed, level=level)
    if csv_out is not None:
        _emit(ctx, "csv", rep.to_csv(), csv_out)
    _emit(ctx, "json", rep.to_dict(), output)


@main.command()
@click.argument("suites", nargs=-1)
@click.option("--all", "run_all", is_flag=True, help="Run every suite.")
@click.option("--quick", is_flag=True, help="Smaller sizes, seconds per suite.")
@click.option("--seed", type=int, default=None, help="Seed for the sampling suites.")
@click.option("--precision-bits", type=click.IntRange(64), default=DEFAULT_PRECISION_BITS, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def verify(ctx, suites, run_all, quick, seed, precision_bits, as_json):
    """Run verification suites; exit code 0 iff every check passes.

    Suites: tutte, bruteforce, koala-catalog, dgt, tgp, face-classes, overcount,
    moments, factorial-forms, ratio-asymptotics, sampler, clt.
    """
    names = list(SUITES) if run_all else list(suites)
    if not names:
        raise click.UsageError("name at least one suite or pass --all")
    unknown = [s for s in names if SUITE_ALIASES.get(s, s) not in SUITES]
    if unknown:
        raise click.UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    kw = {"quick": quick, "precision_bits": precision_bits}
    if seed is not None:
        kw["seed"] = seed
    results = []
    if not as_json:
        click.echo("# " + json.dumps(_provenance(ctx), default=str))
    for name in names:
        for r in run_suite(name, **kw):
            results.append(r)
            if not as_json:
                click.echo(f"{r.line()} [{r.seconds:.1f}s]")
    if as_json:
        _emit(ctx, "json", [{"name": r.name, "ok": r.ok, "detail": r.detail, "seconds": r.seconds}
                            for r in results])
    ctx.exit(0 if all(r.ok for r in results) else 1)


if __name__ == "__main__":
    main()
