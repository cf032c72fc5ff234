"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (certify mismatch, invalid square,
not embeddable), 2 usage or input errors, 3 a search timed out and left the
verdict undecided.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classify import classify_group, classify_order, missing_pairs
from .constructions import (
    EXCEPTIONAL_NAMES,
    build_l_star,
    build_m_star,
    exceptional_order8,
    l_star_witness,
    m_star_witness,
)
from .engine import (
    BudgetRequired,
    LengthOutOfRange,
    SearchBudget,
    SpectrumReport,
    default_budget,
    spectrum,
)
from .groups import GroupError, catalog, group_by_name, read_group_file, write_group_file
from .latin import (
    SPECIES_MAX_ORDER,
    LatinError,
    LatinSquare,
    canonical_bytes,
    key_to_square,
    read_square_file,
    species_census,
    square_hash,
    write_square_file,
)
from .reports import (
    RunManifest,
    budget_to_dict,
    cached_spectrum,
    classification_to_dict,
    render_classification_markdown,
    render_spectrum_strip,
    render_spectrum_svg,
    report_from_dict,
    report_to_dict,
)
from .subsquares import (
    conjecture_sweep,
    extend_abelian,
    extend_general,
    product_window,
    ryser_embeddable,
)

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Input problems that are the caller's fault; mapped to exit code 2."""


# ---------------------------------------------------------------------------
# shared helpers


def _budget_from(args) -> SearchBudget | None:
    if getattr(args, "exhaustive", False):
        if args.budget_nodes or args.budget_secs:
            raise UsageError("--exhaustive excludes --budget-nodes/--budget-secs")
        return SearchBudget.exhaustive()
    if args.budget_nodes or args.budget_secs:
        return SearchBudget(node_limit=args.budget_nodes, wall_secs=args.budget_secs)
    return None


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--exhaustive", action="store_true", help="run every search to completion")
    p.add_argument("--budget-nodes", type=int, metavar="N", help="node cap per length")
    p.add_argument("--budget-secs", type=float, metavar="S", help="wall-clock cap per length")


def _add_square_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--square", metavar="FILE", help="square file (order, then rows)")
    src.add_argument("--group", metavar="NAME", help="catalog group name, e.g. Z8 or D12")


def _load_square(args) -> tuple[LatinSquare, str, dict]:
    if args.square:
        sq = read_square_file(args.square)
        return sq, Path(args.square).name, {Path(args.square).name: square_hash(sq)}
    g = group_by_name(args.group)
    sq = LatinSquare(tuple(tuple(r) for r in g.table))
    return sq, g.name, {g.name: square_hash(sq)}


def _resolve_budget(args, order: int) -> SearchBudget:
    budget = _budget_from(args)
    if budget is not None:
        return budget
    try:
        return default_budget(order)
    except BudgetRequired as exc:
        raise UsageError(str(exc)) from None


def _manifest(args, argv, budget, input_hashes) -> RunManifest:
    return RunManifest(
        command=tuple(argv),
        seed=getattr(args, "seed", None),
        budget=budget_to_dict(budget),
        jobs=getattr(args, "jobs", 1),
        input_hashes=input_hashes,
    )


def _write_json(payload: dict, dest: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if dest == "-":
        print(text)
    else:
        Path(dest).write_text(text + "\n")


def _parse_elements(text: str, order: int, what: str) -> list[int]:
    try:
        vals = [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of integers") from None
    if not vals or len(set(vals)) != len(vals) or any(not 0 <= v < order for v in vals):
        raise UsageError(f"{what} must be distinct elements in [0, {order})")
    return vals


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_construct(args, argv) -> int:
    if args.family == "l-star":
        sq = build_l_star(args.m, args.q)
    elif args.family == "m-star":
        sq = build_m_star(args.m)
    else:
        sq = exceptional_order8(args.which)
    if args.out:
        write_square_file(sq, args.out)
        print(f"wrote order-{sq.n} square to {args.out} ({square_hash(sq)[:12]})")
    else:
        sys.stdout.write(canonical_bytes(sq).decode())
    return 0


def _cmd_witness(args, argv) -> int:
    if args.family == "l-star":
        triples = l_star_witness(args.m, args.q, args.length)
        sq = build_l_star(args.m, args.q)
        params = {"m": args.m, "q": args.q}
    else:
        triples = m_star_witness(args.m, args.length)
        sq = build_m_star(args.m)
        params = {"m": args.m}
    if args.json:
        manifest = _manifest(args, argv, None, {f"{args.family}": square_hash(sq)})
        _write_json(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "witness",
                "family": args.family,
                "order": sq.n,
                "length": args.length,
                "square_hash": square_hash(sq),
                "params": params,
                "triples": [list(t) for t in triples],
                "manifest": manifest.as_dict(),
            },
            args.json,
        )
    else:
        print(f"maximal partial transversal, length {len(triples)} of order {sq.n}:")
        for r, c, s in triples:
            print(f"  row {r}  col {c}  symbol {s}")
    return 0


def _spectrum_dict(args, argv) -> tuple[dict, SpectrumReport]:
    sq, label, hashes = _load_square(args)
    budget = _resolve_budget(args, sq.n)
    manifest = _manifest(args, argv, budget, hashes)
    d, hit = cached_spectrum(
        sq,
        budget,
        jobs=args.jobs,
        label=label,
        manifest=manifest,
        use_cache=not args.no_cache,
    )
    if hit:
        print(f"(served from cache: {d['square_hash'][:12]})", file=sys.stderr)
    return d, report_from_dict(d)


def _cmd_spectrum(args, argv) -> int:
    d, rep = _spectrum_dict(args, argv)
    print(render_spectrum_strip(rep, legend=True))
    mu = f", mu={rep.mu}" if rep.mu is not None else ""
    print(f"{rep.label or rep.square_hash[:12]}: {rep.verdict}{mu}")
    if args.json:
        _write_json(d, args.json)
    if args.svg:
        Path(args.svg).write_text(render_spectrum_svg(rep))
        print(f"wrote {args.svg}")
    return 3 if rep.verdict == "undecided" else 0


def _cmd_certify(args, argv) -> int:
    d, rep = _spectrum_dict(args, argv)
    if args.json:
        _write_json(d, args.json)
    if rep.verdict == "undecided":
        print(f"undecided: lengths {rep.undecided} timed out; raise the budget")
        return 3
    got = (rep.verdict, rep.mu)
    want = (args.expect, args.mu)
    if got[0] == want[0] and (want[1] is None or got[1] == want[1]):
        mu = f" (mu={rep.mu})" if rep.mu is not None else ""
        print(f"certified: {rep.label or rep.square_hash[:12]} is {rep.verdict}{mu}")
        return 0
    print(f"mismatch: expected {want[0]} (mu={want[1]}), got {got[0]} (mu={got[1]})")
    return 1


def _cmd_square_validate(args, argv) -> int:
    try:
        sq = read_square_file(args.file)
    except LatinError as exc:
        print(f"invalid: {exc}")
        return 1
    print(f"valid latin square of order {sq.n}, hash {square_hash(sq)}")
    return 0


def _cmd_square_species(args, argv) -> int:
    if args.order > SPECIES_MAX_ORDER:
        raise UsageError(f"species census is limited to order {SPECIES_MAX_ORDER}")
    census = species_census(args.order)
    counts = sorted(census.values(), reverse=True)
    print(f"order {args.order}: {len(census)} species, {sum(counts)} reduced squares")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "species",
        "order": args.order,
        "species_count": len(census),
        "reduced_counts": counts,
    }
    if args.spectra:
        reps = []
        budget = _budget_from(args) or default_budget(args.order)
        for i, key in enumerate(sorted(census)):
            rep = spectrum(key_to_square(key, args.order), budget, label=f"species-{i}")
            reps.append(rep)
            print(f"  species-{i}: {render_spectrum_strip(rep)}  {rep.verdict}")
        payload["spectra"] = [
            {k: v for k, v in report_to_dict(r).items() if k not in ("schema_version", "kind")}
            for r in reps
        ]
    if args.json:
        manifest = _manifest(args, argv, None, {})
        payload["manifest"] = manifest.as_dict()
        _write_json(payload, args.json)
    return 0


def _cmd_groups_list(args, argv) -> int:
    orders = [args.order] if args.order else range(1, 25)
    for order in orders:
        names = ", ".join(g.name for g in catalog(order))
        print(f"{order:2d}: {names}")
    return 0


def _cmd_groups_export(args, argv) -> int:
    g = group_by_name(args.name)
    write_group_file(g, args.out)
    print(f"wrote {g.name} (order {g.order}) to {args.out}")
    return 0


def _classification_output(results, args, argv, budget) -> int:
    md = render_classification_markdown(results)
    print(md)
    pairs = missing_pairs(results)
    if pairs:
        print(f"\nmissing pairs: {', '.join(f'({n}, {l})' for n, l in pairs)}")
    if args.json:
        hashes = {g.name: rep.square_hash for g, rep in results}
        manifest = _manifest(args, argv, budget, hashes)
        _write_json(classification_to_dict(results, manifest), args.json)
    if args.markdown:
        Path(args.markdown).write_text(md + "\n")
    undecided = [g.name for g, rep in results if rep.verdict == "undecided"]
    if undecided:
        print(f"undecided groups (budget too small): {', '.join(undecided)}")
        return 3
    return 0


def _cmd_groups_classify(args, argv) -> int:
    if args.name:
        g = group_by_name(args.name)
        budget = _resolve_budget(args, g.order)
        results = [(g, classify_group(g, budget))]
    else:
        budget = _resolve_budget(args, args.order)
        results = classify_order(args.order, budget, jobs=args.jobs)
    return _classification_output(results, args, argv, budget)


def _cmd_groups_classify_all(args, argv) -> int:
    results = []
    budget = _budget_from(args)
    for order in range(1, args.max_order + 1):
        per_order = budget if budget is not None else _resolve_budget(args, order)
        results.extend(classify_order(order, per_order, jobs=args.jobs))
    return _classification_output(results, args, argv, budget)


def _cmd_extend(args, argv) -> int:
    g = group_by_name(args.group)
    rows = _parse_elements(args.rows, g.order, "--rows")
    cols = _parse_elements(args.cols, g.order, "--cols")
    pw = product_window(g, rows, cols)
    method = "abelian" if g.is_abelian else "general"
    win = (extend_abelian if g.is_abelian else extend_general)(g, rows, cols)
    if win is None:
        print(
            f"no extension found for {g.name} window "
            f"(m={pw.m}, alpha={pw.alpha:.3f}, beta={pw.beta:.3f})"
        )
    else:
        print(
            f"{g.name}: extends to an order-{len(win.rows)} subsquare\n"
            f"  rows    {sorted(win.rows)}\n  cols    {sorted(win.cols)}\n"
            f"  symbols {sorted(win.symbols)}"
        )
    if args.json:
        manifest = _manifest(args, argv, None, {args.group: "cayley"})
        _write_json(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "extend",
                "group": g.name,
                "rows": rows,
                "cols": cols,
                "symbols": sorted(pw.z),
                "alpha": pw.alpha,
                "beta": pw.beta,
                "method": method,
                "extended": win is not None,
                "subsquare": None
                if win is None
                else {
                    "rows": sorted(win.rows),
                    "cols": sorted(win.cols),
                    "symbols": sorted(win.symbols),
                },
                "manifest": manifest.as_dict(),
            },
            args.json,
        )
    return 0


def _cmd_conjecture41(args, argv) -> int:
    out = sys.stdout if args.out is None else open(args.out, "w")
    counterexamples = 0
    trials = 0
    try:
        for record in conjecture_sweep(args.trials, args.seed, args.order_max):
            record = {"schema_version": SCHEMA_VERSION, "kind": "conjecture-trial", **record}
            counterexamples += bool(record.get("potential_counterexample"))
            trials += 1
            out.write(json.dumps(record, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(
        f"{trials} trials, {counterexamples} potential counterexamples "
        f"(seed {args.seed}, orders <= {args.order_max})",
        file=sys.stderr,
    )
    return 0


def _cmd_embed_check(args, argv) -> int:
    try:
        matrix = [
            [int(v) for v in line.split()]
            for line in Path(args.file).read_text().splitlines()
            if line.strip()
        ]
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read matrix file: {exc}") from None
    ok = ryser_embeddable(matrix, args.order)
    rows = len(matrix)
    cols = len(matrix[0]) if matrix else 0
    verdict = "embeds" if ok else "does not embed"
    print(f"{rows}x{cols} rectangle {verdict} in some latin square of order {args.order}")
    if args.json:
        _write_json(
            {
                "schema_version": SCHEMA_VERSION,
                "kind": "embed-check",
                "rows": rows,
                "cols": cols,
                "target_order": args.order,
                "embeddable": ok,
            },
            args.json,
        )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="omnilat",
        description="maximal partial transversal spectra of latin squares and group tables",
    )
    p.add_argument("--version", action="version", version=f"omnilat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="emit a square from a built-in family")
    cf = c.add_subparsers(dest="family", required=True)
    lstar = cf.add_parser("l-star", help="order 8m+4q square with full-range spectrum")
    lstar.add_argument("--m", type=int, required=True)
    lstar.add_argument("--q", type=int, choices=(0, 1), default=0)
    mstar = cf.add_parser("m-star", help="order 4m+2 square missing only length 2m+1")
    mstar.add_argument("--m", type=int, required=True)
    exc = cf.add_parser("exceptional", help="hand-checked order-8 squares")
    exc.add_argument("--which", choices=EXCEPTIONAL_NAMES, required=True)
    for sp in (lstar, mstar, exc):
        sp.add_argument("-o", "--out", metavar="FILE")
        sp.set_defaults(func=_cmd_construct)

    w = sub.add_parser("witness", help="emit a verified maximal partial transversal")
    wf = w.add_subparsers(dest="family", required=True)
    wl = wf.add_parser("l-star")
    wl.add_argument("--m", type=int, required=True)
    wl.add_argument("--q", type=int, choices=(0, 1), default=0)
    wm = wf.add_parser("m-star")
    wm.add_argument("--m", type=int, required=True)
    for sp in (wl, wm):
        sp.add_argument("--length", type=int, required=True)
        sp.add_argument("--json", metavar="FILE", help="write JSON ('-' for stdout)")
        sp.set_defaults(func=_cmd_witness)

    s = sub.add_parser("spectrum", help="decide every length for one square")
    _add_square_source(s)
    _add_budget_flags(s)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--json", metavar="FILE")
    s.add_argument("--svg", metavar="FILE")
    s.add_argument("--no-cache", action="store_true")
    s.set_defaults(func=_cmd_spectrum)

    ct = sub.add_parser("certify", help="check a square against an expected verdict")
    _add_square_source(ct)
    _add_budget_flags(ct)
    ct.add_argument("--expect", required=True, choices=("omniversal", "near-omniversal", "other"))
    ct.add_argument("--mu", type=int, help="expected unattained length for near-omniversal")
    ct.add_argument("--jobs", type=int, default=1)
    ct.add_argument("--json", metavar="FILE")
    ct.add_argument("--no-cache", action="store_true")
    ct.set_defaults(func=_cmd_certify)

    sq = sub.add_parser("square", help="square file utilities")
    sqf = sq.add_subparsers(dest="action", required=True)
    sv = sqf.add_parser("validate", help="check a square file")
    sv.add_argument("file")
    sv.set_defaults(func=_cmd_square_validate)
    ss = sqf.add_parser("species", help="census of main classes at one order")
    ss.add_argument("--order", type=int, required=True)
    ss.add_argument("--spectra", action="store_true", help="classify each species")
    _add_budget_flags(ss)
    ss.add_argument("--json", metavar="FILE")
    ss.set_defaults(func=_cmd_square_species)

    g = sub.add_parser("groups", help="catalog groups and their classification")
    gf = g.add_subparsers(dest="action", required=True)
    gl = gf.add_parser("list")
    gl.add_argument("--order", type=int)
    gl.set_defaults(func=_cmd_groups_list)
    ge = gf.add_parser("export")
    ge.add_argument("--name", required=True)
    ge.add_argument("-o", "--out", required=True)
    ge.set_defaults(func=_cmd_groups_export)
    gc = gf.add_parser("classify", help="classify one group or one order")
    tgt = gc.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--name")
    tgt.add_argument("--order", type=int)
    _add_budget_flags(gc)
    gc.add_argument("--jobs", type=int, default=1)
    gc.add_argument("--json", metavar="FILE")
    gc.add_argument("--markdown", metavar="FILE")
    gc.set_defaults(func=_cmd_groups_classify)
    ga = gf.add_parser("classify-all", help="classify every group up to an order")
    ga.add_argument("--max-order", type=int, default=16)
    _add_budget_flags(ga)
    ga.add_argument("--jobs", type=int, default=1)
    ga.add_argument("--json", metavar="FILE")
    ga.add_argument("--markdown", metavar="FILE")
    ga.set_defaults(func=_cmd_groups_classify_all)

    e = sub.add_parser("extend", help="grow a dense window to a full subsquare")
    e.add_argument("--group", required=True)
    e.add_argument("--rows", required=True, metavar="LIST")
    e.add_argument("--cols", required=True, metavar="LIST")
    e.add_argument("--json", metavar="FILE")
    e.set_defaults(func=_cmd_extend)

    cj = sub.add_parser(
        "conjecture41",
        help="randomised sweep for dense non-extending windows in non-abelian tables",
    )
    cj.add_argument("--trials", type=int, required=True)
    cj.add_argument("--seed", type=int, default=0)
    cj.add_argument("--order-max", type=int, default=24)
    cj.add_argument("--out", metavar="FILE.jsonl")
    cj.set_defaults(func=_cmd_conjecture41)

    em = sub.add_parser("embed-check", help="test completability to a larger order")
    em.add_argument("file", help="whitespace-separated symbol rectangle")
    em.add_argument("--order", type=int, required=True)
    em.add_argument("--json", metavar="FILE")
    em.set_defaults(func=_cmd_embed_check)

    return p


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GroupError, LatinError, LengthOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
