"""Command line entry point: generate | analyze | pierce | experiment | verify.

Exit codes: 0 ok, 1 invariant violation, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import oracle
from .geometry import Point
from .hypergraph import check_hereditary_linearity, dual_hypergraph
from .instances import InstanceError, InstanceSpec, family_to_json, generate, read_instance, spec_meta
from .report import (
    analysis_violations,
    analyze_family,
    format_analysis,
    row_violations,
    rows_to_csv,
    run_sweep,
    summarize,
)
from .transversal import exact_pierce, greedy_pierce, packing_number, pierce_p2, stabs_all

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("piercing_lab")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(args) -> int:
    spec = InstanceSpec(
        family_class=args.family_class,
        n=args.n,
        density=args.density,
        radius_range=(args.rmin, args.rmax),
        seed=args.seed,
        bbox=args.bbox,
    )
    inst = generate(spec)
    _emit(family_to_json(inst.family, spec_meta(inst)), args.out)
    if args.density is not None and (inst.nu is None or abs(inst.nu - args.density) > 1):
        log.warning("density target %d missed after %d resamples (nu=%s)", args.density, inst.attempts, inst.nu)
    return EXIT_OK


def cmd_analyze(args) -> int:
    f = read_instance(args.instance)
    rep = analyze_family(f, p=args.p, c=args.c, seed=args.seed)
    if args.json:
        _emit(json.dumps(rep, indent=1) + "\n", args.out)
    else:
        _emit(format_analysis(rep), args.out)
    if args.self_check:
        bad = analysis_violations(rep)
        for msg in bad:
            log.error("self-check: %s", msg)
        return EXIT_VIOLATION if bad else EXIT_OK
    return EXIT_OK


def cmd_pierce(args) -> int:
    f = read_instance(args.instance)
    p = args.p if args.p is not None else packing_number(f, "exact") + 1
    if args.method == "pipeline":
        rep = pierce_p2(f, p, seed=args.seed)
    elif args.method == "greedy":
        rep = greedy_pierce(f, p, seed=args.seed)
    else:
        rep = exact_pierce(f, p)
    doc = {
        "method": rep.method,
        "p": rep.p,
        "nu": rep.nu,
        "tau_frac": rep.tau_frac,
        "size": rep.size,
        "iterations": rep.iterations,
        "points": [[q.x, q.y] for q in rep.tau_points],
    }
    _emit(json.dumps(doc, indent=1) + "\n", args.out)
    if args.self_check and not stabs_all(f, rep.tau_points):
        log.error("self-check: some region is not pierced")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_experiment(args) -> int:
    ns, ps, trials, seed = args.n, args.p, args.trials, args.seed
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise InstanceError(f"bad sweep config {args.config}: {e}") from None
        ns, ps = cfg.get("n", ns), cfg.get("p", ps)
        trials, seed = cfg.get("trials", trials), cfg.get("seed", seed)
    if not ns or not ps or trials < 1 or any(p < 2 for p in ps):
        raise InstanceError("sweep needs non-empty n and p lists (p >= 2) and trials >= 1")
    rows = run_sweep(ns, ps, trials, seed=seed, family_class=args.family_class, timings=args.timings)
    _emit(rows_to_csv(rows), args.out)
    status = EXIT_OK
    for r in rows:
        if r.error:
            log.error("row seed=%d n=%d p=%d failed: %s", r.seed, r.n, r.p, r.error)
            status = EXIT_VIOLATION
        for msg in row_violations(r):
            log.error("row seed=%d n=%d p=%d: %s", r.seed, r.n, r.p, msg)
            status = EXIT_VIOLATION
    summary = summarize(rows)
    print(json.dumps(summary), file=sys.stderr if not args.out else sys.stdout)
    return status


def cmd_verify(args) -> int:
    f = read_instance(args.instance)
    bad = []
    grid = oracle.signature_grid_check(f, args.resolution)
    if not grid.passed:
        bad.append(f"candidate dominance fails near {grid.worst_point}")
    lin = check_hereditary_linearity(dual_hypergraph(f), args.c, seed=args.seed)
    if not lin.passed:
        bad.append(f"hereditary {args.c}-linearity fails on subset {lin.worst_subset} ({lin.mode})")
    if args.points:
        try:
            doc = json.loads(Path(args.points).read_text())
            pts = [Point(float(x), float(y)) for x, y in doc["points"]]
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise InstanceError(f"bad points file {args.points}: {e}") from None
        if not stabs_all(f, pts):
            bad.append("given points do not pierce every region")
    print(f"grid check ({grid.resolution}x{grid.resolution}): {'pass' if grid.passed else 'FAIL'}")
    print(f"hereditary {args.c:g}-linearity ({lin.mode}, {lin.subsets_checked} subsets): {'pass' if lin.passed else 'FAIL'}")
    if args.points:
        print(f"transversal: {'pass' if 'given points do not pierce every region' not in bad else 'FAIL'}")
    for msg in bad:
        log.error("verify: %s", msg)
    return EXIT_VIOLATION if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="piercing-lab", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output here instead of stdout")

    g = sub.add_parser("generate", help="write a seeded random instance")
    common(g, instance=False)
    g.add_argument("--class", dest="family_class", default="discs", choices=["discs", "unit_squares", "polygons"])
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--density", type=int, default=None, help="target packing number")
    g.add_argument("--rmin", type=float, default=0.5)
    g.add_argument("--rmax", type=float, default=1.5)
    g.add_argument("--bbox", type=float, default=10.0, help="side of the sampling square")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="packing, LP and fractional Helly statistics")
    common(a)
    a.add_argument("--p", type=int, default=None)
    a.add_argument("--c", type=float, default=3.0, help="linearity constant")
    a.add_argument("--json", action="store_true")
    a.add_argument("--self-check", action="store_true")
    a.set_defaults(func=cmd_analyze)

    pc = sub.add_parser("pierce", help="compute a transversal")
    common(pc)
    pc.add_argument("--p", type=int, default=None)
    pc.add_argument("--method", choices=["pipeline", "greedy", "exact"], default="pipeline")
    pc.add_argument("--self-check", action="store_true")
    pc.set_defaults(func=cmd_pierce)

    e = sub.add_parser("experiment", help="batch sweep to CSV")
    common(e, instance=False)
    e.add_argument("--n", type=_int_list, default=[10, 20])
    e.add_argument("--p", type=_int_list, default=[3, 5])
    e.add_argument("--trials", type=int, default=5)
    e.add_argument("--class", dest="family_class", default="discs", choices=["discs", "unit_squares", "polygons"])
    e.add_argument("--config", help="JSON sweep config with keys n, p, trials, seed")
    e.add_argument("--timings", action="store_true", help="fill ms_* columns (breaks byte-identical reruns)")
    e.add_argument("--self-check", action="store_true", help="accepted for symmetry; rows are always checked")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="dominance, linearity and optional transversal checks")
    common(v)
    v.add_argument("--points", help="pierce output JSON to verify")
    v.add_argument("--resolution", type=int, default=200)
    v.add_argument("--c", type=float, default=3.0)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InstanceError as e:
        log.error("input error: %s", e)
        return EXIT_INPUT
    except oracle.BudgetExceeded as e:
        log.error("budget exceeded: %s", e)
        return EXIT_BUDGET
    except ValueError as e:
        log.error("invalid arguments: %s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
