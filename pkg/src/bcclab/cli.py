"""Command-line entry point: ``bcc-lab <group> <command> [options]``.

Exit status: 0 on success, 1 if any checked bound is violated, 2 on bad
input (unreadable files, invalid matrices, out-of-range parameters).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import continuity as cont
from .avc import example_family, lambda_sweep, symmetrizability_check
from .errors import BCCError
from .io import (
    atomic_write,
    dumps_json,
    load_channel,
    load_compound,
    load_points,
    region_csv,
    sweep_csv,
)
from .metrics import channel_distance, compound_distance_report, region_distance_report
from .regions import GridSpec, capacity_region_approx, region_Mn

VERIFY_DEFAULT_TRIALS = {"lemma2": 1000, "lemma3": 500, "lemma4": 50, "theorem2": 10, "telescope": 100}


class InputError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", type=int, default=8, help="lattice resolution k; auxiliary laws use step 1/k (default 8)")
    p.add_argument("--u-size", type=int, default=None, help="|U| of the auxiliary chain (default |X|+1)")
    p.add_argument("--v-size", type=int, default=None, help="|V| of the auxiliary chain (default |X|+1)")
    p.add_argument("--max-aux", type=int, default=20000, help="subsample the grid above this many chains (default 20000)")
    p.add_argument("--grid-seed", type=int, default=0, help="seed for grid subsampling (default 0)")


def _grid(args) -> GridSpec:
    return GridSpec(args.grid, args.u_size, args.v_size, args.max_aux, args.grid_seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcc-lab", description="Compound BCC rate regions, distances and continuity checks.")
    groups = parser.add_subparsers(dest="group", required=True)

    region = groups.add_parser("region", help="rate-region inner approximations")
    rsub = region.add_subparsers(dest="command", required=True)
    rc = rsub.add_parser("compute", help="grid inner approximation of M_n or of the capacity region")
    rc.add_argument("--input", required=True, help="compound channel JSON file")
    rc.add_argument("--n", type=int, default=1, help="block length n (default 1)")
    rc.add_argument("--n-max", type=int, default=None, help="union over all n <= N instead of a single n")
    _grid_args(rc)
    rc.add_argument("--out", required=True, help="CSV of rectangle corners (n,R0,R1,aux_id)")
    rc.add_argument("--hull-out", default=None, help="hull JSON path (default: hull.json next to --out)")

    dist = groups.add_parser("distance", help="distances between channels, compounds or rate regions")
    dsub = dist.add_subparsers(dest="command", required=True)
    for name, what in (("channels", "channel JSON"), ("compound", "compound JSON"), ("regions", "region CSV/JSON")):
        d = dsub.add_parser(name, help=f"distance between two {what} files")
        d.add_argument("--a", required=True, help=f"first {what} file")
        d.add_argument("--b", required=True, help=f"second {what} file")
        d.add_argument("--out", default=None, help="output JSON path (default: stdout)")

    ver = groups.add_parser("verify", help="randomized checks of the continuity bounds")
    vsub = ver.add_subparsers(dest="command", required=True)
    for name in VERIFY_DEFAULT_TRIALS:
        v = vsub.add_parser(name, help=f"run the {name} check")
        v.add_argument("--eps", type=float, default=0.1, help="perturbation radius in (0, 1) (default 0.1)")
        v.add_argument("--trials", type=int, default=None,
                       help=f"instances, or compound pairs for lemma4/theorem2 (default {VERIFY_DEFAULT_TRIALS[name]})")
        v.add_argument("--seed", type=int, default=0, help="base seed; trial i uses SeedSequence([seed, i])")
        v.add_argument("--threads", type=int, default=None, help="worker threads (default $BCC_LAB_THREADS or 1)")
        v.add_argument("--out", default=None, help="report JSON path (default: stdout)")
        if name in ("lemma2", "lemma3"):
            v.add_argument("--y-size", type=int, default=None, help="|Y| (lemma2 default 4; lemma3 default random)")
            v.add_argument("--x-size", type=int, default=None, help="|X| (lemma2 default 3; lemma3 default random)")
        if name in ("lemma3", "lemma4", "telescope"):
            v.add_argument("--n", type=int, default=2 if name == "telescope" else 1, help="block length n")
        if name == "lemma4":
            v.add_argument("--aux-per-pair", type=int, default=50, help="random chains per compound pair (default 50)")
        if name == "theorem2":
            v.add_argument("--n-max", type=int, default=1, help="largest block length (default 1)")
            _grid_args(v)

    avc = groups.add_parser("avc", help="arbitrarily varying channel example")
    asub = avc.add_subparsers(dest="command", required=True)
    sw = asub.add_parser("sweep", help="symmetrizability across a lambda grid")
    sw.add_argument("--lambdas", type=_floats, required=True, help="comma-separated lambda values in [0, 1]")
    sw.add_argument("--out", default=None, help="CSV path (lambda,symmetrizable,residual); default stdout")
    ck = asub.add_parser("check", help="symmetrizability at one lambda")
    ck.add_argument("--lambda", dest="lam", type=float, required=True, help="lambda in [0, 1]")
    ck.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    return parser


def _region(args) -> int:
    c = load_compound(args.input)
    grid = _grid(args)
    if args.n_max is not None:
        reg = capacity_region_approx(c, args.n_max, grid)
    else:
        reg = region_Mn(c, args.n, grid)
    atomic_write(args.out, region_csv(reg))
    hull_path = args.hull_out
    if hull_path is None:
        from pathlib import Path

        hull_path = str(Path(args.out).with_name("hull.json"))
    atomic_write(hull_path, dumps_json(cont._jsonable(reg.hull_dict())))
    return 0


def _distance(args) -> int:
    if args.command == "channels":
        a, b = load_channel(args.a), load_channel(args.b)
        rows = abs(a.matrix - b.matrix).sum(axis=1)
        out = {"value": channel_distance(a, b), "witness": {"input": int(rows.argmax())}}
    elif args.command == "compound":
        out = compound_distance_report(load_compound(args.a), load_compound(args.b))
    else:
        out = region_distance_report(load_points(args.a), load_points(args.b))
    _emit(dumps_json(cont._jsonable(out)), args.out)
    return 0


def _verify(args) -> int:
    trials = args.trials if args.trials is not None else VERIFY_DEFAULT_TRIALS[args.command]
    common = {"seed": args.seed, "threads": args.threads}
    if args.command == "lemma2":
        rep = cont.verify_entropy_continuity(trials, args.eps, args.y_size or 4, args.x_size or 3, **common)
    elif args.command == "lemma3":
        sizes = {k: v for k, v in (("x", args.x_size), ("y", args.y_size)) if v}
        rep = cont.verify_mi_continuity(trials, args.eps, args.n, sizes, **common)
    elif args.command == "lemma4":
        rep = cont.lemma4_suite(trials, args.eps, args.aux_per_pair, args.n, **common)
    elif args.command == "theorem2":
        rep = cont.theorem2_suite(trials, args.eps, args.n_max, _grid(args), **common)
    else:
        rep = cont.telescope_suite(trials, args.eps, args.n, **common)
    _emit(rep.to_json(), args.out)
    if args.out:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.check}: {rep.instances} instances, {rep.violations} violations, "
              f"max gap {rep.max_gap:.6g}, tightness {rep.tightness:.4g}")
    return 0 if rep.passed else 1


def _avc(args) -> int:
    if args.command == "sweep":
        _emit(sweep_csv(lambda_sweep(args.lambdas)), args.out)
    else:
        fam, _ = example_family(args.lam)
        res = symmetrizability_check(fam)
        out = {"lambda": args.lam, "symmetrizable": res.symmetrizable, "residual": res.residual,
               "sigma": res.sigma.matrix.tolist() if res.sigma is not None else None}
        _emit(dumps_json(out), args.out)
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"region": _region, "distance": _distance, "verify": _verify, "avc": _avc}[args.group]
    try:
        return handler(args)
    except (OSError, BCCError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"bcc-lab: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
