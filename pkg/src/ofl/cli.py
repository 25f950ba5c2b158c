"""Command-line front end.

Exit codes: 0 when the experiment completed, 1 on usage or configuration
errors, 2 when an invariant check failed during the run.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import analyze, check_hierarchy
from .constants import constants_csv, estimate_kappa, estimate_normal_coeff
from .errors import OFLError, UsageError
from .maps import MAP_NOTES
from .repro import CRITERIA, rows_json, run_repro, summary_csv
from .scenarios import builtin_names, builtin_scenario, load_scenario
from .solvers import SOLVERS, residual, trace_csv
from .spaces import SPACE_NOTES, make_space

OK, USAGE, VIOLATION = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--scenario", help="name of a builtin scenario")
    p.add_argument("--out", help="output directory (default: $OFL_OUT/<command>-<scenario>-s<seed>)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--horizon", type=int, help="override the orbit horizon")
    p.add_argument("--epsilon", type=float, help="override the solver tolerance")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ofl", description="Orbit-Lipschitz fixed-point laboratory")
    parser.add_argument("--version", action="version", version=f"ofl {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _common()
    a = sub.add_parser("analyze", parents=[common], help="estimate the Lipschitz constants of an action")
    a.add_argument("--star-k", type=float, help="also check condition (star) at this k")
    s = sub.add_parser("solve", parents=[common], help="run fixed-point iterations")
    s.add_argument("--method", action="append", choices=sorted(SOLVERS), help="solver (repeatable)")
    k = sub.add_parser("kappa", parents=[common], help="bracket the Lifschitz characteristic")
    k.add_argument("--space", help="space name or JSON description, instead of a scenario")
    k.add_argument("--budget", type=int)
    n = sub.add_parser("normal", parents=[common], help="estimate the normal-structure coefficient")
    n.add_argument("--space", help="space name or JSON description, instead of a scenario")
    n.add_argument("--n-sets", type=int)
    r = sub.add_parser("repro", parents=[common], help="run the reproduction suite")
    r.add_argument("--only", help="comma-separated criterion numbers")
    li = sub.add_parser("list", help="list builtin spaces, maps or scenarios")
    li.add_argument("catalog", choices=["spaces", "maps", "scenarios"])
    return parser


# -- helpers ------------------------------------------------------------------------

def _scenario(args, required: bool = True):
    if args.config and args.scenario:
        raise UsageError("give either --config or --scenario, not both")
    if args.config:
        return load_scenario(args.config)
    if args.scenario:
        return builtin_scenario(args.scenario)
    if required:
        raise UsageError(f"{args.command} needs --config or --scenario")
    return None


def _outdir(args, label: str, seed: int) -> Path:
    if args.out:
        out = Path(args.out)
    else:
        out = Path(os.environ.get("OFL_OUT", "ofl_runs")) / f"{args.command}-{label}-s{seed}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rows(path: Path, rows: list):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    path.write_text(buf.getvalue())


def _dump(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")


def _space_arg(text: str):
    text = text.strip()
    desc = json.loads(text) if text.startswith("{") else {"type": text}
    return make_space(desc)


# -- commands -----------------------------------------------------------------------

def cmd_analyze(args) -> int:
    sc = _scenario(args)
    seed = sc.seed if args.seed is None else args.seed
    sp = sc.build_space()
    act = sc.build_action(sp)
    plan = sc.sample_plan(sp, horizon=args.horizon, workers=args.workers, seed=seed)
    star_k = args.star_k if args.star_k is not None else (sc.plan.star_k if sc.plan else None)
    rep = analyze(act, plan, star_k)
    hier = check_hierarchy(rep)
    out = _outdir(args, sc.name, seed)
    flat = rep.flat()
    flat["hierarchy_pass"] = hier.passed
    _write_rows(out / "summary.csv", [flat])
    (out / "witnesses.csv").write_text(rep.witness_csv())
    _dump(out / "report.json", {"scenario": sc.model_dump(), "report": flat, "hierarchy": hier.checks})
    print(f"k_uniform={rep.k_uniform.value:.9g} k_orbit={rep.k_orbit.value:.9g} k_strong={rep.k_strong.value:.9g}")
    if rep.star is not None:
        print(f"star k={rep.star.k:g}: {'pass' if rep.star.passed else 'fail'} margin={rep.star.worst_margin:.3g}")
    print(f"hierarchy: {'ok' if hier.passed else 'VIOLATED'} -> {out}")
    return OK if hier.passed else VIOLATION


def cmd_solve(args) -> int:
    sc = _scenario(args)
    seed = sc.seed if args.seed is None else args.seed
    sp = sc.build_space()
    act = sc.build_action(sp)
    cfg = sc.solver_config(horizon=args.horizon, epsilon=args.epsilon, seed=seed)
    x0 = sc.start_point(sp)
    methods = args.method or sc.solver.methods
    rows, traces, status = [], {}, OK
    out = _outdir(args, sc.name, seed)
    for m in methods:
        tr = SOLVERS[m](act, x0, cfg)
        row = tr.summary_row()
        if tr.outcome.kind == "converged":
            check = residual(act, tr.final)
            row["recheck"] = f"{check:.6g}"
            if not check < cfg.epsilon:
                status = VIOLATION
        else:
            row["recheck"] = ""
        rows.append(row)
        traces[m] = json.loads(tr.to_json())
        (out / f"trace_{m}.csv").write_text(trace_csv(tr))
        print(f"{m}: {tr.outcome} after {len(tr.steps) - 1} steps, residual {tr.steps[-1]['residual']:.3g}")
    _write_rows(out / "summary.csv", rows)
    _dump(out / "trace.json", traces)
    _dump(out / "report.json", {"scenario": sc.model_dump(), "config": cfg.__dict__, "runs": rows})
    return status


def _space_from(args):
    if getattr(args, "space", None):
        return None, _space_arg(args.space)
    sc = _scenario(args)
    return sc, sc.build_space()


def cmd_kappa(args) -> int:
    sc, sp = _space_from(args)
    seed = args.seed if args.seed is not None else (sc.seed if sc else 0)
    budget = args.budget or (sc.kappa.budget if sc and sc.kappa else 100_000)
    b = estimate_kappa(sp, budget, seed)
    ok = b.lower <= b.upper and (b.certificate is None or b.certificate.replay(sp))
    out = _outdir(args, sc.name if sc else sp.kind, seed)
    (out / "summary.csv").write_text(constants_csv([{"space": sp.kind, "kappa_lo": b.lower, "kappa_hi": b.upper,
                                                     "budget": budget, "seed": seed}]))
    _dump(out / "report.json", {
        "space": sp.describe(), "lower": b.lower, "upper": b.upper, "budget": budget, "seed": seed,
        "configs": b.configs_used, "evaluations": b.evaluations, "mu_grid": b.mu_grid, "alpha_grid": b.alpha_grid,
        "passing": b.passing, "reference": b.reference, "notes": b.notes,
        "certificate": None if b.certificate is None else b.certificate.to_json(sp)})
    print(f"kappa({sp.kind}) in [{b.lower:.6f}, {b.upper:.6f}] -> {out}")
    return OK if ok else VIOLATION


def cmd_normal(args) -> int:
    sc, sp = _space_from(args)
    seed = args.seed if args.seed is not None else (sc.seed if sc else 0)
    n_sets = args.n_sets or (sc.normal.n_sets if sc and sc.normal else 200)
    density = sc.normal.density if sc and sc.normal else 400
    est = estimate_normal_coeff(sp, n_sets, seed, density)
    out = _outdir(args, sc.name if sc else sp.kind, seed)
    (out / "summary.csv").write_text(constants_csv([{"space": sp.kind, "normal_est": est.value,
                                                     "budget": n_sets, "seed": seed}]))
    _dump(out / "report.json", {"space": sp.describe(), "value": est.value, "n_sets": est.n_sets,
                                "skipped": est.skipped, "density": density, "witness": est.witness})
    print(f"N({sp.kind}) ~ {est.value:.6f} -> {out}")
    return OK if 0 < est.value <= 1 else VIOLATION


def cmd_repro(args) -> int:
    seed = args.seed or 0
    only = None
    if args.only:
        try:
            only = {int(c) for c in args.only.split(",")}
        except ValueError:
            raise UsageError("--only takes comma-separated integers") from None
        if not only <= set(CRITERIA):
            raise UsageError(f"criteria are {sorted(CRITERIA)}")
    rows, timings = run_repro(seed, only)
    out = _outdir(args, "suite", seed)
    (out / "summary.csv").write_text(summary_csv(rows))
    _dump(out / "report.json", {"seed": seed, "rows": rows_json(rows),
                                "seconds": {str(k): round(v, 3) for k, v in timings.items()}})
    for r in rows:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.criterion} {r.check}: {r.value} (target {r.target})")
    print(f"{sum(r.passed for r in rows)}/{len(rows)} checks passed -> {out}")
    return VIOLATION if any(r.invariant and not r.passed for r in rows) else OK


def cmd_list(args) -> int:
    if args.catalog == "spaces":
        items = SPACE_NOTES
    elif args.catalog == "maps":
        items = MAP_NOTES
    else:
        items = {n: builtin_scenario(n).description for n in builtin_names()}
    width = max(map(len, items))
    for k, v in items.items():
        print(f"{k:<{width}}  {v}")
    return OK


COMMANDS = {"analyze": cmd_analyze, "solve": cmd_solve, "kappa": cmd_kappa, "normal": cmd_normal,
            "repro": cmd_repro, "list": cmd_list}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return USAGE
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
        return COMMANDS[args.command](args)
    except OFLError as exc:
        print(f"ofl: error: {exc}", file=sys.stderr)
        return USAGE
    except ValueError as exc:
        print(f"ofl: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
