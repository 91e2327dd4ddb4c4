"""Command-line front end.

Structured inputs (projects, contracts, utilities, grids) are JSON, given
either inline or as a path to a file.  Reports go to stdout or ``--out``;
``scenario run`` also honours $PANDORA_CONTRACTS_OUTPUT_DIR.

Exit codes: 0 success, 2 invalid input, 3 infeasible model, 4 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from .contracts import contract_from_dict, emit_plot_data
from .designer import (capped_earnout, classify_optimal, debt_plus_equity, design_moral_hazard,
                       design_risk_averse, efficiency_report, plan_multi_agent, pure_debt)
from .domain import IDENTITY, project_from_dict, utility_from_dict
from .errors import BudgetExceeded, Infeasible, ModelError, NeverStops, ValidationError
from .indices import index, induced_index
from .jsonio import dumps
from .scenario import (contract_for, default_y_max, grid_from_dict, guarantee_report,
                       load_scenario, run_scenario, validate_scenario, wrap_input)
from .search import evaluate_exact, evaluate_resampling, simulate

OUTPUT_DIR_ENV = "PANDORA_CONTRACTS_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 2, 3, 4

log = logging.getLogger("pandora_contracts")


def _json_arg(text: str):
    """Inline JSON if it looks like JSON, otherwise a path to a JSON file."""
    s = text.strip()
    try:
        if s[:1] in "{[":
            return json.loads(s)
        return json.loads(Path(text).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad JSON in {text[:40]!r}: {exc}") from None
    except OSError as exc:
        raise ValidationError(f"cannot read {text!r}: {exc}") from None


def _project(text):
    return wrap_input(project_from_dict, _json_arg(text))


def _contract(text):
    return wrap_input(contract_from_dict, _json_arg(text))


def _utility(text):
    return wrap_input(utility_from_dict, _json_arg(text)) if text else IDENTITY


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(text: str, out: str | None):
    if out:
        _write_atomic(Path(out), text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _scenario_from_args(args) -> dict:
    return validate_scenario(_json_arg(args.scenario))


# -- subcommands ------------------------------------------------------------

def cmd_index(args):
    p = _project(args.project)
    if args.contract:
        r = induced_index(_contract(args.contract), p, _utility(args.utility))
    else:
        r = index(p)
    _emit(dumps({"value": r.value, "unique": r.unique, "never_sample": r.never_sample}), args.out)


def _boxes_and_contract(sc):
    box0 = wrap_input(project_from_dict, sc["known_project"])
    extra = [wrap_input(project_from_dict, p) for p in sc.get("extra_projects", [])]
    u = utility_from_dict(sc["utility"]) if "utility" in sc else IDENTITY
    return box0, [box0, *extra], contract_for(sc, box0), u


def cmd_evaluate(args):
    sc = _scenario_from_args(args)
    box0, boxes, w, u = _boxes_and_contract(sc)
    if sc["model"]["kind"] == "resampling":
        rep = evaluate_resampling(w, box0)
    else:
        rep = evaluate_exact(w, boxes, u)
    _emit(dumps(rep), args.out)


def cmd_simulate(args):
    sc = _scenario_from_args(args)
    _, boxes, w, u = _boxes_and_contract(sc)
    seed = args.seed if args.seed is not None else sc.get("seed", 0)
    log.info("simulating %d episodes with seed %d", args.episodes, seed)
    est = simulate(w, boxes, u, seed=seed, n_episodes=args.episodes)
    exact = evaluate_exact(w, boxes, u)
    _emit(dumps({"simulation": est, "exact": exact}), args.out)


def cmd_guarantee(args):
    w = _contract(args.contract)
    box0 = _project(args.known_project)
    grid = grid_from_dict(_json_arg(args.grid)) if args.grid else None
    rep, method = guarantee_report(w, box0, _utility(args.utility), args.method, grid)
    out = dumps(rep)
    if args.method == "auto":
        log.info("used %s method", method)
    _emit(out, args.out)


def cmd_design(args):
    report: dict = {"model": args.model}
    contract = None
    if args.model == "multi-agent":
        if not args.projects:
            raise ValidationError("multi-agent needs --projects")
        known = [wrap_input(project_from_dict, p) for p in _json_arg(args.projects)]
        report["plan"] = plan_multi_agent(known)
    else:
        if not args.project:
            raise ValidationError(f"{args.model} needs --project")
        box0 = _project(args.project)
        if args.model == "baseline":
            if args.family == "debt":
                contract = pure_debt(box0)
            else:
                z = args.z if args.z is not None else box0.surplus
                contract = (debt_plus_equity if args.family == "dpe" else capped_earnout)(box0, z)
            report["degenerate"] = box0.cost == 0
        elif args.model == "moral-hazard":
            if args.k is None:
                raise ValidationError("moral-hazard needs --k")
            report["design"], contract = design_moral_hazard(box0, args.k)
        elif args.model == "risk-averse":
            if not args.utility:
                raise ValidationError("risk-averse needs --utility")
            report["design"], contract = design_risk_averse(box0, _utility(args.utility))
        elif args.model == "efficiency":
            report["efficiency"] = efficiency_report(box0, seed=args.seed)
        if contract is not None:
            report["contract"] = contract
            report["verdict"] = classify_optimal(contract, box0)
            if args.plot_csv:
                y_max = args.y_max if args.y_max is not None else default_y_max(box0)
                _write_atomic(Path(args.plot_csv), emit_plot_data(contract, y_max, args.n))
    _emit(dumps(report), args.out)


def cmd_plot(args):
    _emit(emit_plot_data(_contract(args.contract), args.y_max, args.n), args.out)


def cmd_scenario_run(args):
    path = Path(args.path)
    sc = load_scenario(path)
    log.info("running scenario %s (%s)", sc.get("name", path.stem), sc["model"]["kind"])
    report, csv = run_scenario(sc)
    text = dumps(report)

    out = args.out or sc.get("output", {}).get("report")
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{path.stem}.report.json")
    plot_out = sc.get("output", {}).get("plot")
    if csv is not None and plot_out is None:
        if out is None:
            log.warning("plot requested but no output location; skipping CSV")
        else:
            plot_out = str(Path(out).with_suffix(".csv"))
    _emit(text, out)
    if csv is not None and plot_out:
        _write_atomic(Path(plot_out), csv)
        log.info("wrote %s", plot_out)


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pandora-contracts",
                                 description="Robust contracts for delegated Pandora's box search.")
    ap.add_argument("--quiet", action="store_true", help="suppress progress messages on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--out", help="write the result here instead of stdout")
        return p

    p = add("index", cmd_index, "reservation index of a project, optionally under a contract")
    p.add_argument("--project", required=True, help="project JSON or path")
    p.add_argument("--contract", help="contract JSON or path; gives the induced index")
    p.add_argument("--utility", help="utility JSON or path (with --contract)")

    p = add("evaluate", cmd_evaluate, "exact payoffs of a scenario's contract and projects")
    p.add_argument("scenario", help="scenario JSON or path")

    p = add("simulate", cmd_simulate, "Monte Carlo payoffs of a scenario")
    p.add_argument("scenario", help="scenario JSON or path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--episodes", type=int, default=10_000)

    p = add("guarantee", cmd_guarantee, "worst-case payoff guarantee of a contract")
    p.add_argument("--contract", required=True)
    p.add_argument("--known-project", required=True)
    p.add_argument("--utility")
    p.add_argument("--method", choices=["auto", "structural", "brute"], default="auto")
    p.add_argument("--grid", help="adversary grid overrides as JSON")

    p = add("design", cmd_design, "construct an optimal contract")
    p.add_argument("--model", required=True,
                   choices=["baseline", "moral-hazard", "risk-averse", "multi-agent", "efficiency"])
    p.add_argument("--project", help="known project JSON or path")
    p.add_argument("--projects", help="JSON list of known projects (multi-agent)")
    p.add_argument("--family", choices=["debt", "dpe", "capped"], default="debt")
    p.add_argument("--z", type=float, help="debt level for dpe/capped (default s0)")
    p.add_argument("--k", type=float, help="diversion rate (moral-hazard)")
    p.add_argument("--utility", help="utility JSON or path (risk-averse)")
    p.add_argument("--seed", type=int, default=0, help="audit seed (efficiency)")
    p.add_argument("--plot-csv", help="also write wage/principal plot data here")
    p.add_argument("--y-max", type=float)
    p.add_argument("--n", type=int, default=101)

    p = add("plot", cmd_plot, "CSV of wage and principal share on a grid")
    p.add_argument("--contract", required=True)
    p.add_argument("--y-max", type=float, required=True)
    p.add_argument("--n", type=int, default=101)

    sc = sub.add_parser("scenario", help="scenario files")
    sc_sub = sc.add_subparsers(dest="scenario_command", required=True)
    p = sc_sub.add_parser("run", help="run one scenario file")
    p.add_argument("path")
    p.add_argument("--out", help="report path (default: scenario output field, "
                                 f"${OUTPUT_DIR_ENV}, or stdout)")
    p.set_defaults(func=cmd_scenario_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        args.func(args)
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    except (Infeasible, NeverStops) as exc:
        log.error("infeasible: %s", exc)
        return EXIT_INFEASIBLE
    except ModelError as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
