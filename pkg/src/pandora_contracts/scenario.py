"""Scenario files: one JSON document describing a model run.

A scenario names the known project(s), optionally a contract and extra
projects, a model and a few run settings.  :func:`run_scenario` turns a
validated scenario into a plain report dict; the CLI serializes it.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema

from .adversary import AdversaryGrid, brute_force_guarantee, guarantee
from .contracts import contract_from_dict, diversion_proof, emit_plot_data, structure
from .designer import (capped_earnout, classify_optimal, debt_plus_equity, design_moral_hazard,
                       design_risk_averse, efficiency_report, plan_multi_agent, pure_debt)
from .domain import IDENTITY, project_from_dict, utility_from_dict
from .errors import ValidationError
from .indices import index, induced_index
from .jsonio import to_jsonable
from .search import evaluate_exact, evaluate_resampling, simulate

_NUM = {"type": "number"}
_NONNEG = {"type": "number", "minimum": 0}
_NUMS = {"type": "array", "items": _NUM}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


def _kind(name: str, **props) -> dict:
    return _obj({"kind": {"const": name}, **props}, ["kind", *props])


PROJECT_SCHEMA = _obj({
    "dist": _obj({"support": {**_NUMS, "minItems": 1}, "probs": {**_NUMS, "minItems": 1}},
                 ["support", "probs"]),
    "cost": _NONNEG,
}, ["dist", "cost"])

CONTRACT_SCHEMA = {"oneOf": [
    _kind("pure_debt", z=_NONNEG),
    _kind("debt_plus_equity", z=_NONNEG, alpha=_NONNEG),
    _kind("capped_earnout", z=_NONNEG, wbar=_NONNEG),
    _kind("linear", alpha=_NONNEG),
    _kind("constant", value=_NONNEG),
    _kind("piecewise", breakpoints=_NUMS, values=_NUMS, slopes=_NUMS),
]}

UTILITY_SCHEMA = {"oneOf": [
    _obj({"kind": {"const": "identity"}}, ["kind"]),
    _kind("power", exponent=_NUM),
    _kind("scaled_sqrt", scale=_NUM),
    _kind("tabulated", breakpoints=_NUMS, values=_NUMS),
]}

GRID_SCHEMA = _obj({
    "max_extra": {"type": "integer", "minimum": 0, "maximum": 2},
    "prizes": _NUMS,
    "anchors": _NUMS,
    "costs": _NUMS,
    "max_support": {"type": "integer", "minimum": 1, "maximum": 2},
    "two_point_probs": _NUMS,
    "offsets": _NUMS,
})

MODEL_SCHEMA = {"oneOf": [
    _obj({"kind": {"const": "baseline"}}, ["kind"]),
    _obj({"kind": {"const": "resampling"}}, ["kind"]),
    _kind("moral_hazard", k=_NONNEG),
    _kind("risk_averse", utility=UTILITY_SCHEMA),
    _obj({"kind": {"const": "multi_agent"}}, ["kind"]),
    _obj({"kind": {"const": "efficiency"}, "audit_cases": {"type": "integer", "minimum": 0}},
         ["kind"]),
]}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    **_obj({
        "name": {"type": "string"},
        "description": {"type": "string"},
        "known_project": PROJECT_SCHEMA,
        "known_projects": {"type": "array", "items": PROJECT_SCHEMA, "minItems": 1},
        "extra_projects": {"type": "array", "items": PROJECT_SCHEMA},
        "contract": CONTRACT_SCHEMA,
        "family": _obj({"kind": {"enum": ["debt", "dpe", "capped"]}, "z": _NONNEG}, ["kind"]),
        "utility": UTILITY_SCHEMA,
        "model": MODEL_SCHEMA,
        "grid": GRID_SCHEMA,
        "guarantee_method": {"enum": ["auto", "structural", "brute"]},
        "seed": {"type": "integer", "minimum": 0},
        "simulate": _obj({"episodes": {"type": "integer", "minimum": 1}}, ["episodes"]),
        "plot": _obj({"y_max": {"type": "number", "exclusiveMinimum": 0},
                      "n": {"type": "integer", "minimum": 2}}, ["y_max", "n"]),
        "output": _obj({"report": {"type": "string"}, "plot": {"type": "string"}}),
    }, ["model"]),
}


def validate_scenario(obj) -> dict:
    """Schema check plus the cross-field rules the schema cannot express."""
    try:
        jsonschema.validate(obj, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ValidationError(f"scenario invalid at {path}: {exc.message}") from None
    kind = obj["model"]["kind"]
    if kind == "multi_agent":
        if "known_projects" not in obj:
            raise ValidationError("multi_agent scenarios need known_projects")
    elif "known_project" not in obj:
        raise ValidationError(f"{kind} scenarios need known_project")
    if "contract" in obj and "family" in obj:
        raise ValidationError("give either contract or family, not both")
    return obj


def load_scenario(path) -> dict:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return validate_scenario(obj)


def grid_from_dict(obj: dict | None) -> AdversaryGrid:
    if not obj:
        return AdversaryGrid()
    kw = {k: tuple(v) if isinstance(v, list) else v for k, v in obj.items()}
    return AdversaryGrid(**kw)


def contract_for(sc: dict, box0):
    """The scenario's contract, or the requested optimal family member (pure debt by default)."""
    if "contract" in sc:
        return wrap_input(contract_from_dict, sc["contract"])
    fam = sc.get("family", {"kind": "debt"})
    if fam["kind"] == "debt":
        return pure_debt(box0)
    z = fam.get("z", box0.surplus)
    return (debt_plus_equity if fam["kind"] == "dpe" else capped_earnout)(box0, z)


def wrap_input(fn, *args):
    """Call a dict converter, reporting missing or mistyped fields as ValidationError."""
    try:
        return fn(*args)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed input: {exc}") from None


def guarantee_report(w, box0, u=IDENTITY, method: str = "auto", grid: AdversaryGrid | None = None):
    """Structural guarantee when available (or requested), grid oracle otherwise."""
    if method == "brute" or (method == "auto" and not structure(w).doubly_monotone):
        return brute_force_guarantee(w, box0, u, grid or AdversaryGrid()), "brute"
    return guarantee(w, box0, u), "structural"


def _index_dict(r):
    return {"value": r.value, "unique": r.unique, "never_sample": r.never_sample}


def run_scenario(sc: dict) -> tuple[dict, str | None]:
    """Execute a validated scenario; returns (report dict, plot CSV or None)."""
    kind = sc["model"]["kind"]
    seed = sc.get("seed", 0)
    report: dict = {"name": sc.get("name", ""), "model": kind}
    plot_contract = None

    if kind == "multi_agent":
        known = [project_from_dict(p) for p in sc["known_projects"]]
        report["plan"] = plan_multi_agent(known)
        report["indices"] = [index(p).value for p in known]
    else:
        box0 = wrap_input(project_from_dict, sc["known_project"])
        r0 = index(box0)
        report["index"] = _index_dict(r0)
        report["s0"] = box0.surplus
        if kind == "baseline":
            u = utility_from_dict(sc["utility"]) if "utility" in sc else IDENTITY
            w = contract_for(sc, box0)
            extra = [project_from_dict(p) for p in sc.get("extra_projects", [])]
            boxes = [box0, *extra]
            g, method = guarantee_report(w, box0, u, sc.get("guarantee_method", "auto"),
                                         grid_from_dict(sc.get("grid")))
            report.update(contract=w, structure=structure(w), verdict=classify_optimal(w, box0),
                          induced_index=_index_dict(induced_index(w, box0, u)),
                          guarantee=g, guarantee_method=method,
                          payoff=evaluate_exact(w, boxes, u))
            if "simulate" in sc:
                report["simulation"] = simulate(w, boxes, u, seed=seed,
                                                n_episodes=sc["simulate"]["episodes"])
            plot_contract = w
        elif kind == "resampling":
            w = contract_for(sc, box0)
            report.update(contract=w, payoff=evaluate_resampling(w, box0))
            plot_contract = w
        elif kind == "moral_hazard":
            k = sc["model"]["k"]
            design, w = design_moral_hazard(box0, k)
            report.update(design=design, contract=w, diversion_proof=diversion_proof(w, k),
                          verdict=classify_optimal(w, box0), guarantee=guarantee(w, box0))
            plot_contract = w
        elif kind == "risk_averse":
            u = utility_from_dict(sc["model"]["utility"])
            design, w = design_risk_averse(box0, u)
            report.update(design=design, contract=w, utility=u)
            plot_contract = w
        elif kind == "efficiency":
            report["efficiency"] = efficiency_report(box0, seed=seed,
                                                     n_audit=sc["model"].get("audit_cases", 25))

    csv = None
    if "plot" in sc and plot_contract is not None:
        csv = emit_plot_data(plot_contract, sc["plot"]["y_max"], sc["plot"]["n"])
    return to_jsonable(report), csv


def default_y_max(box0) -> float:
    top = box0.dist.max_support
    return top if top > 0 and math.isfinite(top) else 1.0
