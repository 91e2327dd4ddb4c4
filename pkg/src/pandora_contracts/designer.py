"""Constructions of optimal contracts and checks of their defining conditions.

A contract is robustly optimal for a known project a0 = (F0, c0) exactly
when it keeps the principal's share above the known surplus wherever the
agent is paid (minimum debt level, MDL) and leaves the agent no rent on a0
(full surplus extraction, FSE).  The constructors below build members of
the debt-like families that satisfy both, plus the variants for principal
moral hazard, a risk-averse agent, several agents and the efficiency audit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .adversary import guarantee
from .contracts import Contract, eval_contract, expected_wage, satisfies_mdl
from .domain import (IDENTITY, Project, UtilityFn, expected_excess, make_project, point_mass,
                     smallest_excess_root, utility_apply, utility_invert)
from .errors import Infeasible, KTooLarge, ModelError, NeverSampled, ZOutOfRange
from .indices import index, induced_index
from .search import MAX_BOXES, evaluate_exact, planner_value

FSE_TOL = 1e-9


@dataclass(frozen=True)
class OptimalityVerdict:
    mdl: bool
    fse: bool
    optimal: bool
    s0: float
    r0: float


def _index_or_raise(box0: Project) -> float:
    r = index(box0)
    if r.never_sample:
        raise NeverSampled(f"index {r.value!r} is negative; the project is never worth opening")
    return r.value


def _check_z(box0: Project, z: float) -> tuple[float, float]:
    s0, r0 = box0.surplus, _index_or_raise(box0)
    if not s0 <= z < r0:
        raise ZOutOfRange(f"debt level {z!r} outside [s0, r0) = [{s0!r}, {r0!r})")
    return s0, r0


def pure_debt(box0: Project) -> Contract:
    """Debt at the known project's index: w(y) = (y - r0)^+."""
    return Contract.pure_debt(_index_or_raise(box0))


def debt_plus_equity(box0: Project, z: float) -> Contract:
    """Debt at z in [s0, r0) plus the equity share that makes E[w] = c0."""
    _check_z(box0, z)
    alpha = box0.cost / expected_excess(box0.dist, z)
    return Contract.debt_plus_equity(z, alpha)


def _cap_root(excess: Sequence[float], probs: Sequence[float], target: float,
              u: UtilityFn = IDENTITY) -> float:
    """Smallest cap m with sum p u(min(m, e)) = target; inf if unreachable.

    The left side is nondecreasing in m and linear in u(m) between sorted
    excess levels, so the root comes from one scan and one inversion of u.
    """
    if target <= 0:
        return 0.0
    pairs = sorted((e, p) for e, p in zip(excess, probs) if e > 0)
    acc, tail = 0.0, math.fsum(p for _, p in pairs)
    for e, p in pairs:
        ue = utility_apply(u, e)
        if acc + tail * ue >= target:
            return utility_invert(u, (target - acc) / tail)
        acc += p * ue
        tail -= p
    return math.inf


def capped_earnout(box0: Project, z: float) -> Contract:
    """Debt at z in [s0, r0) with the wage cap that makes E[w] = c0."""
    _check_z(box0, z)
    ys, ps = box0.dist.support, box0.dist.probs
    excess = [max(y - z, 0.0) for y in ys]
    wbar = _cap_root(excess, ps, box0.cost)
    if math.isinf(wbar):
        raise Infeasible("no cap reaches the project cost")
    return Contract.capped_earnout(z, wbar)


def classify_optimal(w: Contract, box0: Project) -> OptimalityVerdict:
    """MDL and FSE verdicts; the contract is optimal exactly when both hold."""
    s0 = box0.surplus
    r0 = index(box0).value
    mdl = satisfies_mdl(w, s0)
    fse = abs(expected_wage(w, box0.dist) - box0.cost) <= FSE_TOL
    return OptimalityVerdict(mdl=mdl, fse=fse, optimal=mdl and fse, s0=s0, r0=r0)


# ---------------------------------------------------------------------------
# principal moral hazard

def diversion_best_response(w: Contract, k: float, y: float) -> float:
    """Largest report yhat in [0, y] maximizing yhat - w(yhat) + k (y - yhat).

    The objective is linear on each segment of w, so it is compared at 0, y,
    every breakpoint up to y and the point just left of each breakpoint (the
    objective jumps down at an upward wage jump).
    """
    if y < 0:
        return 0.0

    def gain(t):
        return (1.0 - k) * t - eval_contract(w, t) + k * y

    cands = {0.0, float(y)}
    for b in w.breakpoints[1:]:
        if b <= y:
            cands.add(b)
            cands.add(math.nextafter(b, -math.inf))
    vals = {t: gain(t) for t in cands}
    top = max(vals.values())
    tol = 1e-12 * max(1.0, abs(top))
    return max(t for t, g in vals.items() if g >= top - tol)


@dataclass(frozen=True)
class MoralHazardDesign:
    k: float
    k_star: float
    z: float
    alpha: float
    case: str  # "below_threshold" or "at_or_above_threshold"


def design_moral_hazard(box0: Project, k: float) -> tuple[MoralHazardDesign, Contract]:
    """Optimal diversion-proof debt-plus-equity contract at diversion rate k."""
    c0, mean = box0.cost, box0.dist.mean()
    k_max = 1.0 - c0 / mean if mean > 0 else 0.0
    if not 0 <= k <= k_max + 1e-12:
        raise KTooLarge(f"k must lie in [0, {k_max!r}], got {k!r}")
    s0 = box0.surplus
    ex = expected_excess(box0.dist, s0)
    k_star = 1.0 - c0 / ex
    if k < k_star:
        z, alpha, case = s0, c0 / ex, "below_threshold"
    else:
        alpha, case = 1.0 - k, "at_or_above_threshold"
        if alpha == 0:
            z = box0.dist.max_support
        else:
            z = max(smallest_excess_root(box0.dist.support, box0.dist.probs, c0 / alpha), 0.0)
    design = MoralHazardDesign(k=k, k_star=k_star, z=z, alpha=alpha, case=case)
    return design, Contract.debt_plus_equity(z, alpha)


# ---------------------------------------------------------------------------
# risk-averse agent

@dataclass(frozen=True)
class RiskAverseDesign:
    z_u: float
    w_bar_u: float
    guarantee: float
    fse_residual: float


def design_risk_averse(box0: Project, u: UtilityFn,
                       xtol: float = 1e-12) -> tuple[RiskAverseDesign, Contract]:
    """Capped earnout (z_u, wbar_u) for an agent with concave utility u.

    For each debt level z the cap wbar(z) gives the agent exactly c0 in
    expected utility; z_u then solves z = E[y - min(wbar(z), (y - z)^+)],
    i.e. the debt equals the principal's payoff on the known project.  The
    worst case is re-derived afterwards with the structural guarantee.
    """
    ys, ps, c0 = box0.dist.support, box0.dist.probs, box0.cost
    mean = box0.dist.mean()
    best_case = math.fsum(p * utility_apply(u, y) for y, p in zip(ys, ps))
    if best_case < c0:
        raise Infeasible(f"even paying the whole prize gives expected utility {best_case!r} < {c0!r}")

    def wbar(z):
        return _cap_root([max(y - z, 0.0) for y in ys], ps, c0, u)

    def principal(z, cap):
        return math.fsum(p * (y - min(cap, max(y - z, 0.0))) for y, p in zip(ys, ps))

    def g(z):
        return z - principal(z, wbar(z))

    # beyond z_hi even an uncapped debt cannot pay the agent c0
    z_hi = min(mean, _largest_feasible_debt(box0, u))
    # g(z_hi) >= 0 in exact arithmetic (an uncapped debt leaves the principal
    # E[min(y, z)] <= z); a nonpositive value is a root up to rounding
    if g(z_hi) <= 0:
        z_u = z_hi
    elif g(0.0) == 0:
        z_u = 0.0
    else:
        z_u = brentq(g, 0.0, z_hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    cap = wbar(z_u)
    contract = Contract.capped_earnout(z_u, cap)
    resid = math.fsum(p * utility_apply(u, eval_contract(contract, y)) for y, p in zip(ys, ps)) - c0
    value = guarantee(contract, box0, u).value
    return RiskAverseDesign(z_u=z_u, w_bar_u=cap, guarantee=value, fse_residual=resid), contract


def _largest_feasible_debt(box0: Project, u: UtilityFn) -> float:
    """Largest z with E[u((y - z)^+)] >= c0 (the uncapped debt still pays c0)."""
    ys, ps, c0 = box0.dist.support, box0.dist.probs, box0.cost
    if u.is_identity:
        return index(box0).value

    def f(z):
        return math.fsum(p * utility_apply(u, max(y - z, 0.0)) for y, p in zip(ys, ps)) - c0

    hi = box0.dist.max_support
    if f(hi) >= 0:
        return hi
    z = brentq(f, 0.0, hi, xtol=1e-12)
    # stay on the feasible side: with a steep utility near 0 a root that is
    # off by xtol can leave the agent measurably short of c0
    step = 1e-12
    while z > 0 and f(z) < 0:
        z = max(z - step, 0.0)
        step *= 2
    return z


# ---------------------------------------------------------------------------
# several agents

@dataclass(frozen=True)
class MultiAgentPlan:
    order: tuple[int, ...]
    contracts: tuple[Contract, ...]
    debts: tuple[float, ...]
    stop_thresholds: tuple[float, ...]
    expected_principal: float
    planner_value: float | None


def plan_multi_agent(known: Sequence[Project]) -> MultiAgentPlan:
    """Sponsor agents in decreasing index order, each on debt at his own index.

    The principal stops before round k+1 once her best net payoff so far
    exceeds the next agent's index.  The expected payoff is computed by
    forward recursion over that best net payoff.
    """
    if not known:
        raise ModelError("need at least one agent")
    r = [_index_or_raise(p) for p in known]
    order = tuple(sorted(range(len(known)), key=lambda i: -r[i]))
    debts = tuple(r[i] for i in order)
    contracts = tuple(Contract.pure_debt(d) for d in debts)
    thresholds = debts[1:] + (-math.inf,)

    states = {0.0: 1.0}
    for rnd, i in enumerate(order):
        nxt: dict[float, float] = {}
        for best, prob in states.items():
            if rnd > 0 and best > debts[rnd]:
                nxt[best] = nxt.get(best, 0.0) + prob
                continue
            for y, p in known[i].dist.atoms():
                net = y - eval_contract(contracts[rnd], y)
                key = max(best, net)
                nxt[key] = nxt.get(key, 0.0) + prob * p
        states = nxt
    expected = math.fsum(v * p for v, p in states.items())

    pv = planner_value(known) if len(known) <= MAX_BOXES else None
    if pv is not None and abs(pv - expected) > 1e-9 * max(1.0, abs(pv)):
        raise ModelError(f"plan value {expected!r} differs from planner value {pv!r}")
    return MultiAgentPlan(order=order, contracts=contracts, debts=debts,
                          stop_thresholds=thresholds, expected_principal=expected,
                          planner_value=pv)


# ---------------------------------------------------------------------------
# efficiency

@dataclass(frozen=True)
class EfficiencyReport:
    condition: bool
    c0: float
    mean: float
    y_min: float
    r0: float
    audit_cases: int
    audit_passed: bool
    counterexample: dict | None


def _random_box_above(rng, r0: float, scale: float) -> Project:
    while True:
        n = int(rng.integers(1, 4))
        support = r0 + rng.uniform(0.0, scale, size=n)
        probs = rng.dirichlet(np.ones(n))
        box = make_project(zip(support.tolist(), probs.tolist()), float(rng.uniform(0.0, 0.3 * scale)))
        if index(box).value >= r0:
            return box


def efficiency_report(box0: Project, seed: int = 0, n_audit: int = 25) -> EfficiencyReport:
    """Whether debt at r0 keeps the agent's search efficient for every project set.

    The condition c0 >= E[y] - min y is equivalent to min y >= r0.  The audit
    draws project sets whose indices all exceed r0 and checks that under
    debt at r0 each induced index is the plain index shifted down by r0 and
    that the agent's search attains the planner's surplus.  When the
    condition fails, a counterexample with a cheap safe project just below
    r0 is evaluated.
    """
    c0, mean, y_min = box0.cost, box0.dist.mean(), box0.dist.min_support
    r0 = _index_or_raise(box0)
    condition = c0 >= mean - y_min - 1e-12 * max(1.0, abs(mean))
    w0 = Contract.pure_debt(r0)
    rng = np.random.default_rng(seed)
    scale = max(1.0, box0.dist.max_support - y_min, abs(r0))
    passed = True
    for _ in range(n_audit):
        extra = [_random_box_above(rng, r0, scale) for _ in range(int(rng.integers(1, 3)))]
        boxes = [box0, *extra]
        for b in extra:
            if abs(induced_index(w0, b).value - (index(b).value - r0)) > 1e-12 * max(1.0, r0):
                passed = False
        gap = planner_value(boxes) - evaluate_exact(w0, boxes).surplus
        if abs(gap) > 1e-9 * max(1.0, scale):
            passed = False

    counter = None
    if not condition:
        eps = 1e-3 * (r0 - y_min)
        a1 = Project(point_mass(r0 - eps), eps)
        planner = planner_value([box0, a1])
        agent_surplus = evaluate_exact(w0, [box0, a1]).surplus
        counter = {"prize": r0 - eps, "cost": eps, "planner_value": planner,
                   "agent_surplus": agent_surplus, "gap": planner - agent_surplus}
    return EfficiencyReport(condition=condition, c0=c0, mean=mean, y_min=y_min, r0=r0,
                            audit_cases=n_audit, audit_passed=passed, counterexample=counter)
