"""Independent reference computations used only by the tests.

None of these share code with the solvers they check: they enumerate
policies or realizations directly, or sample densely.
"""
import itertools
import math

import numpy as np
from scipy.optimize import brentq

TIE = 1e-12


def _wage(w, y):
    j = int(np.searchsorted(w.breakpoints, y, side="right")) - 1
    return w.values[j] + w.slopes[j] * (y - w.breakpoints[j])


def policy_values(w, boxes, u=None, opened=(), remaining=None):
    """(agent, principal) of every adaptive policy from this state.

    A policy either stops and presents any sampled prize (or the zero
    prize), or opens a remaining box and continues with any sub-policy per
    outcome.  Exponential; only for two or three small boxes.
    """
    util = (lambda x: x) if u is None else u
    if remaining is None:
        remaining = tuple(range(len(boxes)))
    out = []
    for y in {0.0, *opened}:
        wage = _wage(w, y)
        out.append((util(wage), y - wage))
    for i in remaining:
        rest = tuple(j for j in remaining if j != i)
        atoms = list(boxes[i].dist.atoms())
        branches = [policy_values(w, boxes, u, opened + (y,), rest) for y, _ in atoms]
        for combo in itertools.product(*branches):
            a = -boxes[i].cost + sum(p * v[0] for (_, p), v in zip(atoms, combo))
            pr = sum(p * v[1] for (_, p), v in zip(atoms, combo))
            out.append((a, pr))
    return out


def agent_optimal_principal_favored(w, boxes, u=None):
    vals = policy_values(w, boxes, u)
    top = max(a for a, _ in vals)
    return top, max(p for a, p in vals if a >= top - 1e-9)


def index_by_root_finding(values, probs, cost):
    """Smallest r with sum p (v - r)^+ = cost, via brentq on a bracket."""
    values, probs = np.asarray(values, float), np.asarray(probs, float)
    if cost == 0:
        return float(values[probs > 0].max())

    def f(r):
        return float(np.sum(probs * np.maximum(values - r, 0.0))) - cost

    lo = float(values.min()) - cost - 1.0
    hi = float(values.max())
    return brentq(f, lo, hi, xtol=1e-13, rtol=1e-15)


def weitzman_rule_values(w, boxes, indices):
    """Agent and principal value of the plain index rule, by enumerating all joint draws.

    Open boxes in descending index order while the best wage is below the
    next index; present the highest-wage prize (principal-best among equal
    wages).  Meant for instances without ties.
    """
    order = sorted(range(len(boxes)), key=lambda i: -indices[i])
    agent = principal = 0.0
    atoms = [list(b.dist.atoms()) for b in boxes]
    for combo in itertools.product(*atoms):
        prob = math.prod(p for _, p in combo)
        best = (_wage(w, 0.0), -_wage(w, 0.0))
        spent = 0.0
        for i in order:
            if best[0] >= indices[i]:
                break
            spent += boxes[i].cost
            y = combo[i][0]
            cand = (_wage(w, y), y - _wage(w, y))
            if cand[0] > best[0] or (cand[0] == best[0] and cand[1] > best[1]):
                best = cand
        agent += prob * (best[0] - spent)
        principal += prob * best[1]
    return agent, principal


def dense_mdl_check(w, s0, top, n=20001):
    ys = np.concatenate([np.linspace(0, top, n), np.asarray(w.breakpoints)])
    ws = np.array([_wage(w, y) for y in ys])
    return bool(np.all(ws <= np.maximum(ys - s0, 0) + 1e-9))


def sampled_safe_infimum(w, threshold, top, n=200001):
    """min of x - w(x) over a fine grid of x with w(x) > threshold (an upper bound)."""
    xs = np.linspace(0, top, n)
    ws = np.array([_wage(w, x) for x in xs])
    ok = ws > threshold
    return float(np.min(xs[ok] - ws[ok])) if ok.any() else math.inf
