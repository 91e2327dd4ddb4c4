"""The agent's optimal search under a contract, evaluated exactly.

The agent holds the best (wage-utility, principal-payoff, prize) triple seen
so far, starting from the outside option of presenting a zero prize.  At
each state he either stops or opens a remaining box whose induced index is
at least his current best wage.  Values are computed by memoized recursion
over (remaining boxes, best triple); among actions the agent values within
``TIE_TOL`` of each other, the one best for the principal is taken.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .contracts import IDENTITY_CONTRACT, Contract, eval_contract
from .domain import IDENTITY, Distribution, Project, UtilityFn, make_distribution, utility_apply
from .errors import BudgetExceeded, NeverStops, ValidationError
from .indices import induced_index

TIE_TOL = 1e-12
MAX_BOXES = 12
MAX_SUPPORT = 32


@dataclass(frozen=True)
class PayoffReport:
    """Expected payoffs of one (contract, project set) pair.

    ``agent`` is in the agent's utility units (money when u is the identity);
    ``surplus`` is principal + agent.
    """

    principal: float
    agent: float
    surplus: float
    presented_dist: Distribution


def _better(cur, new):
    """Keep the wage-maximizing triple; break wage ties for the principal."""
    if new[0] > cur[0] + TIE_TOL:
        return new
    if new[0] >= cur[0] - TIE_TOL and new[1] > cur[1]:
        return (max(cur[0], new[0]), new[1], new[2])
    return cur


class SearchSolver:
    """Memoized search problem for one contract, project list and utility."""

    def __init__(self, w: Contract, boxes: Sequence[Project], u: UtilityFn = IDENTITY):
        if len(boxes) > MAX_BOXES:
            raise BudgetExceeded(f"{len(boxes)} boxes exceed the budget of {MAX_BOXES}")
        for b in boxes:
            if len(b.dist) > MAX_SUPPORT:
                raise BudgetExceeded(f"support of size {len(b.dist)} exceeds {MAX_SUPPORT}")
        self.w, self.boxes, self.u = w, list(boxes), u
        self.costs = [b.cost for b in boxes]
        self.indices = [induced_index(w, b, u).value for b in boxes]
        self.outcomes = []
        for b in boxes:
            outs = []
            for y, p in b.dist.atoms():
                wage = eval_contract(w, y)
                a = wage if u.is_identity else utility_apply(u, wage)
                outs.append((p, (a, y - wage, y)))
            self.outcomes.append(outs)
        w0 = eval_contract(w, 0.0)
        self.start = (w0 if u.is_identity else utility_apply(u, w0), -w0, 0.0)
        self.full_mask = (1 << len(boxes)) - 1
        self._memo: dict = {}

    def solve(self, mask: int, best: tuple) -> tuple[float, float, int]:
        """Return (agent value, principal value, action); action -1 means stop."""
        key = (mask, best)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        options = [(best[0], best[1], -1)]
        for i in range(len(self.boxes)):
            if not mask >> i & 1 or self.indices[i] < best[0] - TIE_TOL:
                continue
            rest = mask & ~(1 << i)
            va = -self.costs[i]
            vp = 0.0
            for p, out in self.outcomes[i]:
                a, pr, _ = self.solve(rest, _better(best, out))
                va += p * a
                vp += p * pr
            options.append((va, vp, i))
        top = max(o[0] for o in options)
        # max() keeps the first of equal principal values: stop, then box order
        result = max((o for o in options if o[0] >= top - TIE_TOL), key=lambda o: o[1])
        self._memo[key] = result
        return result

    def value(self) -> tuple[float, float]:
        a, p, _ = self.solve(self.full_mask, self.start)
        return a, p

    def presented(self) -> dict[float, float]:
        """Distribution of the presented prize under the chosen policy."""
        out: dict[float, float] = {}
        frontier = {(self.full_mask, self.start): 1.0}
        while frontier:
            nxt: dict = {}
            for (mask, best), prob in frontier.items():
                _, _, act = self.solve(mask, best)
                if act == -1:
                    out[best[2]] = out.get(best[2], 0.0) + prob
                    continue
                rest = mask & ~(1 << act)
                for p, o in self.outcomes[act]:
                    k = (rest, _better(best, o))
                    nxt[k] = nxt.get(k, 0.0) + prob * p
            frontier = nxt
        return out


def evaluate_exact(w: Contract, boxes: Sequence[Project], u: UtilityFn = IDENTITY) -> PayoffReport:
    """Agent-optimal, principal-favored payoffs of ``w`` against ``boxes``."""
    solver = SearchSolver(w, boxes, u)
    agent, principal = solver.value()
    agent, principal = agent + 0.0, principal + 0.0  # no negative zeros
    pres = solver.presented()
    total = math.fsum(pres.values())
    dist = make_distribution((y, p / total) for y, p in pres.items())
    return PayoffReport(principal=principal, agent=agent, surplus=principal + agent,
                        presented_dist=dist)


def planner_value(boxes: Sequence[Project]) -> float:
    """Optimal expected surplus of a planner searching ``boxes`` herself."""
    return evaluate_exact(IDENTITY_CONTRACT, boxes).surplus


# ---------------------------------------------------------------------------
# Monte Carlo

@dataclass(frozen=True)
class SimulationEstimate:
    mean: float
    std_error: float
    agent_mean: float
    agent_std_error: float
    n_episodes: int


def simulate(w: Contract, boxes: Sequence[Project], u: UtilityFn = IDENTITY,
             seed: int = 0, n_episodes: int = 10_000) -> SimulationEstimate:
    """Sample episodes of the same policy :func:`evaluate_exact` uses.

    All prizes are drawn up front, box by box, from one seeded generator, so
    the estimate depends only on ``seed`` and ``n_episodes``.  Episodes in
    the same search state are advanced together.
    """
    if n_episodes < 1:
        raise ValidationError("n_episodes must be >= 1")
    solver = SearchSolver(w, boxes, u)
    rng = np.random.default_rng(seed)
    draws = [rng.choice(len(outs), size=n_episodes, p=[p for p, _ in outs])
             for outs in solver.outcomes]

    table: list[tuple] = [solver.start]
    ids: dict[tuple, int] = {solver.start: 0}

    def tid(t):
        if t not in ids:
            ids[t] = len(table)
            table.append(t)
        return ids[t]

    mask = np.full(n_episodes, solver.full_mask, dtype=np.int64)
    best = np.zeros(n_episodes, dtype=np.int64)
    spent = np.zeros(n_episodes)
    active = np.ones(n_episodes, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        keys = mask[idx] * (1 << 20) + best[idx]
        for key in np.unique(keys):
            grp = idx[keys == key]
            m, b = int(mask[grp[0]]), int(best[grp[0]])
            _, _, act = solver.solve(m, table[b])
            if act == -1:
                active[grp] = False
                continue
            spent[grp] += solver.costs[act]
            mask[grp] = m & ~(1 << act)
            outs = solver.outcomes[act]
            trans = np.array([tid(_better(table[b], o)) for _, o in outs])
            best[grp] = trans[draws[act][grp]]
    final = np.array([table[b] for b in best.tolist()] or np.zeros((0, 3)), dtype=float)
    principal = final[:, 1]
    agent = final[:, 0] - spent

    def stats(x):
        # compensated sums keep a constant payoff at zero spread
        n = len(x)
        if n == 0:
            return 0.0, 0.0
        m = math.fsum(x.tolist()) / n
        if n == 1:
            return m, 0.0
        var = math.fsum(((x - m) ** 2).tolist()) / (n - 1)
        return m, math.sqrt(var / n)

    mean, std_error = stats(principal)
    agent_mean, agent_std_error = stats(agent)
    return SimulationEstimate(mean=mean + 0.0, std_error=std_error, agent_mean=agent_mean + 0.0,
                              agent_std_error=agent_std_error, n_episodes=n_episodes)


# ---------------------------------------------------------------------------
# resampling

def evaluate_resampling(w: Contract, box0: Project) -> PayoffReport:
    """Payoffs when the agent may redraw ``box0`` as often as he likes.

    The agent's stationary policy is to keep drawing while his best wage is
    below the induced index r and stop once a draw pays more than r.  Prizes
    paying exactly r are accepted when that helps the principal.  For the
    pure-debt contract at the known project's index the principal gets
    exactly that index.  Other contracts are accepted and evaluated with the
    same stationary rule, but only the debt case has a worked-out theory
    behind it.
    """
    r = induced_index(w, box0).value
    w_zero = eval_contract(w, 0.0)
    atoms = [(y, p, eval_contract(w, y)) for y, p in box0.dist.atoms()]
    strict = [(y, p, wage) for y, p, wage in atoms if wage > r + TIE_TOL]
    ties = sorted((t for t in atoms if abs(t[2] - r) <= TIE_TOL), key=lambda t: -(t[0] - t[2]))

    def stats(accept):
        q = math.fsum(p for _, p, _ in accept)
        if q == 0:
            return None
        principal = math.fsum(p * (y - wage) for y, p, wage in accept) / q
        wage = math.fsum(p * wage for _, p, wage in accept) / q
        return q, principal, wage - box0.cost / q

    best = None
    for k in range(len(ties) + 1):
        s = stats(strict + ties[:k])
        if s is not None and (best is None or s[1] > best[1][1]):
            best = (strict + ties[:k], s)

    stop_now = PayoffReport(principal=-w_zero, agent=w_zero, surplus=0.0,
                            presented_dist=make_distribution([(0.0, 1.0)]))
    if w_zero > r + TIE_TOL:
        return stop_now
    if best is None:
        if w_zero >= r - TIE_TOL:
            return stop_now
        raise NeverStops("no prize ever ends the search")
    accept, (q, principal, agent) = best
    if w_zero >= r - TIE_TOL and -w_zero >= principal:
        return stop_now
    dist = make_distribution((y, p / q) for y, p, _ in accept)
    return PayoffReport(principal=principal, agent=agent, surplus=principal + agent,
                        presented_dist=dist)
