"""Reservation indices of projects, plain and contract-induced."""
from __future__ import annotations

from dataclasses import dataclass

from .contracts import Contract, eval_contract
from .domain import IDENTITY, Project, UtilityFn, expected_excess, smallest_excess_root, utility_apply


@dataclass(frozen=True)
class IndexResult:
    value: float
    unique: bool
    never_sample: bool

    def __float__(self):
        return self.value


def _result(value: float, cost: float) -> IndexResult:
    return IndexResult(value=value, unique=cost > 0, never_sample=value < 0)


def index(p: Project) -> IndexResult:
    """Smallest r with E[(y - r)^+] = cost.

    A free project has a continuum of solutions; the smallest is its top
    prize and ``unique`` is False.  A negative value means opening the box
    is never worthwhile.
    """
    r = smallest_excess_root(p.dist.support, p.dist.probs, p.cost)
    return _result(r, p.cost)


def wage_utilities(w: Contract, p: Project, u: UtilityFn = IDENTITY) -> list[float]:
    if u.is_identity:
        return [eval_contract(w, y) for y in p.dist.support]
    return [utility_apply(u, eval_contract(w, y)) for y in p.dist.support]


def induced_index(w: Contract, p: Project, u: UtilityFn = IDENTITY) -> IndexResult:
    """Smallest r with E[(u(w(y)) - r)^+] = cost; the agent's index under ``w``."""
    r = smallest_excess_root(wage_utilities(w, p, u), p.dist.probs, p.cost)
    return _result(r, p.cost)


def index_bisection(p: Project, tol: float = 1e-9) -> float:
    """Bisection on E[(y - r)^+] - cost; kept only as an independent cross-check."""
    lo = p.dist.min_support - p.cost - 1.0
    hi = p.dist.max_support
    if p.cost == 0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if expected_excess(p.dist, mid) > p.cost:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
