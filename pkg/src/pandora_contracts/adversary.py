"""Worst-case payoff guarantees of contracts.

For doubly monotone contracts the worst case is either the known project
alone or the known project plus one free deterministic project that just
beats the known project's induced index (:func:`guarantee`).  Any contract
can also be checked by enumerating small adversarial project sets on a grid
(:func:`brute_force_guarantee`).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

from .contracts import Contract, structure
from .domain import IDENTITY, Project, UtilityFn, make_distribution, point_mass, utility_invert
from .errors import NotDoublyMonotone, ValidationError
from .indices import index, induced_index
from .search import TIE_TOL, SearchSolver, evaluate_exact


class SafeInfimum(NamedTuple):
    value: float
    attained: bool
    x: float | None


@dataclass(frozen=True)
class GuaranteeReport:
    """Worst-case principal payoff of a contract.

    ``witness`` is ``"known_only"`` when the known project alone is the worst
    case, ``"safe_project"`` when a free deterministic project at ``witness_x``
    crowds it out, and ``"extra_projects"`` for a grid argmin listed in
    ``witness_projects``.
    """

    value: float
    attained: bool
    witness: str
    witness_x: float | None = None
    witness_projects: tuple[Project, ...] = ()
    epsilon_note: str | None = None


def _crowd_out_threshold(w: Contract, box0: Project, u: UtilityFn) -> float | None:
    """Wage a free safe prize must strictly exceed to be opened before box0.

    None means every wage qualifies (the known project is never worth opening).
    """
    r = induced_index(w, box0, u).value
    # same tolerance the search uses: an index within TIE_TOL of 0 still gets opened
    if r < -TIE_TOL:
        return None
    return utility_invert(u, max(r, 0.0))


def _feasible_piece(b, e, v, s, theta):
    """Part of [b, e) where v + s (x - b) > theta, as (lo, lo_closed, hi) or None."""
    if theta is None:
        return b, True, e
    if s == 0:
        return (b, True, e) if v > theta else None
    c = b + (theta - v) / s
    if s > 0:
        if c < b:
            return b, True, e
        return (c, False, e) if c < e else None
    if c >= e:
        return b, True, e
    return (b, True, c) if c > b else None


def safe_project_infimum(w: Contract, box0: Project, u: UtilityFn = IDENTITY) -> SafeInfimum:
    """inf { x - w(x) : u(w(x)) > induced index of box0 } over x >= 0.

    Returns ``+inf`` when no prize beats the index.  ``attained`` is False
    when the infimum sits on an open boundary of the constraint set.
    """
    theta = _crowd_out_threshold(w, box0, u)
    best = SafeInfimum(math.inf, False, None)
    for b, e, v, s in w.segments():
        piece = _feasible_piece(b, e, v, s, theta)
        if piece is None:
            continue
        lo, lo_closed, hi = piece
        slope = 1.0 - s
        if slope > 0:
            cand = SafeInfimum(lo - (v + s * (lo - b)), lo_closed, lo)
        elif slope < 0:
            if math.isinf(hi):
                cand = SafeInfimum(-math.inf, False, None)
            else:
                cand = SafeInfimum(hi - (v + s * (hi - b)), False, hi)
        else:
            if lo_closed:
                x = lo
            else:
                x = lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi)
            cand = SafeInfimum(b - v, True, x)
        if cand.value < best.value or (cand.value == best.value and cand.attained and not best.attained):
            best = cand
    return best


def guarantee(w: Contract, box0: Project, u: UtilityFn = IDENTITY) -> GuaranteeReport:
    """Worst-case payoff of a doubly monotone contract from its two candidate worst cases."""
    if not structure(w).doubly_monotone:
        raise NotDoublyMonotone("structural guarantee needs a doubly monotone contract; "
                                "use brute_force_guarantee")
    known = evaluate_exact(w, [box0], u).principal + 0.0
    safe = safe_project_infimum(w, box0, u)
    if known <= safe.value:
        return GuaranteeReport(value=known, attained=True, witness="known_only")
    note = None
    if not safe.attained:
        note = (f"infimum approached by free safe projects with prize x -> {safe.x!r} "
                "from the crowding-out side; not attained")
    return GuaranteeReport(value=safe.value, attained=safe.attained, witness="safe_project",
                           witness_x=safe.x, epsilon_note=note)


# ---------------------------------------------------------------------------
# brute-force oracle

@dataclass(frozen=True)
class AdversaryGrid:
    """Family of adversarial project sets searched by :func:`brute_force_guarantee`.

    Sets are the known project plus up to ``max_extra`` extra projects:

    * one extra project: every point mass on ``prizes`` and every two-point
      distribution on ``anchors`` (weights ``two_point_probs``), each at
      every cost in ``costs``;
    * two extra projects: pairs of free point masses on ``anchors``.

    ``None`` fields take defaults derived from the contract and the known
    project: prizes are the breakpoints of w, s0, r0 and the points where w
    crosses the crowd-out threshold or the line y - s0, each shifted by
    ``+-offsets``, together with 0 and the known support; anchors are 0, the known support, the
    breakpoints, s0 and r0; costs are {0, c0/2, c0}.
    """

    max_extra: int = 2
    prizes: tuple[float, ...] | None = None
    anchors: tuple[float, ...] | None = None
    costs: tuple[float, ...] | None = None
    max_support: int = 2
    two_point_probs: tuple[float, ...] = (0.5,)
    offsets: tuple[float, ...] = (0.0, 1e-6, 5e-10)

    def __post_init__(self):
        if not 0 <= self.max_extra <= 2:
            raise ValidationError("max_extra must be 0, 1 or 2")
        if not 1 <= self.max_support <= 2:
            raise ValidationError("max_support must be 1 or 2")


def _crossings(w: Contract, theta: float) -> list[float]:
    out = []
    for b, e, v, s in w.segments():
        if s != 0:
            c = b + (theta - v) / s
            if b <= c < e:
                out.append(c)
        elif v == theta:
            out.append(b)
    return out


def _line_crossings(w: Contract, s0: float) -> list[float]:
    """Points x >= s0 where w(x) = x - s0, i.e. where the minimum debt level binds."""
    out = []
    for b, e, v, s in w.segments():
        if s != 1:
            x = (v - s * b + s0) / (1.0 - s)
            if b <= x < e and x >= s0:
                out.append(x)
    return out


def default_prizes(w: Contract, box0: Project, u: UtilityFn, offsets) -> list[float]:
    s0 = box0.surplus
    r0 = index(box0).value
    theta = _crowd_out_threshold(w, box0, u)
    kinks = [*w.breakpoints, s0, r0, *_line_crossings(w, s0)]
    kinks += _crossings(w, 0.0 if theta is None else theta)
    pts = set()
    for k in kinks:
        for d in offsets:
            pts.add(k + d)
            pts.add(k - d)
    pts.update(box0.dist.support)
    pts.add(0.0)
    return sorted(x for x in pts if x >= 0)


def candidate_sets(w: Contract, box0: Project, u: UtilityFn = IDENTITY,
                   grid: AdversaryGrid = AdversaryGrid()) -> list[tuple[Project, ...]]:
    """Extra-project tuples in the deterministic order they are searched."""
    c0 = box0.cost
    s0, r0 = box0.surplus, index(box0).value
    prizes = list(grid.prizes) if grid.prizes is not None else default_prizes(w, box0, u, grid.offsets)
    costs = list(grid.costs) if grid.costs is not None else sorted({0.0, c0 / 2, c0})
    if grid.anchors is not None:
        anchors = sorted(set(grid.anchors))
    else:
        anchors = sorted(x for x in {0.0, s0, r0, *box0.dist.support, *w.breakpoints} if x >= 0)

    sets: list[tuple[Project, ...]] = [()]
    if grid.max_extra == 0:
        return sets
    singles = [Project(point_mass(x), c) for x in prizes for c in costs]
    if grid.max_support >= 2:
        for lo, hi in itertools.combinations(anchors, 2):
            for q in grid.two_point_probs:
                d = make_distribution([(lo, q), (hi, 1 - q)])
                singles.extend(Project(d, c) for c in costs)
    sets.extend((p,) for p in singles)
    if grid.max_extra >= 2:
        free = [Project(point_mass(x), 0.0) for x in anchors]
        sets.extend(itertools.combinations(free, 2))
    return sets


def brute_force_guarantee(w: Contract, box0: Project, u: UtilityFn = IDENTITY,
                          grid: AdversaryGrid = AdversaryGrid()) -> GuaranteeReport:
    """Minimum principal payoff over every project set in ``grid``.

    This is an upper bound on the true guarantee and equals it on the grid
    family.  Ties keep the first set in :func:`candidate_sets` order.
    """
    best_val, best_set = math.inf, None
    for extra in candidate_sets(w, box0, u, grid):
        val = SearchSolver(w, (box0, *extra), u).value()[1]
        if val < best_val:
            best_val, best_set = val, extra
    best_val += 0.0  # no negative zero in reports
    if not best_set:
        return GuaranteeReport(value=best_val, attained=True, witness="known_only")
    x = best_set[0].dist.support[0] if len(best_set) == 1 and len(best_set[0].dist) == 1 else None
    return GuaranteeReport(value=best_val, attained=True, witness="extra_projects",
                           witness_x=x, witness_projects=tuple(best_set))
