"""Finite-support prize distributions, projects and agent utility functions.

Everything here is immutable.  Moments are computed with :func:`math.fsum`
so that piecewise-linear identities used elsewhere (index shifts, surplus
extraction) hold to within a few ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySupport, NegativePrize, OutOfRange, ProbSumInvalid, ValidationError

INPUT_PROB_TOL = 1e-9
INTERNAL_PROB_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """A prize distribution with finitely many atoms.

    ``support`` is strictly increasing and nonnegative; ``probs`` are
    strictly positive and sum to one.  Build instances through
    :func:`make_distribution` unless the data is already canonical.
    """

    support: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) == 0:
            raise EmptySupport("distribution needs at least one atom")
        if len(self.support) != len(self.probs):
            raise ValidationError("support and probs must have equal length")
        if any(y < 0 for y in self.support):
            raise NegativePrize(f"negative prize in {self.support}")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValidationError("support must be strictly increasing")
        if any(p <= 0 for p in self.probs):
            raise ProbSumInvalid("atoms must carry positive probability")
        if abs(math.fsum(self.probs) - 1.0) > INTERNAL_PROB_TOL:
            raise ProbSumInvalid(f"probabilities sum to {math.fsum(self.probs)!r}")

    @property
    def min_support(self) -> float:
        return self.support[0]

    @property
    def max_support(self) -> float:
        return self.support[-1]

    def mean(self) -> float:
        return math.fsum(p * y for y, p in zip(self.support, self.probs))

    def atoms(self):
        return zip(self.support, self.probs)

    def __len__(self):
        return len(self.support)


@dataclass(frozen=True)
class Project:
    """A Pandora's box: a prize distribution plus the cost of opening it."""

    dist: Distribution
    cost: float

    def __post_init__(self):
        if not self.cost >= 0 or math.isinf(self.cost):
            raise ValidationError(f"cost must be finite and nonnegative, got {self.cost!r}")

    @property
    def surplus(self) -> float:
        return self.dist.mean() - self.cost


def make_distribution(pairs: Iterable[tuple[float, float]]) -> Distribution:
    """Canonicalize ``(prize, prob)`` pairs.

    Duplicate prizes are merged, zero-probability atoms dropped and the
    result sorted.  Probabilities must already sum to one within 1e-9; they
    are renormalized unless they are already within 1e-12 of one.

    >>> make_distribution([(100, 0.5), (0, 0.5)])
    Distribution(support=(0.0, 100.0), probs=(0.5, 0.5))
    """
    merged: dict[float, list[float]] = {}
    for y, p in pairs:
        y, p = float(y), float(p)
        if y < 0 or math.isnan(y):
            raise NegativePrize(f"prize {y!r} is negative")
        if p < 0 or math.isnan(p):
            raise ProbSumInvalid(f"probability {p!r} is negative")
        merged.setdefault(y, []).append(p)
    atoms = {y: math.fsum(ps) for y, ps in merged.items()}
    atoms = {y: p for y, p in atoms.items() if p > 0}
    if not atoms:
        raise EmptySupport("no atom carries positive probability")
    total = math.fsum(atoms.values())
    if abs(total - 1.0) > INPUT_PROB_TOL:
        raise ProbSumInvalid(f"probabilities sum to {total!r}, expected 1")
    support = tuple(sorted(atoms))
    # already-canonical input is kept bit-for-bit so that re-parsing is idempotent
    scale = 1.0 if abs(total - 1.0) <= INTERNAL_PROB_TOL else total
    probs = tuple(atoms[y] / scale for y in support)
    return Distribution(support, probs)


def point_mass(x: float) -> Distribution:
    return make_distribution([(x, 1.0)])


def make_project(pairs, cost: float) -> Project:
    return Project(make_distribution(pairs), float(cost))


def expected_excess(dist: Distribution, z: float) -> float:
    """E[(y - z)^+] under ``dist``; equals E[y] - z whenever z <= 0."""
    return math.fsum(p * (y - z) for y, p in dist.atoms() if y > z)


def smallest_excess_root(values: Sequence[float], probs: Sequence[float], cost: float) -> float:
    """Smallest r with sum_i p_i (v_i - r)^+ = cost.

    The left side is convex, piecewise linear and nonincreasing in r, so the
    root is found exactly by walking the sorted values from the top.  With
    ``cost == 0`` this returns the largest value carrying mass.
    """
    if cost < 0:
        raise ValidationError("cost must be nonnegative")
    order = sorted(zip(values, probs), key=lambda t: -t[0])
    grouped: list[list[float]] = []
    for v, p in order:
        if p <= 0:
            continue
        if grouped and grouped[-1][0] == v:
            grouped[-1][1] += p
        else:
            grouped.append([v, p])
    if not grouped:
        raise EmptySupport("no value carries positive probability")

    # excess_here = sum over values above v_k of p (v - v_k)
    excess_here = 0.0
    mass = 0.0
    for k, (v, p) in enumerate(grouped):
        mass += p
        if k + 1 < len(grouped):
            v_next = grouped[k + 1][0]
            excess_next = excess_here + mass * (v - v_next)
            if excess_next >= cost:
                return v - (cost - excess_here) / mass
            excess_here = excess_next
        else:
            return v - (cost - excess_here) / mass
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# utility functions

_UTILITY_KINDS = ("identity", "power", "scaled_sqrt", "tabulated")


@dataclass(frozen=True)
class UtilityFn:
    """Strictly increasing utility over money with ``u(0) == 0``.

    ``kind`` is one of ``identity``, ``power`` (``params=(exponent,)``),
    ``scaled_sqrt`` (``params=(scale,)``) or ``tabulated``
    (``params=(breakpoints, values)``, linear interpolation, last slope
    extended to infinity).
    """

    kind: str = "identity"
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _UTILITY_KINDS:
            raise ValidationError(f"unknown utility kind {self.kind!r}")
        if self.kind == "power":
            (p,) = self.params
            if not 0 < p <= 1:
                raise ValidationError("power exponent must lie in (0, 1]")
        elif self.kind == "scaled_sqrt":
            (s,) = self.params
            if not s > 0:
                raise ValidationError("scale must be positive")
        elif self.kind == "tabulated":
            xs, vs = self.params
            if len(xs) < 2 or len(xs) != len(vs):
                raise ValidationError("tabulated utility needs >= 2 matching breakpoints")
            if xs[0] != 0 or vs[0] != 0:
                raise ValidationError("tabulated utility must start at (0, 0)")
            if any(b <= a for a, b in zip(xs, xs[1:])) or any(b <= a for a, b in zip(vs, vs[1:])):
                raise ValidationError("tabulated utility must be strictly increasing")
        if self.kind != "identity":
            _check_concave(self)

    @classmethod
    def identity(cls) -> "UtilityFn":
        return cls("identity", ())

    @classmethod
    def power(cls, exponent: float) -> "UtilityFn":
        return cls("power", (float(exponent),))

    @classmethod
    def scaled_sqrt(cls, scale: float) -> "UtilityFn":
        return cls("scaled_sqrt", (float(scale),))

    @classmethod
    def tabulated(cls, breakpoints, values) -> "UtilityFn":
        return cls("tabulated", (tuple(map(float, breakpoints)), tuple(map(float, values))))

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity"

    def __call__(self, x: float) -> float:
        return utility_apply(self, x)

    def inverse(self, v: float) -> float:
        return utility_invert(self, v)


IDENTITY = UtilityFn.identity()


def utility_apply(u: UtilityFn, x: float) -> float:
    if x < 0:
        raise OutOfRange(f"utility is defined on [0, inf), got {x!r}")
    if u.kind == "identity":
        return x
    if u.kind == "power":
        return x ** u.params[0]
    if u.kind == "scaled_sqrt":
        return u.params[0] * math.sqrt(x)
    xs, vs = u.params
    return _interp_extrapolate(x, xs, vs)


def utility_invert(u: UtilityFn, v: float) -> float:
    if v < 0:
        raise OutOfRange(f"utility value {v!r} is below u(0) = 0")
    if u.kind == "identity":
        return v
    if u.kind == "power":
        return v ** (1.0 / u.params[0])
    if u.kind == "scaled_sqrt":
        return (v / u.params[0]) ** 2
    xs, vs = u.params
    return _interp_extrapolate(v, vs, xs)


def _interp_extrapolate(x, xs, ys):
    if x >= xs[-1]:
        slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        return ys[-1] + slope * (x - xs[-1])
    return float(np.interp(x, xs, ys))


def _check_concave(u: UtilityFn, n: int = 1000):
    if u.kind == "tabulated":
        top = 2.0 * u.params[0][-1]
    else:
        top = 1e3
    grid = np.linspace(0.0, top, n)
    vals = np.array([utility_apply(u, float(x)) for x in grid])
    if np.any(np.diff(vals) <= 0):
        raise ValidationError("utility must be strictly increasing")
    second = np.diff(vals, 2)
    if np.any(second > 1e-9 * max(1.0, float(np.abs(vals).max()))):
        raise ValidationError("utility must be concave")


# ---------------------------------------------------------------------------
# discretized continuous families

def discretize(family: str, n: int, **params) -> Distribution:
    """Equal-weight ``n``-point quantile discretization of a named family.

    ``uniform`` takes ``low``/``high``; ``lognormal`` takes ``mu``/``sigma``
    of the underlying normal.  Atoms sit at the mid-quantiles (i + 1/2)/n.
    """
    from scipy import stats

    if n < 1:
        raise ValidationError("n must be positive")
    q = (np.arange(n) + 0.5) / n
    if family == "uniform":
        lo, hi = params.get("low", 0.0), params["high"]
        pts = stats.uniform(loc=lo, scale=hi - lo).ppf(q)
    elif family == "lognormal":
        pts = stats.lognorm(s=params["sigma"], scale=math.exp(params.get("mu", 0.0))).ppf(q)
    else:
        raise ValidationError(f"unknown family {family!r}")
    return make_distribution((float(y), 1.0 / n) for y in pts)


# ---------------------------------------------------------------------------
# canonical JSON forms (plain dicts; see jsonio for serialization)

def distribution_to_dict(d: Distribution) -> dict:
    return {"support": list(d.support), "probs": list(d.probs)}


def distribution_from_dict(obj: dict) -> Distribution:
    support, probs = obj["support"], obj["probs"]
    if len(support) != len(probs):
        raise ValidationError("support and probs must have equal length")
    return make_distribution(zip(support, probs))


def project_to_dict(p: Project) -> dict:
    return {"dist": distribution_to_dict(p.dist), "cost": p.cost}


def project_from_dict(obj: dict) -> Project:
    return Project(distribution_from_dict(obj["dist"]), float(obj["cost"]))


def utility_to_dict(u: UtilityFn) -> dict:
    if u.kind == "identity":
        return {"kind": "identity"}
    if u.kind == "power":
        return {"kind": "power", "exponent": u.params[0]}
    if u.kind == "scaled_sqrt":
        return {"kind": "scaled_sqrt", "scale": u.params[0]}
    return {"kind": "tabulated", "breakpoints": list(u.params[0]), "values": list(u.params[1])}


def utility_from_dict(obj: dict) -> UtilityFn:
    kind = obj.get("kind", "identity")
    if kind == "identity":
        return UtilityFn.identity()
    if kind == "power":
        return UtilityFn.power(obj["exponent"])
    if kind == "scaled_sqrt":
        return UtilityFn.scaled_sqrt(obj["scale"])
    if kind == "tabulated":
        return UtilityFn.tabulated(obj["breakpoints"], obj["values"])
    raise ValidationError(f"unknown utility kind {kind!r}")
