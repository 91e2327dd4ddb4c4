"""Piecewise-linear limited-liability wage schedules."""
from __future__ import annotations

import csv
import io
import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .domain import Distribution
from .errors import LimitedLiabilityViolation, NegativePrize, ValidationError


def _tol(x: float) -> float:
    return 1e-12 * max(1.0, abs(x))


@dataclass(frozen=True)
class Contract:
    """w(y) = values[j] + slopes[j] * (y - breakpoints[j]) on [b_j, b_{j+1}).

    The first breakpoint is 0 and the last segment extends to infinity.
    Upward jumps are allowed at breakpoints; the value *at* a breakpoint is
    the right limit.  ``family``/``params`` only record how the contract was
    built so it can be serialized in its short form.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    slopes: tuple[float, ...]
    family: str = field(default="piecewise", compare=False)
    params: tuple = field(default=(), compare=False)

    def __post_init__(self):
        bp, vs, ss = self.breakpoints, self.values, self.slopes
        if not (len(bp) == len(vs) == len(ss) >= 1):
            raise ValidationError("breakpoints, values and slopes must have equal nonzero length")
        if bp[0] != 0:
            raise ValidationError("first breakpoint must be 0")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if any(not math.isfinite(x) for x in (*bp, *vs, *ss)):
            raise ValidationError("contract data must be finite")
        for j in range(len(bp) - 1):
            if self._jump(j + 1) < -_tol(vs[j + 1]):
                raise ValidationError(f"downward jump at y={bp[j + 1]!r}")
        if any(v < 0 for v in vs) or ss[-1] < 0:
            raise LimitedLiabilityViolation("wage must be nonnegative for all y >= 0")
        for j in range(len(bp) - 1):
            if self._left_value(j + 1) < -_tol(vs[j]):
                raise LimitedLiabilityViolation(f"wage negative just below y={bp[j + 1]!r}")

    # -- evaluation --------------------------------------------------------
    def _left_value(self, j: int) -> float:
        """Left limit at breakpoint j (j >= 1)."""
        b0 = self.breakpoints[j - 1]
        return self.values[j - 1] + self.slopes[j - 1] * (self.breakpoints[j] - b0)

    def _jump(self, j: int) -> float:
        return self.values[j] - self._left_value(j)

    def segment(self, y: float) -> int:
        return bisect_right(self.breakpoints, y) - 1

    def __call__(self, y: float) -> float:
        return eval_contract(self, y)

    def left_limit(self, y: float) -> float:
        """lim_{t -> y^-} w(t); equals w(0) at y = 0."""
        if y <= 0:
            return self.values[0]
        j = bisect_right(self.breakpoints, y) - 1
        if self.breakpoints[j] == y:
            return self._left_value(j)
        return self.values[j] + self.slopes[j] * (y - self.breakpoints[j])

    def jumps(self) -> list[tuple[float, float]]:
        """(location, size) of every jump larger than rounding noise."""
        out = []
        for j in range(1, len(self.breakpoints)):
            size = self._jump(j)
            if size > _tol(self.values[j]):
                out.append((self.breakpoints[j], size))
        return out

    def segments(self):
        """Yield (start, end, value_at_start, slope); ``end`` is inf for the last one."""
        bp = self.breakpoints
        for j in range(len(bp)):
            end = bp[j + 1] if j + 1 < len(bp) else math.inf
            yield bp[j], end, self.values[j], self.slopes[j]

    def __repr__(self):
        if self.family != "piecewise":
            args = ", ".join(f"{p!r}" for p in self.params)
            return f"Contract.{self.family}({args})"
        return (f"Contract(breakpoints={self.breakpoints!r}, values={self.values!r}, "
                f"slopes={self.slopes!r})")

    # -- constructors ------------------------------------------------------
    @classmethod
    def piecewise(cls, breakpoints, values, slopes) -> "Contract":
        return cls(tuple(map(float, breakpoints)), tuple(map(float, values)),
                   tuple(map(float, slopes)))

    @classmethod
    def from_points(cls, xs, ys, tail_slope: float) -> "Contract":
        """Continuous interpolation through (xs, ys), xs[0] == 0."""
        xs = [float(x) for x in xs]
        ys = [float(y) for y in ys]
        slopes = [(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:])]
        return cls.piecewise(xs, ys, slopes + [float(tail_slope)])

    @classmethod
    def pure_debt(cls, z: float) -> "Contract":
        """w(y) = (y - z)^+."""
        return cls.debt_plus_equity(z, 1.0)._retag("pure_debt", (float(z),))

    @classmethod
    def debt_plus_equity(cls, z: float, alpha: float) -> "Contract":
        """w(y) = (alpha (y - z))^+."""
        z, alpha = float(z), float(alpha)
        if z < 0 or not 0 <= alpha:
            raise ValidationError("need z >= 0 and alpha >= 0")
        if z == 0:
            c = cls((0.0,), (0.0,), (alpha,))
        else:
            c = cls((0.0, z), (0.0, 0.0), (0.0, alpha))
        return c._retag("debt_plus_equity", (z, alpha))

    @classmethod
    def capped_earnout(cls, z: float, wbar: float) -> "Contract":
        """w(y) = min(wbar, (y - z)^+)."""
        z, wbar = float(z), float(wbar)
        if z < 0 or wbar < 0:
            raise ValidationError("need z >= 0 and wbar >= 0")
        if math.isinf(wbar):
            return cls.pure_debt(z)
        if wbar == 0:
            return cls.constant(0.0)._retag("capped_earnout", (z, wbar))
        if z > 0 and z + wbar == z:
            # cap below the resolution of z: a jump of size wbar at z
            c = cls((0.0, z), (0.0, wbar), (0.0, 0.0))
            return c._retag("capped_earnout", (z, wbar))
        bp, vs, ss = [0.0], [0.0], [1.0]
        if z > 0:
            bp, vs, ss = [0.0, z], [0.0, 0.0], [0.0, 1.0]
        bp.append(z + wbar)
        vs.append(wbar)
        ss.append(0.0)
        return cls(tuple(bp), tuple(vs), tuple(ss))._retag("capped_earnout", (z, wbar))

    @classmethod
    def linear(cls, alpha: float) -> "Contract":
        alpha = float(alpha)
        return cls((0.0,), (0.0,), (alpha,))._retag("linear", (alpha,))

    @classmethod
    def constant(cls, value: float) -> "Contract":
        value = float(value)
        return cls((0.0,), (value,), (0.0,))._retag("constant", (value,))

    def _retag(self, family, params) -> "Contract":
        return Contract(self.breakpoints, self.values, self.slopes, family, params)


IDENTITY_CONTRACT = Contract.linear(1.0)


def eval_contract(w: Contract, y: float) -> float:
    if y < 0:
        raise NegativePrize(f"prize {y!r} is negative")
    j = bisect_right(w.breakpoints, y) - 1
    return w.values[j] + w.slopes[j] * (y - w.breakpoints[j])


def eval_many(w: Contract, ys) -> np.ndarray:
    ys = np.asarray(ys, dtype=float)
    if np.any(ys < 0):
        raise NegativePrize("negative prize")
    bp = np.asarray(w.breakpoints)
    j = np.searchsorted(bp, ys, side="right") - 1
    return np.asarray(w.values)[j] + np.asarray(w.slopes)[j] * (ys - bp[j])


@dataclass(frozen=True)
class StructureReport:
    limited_liability: bool
    wage_monotone: bool
    principal_monotone: bool
    doubly_monotone: bool
    sup_left_derivative: float


def structure(w: Contract) -> StructureReport:
    """Monotonicity verdicts from slopes and jumps; a jump counts as slope +inf."""
    has_jump = bool(w.jumps())
    wage_mono = all(s >= 0 for s in w.slopes)
    principal_mono = all(s <= 1 for s in w.slopes) and not has_jump
    sup_ld = math.inf if has_jump else max(w.slopes)
    return StructureReport(
        limited_liability=True,  # enforced at construction
        wage_monotone=wage_mono,
        principal_monotone=principal_mono,
        doubly_monotone=wage_mono and principal_mono,
        sup_left_derivative=sup_ld,
    )


def expected_wage(w: Contract, dist: Distribution) -> float:
    return math.fsum(p * eval_contract(w, y) for y, p in dist.atoms())


def satisfies_mdl(w: Contract, s0: float, tol: float = 1e-9) -> bool:
    """w(y) <= (y - s0)^+ for every y >= 0, checked exactly.

    The gap is piecewise linear with kinks only at breakpoints of w and at
    s0, so it suffices to check values and left limits there plus the slope
    of the unbounded last piece.
    """
    def bound(y):
        return max(y - s0, 0.0)

    points = list(w.breakpoints)
    if s0 > 0:
        points.append(s0)
    for y in points:
        if eval_contract(w, y) > bound(y) + tol:
            return False
        if w.left_limit(y) > bound(y) + tol:
            return False
    return w.slopes[-1] <= 1.0 + 1e-12


def diversion_proof(w: Contract, k: float) -> bool:
    """Left derivative of w never exceeds 1 - k."""
    return structure(w).sup_left_derivative <= 1.0 - k + 1e-12


# ---------------------------------------------------------------------------
# serialization and plot data

def contract_to_dict(w: Contract) -> dict:
    f, p = w.family, w.params
    if f == "pure_debt":
        return {"kind": "pure_debt", "z": p[0]}
    if f == "debt_plus_equity":
        return {"kind": "debt_plus_equity", "z": p[0], "alpha": p[1]}
    if f == "capped_earnout":
        return {"kind": "capped_earnout", "z": p[0], "wbar": p[1]}
    if f == "linear":
        return {"kind": "linear", "alpha": p[0]}
    if f == "constant":
        return {"kind": "constant", "value": p[0]}
    return {"kind": "piecewise", "breakpoints": list(w.breakpoints),
            "values": list(w.values), "slopes": list(w.slopes)}


def contract_from_dict(obj: dict) -> Contract:
    kind = obj.get("kind")
    if kind == "pure_debt":
        return Contract.pure_debt(obj["z"])
    if kind == "debt_plus_equity":
        return Contract.debt_plus_equity(obj["z"], obj["alpha"])
    if kind == "capped_earnout":
        return Contract.capped_earnout(obj["z"], obj["wbar"])
    if kind == "linear":
        return Contract.linear(obj["alpha"])
    if kind == "constant":
        return Contract.constant(obj["value"])
    if kind == "piecewise":
        return Contract.piecewise(obj["breakpoints"], obj["values"], obj["slopes"])
    raise ValidationError(f"unknown contract kind {kind!r}")


def plot_grid(w: Contract, y_max: float, n: int) -> list[float]:
    if n < 2:
        raise ValidationError("n must be at least 2")
    grid = set(np.linspace(0.0, float(y_max), n).tolist())
    grid.update(b for b in w.breakpoints if b <= y_max)
    return sorted(grid)


def emit_plot_data(w: Contract, y_max: float, n: int) -> str:
    """CSV with columns y, wage, principal on a uniform grid plus every breakpoint."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["y", "wage", "principal"])
    for y in plot_grid(w, y_max, n):
        wage = eval_contract(w, y)
        writer.writerow([format(y, ".17g"), format(wage, ".17g"), format(y - wage, ".17g")])
    return buf.getvalue()
