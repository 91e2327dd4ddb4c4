"""Random projects and contracts shared by the property and acceptance suites.

Prizes and costs are kept on a 1e-2 lattice and slopes are either 0 or at
least 0.1, so every gap the adversary grid has to detect is far larger than
the agent's tie tolerance.
"""
import numpy as np

from pandora_contracts import Contract, make_project
from pandora_contracts.designer import capped_earnout, debt_plus_equity, pure_debt
from pandora_contracts.domain import expected_excess
from pandora_contracts.contracts import expected_wage
from pandora_contracts.indices import index


def random_box(rng, n_min=2, n_max=4, top=100.0):
    n = int(rng.integers(n_min, n_max + 1))
    support = np.sort(rng.choice(np.arange(0, int(top) + 1), size=n, replace=False)).astype(float)
    probs = rng.dirichlet(np.ones(n))
    probs = 0.05 + (1 - 0.05 * n) * probs
    mean = float(np.dot(support, probs))
    cost = round(float(rng.uniform(0.05, 0.6)) * mean, 2)
    if cost <= 0 or mean <= 0:
        return random_box(rng, n_min, n_max, top)
    return make_project(zip(support.tolist(), probs.tolist()), cost)


def _slope(rng):
    return 0.0 if rng.random() < 0.3 else float(rng.uniform(0.1, 1.0))


def _scaled(w: Contract, factor: float) -> Contract:
    return Contract.piecewise(w.breakpoints, [v * factor for v in w.values],
                              [s * factor for s in w.slopes])


def optimal_contract(rng, box):
    s0, r0 = box.surplus, index(box).value
    kind = rng.integers(3)
    if kind == 0 or r0 - s0 < 1e-6:
        return pure_debt(box)
    z = float(rng.uniform(s0, r0))
    return debt_plus_equity(box, z) if kind == 1 else capped_earnout(box, z)


def under_mdl_shape(rng, box):
    """Continuous wage zero below s0, bounded by theta (y - s0) above, calibrated to FSE."""
    s0 = box.surplus
    top = box.dist.max_support
    m = int(rng.integers(1, 4))
    xs = np.sort(rng.uniform(s0, max(top, s0 + 1.0) * 1.2, size=m))
    xs = [0.0, s0] + [float(x) for x in xs if x > s0 + 1e-3]
    ys = [0.0, 0.0] + [float(rng.uniform(0.2, 1.0)) * (x - s0) for x in xs[2:]]
    if s0 == 0:
        xs, ys = xs[1:], ys[1:]
    w = Contract.from_points(xs, ys, tail_slope=_slope(rng))
    ew = expected_wage(w, box.dist)
    if ew <= 0:
        return pure_debt(box)
    return _scaled(w, box.cost / ew)


def random_shape(rng, box):
    """Continuous piecewise wage with random kinks, optionally FSE-calibrated."""
    top = max(box.dist.max_support, 1.0)
    m = int(rng.integers(1, 4))
    xs = [0.0] + sorted(float(x) for x in rng.choice(np.arange(1, int(top * 1.2) + 1), size=m,
                                                         replace=False))
    ys = [float(rng.uniform(0, 5)) if rng.random() < 0.3 else 0.0]
    for a, b in zip(xs, xs[1:]):
        ys.append(ys[-1] + _slope(rng) * (b - a))
    w = Contract.from_points(xs, ys, tail_slope=_slope(rng))
    ew = expected_wage(w, box.dist)
    if rng.random() < 0.6 and ew > 0:
        w = _scaled(w, box.cost / ew)
    return w


def nonmonotone(rng, box):
    top = max(box.dist.max_support, 1.0)
    m = int(rng.integers(2, 4))
    xs = [0.0] + sorted(float(x) for x in rng.choice(np.arange(1, int(top) + 1), size=m,
                                                         replace=False))
    ys = [float(v) for v in rng.uniform(0, 0.5 * top, size=len(xs))]
    w = Contract.from_points(xs, ys, tail_slope=_slope(rng))
    ew = expected_wage(w, box.dist)
    if rng.random() < 0.5 and ew > 0:
        w = _scaled(w, box.cost / ew)
    return w


def random_contract(rng, box):
    """Mixture of optimal, near-optimal and clearly suboptimal contracts."""
    s0 = box.surplus
    kind = int(rng.integers(8))
    if kind == 0:
        return optimal_contract(rng, box)
    if kind == 1:
        w = optimal_contract(rng, box)
        delta = float(rng.uniform(1e-3, 0.2)) * (1 if rng.random() < 0.5 else -1)
        return _scaled(w, 1 + delta)
    if kind == 2:
        return under_mdl_shape(rng, box)
    if kind == 3:
        return random_shape(rng, box)
    if kind == 4:
        return nonmonotone(rng, box)
    if kind == 5:
        return Contract.linear(box.cost / box.dist.mean() if rng.random() < 0.5
                               else float(rng.uniform(0, 1)))
    if kind == 6:
        z = float(rng.uniform(0, s0)) if s0 > 0 else 0.0
        ex = expected_excess(box.dist, z)
        return Contract.debt_plus_equity(z, box.cost / ex)
    return Contract.pure_debt(round(float(rng.uniform(0, box.dist.max_support)), 2))


def random_doubly_monotone(rng, box):
    """Continuous wage with slopes in {0} or [0.1, 1]; optionally FSE-calibrated."""
    if rng.random() < 0.25:
        return optimal_contract(rng, box)
    top = max(box.dist.max_support, 1.0)
    m = int(rng.integers(1, 4))
    xs = [0.0] + sorted(float(x) for x in rng.choice(np.arange(1, int(top * 1.2) + 1), size=m,
                                                         replace=False))
    ys = [float(rng.uniform(0, 5)) if rng.random() < 0.3 else 0.0]
    for a, b in zip(xs, xs[1:]):
        ys.append(ys[-1] + _slope(rng) * (b - a))
    w = Contract.from_points(xs, ys, tail_slope=_slope(rng))
    ew = expected_wage(w, box.dist)
    if rng.random() < 0.5 and ew > 0:
        factor = box.cost / ew
        if max(w.slopes) * factor <= 1.0:
            w = _scaled(w, factor)
    return w
