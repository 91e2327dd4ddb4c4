import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_box, random_contract, random_doubly_monotone
from oracles import sampled_safe_infimum
from pandora_contracts import (AdversaryGrid, Contract, Project, brute_force_guarantee,
                               evaluate_exact, guarantee, induced_index, make_project, point_mass,
                               safe_project_infimum)
from pandora_contracts.adversary import candidate_sets
from pandora_contracts.errors import NotDoublyMonotone, ValidationError

A0 = make_project([(0, 0.5), (100, 0.5)], 10)
W0 = Contract.pure_debt(80)


def test_safe_infimum_debt_at_index():
    # x - w(x) is 80 on the whole crowd-out set x > 80, so the value is attained inside it
    inf = safe_project_infimum(W0, A0)
    assert inf.value == 80 and inf.attained and inf.x > 80


def test_safe_infimum_linear_share_not_attained():
    inf = safe_project_infimum(Contract.linear(0.2), A0)
    assert inf.value == 0 and not inf.attained and inf.x == 0


def test_safe_infimum_constant_wage():
    inf = safe_project_infimum(Contract.constant(10), A0)
    assert inf.value == -10 and inf.attained and inf.x == 0


def test_safe_infimum_empty_set():
    # wages never exceed the index of a free box paying the top wage
    box = make_project([(0, 0.5), (100, 0.5)], 0)
    inf = safe_project_infimum(Contract.capped_earnout(0, 5), box)
    assert inf.value == math.inf and inf.x is None


def test_safe_infimum_steep_tail_is_unbounded():
    inf = safe_project_infimum(Contract.linear(1.5), A0)
    assert inf.value == -math.inf


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_safe_infimum_below_sampled_values(seed):
    rng = np.random.default_rng(seed)
    box = random_box(rng)
    w = random_contract(rng, box)
    r = induced_index(w, box).value
    inf = safe_project_infimum(w, box)
    # indices within the agent's tie tolerance of 0 count as 0, as in the search
    threshold = -1.0 if r < -1e-12 else max(r, 0.0)
    top = 2 * max(w.breakpoints[-1], box.dist.max_support) + 50
    sampled = sampled_safe_infimum(w, threshold, top)
    assert inf.value <= sampled + 1e-9
    if inf.attained and math.isfinite(inf.value):
        assert w(inf.x) > threshold
        assert inf.x - w(inf.x) == pytest.approx(inf.value, abs=1e-9)


def test_guarantee_examples():
    g = guarantee(W0, A0)
    assert g.value == 40 and g.witness == "known_only" and g.attained
    g = guarantee(Contract.linear(0.2), A0)
    assert g.value == 0 and g.witness == "safe_project" and not g.attained and g.witness_x == 0
    assert g.epsilon_note
    g = guarantee(Contract.debt_plus_equity(40, 1 / 3), A0)
    assert g.value == pytest.approx(40, abs=1e-12)


def test_guarantee_requires_double_monotonicity():
    with pytest.raises(NotDoublyMonotone):
        guarantee(Contract.linear(1.5), A0)
    with pytest.raises(NotDoublyMonotone):
        guarantee(Contract.piecewise([0, 10], [0, 5], [0, 0]), A0)


def test_safe_witness_really_crowds_out():
    g = guarantee(Contract.linear(0.2), A0)
    for eps in (1e-2, 1e-4, 1e-6):
        val = evaluate_exact(Contract.linear(0.2), [A0, Project(point_mass(eps), 0)]).principal
        assert g.value <= val <= g.value + eps


def test_brute_examples():
    g = brute_force_guarantee(W0, A0)
    assert g.value == 40 and g.witness == "known_only"
    g = brute_force_guarantee(Contract.constant(10), A0)
    assert g.value == pytest.approx(-10, abs=1e-6)
    assert brute_force_guarantee(Contract.pure_debt(100), A0).value == 0


def test_brute_finds_safe_crowd_out():
    g = brute_force_guarantee(Contract.linear(0.2), A0)
    assert g.witness == "extra_projects"
    (p,) = g.witness_projects
    assert p.cost == 0 and len(p.dist) == 1
    assert g.value == pytest.approx(0, abs=1e-9)


def test_grid_validation():
    with pytest.raises(ValidationError):
        AdversaryGrid(max_extra=3)
    with pytest.raises(ValidationError):
        AdversaryGrid(max_support=3)


def test_grid_sizes():
    assert candidate_sets(W0, A0, grid=AdversaryGrid(max_extra=0)) == [()]
    one = candidate_sets(W0, A0, grid=AdversaryGrid(max_extra=1))
    two = candidate_sets(W0, A0)
    assert len(two) > len(one) > 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_more_grid_points_never_raise_the_value(seed):
    rng = np.random.default_rng(seed)
    box = random_box(rng)
    w = random_contract(rng, box)
    prizes = sorted(set(np.round(rng.uniform(0, 120, size=6), 2).tolist()))
    small = AdversaryGrid(prizes=tuple(prizes[:3]), costs=(0.0,), max_extra=1, max_support=1)
    large = AdversaryGrid(prizes=tuple(prizes), costs=(0.0, box.cost), max_extra=1, max_support=1)
    assert brute_force_guarantee(w, box, grid=large).value <= brute_force_guarantee(w, box, grid=small).value


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_guarantees_never_exceed_known_surplus(seed):
    rng = np.random.default_rng(seed)
    box = random_box(rng)
    w = random_contract(rng, box)
    assert brute_force_guarantee(w, box).value <= box.surplus + 1e-12
    w = random_doubly_monotone(rng, box)
    assert guarantee(w, box).value <= box.surplus + 1e-12


def test_brute_force_is_deterministic():
    rng = np.random.default_rng(3)
    box = random_box(rng)
    w = Contract.linear(0.3)
    assert brute_force_guarantee(w, box) == brute_force_guarantee(w, box)
