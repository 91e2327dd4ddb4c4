import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import dense_mdl_check
from pandora_contracts import Contract, eval_contract, expected_wage, make_distribution, structure
from pandora_contracts.contracts import (contract_from_dict, contract_to_dict, diversion_proof,
                                         emit_plot_data, eval_many, satisfies_mdl)
from pandora_contracts.errors import LimitedLiabilityViolation, NegativePrize, ValidationError
from pandora_contracts.jsonio import dumps, loads

F0 = make_distribution([(0, 0.5), (100, 0.5)])


def test_eval_examples():
    assert eval_contract(Contract.pure_debt(80), 100) == 20
    assert eval_contract(Contract.pure_debt(80), 80) == 0
    assert eval_contract(Contract.debt_plus_equity(40, 1 / 3), 100) == pytest.approx(20, abs=1e-12)


def test_eval_rejects_negative_prize():
    with pytest.raises(NegativePrize):
        eval_contract(Contract.linear(1), -1)
    with pytest.raises(NegativePrize):
        eval_many(Contract.linear(1), [1, -1])


def test_value_at_jump_is_right_limit():
    w = Contract.piecewise([0, 10], [0, 5], [0, 0])
    assert eval_contract(w, 10) == 5
    assert w.left_limit(10) == 0
    assert w.jumps() == [(10.0, 5.0)]


def test_structure_examples():
    s = structure(Contract.linear(0.2))
    assert s.doubly_monotone and s.sup_left_derivative == 0.2
    s = structure(Contract.pure_debt(80))
    assert s.doubly_monotone and s.sup_left_derivative == 1
    s = structure(Contract.constant(10))
    assert s.wage_monotone and s.principal_monotone and s.sup_left_derivative == 0


def test_jump_is_not_doubly_monotone():
    s = structure(Contract.piecewise([0, 10], [0, 5], [0, 0]))
    assert s.wage_monotone and not s.principal_monotone and not s.doubly_monotone
    assert s.sup_left_derivative == math.inf


def test_expected_wage_examples():
    assert expected_wage(Contract.pure_debt(80), F0) == 10
    assert expected_wage(Contract.constant(10), F0) == 10
    assert expected_wage(Contract.capped_earnout(40, 20), F0) == 10


def test_construction_errors():
    with pytest.raises(LimitedLiabilityViolation):
        Contract.piecewise([0], [0], [-1])
    with pytest.raises(LimitedLiabilityViolation):
        Contract.piecewise([0, 10], [5, 0], [-1.0, 0])
    with pytest.raises(ValidationError):
        Contract.piecewise([0, 10], [10, 0], [0, 0])  # downward jump
    with pytest.raises(ValidationError):
        Contract.piecewise([1], [0], [0])
    with pytest.raises(ValidationError):
        Contract.piecewise([0, 5, 5], [0, 0, 0], [0, 0, 0])


probe = st.lists(st.floats(0, 500, allow_nan=False), min_size=1, max_size=30)


@given(st.floats(0, 200), st.floats(0, 1), st.floats(0, 100), probe)
def test_family_members_match_their_formulas(z, alpha, wbar, ys):
    dpe = Contract.debt_plus_equity(z, alpha)
    cap = Contract.capped_earnout(z, wbar)
    debt = Contract.pure_debt(z)
    for y in ys:
        assert eval_contract(dpe, y) == pytest.approx(max(alpha * (y - z), 0.0), abs=1e-12 * max(1, y))
        assert eval_contract(cap, y) == pytest.approx(min(wbar, max(y - z, 0.0)), abs=1e-12 * max(1, y))
        assert eval_contract(debt, y) == pytest.approx(max(y - z, 0.0), abs=1e-12 * max(1, y))
        assert eval_contract(Contract.linear(alpha), y) == pytest.approx(alpha * y)


@st.composite
def continuous_contracts(draw):
    n = draw(st.integers(1, 4))
    gaps = draw(st.lists(st.floats(1, 50), min_size=n - 1, max_size=n - 1))
    xs = [0.0] + list(np.cumsum(gaps))
    slopes = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.5, -0.25]), min_size=n, max_size=n))
    v0 = draw(st.floats(0, 20))
    ys = [v0]
    for a, b, s in zip(xs, xs[1:], slopes):
        ys.append(ys[-1] + s * (b - a))
    if min(ys) < 0 or slopes[-1] < 0:
        slopes[-1] = abs(slopes[-1])
        ys = [v0]
        slopes = [abs(s) for s in slopes]
        for a, b, s in zip(xs, xs[1:], slopes):
            ys.append(ys[-1] + s * (b - a))
    return Contract.piecewise(xs, ys, slopes)


@given(continuous_contracts())
def test_double_monotonicity_agrees_with_probe_grid(w):
    ys = np.unique(np.concatenate([np.linspace(0, 300, 601), w.breakpoints]))
    ws = eval_many(w, ys)
    probe_ok = bool(np.all(np.diff(ws) >= -1e-12) and np.all(np.diff(ys - ws) >= -1e-9))
    assert structure(w).doubly_monotone == probe_ok


@given(continuous_contracts(), st.floats(0, 100))
def test_mdl_check_agrees_with_dense_sampling(w, s0):
    top = max(w.breakpoints[-1], s0) * 2 + 400
    if w.slopes[-1] > 1:
        assert not satisfies_mdl(w, s0)
    else:
        assert satisfies_mdl(w, s0) == dense_mdl_check(w, s0, top)


def test_mdl_examples():
    assert satisfies_mdl(Contract.pure_debt(80), 40)
    assert not satisfies_mdl(Contract.linear(0.2), 40)
    assert satisfies_mdl(Contract.debt_plus_equity(40, 1 / 3), 40)
    assert not satisfies_mdl(Contract.constant(10), 40)


def test_diversion_proof_slope_bound():
    assert diversion_proof(Contract.debt_plus_equity(40, 1 / 3), 0.5)
    assert not diversion_proof(Contract.pure_debt(80), 0.5)
    assert diversion_proof(Contract.pure_debt(80), 0.0)


@pytest.mark.parametrize("w", [Contract.pure_debt(80), Contract.debt_plus_equity(40, 0.25),
                               Contract.capped_earnout(40, 20), Contract.linear(0.2),
                               Contract.constant(3), Contract.piecewise([0, 5], [1, 4], [0.5, 0])])
def test_contract_dict_round_trip(w):
    again = contract_from_dict(loads(dumps(contract_to_dict(w))))
    assert again == w
    assert contract_to_dict(again) == contract_to_dict(w)


def test_unknown_contract_kind():
    with pytest.raises(ValidationError):
        contract_from_dict({"kind": "option"})


def _rows(csv):
    lines = csv.strip().splitlines()
    assert lines[0] == "y,wage,principal"
    return [tuple(map(float, line.split(","))) for line in lines[1:]]


def test_plot_data_contains_kink():
    rows = _rows(emit_plot_data(Contract.pure_debt(80), 100, 7))
    assert (80.0, 0.0, 80.0) in rows
    assert rows[0] == (0.0, 0.0, 0.0) and rows[-1] == (100.0, 20.0, 80.0)


def test_plot_data_capped_onset():
    rows = _rows(emit_plot_data(Contract.capped_earnout(40, 20), 100, 3))
    assert (60.0, 20.0, 40.0) in rows and (40.0, 0.0, 40.0) in rows


def test_plot_data_linear():
    for y, wage, principal in _rows(emit_plot_data(Contract.linear(0.2), 50, 26)):
        assert wage == pytest.approx(0.2 * y) and principal == pytest.approx(0.8 * y)


def test_plot_needs_two_points():
    with pytest.raises(ValidationError):
        emit_plot_data(Contract.linear(0.2), 50, 1)
