from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parity_octave.kernel import (
    CAP_EXHAUSTED,
    check_convergence_identity,
    check_telescoping,
    decompose_parity,
    net_change,
    run_trajectory,
    step,
    step_closed_form,
    trajectory_from_values,
)

from oracles import accelerated_by_classical, naive_trajectory


@pytest.mark.parametrize("h, expected", [(20, 10), (1, 2), (27, 41), (2, 1), (7, 11), (5, 8)])
def test_step_examples(h, expected):
    assert step(h) == expected


@pytest.mark.parametrize("bad", [0, -3])
def test_step_rejects_non_naturals(bad):
    with pytest.raises(ValueError):
        step(bad)


def test_step_matches_closed_form_and_classical_map_up_to_1e5():
    for h in range(1, 100_001):
        s = step(h)
        assert s == step_closed_form(h) == accelerated_by_classical(h)


@pytest.mark.parametrize("h, k, s", [(20, 10, 0), (5, 2, 1), (1, 0, 1)])
def test_decompose_parity(h, k, s):
    d = decompose_parity(h)
    assert (d.k, d.s) == (k, s)
    assert 2 * d.k + d.s == h


@pytest.mark.parametrize(
    "h1, values",
    [
        (20, [20, 10, 5, 8, 4, 2, 1]),
        (7, [7, 11, 17, 26, 13, 20, 10, 5, 8, 4, 2, 1]),
        (1, [1]),
    ],
)
def test_run_trajectory_examples(h1, values):
    t = run_trajectory(h1)
    assert list(t.values) == values
    assert t.terminated
    assert t.m == len(values)


def test_step_cap_is_reported_not_raised():
    t = run_trajectory(27, step_cap=5)
    assert t.m == 5
    assert not t.terminated
    assert t.status == CAP_EXHAUSTED
    with pytest.raises(ValueError):
        check_convergence_identity(t)


def test_net_change_empty_sum():
    r = net_change([1])
    assert (r.delta_even, r.delta_odd, r.delta_all, r.sum_k, r.sum_hs) == (0, 0, 0, 0, 0)


def test_net_change_on_20():
    r = net_change(run_trajectory(20))
    assert r.sum_k == 24
    assert r.sum_hs == 5
    assert r.delta_all == -19


def test_net_change_single_odd_step():
    r = net_change([5, 8])
    assert (r.delta_odd, r.delta_even, r.delta_all) == (3, 0, 3)


@pytest.mark.parametrize("h1", [1, 7, 20, 27, 1639])
def test_convergence_identity_examples(h1):
    assert check_convergence_identity(run_trajectory(h1)) == (True, 0)


def test_trajectory_from_values_flags_termination():
    assert trajectory_from_values([4, 2, 1]).terminated
    assert not trajectory_from_values([4, 2]).terminated


@given(st.integers(min_value=1, max_value=10**6))
def test_trajectory_agrees_with_classical_oracle(h1):
    t = run_trajectory(h1)
    assert list(t.values) == naive_trajectory(h1)
    assert 1 not in t.values[:-1]


@given(st.integers(min_value=1, max_value=10**12))
def test_telescoping_and_step_relation(h1):
    t = run_trajectory(h1)
    for a, b in zip(t.values, t.values[1:]):
        assert step(a) == b
    assert check_telescoping(t) == (True, 0)
    rep = net_change(t)
    assert rep.delta_all == rep.delta_even + rep.delta_odd


@given(st.lists(st.integers(min_value=1, max_value=10**9), min_size=1, max_size=30))
def test_telescoping_holds_on_chains_from_any_start(seq):
    # follow step from the first element for len(seq) values
    vals = [seq[0]]
    for _ in range(len(seq) - 1):
        vals.append(step(vals[-1]))
    assert check_telescoping(vals) == (True, 0)
