from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parity_octave.kernel import run_trajectory, step, trajectory_from_values
from parity_octave.octave import BaseOctave, extract_state, to_base_octave
from parity_octave.rules import (
    CLOSED_FORMS,
    NEXT_BASE,
    AffineUpdate,
    build_base_graph,
    closed_form_update,
    graph_to_dot,
    itinerary,
    next_base,
    reentry_sources,
    selection_rule_violations,
    step_base_octave,
    validate_itinerary,
)


@pytest.mark.parametrize("B, s_a, nxt", [(7, 0, 7), (7, 1, 3), (8, 0, 8), (6, 0, 7), (1, 1, 2), (2, 1, 1)])
def test_next_base_examples(B, s_a, nxt):
    assert next_base(B, s_a) == nxt


def test_next_base_rejects_unknown():
    with pytest.raises(ValueError):
        next_base(9, 0)


def test_selection_rules_hold_exhaustively_to_1e6():
    assert selection_rule_violations(1, 10**6) == []


def test_closed_forms_exhaustive_to_1e4():
    for B in range(1, 9):
        for A in range(1, 10_001):
            expected = step_base_octave(BaseOctave(B, A))
            assert closed_form_update(B, A) == (expected.B, expected.A)
            assert expected.B == NEXT_BASE[(B, A & 1)]


@pytest.mark.parametrize(
    "B, odd, even",
    [
        (3, (5, lambda A: (3 * A - 1) // 2), (1, lambda A: 3 * A // 2)),
        (5, (8, lambda A: (3 * A - 1) // 2), (4, lambda A: 3 * A // 2)),
    ],
)
def test_bases_without_table_forms_follow_derived_updates(B, odd, even):
    assert (B, 1) not in CLOSED_FORMS and (B, 0) not in CLOSED_FORMS
    for A in range(1, 5001):
        nb, f = odd if A & 1 else even
        assert closed_form_update(B, A) == (nb, f(A))


def test_affine_update_rejects_fractional_result():
    with pytest.raises(ValueError):
        AffineUpdate(1, 0, 1).apply(3)


def test_base_graph_shape():
    g = build_base_graph()
    assert len(g.edges) == 16
    assert all(len(g.out_edges(v)) == 2 for v in g.vertices)
    loops = {(e.from_B, e.octave_parity) for e in g.self_loops()}
    assert loops == {(7, 0), (8, 0)}


def test_graph_dot_has_every_edge():
    dot = graph_to_dot(build_base_graph())
    assert dot.startswith("digraph")
    assert dot.count("->") == 16
    assert '  7 -> 7 [parity="even"];' in dot


def test_base_seven_reentry_is_unique():
    assert reentry_sources() == [(6, 0)]


def test_gateway_bases_do_not_recur_immediately():
    for B in (2, 3, 5):
        assert all(NEXT_BASE[(B, s)] != B for s in (0, 1))


@pytest.mark.parametrize("h1", [27, 1639, 97, 703])
def test_real_itineraries_validate(h1):
    t = run_trajectory(h1)
    assert validate_itinerary(t) == []
    assert itinerary(t)[-1] == 1


def test_corrupted_itinerary_is_flagged():
    bad = trajectory_from_values([7, 12])
    v = validate_itinerary(bad)
    assert len(v) == 1
    assert (v[0].expected_B, v[0].actual_B) == (3, 4)


@given(st.integers(min_value=1, max_value=10**12))
def test_next_sb_equals_source_sc(h):
    cur, nxt = extract_state(h), extract_state(step(h))
    assert nxt.s_b == cur.s_c


@given(st.integers(min_value=1, max_value=10**12))
def test_base_seven_even_octave_reads_next_octave_parity_from_sq(h):
    bo = to_base_octave(h)
    if bo.B == 7 and bo.A % 2 == 0:
        assert to_base_octave(step(h)).A % 2 == (bo.A >> 1) & 1
