from __future__ import annotations

import csv
import functools
import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parity_octave.codebook import (
    BUDGET,
    DERIVED,
    GROW,
    HEADER,
    PAPER_FIXTURE,
    STRUCTURAL,
    SUCCESSOR_BIT,
    all_source_keys,
    budget_columns,
    check_row_invariants,
    classify_row_attributes,
    diff_codebooks,
    format_v2_class,
    generate_derived_codebook,
    load_codebook_csv,
    load_fixture_codebook,
    parse_v2_class,
    successor_witness,
)
from parity_octave.fixtures import FixtureError
from parity_octave.octave import V2_GE3, ExtendedState, extract_state


@pytest.fixture(scope="module")
def derived():
    return generate_derived_codebook()


@pytest.fixture(scope="module")
def fixture():
    return load_fixture_codebook()


def test_derived_has_two_outcomes_for_every_tuple(derived):
    assert len(derived.rows) == 128
    assert derived.warnings == () and derived.unsampled == ()
    by = derived.by_source()
    assert sorted(by) == sorted(all_source_keys())
    assert all(len(v) == 2 for v in by.values())
    assert derived.provenance == DERIVED


def test_derived_outcomes_are_ordered_by_successor_key(derived):
    for rows in derived.by_source().values():
        assert rows[0].next.key < rows[1].next.key
        assert [r.outcome_id for r in rows] == [0, 1]


def test_fixture_loads_with_128_rows(fixture):
    assert len(fixture.rows) == 128
    assert fixture.provenance == PAPER_FIXTURE
    assert len({r.state_id for r in fixture.rows}) == 128


@pytest.mark.parametrize("book", ["derived", "fixture"])
def test_every_row_satisfies_structural_identities(book, request):
    cb = request.getfixturevalue(book)
    for row in cb.rows:
        assert check_row_invariants(row) == []


def test_derived_rows_are_witnessed_by_exact_steps(derived):
    for row in derived.rows:
        assert row.witness_count > 0
        assert successor_witness(row.source.B, row.first_witness) == row.next
        assert extract_state(row.source.B + 8 * (row.first_witness - 1)) == row.source


def test_derived_against_itself_is_empty(derived):
    assert diff_codebooks(derived, derived).empty


def test_diff_against_fixture_counts(derived, fixture):
    d = diff_codebooks(derived, fixture)
    assert d.counts() == {STRUCTURAL: 0, SUCCESSOR_BIT: 92, BUDGET: 38}
    assert not d.missing_in_derived and not d.extra_in_derived
    assert len(d.v2_witness_changes) == 128


def test_diff_csv_has_one_line_per_mismatch(derived, fixture):
    d = diff_codebooks(derived, fixture)
    lines = list(csv.reader(io.StringIO(d.to_csv())))
    assert len(lines) == 1 + len(d.mismatches)


def test_derived_csv_round_trips(derived, tmp_path):
    p = tmp_path / "cb.csv"
    p.write_text(derived.to_csv())
    back = load_codebook_csv(p, DERIVED)
    assert [r.cells() for r in back.rows] == [r.cells() for r in derived.rows]
    assert next(csv.reader(io.StringIO(derived.to_csv()))) == HEADER


def test_generation_is_deterministic():
    assert generate_derived_codebook(512).to_csv() == generate_derived_codebook(512).to_csv()


def test_small_sample_bound_rejected():
    with pytest.raises(ValueError):
        generate_derived_codebook(16)


@pytest.mark.parametrize("c, text", [(0, "v2=0"), (2, "v2=2"), (V2_GE3, "v2≥3")])
def test_v2_class_text_round_trip(c, text):
    assert format_v2_class(c) == text
    assert parse_v2_class(text) == c


def test_attributes_for_persistent_seven():
    s = ExtendedState.from_key(7, 0, 0, 0)
    c, mp, drift, flags = classify_row_attributes(s)
    assert (c, mp, drift) == (V2_GE3, "3+", GROW)
    assert flags.persist and not flags.entry67 and not flags.exit73


@pytest.mark.parametrize(
    "key, oid, expected",
    [((7, 0, 1, 0), 0, (1, 0)), ((7, 1, 0, 0), 0, (0, 1)), ((2, 1, 0, 0), 0, (0, 0)), ((2, 1, 0, 0), 1, (0, 1))],
)
def test_budget_columns(key, oid, expected):
    assert budget_columns(ExtendedState.from_key(*key), oid) == expected


def _fixture_lines():
    from parity_octave.fixtures import TABLE_A1, fixture_path

    return fixture_path(TABLE_A1).read_text().splitlines()


def test_corrupt_bit_is_located(tmp_path):
    lines = _fixture_lines()
    cells = lines[5].split(",")
    cells[HEADER.index("next_sq")] = "7"
    lines[5] = ",".join(cells)
    p = tmp_path / "table_a1.csv"
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(FixtureError, match="row 6 column next_sq"):
        load_fixture_codebook(p)


def test_truncated_fixture_rejected(tmp_path):
    p = tmp_path / "table_a1.csv"
    p.write_text("\n".join(_fixture_lines()[:50]) + "\n")
    with pytest.raises(FixtureError, match="128"):
        load_fixture_codebook(tmp_path)


def test_wrong_header_rejected(tmp_path):
    lines = _fixture_lines()
    lines[0] = lines[0].replace("NextB", "Next_B")
    p = tmp_path / "bad.csv"
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(FixtureError):
        load_fixture_codebook(p)


@settings(deadline=None)
@given(st.sampled_from(range(1, 9)), st.integers(min_value=1, max_value=10**9))
def test_any_witness_lands_on_a_derived_successor(B, A):
    book = _cached_derived()
    src = extract_state(B + 8 * (A - 1))
    succ = {r.next for r in book.by_source()[src.key]}
    assert successor_witness(B, A) in succ


@functools.cache
def _cached_derived():
    return generate_derived_codebook()
