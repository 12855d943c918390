"""The 64-tuple x 2-outcome extended-state codebook: generation, loading, diffing."""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Union

from .fixtures import TABLE_A1, FixtureError, csv_text, fixture_path, read_csv
from .octave import V2_GE3, ExtendedState, V2Class, base_bits, extract_state, v2, v2_class_from_bits
from .rules import next_base

HEADER = (
    "StateID_128,B,s_b,s_c,s_a,s_q,s_r,OutcomeID,v2_class,max_persist,drift_type,"
    "NextB,next_sb,next_sc,next_sa,next_sq,next_sr,IsS7persist,IsEntry67,IsExit73,"
    "v2_consumed,v2_possible_gain"
).split(",")

DECAY, MIXED, GROW = "DECAY", "MIXED", "GROW"
DRIFT_LABELS = {DECAY: "DECAY(-1)", MIXED: "MIXED", GROW: "GROW(+0.585)"}
PERSIST_3PLUS = "3+"

PAPER_FIXTURE = "paper-fixture"
DERIVED = "derived"

DEFAULT_SAMPLE_BOUND = 4096

STRUCTURAL = "structural"
SUCCESSOR_BIT = "successor-bit"
BUDGET = "budget"

COLUMN_CATEGORY = {
    "B": STRUCTURAL, "s_b": STRUCTURAL, "s_c": STRUCTURAL,
    "NextB": STRUCTURAL, "next_sb": STRUCTURAL, "next_sc": STRUCTURAL,
    "IsS7persist": STRUCTURAL, "IsEntry67": STRUCTURAL, "IsExit73": STRUCTURAL,
    "v2_class": STRUCTURAL, "max_persist": STRUCTURAL, "drift_type": STRUCTURAL,
    "next_sa": SUCCESSOR_BIT, "next_sq": SUCCESSOR_BIT, "next_sr": SUCCESSOR_BIT,
    "v2_consumed": BUDGET, "v2_possible_gain": BUDGET,
}

MaxPersist = Union[int, str]
SourceKey = tuple[int, int, int, int]


@dataclass(frozen=True)
class RowFlags:
    persist: bool
    entry67: bool
    exit73: bool


@dataclass(frozen=True)
class CodebookRow:
    source: ExtendedState
    outcome_id: int
    v2_class: V2Class
    max_persist: MaxPersist
    drift_type: str
    next: ExtendedState
    flags: RowFlags
    v2_consumed: int
    v2_possible_gain: int
    # derived rows only: how many sampled A produced this outcome, the first
    # such A, and the distinct values of v2(A') - v2(A) seen across them
    witness_count: int = 0
    first_witness: int | None = None
    v2_deltas: tuple[int, ...] = ()

    @property
    def state_id(self) -> str:
        return f"{self.source.label()}_ID{self.outcome_id}"

    @property
    def key(self) -> tuple[int, int, int, int, int]:
        return (*self.source.key, self.outcome_id)

    def cells(self) -> dict[str, str]:
        s, n, f = self.source, self.next, self.flags
        return {
            "StateID_128": self.state_id,
            "B": str(s.B), "s_b": str(s.s_b), "s_c": str(s.s_c),
            "s_a": str(s.s_a), "s_q": str(s.s_q), "s_r": str(s.s_r),
            "OutcomeID": str(self.outcome_id),
            "v2_class": format_v2_class(self.v2_class),
            "max_persist": str(self.max_persist),
            "drift_type": DRIFT_LABELS[self.drift_type],
            "NextB": str(n.B), "next_sb": str(n.s_b), "next_sc": str(n.s_c),
            "next_sa": str(n.s_a), "next_sq": str(n.s_q), "next_sr": str(n.s_r),
            "IsS7persist": "YES" if f.persist else "",
            "IsEntry67": "ENTRY" if f.entry67 else "",
            "IsExit73": "EXIT" if f.exit73 else "",
            "v2_consumed": str(self.v2_consumed),
            "v2_possible_gain": str(self.v2_possible_gain),
        }


@dataclass(frozen=True)
class Codebook:
    rows: tuple[CodebookRow, ...]
    provenance: str
    warnings: tuple[str, ...] = ()
    unsampled: tuple[SourceKey, ...] = ()

    def by_source(self) -> dict[SourceKey, list[CodebookRow]]:
        out: dict[SourceKey, list[CodebookRow]] = defaultdict(list)
        for r in self.rows:
            out[r.source.key].append(r)
        return dict(out)

    def sources(self) -> list[SourceKey]:
        return sorted({r.source.key for r in self.rows})

    def to_csv(self) -> str:
        return csv_text(HEADER, ([r.cells()[c] for c in HEADER] for r in self.rows))


@dataclass(frozen=True)
class CellMismatch:
    state_id: str
    source: SourceKey
    outcome_id: int
    column: str
    category: str
    derived: str
    fixture: str


@dataclass
class CodebookDiff:
    mismatches: list[CellMismatch] = field(default_factory=list)
    missing_in_derived: list[str] = field(default_factory=list)
    extra_in_derived: list[str] = field(default_factory=list)
    # (state_id, distinct v2(A') - v2(A) values) for every matched derived row
    v2_witness_changes: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    def by_category(self, category: str) -> list[CellMismatch]:
        return [m for m in self.mismatches if m.category == category]

    def counts(self) -> dict[str, int]:
        return {c: len(self.by_category(c)) for c in (STRUCTURAL, SUCCESSOR_BIT, BUDGET)}

    @property
    def empty(self) -> bool:
        return not (self.mismatches or self.missing_in_derived or self.extra_in_derived)

    def to_csv(self) -> str:
        header = ["StateID_128", "B", "s_a", "s_q", "s_r", "OutcomeID", "column", "category", "derived", "fixture"]
        rows = [
            [m.state_id, *m.source, m.outcome_id, m.column, m.category, m.derived, m.fixture]
            for m in self.mismatches
        ]
        rows += [[sid, "", "", "", "", "", "*", "missing-in-derived", "", "row"] for sid in self.missing_in_derived]
        rows += [[sid, "", "", "", "", "", "*", "extra-in-derived", "row", ""] for sid in self.extra_in_derived]
        return csv_text(header, rows)


def format_v2_class(c: V2Class) -> str:
    return f"v2{c}" if c == V2_GE3 else f"v2={c}"


def parse_v2_class(text: str) -> V2Class:
    t = text.replace(" ", "")
    if t in ("v2≥3", "v2>=3"):
        return V2_GE3
    if t.startswith("v2=") and t[3:].isdigit() and int(t[3:]) <= 2:
        return int(t[3:])
    raise ValueError(f"unrecognised v2 class {text!r}")


def max_persist_of(c: V2Class) -> MaxPersist:
    return PERSIST_3PLUS if c == V2_GE3 else int(c)


def classify_row_attributes(source: ExtendedState) -> tuple[V2Class, MaxPersist, str, RowFlags]:
    c = v2_class_from_bits(source.s_a, source.s_q, source.s_r)
    if source.B == 7 and source.s_a == 0:
        drift = GROW
    elif source.B % 2 == 0:
        drift = DECAY
    else:
        drift = MIXED
    flags = RowFlags(
        persist=source.B == 7 and source.s_a == 0,
        entry67=source.B == 6 and source.s_a == 0,
        exit73=source.B == 7 and source.s_a == 1,
    )
    return c, max_persist_of(c), drift, flags


def budget_columns(source: ExtendedState, outcome_id: int) -> tuple[int, int]:
    """(v2_consumed, v2_possible_gain) as laid out in the reference table.

    An even octave spends one factor of 2. Gain is possible from an odd octave
    on an odd base, or on the carry outcome (ID1) of an even base.
    """
    consumed = 1 if source.s_a == 0 else 0
    gain = 1 if source.s_a == 1 and (source.B % 2 == 1 or outcome_id == 1) else 0
    return consumed, gain


def all_source_keys() -> list[SourceKey]:
    return [(B, s_a, s_q, s_r) for B in range(1, 9) for s_a in (0, 1) for s_q in (0, 1) for s_r in (0, 1)]


def _make_row(source: ExtendedState, outcome_id: int, nxt: ExtendedState, **extra: object) -> CodebookRow:
    c, mp, drift, flags = classify_row_attributes(source)
    consumed, gain = budget_columns(source, outcome_id)
    return CodebookRow(
        source=source, outcome_id=outcome_id, v2_class=c, max_persist=mp, drift_type=drift,
        next=nxt, flags=flags, v2_consumed=consumed, v2_possible_gain=gain, **extra,  # type: ignore[arg-type]
    )


def generate_derived_codebook(sample_bound: int = DEFAULT_SAMPLE_BOUND) -> Codebook:
    """Sample every A <= sample_bound, step h = B + 8(A-1) exactly, and tabulate successors.

    Outcomes for one source tuple are numbered in ascending order of the
    successor key (B', s_a', s_q', s_r').
    """
    if sample_bound < 32:
        raise ValueError(f"sample_bound must be >= 32, got {sample_bound}")
    rows: list[CodebookRow] = []
    warnings: list[str] = []
    unsampled: list[SourceKey] = []
    for key in all_source_keys():
        B, s_a, s_q, s_r = key
        source = ExtendedState.from_key(*key)
        low = s_a | (s_q << 1) | (s_r << 2)
        seen: dict[SourceKey, list[int]] = {}
        deltas: dict[SourceKey, set[int]] = defaultdict(set)
        for A in range(low if low else 8, sample_bound + 1, 8):
            h = B + 8 * (A - 1)
            h2 = (3 * h + 1) >> 1 if h & 1 else h >> 1
            nxt = extract_state(h2)
            A2 = 1 + (h2 - nxt.B) // 8
            seen.setdefault(nxt.key, []).append(A)
            deltas[nxt.key].add(v2(A2) - v2(A))
        if not seen:
            unsampled.append(key)
            continue
        if len(seen) > 2:
            warnings.append(f"{source.label()}: {len(seen)} distinct successors (more than two outcomes)")
        for oid, nkey in enumerate(sorted(seen)):
            rows.append(
                _make_row(
                    source, oid, ExtendedState.from_key(*nkey),
                    witness_count=len(seen[nkey]), first_witness=seen[nkey][0],
                    v2_deltas=tuple(sorted(deltas[nkey])),
                )
            )
    return Codebook(rows=tuple(rows), provenance=DERIVED, warnings=tuple(warnings), unsampled=tuple(unsampled))


def _bit(text: str, where: str) -> int:
    if text not in ("0", "1"):
        raise FixtureError(f"{where}: expected 0 or 1, got {text!r}")
    return int(text)


def _flag(text: str, word: str, where: str) -> bool:
    if text not in ("", word):
        raise FixtureError(f"{where}: expected '' or {word!r}, got {text!r}")
    return text == word


def parse_codebook_rows(records: list[dict[str, str]], origin: str, provenance: str) -> Codebook:
    rows: list[CodebookRow] = []
    drift_of = {v: k for k, v in DRIFT_LABELS.items()}
    for i, rec in enumerate(records, start=2):
        def loc(col: str) -> str:
            return f"{origin} row {i} column {col}"

        try:
            B = int(rec["B"])
            nB = int(rec["NextB"])
        except ValueError as exc:
            raise FixtureError(f"{origin} row {i}: bad base value ({exc})") from None
        if not (1 <= B <= 8 and 1 <= nB <= 8):
            raise FixtureError(f"{origin} row {i}: base out of range")
        source = ExtendedState(B, *(_bit(rec[c], loc(c)) for c in ("s_b", "s_c", "s_a", "s_q", "s_r")))
        nxt = ExtendedState(nB, *(_bit(rec[c], loc(c)) for c in ("next_sb", "next_sc", "next_sa", "next_sq", "next_sr")))
        try:
            vc = parse_v2_class(rec["v2_class"])
        except ValueError as exc:
            raise FixtureError(f"{loc('v2_class')}: {exc}") from None
        mp_text = rec["max_persist"]
        if mp_text == PERSIST_3PLUS:
            mp: MaxPersist = PERSIST_3PLUS
        elif mp_text in ("0", "1", "2"):
            mp = int(mp_text)
        else:
            raise FixtureError(f"{loc('max_persist')}: unexpected {mp_text!r}")
        if rec["drift_type"] not in drift_of:
            raise FixtureError(f"{loc('drift_type')}: unexpected {rec['drift_type']!r}")
        row = CodebookRow(
            source=source,
            outcome_id=_bit(rec["OutcomeID"], loc("OutcomeID")),
            v2_class=vc,
            max_persist=mp,
            drift_type=drift_of[rec["drift_type"]],
            next=nxt,
            flags=RowFlags(
                persist=_flag(rec["IsS7persist"], "YES", loc("IsS7persist")),
                entry67=_flag(rec["IsEntry67"], "ENTRY", loc("IsEntry67")),
                exit73=_flag(rec["IsExit73"], "EXIT", loc("IsExit73")),
            ),
            v2_consumed=_bit(rec["v2_consumed"], loc("v2_consumed")),
            v2_possible_gain=_bit(rec["v2_possible_gain"], loc("v2_possible_gain")),
        )
        if row.state_id != rec["StateID_128"]:
            raise FixtureError(f"{loc('StateID_128')}: id {rec['StateID_128']!r} does not match its columns ({row.state_id})")
        rows.append(row)
    return Codebook(rows=tuple(rows), provenance=provenance)


def load_codebook_csv(path: str | os.PathLike[str], provenance: str = PAPER_FIXTURE) -> Codebook:
    return parse_codebook_rows(read_csv(path, HEADER), str(path), provenance)


def load_fixture_codebook(path: str | os.PathLike[str] | None = None) -> Codebook:
    """Load the reference codebook; `path` may be a CSV file or a directory holding table_a1.csv."""
    if path is None or os.path.isdir(path):
        path = fixture_path(TABLE_A1, path)
    book = load_codebook_csv(path, PAPER_FIXTURE)
    if len(book.rows) != 128:
        raise FixtureError(f"{path}: expected 128 rows, found {len(book.rows)}")
    return book


def _pair_outcomes(derived: list[CodebookRow], fixture: list[CodebookRow]) -> list[tuple[CodebookRow | None, CodebookRow | None]]:
    """Pair outcome rows of one source tuple: same next_sa first, then same outcome_id."""
    left = sorted(derived, key=lambda r: r.outcome_id)
    pairs: list[tuple[CodebookRow | None, CodebookRow | None]] = []
    for p in sorted(fixture, key=lambda r: r.outcome_id):
        same_sa = [d for d in left if d.next.s_a == p.next.s_a]
        pool = same_sa or left
        if not pool:
            pairs.append((None, p))
            continue
        pick = next((d for d in pool if d.outcome_id == p.outcome_id), pool[0])
        left.remove(pick)
        pairs.append((pick, p))
    pairs.extend((d, None) for d in left)
    return pairs


def diff_codebooks(derived: Codebook, fixture: Codebook) -> CodebookDiff:
    diff = CodebookDiff()
    d_by, p_by = derived.by_source(), fixture.by_source()
    for key in sorted(set(d_by) | set(p_by)):
        for d, p in _pair_outcomes(d_by.get(key, []), p_by.get(key, [])):
            if d is None:
                assert p is not None
                diff.missing_in_derived.append(p.state_id)
                continue
            if p is None:
                diff.extra_in_derived.append(d.state_id)
                continue
            dc, pc = d.cells(), p.cells()
            for col, cat in COLUMN_CATEGORY.items():
                if dc[col] != pc[col]:
                    diff.mismatches.append(CellMismatch(p.state_id, key, p.outcome_id, col, cat, dc[col], pc[col]))
            if d.v2_deltas and not p.v2_deltas:
                diff.v2_witness_changes.append((d.state_id, d.v2_deltas))
                diff.mismatches.extend(_witness_budget_findings(d, p, key))
    return diff


def _witness_budget_findings(d: CodebookRow, p: CodebookRow, key: SourceKey) -> list[CellMismatch]:
    """Compare the printed budget bits with what the sampled witnesses actually do to v2(A)."""
    lo, hi = min(d.v2_deltas), max(d.v2_deltas)
    span = f"dv2 {lo:+d}..{hi:+d}"
    out = []
    realized_gain = int(hi > 0)
    if realized_gain != p.v2_possible_gain:
        out.append(CellMismatch(p.state_id, key, p.outcome_id, "v2_possible_gain@witness", BUDGET,
                                f"{realized_gain} ({span})", str(p.v2_possible_gain)))
    realized_loss = int(lo < 0)
    if realized_loss != p.v2_consumed:
        out.append(CellMismatch(p.state_id, key, p.outcome_id, "v2_consumed@witness", BUDGET,
                                f"{realized_loss} ({span})", str(p.v2_consumed)))
    return out


def successor_witness(B: int, A: int) -> ExtendedState:
    """Successor state of the iterate with base B and octave A."""
    h = B + 8 * (A - 1)
    return extract_state((3 * h + 1) >> 1 if h & 1 else h >> 1)


def check_row_invariants(row: CodebookRow) -> list[str]:
    """Identities every codebook row must satisfy, returned as failure messages."""
    out = []
    if row.next.s_b != row.source.s_c:
        out.append(f"{row.state_id}: next.s_b={row.next.s_b} but source.s_c={row.source.s_c}")
    if row.next.B != next_base(row.source.B, row.source.s_a):
        out.append(f"{row.state_id}: NextB={row.next.B} but selection rule gives {next_base(row.source.B, row.source.s_a)}")
    bb = base_bits(row.next.B)
    if (row.next.s_b, row.next.s_c) != (bb.s_b, bb.s_c):
        out.append(f"{row.state_id}: next base bits inconsistent with NextB")
    _, _, _, flags = classify_row_attributes(row.source)
    if flags != row.flags:
        out.append(f"{row.state_id}: flags {row.flags} but definitions give {flags}")
    return out

