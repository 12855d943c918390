"""Recompute the reference tables from exact arithmetic and diff them cell by cell."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .analysis import figure2_profile
from .fixtures import TABLE1, TABLE2, TABLE_B1_SPOT, csv_text, fixture_path, read_csv
from .kernel import run_trajectory, step
from .octave import base_bits, to_base_octave

DASH = "-"

TABLE2_HEADER = ["h", "B", "k_b", "s_b", "parity_change", "h_next", "B_next", "k_next", "s_b_next", "A_next", "s_a_next"]
OCTAVE_COLUMNS = ("A_next", "s_a_next")
B1_ITERATES = 9  # h2 .. h10


@dataclass(frozen=True)
class CellDiff:
    row: str
    column: str
    computed: str
    table: str


@dataclass(frozen=True)
class Reproduction:
    name: str
    header: list[str]
    rows: list[list[str]]
    diffs: list[CellDiff]
    compared_cells: int

    def to_csv(self) -> str:
        return csv_text(self.header, self.rows)

    def diff_csv(self) -> str:
        return csv_text(["row", "column", "computed", "table"], ([d.row, d.column, d.computed, d.table] for d in self.diffs))


def _diff_rows(computed: dict[str, dict[str, str]], table: dict[str, dict[str, str]], columns: list[str]) -> tuple[list[CellDiff], int]:
    diffs, n = [], 0
    for key in table:
        got = computed.get(key)
        for col in columns:
            want = table[key][col]
            have = got[col] if got is not None else "<absent>"
            n += 1
            if have != want:
                diffs.append(CellDiff(key, col, have, want))
    return diffs, n


def table1(starts: range = range(1, 20), fixture_dir: str | os.PathLike[str] | None = None, compare: bool = True) -> Reproduction:
    """Steps down the rows, start values across; dashes after the first 1."""
    cols = [run_trajectory(h).values for h in starts]
    depth = max(len(c) for c in cols)
    header = ["step"] + [str(h) for h in starts]
    rows = [[str(n + 1)] + [str(c[n]) if n < len(c) else DASH for c in cols] for n in range(depth)]
    diffs, n = [], 0
    if compare:
        fixture = {r["step"]: r for r in read_csv(fixture_path(TABLE1, fixture_dir))}
        shared = [c for c in header[1:] if c in next(iter(fixture.values()))]
        computed = {r[0]: dict(zip(header, r)) for r in rows}
        diffs, n = _diff_rows(computed, fixture, shared)
    return Reproduction("table1", header, rows, diffs, n)


def table2_row(h: int) -> list[str]:
    bo = to_base_octave(h)
    bb = base_bits(bo.B)
    h2 = step(h)
    bo2 = to_base_octave(h2)
    par = lambda x: "o" if x & 1 else "e"  # noqa: E731
    return [
        str(h), str(bo.B), str(bb.k_b), str(bb.s_b), f"{par(h)}->{par(h2)}",
        str(h2), str(bo2.B), str(h2 // 2), str(h2 % 2), str(bo2.A), str(bo2.A % 2),
    ]


def table2(lo: int = 1, hi: int = 16, fixture_dir: str | os.PathLike[str] | None = None, compare: bool = True) -> Reproduction:
    rows = [table2_row(h) for h in range(lo, hi + 1)]
    diffs, n = [], 0
    if compare:
        fixture = {r["h"]: r for r in read_csv(fixture_path(TABLE2, fixture_dir), TABLE2_HEADER)}
        computed = {r[0]: dict(zip(TABLE2_HEADER, r)) for r in rows}
        diffs, n = _diff_rows(computed, fixture, TABLE2_HEADER[1:])
    return Reproduction("table2", list(TABLE2_HEADER), rows, diffs, n)


def table_b1(octaves: int = 16, fixture_dir: str | os.PathLike[str] | None = None, compare: bool = True) -> Reproduction:
    """Eight base-class blocks, one row per starting octave, iterates h2..h10."""
    header = ["B1", "A1", "h1"] + [f"h{i}" for i in range(2, 2 + B1_ITERATES)]
    rows = []
    for B in range(1, 9):
        for A in range(1, octaves + 1):
            h1 = B + 8 * (A - 1)
            vals = run_trajectory(h1, B1_ITERATES + 1).values[1:]
            cells = [str(v) for v in vals] + [DASH] * (B1_ITERATES - len(vals))
            rows.append([str(B), str(A), str(h1)] + cells)
    diffs, n = [], 0
    if compare:
        fixture = {f"{r['B1']}:{r['h1']}": r for r in read_csv(fixture_path(TABLE_B1_SPOT, fixture_dir))}
        computed = {f"{r[0]}:{r[2]}": dict(zip(header, r)) for r in rows}
        diffs, n = _diff_rows(computed, fixture, header[3:])
    return Reproduction("tableB1", header, rows, diffs, n)


def figure2(h1: int = 1639) -> Reproduction:
    header = ["index", "h", "base", "A", "segment_tag", "kink", "turning", "log2_h_plus_1"]
    rows = [
        [str(r.index), str(r.h), str(r.base), str(r.A), r.segment_tag, str(int(r.kink)), str(int(r.turning)), f"{r.log2_h1:.6f}"]
        for r in figure2_profile(h1)
    ]
    return Reproduction("figure2", header, rows, [], 0)


def octave_mismatch_rows(rep: Reproduction) -> list[int]:
    """Table-2 rows whose next-octave cells disagree with exact arithmetic."""
    return sorted({int(d.row) for d in rep.diffs if d.column in OCTAVE_COLUMNS})
