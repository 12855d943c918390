"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line to RESULTS; conftest prints them at the end
of the run. Where a criterion has several parts, every part is reported and
the criterion passes only if all of them do.
"""

from __future__ import annotations

import filecmp
import io
import time
from fractions import Fraction

import pytest

from parity_octave.analysis import (
    check_odd_run_identity,
    detect_episodes,
    episode_valuation_audit,
    return_drift,
)
from parity_octave.cli import main
from parity_octave.codebook import (
    BUDGET,
    STRUCTURAL,
    SUCCESSOR_BIT,
    diff_codebooks,
    generate_derived_codebook,
    load_fixture_codebook,
)
from parity_octave.kernel import check_convergence_identity, check_telescoping, run_trajectory
from parity_octave.octave import v2
from parity_octave.paths import (
    build_return_subgraph,
    check_fixture_identities,
    cycle_weight_audit,
    diff_against_tableA2,
    enumerate_return_paths,
    load_table_a2,
    summarize_return_paths,
)
from parity_octave.reproduce import table2
from parity_octave.rules import selection_rule_violations

RESULTS: list[str] = []


def report(n: int, parts: list[tuple[str, bool]], elapsed: float, limit: float | None) -> bool:
    if limit is not None:
        parts = parts + [(f"runtime {elapsed:.3g}s < {limit:g}s", elapsed < limit)]
    ok = all(p for _, p in parts)
    detail = "; ".join(f"{'ok' if p else 'FAILED'}: {name}" for name, p in parts)
    RESULTS.append(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  ({detail})")
    return ok


def failing(parts: list[tuple[str, bool]]) -> list[str]:
    return [name for name, p in parts if not p]


def best_time(fn, repeat: int = 20) -> tuple[object, float]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def test_criterion_01_trajectory_exactness():
    (t7, t20), dt = best_time(lambda: (run_trajectory(7), run_trajectory(20)))
    parts = [
        ("run_trajectory(7)", ",".join(map(str, t7.values)) == "7,11,17,26,13,20,10,5,8,4,2,1"),
        ("run_trajectory(20)", ",".join(map(str, t20.values)) == "20,10,5,8,4,2,1"),
    ]
    assert report(1, parts, dt, 1e-3), failing(parts)


def test_criterion_02_table2_reproduction():
    rep, dt = best_time(lambda: table2(), repeat=5)
    step_cells = [d for d in rep.diffs if d.column in ("h_next", "B_next")]
    octave_cells = sorted((int(d.row), d.column) for d in rep.diffs if d.column in ("A_next", "s_a_next"))
    a15 = [d for d in rep.diffs if d.row == "15" and d.column == "A_next"]
    octave_a_cells = [c for c in octave_cells if c[1] == "A_next"]
    parts = [
        ("(h', B') match all 16 rows", not step_cells and rep.compared_cells == 160),
        ("h=15 A' computed 3, printed 2, flagged", len(a15) == 1 and (a15[0].computed, a15[0].table) == ("3", "2")),
        (f"octave columns differ only at h=15 (octave diffs at {octave_cells})", octave_a_cells == [(15, "A_next")]),
    ]
    assert report(2, parts, dt, 0.010), failing(parts)


def test_criterion_03_selection_rule_exhaustiveness():
    t0 = time.perf_counter()
    bad = selection_rule_violations(1, 10**6)
    dt = time.perf_counter() - t0
    parts = [(f"{len(bad)} violations in [1, 10^6]", not bad)]
    assert report(3, parts, dt, 30), failing(parts)


def test_criterion_04_identity_suite():
    t0 = time.perf_counter()
    unterminated = tele = conv = 0
    for h1 in range(1, 10**5 + 1):
        t = run_trajectory(h1, 10**6)
        if not t.terminated:
            unterminated += 1
            continue
        tele += check_telescoping(t) != (True, 0)
        conv += check_convergence_identity(t) != (True, 0)
    dt = time.perf_counter() - t0
    parts = [
        (f"{unterminated} starts hit the cap", unterminated == 0),
        (f"{tele} telescoping residuals", tele == 0),
        (f"{conv} convergence residuals", conv == 0),
    ]
    assert report(4, parts, dt, 60), failing(parts)


def test_criterion_05_codebook():
    t0 = time.perf_counter()
    derived = generate_derived_codebook(4096)
    fixture = load_fixture_codebook()
    diff = diff_codebooks(derived, fixture)
    dt = time.perf_counter() - t0
    by = derived.by_source()
    counts = diff.counts()
    witness = [m for m in diff.mismatches if m.category != STRUCTURAL and m.source == (1, 0, 1, 0)]
    parts = [
        ("64 tuples x 2 outcomes = 128 rows", len(by) == 64 and all(len(v) == 2 for v in by.values()) and len(derived.rows) == 128),
        ("structural columns match on 128 rows", counts[STRUCTURAL] == 0 and not diff.missing_in_derived and not diff.extra_in_derived),
        (f"successor-bit findings {counts[SUCCESSOR_BIT]}, budget findings {counts[BUDGET]}", counts[SUCCESSOR_BIT] > 0 and counts[BUDGET] > 0),
        (f"source (B=1,s_a=0,s_q=1,s_r=0) among findings ({len(witness)} cells)", bool(witness)),
    ]
    assert report(5, parts, dt, 5), failing(parts)


def test_criterion_06_paths():
    t0 = time.perf_counter()
    fixture_g = build_return_subgraph(load_fixture_codebook())
    listed = enumerate_return_paths(fixture_g)
    fixture = load_table_a2()
    diff = diff_against_tableA2(listed, fixture)
    derived_summary = summarize_return_paths(build_return_subgraph(generate_derived_codebook()))
    internal = check_fixture_identities(fixture)
    dt = time.perf_counter() - t0
    parts = [
        (f"mode=paper yields 22 paths (got {len(listed)})", len(listed) == 22),
        (f"all {diff.fixture_sequences} printed sequences covered (got {diff.covered_sequences})", diff.all_sequences_covered),
        ("net <= 0 on every mode=paper path", max(p.net_budget for p in listed) <= 0),
        (f"net <= 0 on all {derived_summary.count} mode=derived paths", not derived_summary.violations()),
        (f"fixture identities on {len(fixture)} rows", len(fixture) == 22 and not internal),
    ]
    assert report(6, parts, dt, 5), failing(parts)


def test_criterion_07_cycle_audit():
    t0 = time.perf_counter()
    parts = []
    for name, book in (("mode=paper", load_fixture_codebook()), ("mode=derived", generate_derived_codebook())):
        audit = cycle_weight_audit(build_return_subgraph(book))
        alt, loop = audit.alternations_12(), audit.self_loops_8()
        parts += [
            (f"{name}: all {len(audit.cycles)} cycles weight <= 0", audit.all_nonpositive),
            (f"{name}: 1-2 cycle weight {[c.weight for c in alt]} == 0", len(alt) == 1 and alt[0].weight == 0),
            (f"{name}: 8-8 cycle weight {[c.weight for c in loop]} == 0", len(loop) == 1 and loop[0].weight == 0),
        ]
    dt = time.perf_counter() - t0
    assert report(7, parts, dt, 5), failing(parts)


def test_criterion_08_episode_mechanics():
    t0 = time.perf_counter()
    e1639 = [e for e in detect_episodes(run_trajectory(1639)) if e.entry_value == 1663]
    e31 = [e for e in detect_episodes(run_trajectory(31)) if e.entry_A == 4]
    mismatched = total = 0
    for h1 in range(1, 10**5 + 1):
        for e in detect_episodes(run_trajectory(h1)):
            total += 1
            mismatched += e.length != v2(e.entry_A)
    dt = time.perf_counter() - t0
    parts = [
        (
            "h1=1639: one episode entering at 1663 with A=208, v2=4, t=4",
            len(e1639) == 1 and (e1639[0].entry_A, e1639[0].entry_v2, e1639[0].length) == (208, 4, 4),
        ),
        ("h1=31: one episode with A=4, t=2", len(e31) == 1 and e31[0].length == 2),
        (f"t = v2(entry_A) on all {total} episodes for h1 <= 10^5", mismatched == 0 and total > 0),
    ]
    assert report(8, parts, dt, 60), failing(parts)


def test_criterion_09_log_linear_identity():
    t0 = time.perf_counter()
    bad = sum(len(check_odd_run_identity(run_trajectory(h1))) for h1 in range(1, 10**4 + 1))
    dt = time.perf_counter() - t0
    parts = [(f"{bad} failing odd runs for h1 <= 10^4", bad == 0)]
    assert report(9, parts, dt, 10), failing(parts)


def test_criterion_10_drift_audits():
    t0 = time.perf_counter()
    pairs = viol = 0
    exact = True
    for h1 in range(1, 10**4 + 1):
        t = run_trajectory(h1)
        a = episode_valuation_audit(t)
        pairs += a.pairs_checked
        viol += len(a.violations)
        exact &= all(isinstance(r.ratio, Fraction) and r.ratio == Fraction(r.A_entry_next, r.A_entry) for r in return_drift(t))
    dt = time.perf_counter() - t0
    parts = [
        (f"valuation audit completed: {viol} violations in {pairs} consecutive-episode pairs", pairs > 0),
        ("return_drift ratios are exact rationals", exact),
    ]
    assert report(10, parts, dt, None), failing(parts)


DETERMINISM_COMMANDS = [
    ["reproduce", "table1"],
    ["reproduce", "table2"],
    ["reproduce", "tableB1"],
    ["reproduce", "figure2"],
    ["codebook", "generate"],
    ["codebook", "diff"],
    ["paths", "enumerate"],
    ["paths", "enumerate", "--mode", "derived"],
    ["paths", "diff"],
    ["paths", "diff", "--mode", "derived"],
    ["paths", "cycles"],
    ["paths", "cycles", "--mode", "derived"],
    ["audit", "--range", "1..2000"],
    ["audit", "--range", "1..2000", "--format", "csv"],
    ["graph-export"],
]


def test_criterion_11_determinism(tmp_path):
    t0 = time.perf_counter()
    parts = []
    for i, argv in enumerate(DETERMINISM_COMMANDS):
        a, b = tmp_path / f"{i}a.out", tmp_path / f"{i}b.out"
        main(argv + ["--out", str(a)], io.StringIO())
        main(argv + ["--out", str(b)], io.StringIO())
        same = a.exists() and b.exists() and filecmp.cmp(a, b, shallow=False)
        parts.append((" ".join(argv), same))
        a.unlink(missing_ok=True)
        b.unlink(missing_ok=True)
    dt = time.perf_counter() - t0
    assert report(11, parts, dt, None), failing(parts)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
