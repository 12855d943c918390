"""Command-line entry point.

Exit codes: 0 when every executed check passes, 1 when diffs or findings were
produced, 2 for usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import analysis, codebook, paths, reproduce, rules
from .fixtures import FixtureError, csv_text, open_atomic, write_atomic
from .kernel import DEFAULT_STEP_CAP, run_trajectory

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


@dataclass
class CommandResult:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)


class UsageError(Exception):
    pass


def parse_range(text: str) -> tuple[int, int]:
    lo_s, sep, hi_s = text.partition("..")
    if not sep:
        raise UsageError(f"--range expects LO..HI, got {text!r}")
    try:
        lo, hi = int(lo_s), int(hi_s)
    except ValueError:
        raise UsageError(f"--range bounds must be integers, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"--range needs 1 <= LO <= HI, got {lo}..{hi}")
    return lo, hi


def _emit(text: str, out: str | None, result: CommandResult, stdout: io.TextIOBase) -> None:
    if out is None:
        stdout.write(text)
    else:
        write_atomic(out, text)
        result.artifacts.append(out)


def _sidecar(out: str | None, suffix: str) -> str | None:
    if out is None:
        return None
    root, ext = os.path.splitext(out)
    return f"{root}.{suffix}{ext or '.csv'}"


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# --- reproduce ----------------------------------------------------------------


def cmd_reproduce(args: argparse.Namespace, stdout: io.TextIOBase) -> CommandResult:
    res = CommandResult(EXIT_OK)
    if args.table == "table1":
        rep = reproduce.table1(fixture_dir=args.fixture_dir)
    elif args.table == "table2":
        rep = reproduce.table2(fixture_dir=args.fixture_dir)
    elif args.table == "tableB1":
        rep = reproduce.table_b1(fixture_dir=args.fixture_dir)
    else:
        rep = reproduce.figure2(args.h1)
    _emit(rep.to_csv(), args.out, res, stdout)
    if rep.compared_cells:
        _note(f"{rep.name}: {len(rep.diffs)} of {rep.compared_cells} compared cells differ from the reference table")
        if rep.diffs:
            diff_out = _sidecar(args.out, "diff")
            if diff_out is None:
                sys.stderr.write(rep.diff_csv())
            else:
                write_atomic(diff_out, rep.diff_csv())
                res.artifacts.append(diff_out)
            res.exit_code = EXIT_FINDINGS
    return res


# --- codebook -----------------------------------------------------------------


def cmd_codebook(args: argparse.Namespace, stdout: io.TextIOBase) -> CommandResult:
    res = CommandResult(EXIT_OK)
    derived = codebook.generate_derived_codebook(args.sample_bound)
    for w in derived.warnings:
        _note(f"warning: {w}")
    if args.action == "generate":
        _emit(derived.to_csv(), args.out, res, stdout)
        _note(f"derived codebook: {len(derived.rows)} rows")
        if derived.warnings or derived.unsampled:
            res.exit_code = EXIT_FINDINGS
        return res
    fixture = codebook.load_fixture_codebook(args.fixture_dir)
    diff = codebook.diff_codebooks(derived, fixture)
    _emit(diff.to_csv(), args.out, res, stdout)
    counts = diff.counts()
    _note(
        "codebook diff: "
        + ", ".join(f"{k} {v}" for k, v in counts.items())
        + f", missing {len(diff.missing_in_derived)}, extra {len(diff.extra_in_derived)}"
    )
    if not diff.empty:
        res.exit_code = EXIT_FINDINGS
    return res


# --- paths --------------------------------------------------------------------


def _book_for(mode: str, args: argparse.Namespace) -> codebook.Codebook:
    if mode == paths.PAPER:
        return codebook.load_fixture_codebook(args.fixture_dir)
    return codebook.generate_derived_codebook(args.sample_bound)


def _write_streamed_paths(g: paths.ReturnSubgraph, out: str | None, stdout: io.TextIOBase) -> tuple[int, int]:
    """Stream derived-mode paths in search order. Returns (count, positive nets)."""
    count = positive = 0
    header = paths.A2_HEADER + ["Mode"]

    def rows():
        nonlocal count, positive
        for row in paths.path_rows(paths.iter_return_paths(g)):
            count += 1
            if row[9] > 0:  # Net_Budget
                positive += 1
            yield row

    if out is None:
        w = csv.writer(stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows())
    else:
        with open_atomic(out) as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows())
    return count, positive


def cmd_paths(args: argparse.Namespace, stdout: io.TextIOBase) -> CommandResult:
    res = CommandResult(EXIT_OK)
    g = paths.build_return_subgraph(_book_for(args.mode, args), args.mode)

    if args.action == "enumerate":
        if args.mode == paths.DERIVED_MODE:
            count, positive = _write_streamed_paths(g, args.out, stdout)
            if args.out:
                res.artifacts.append(args.out)
        else:
            listed = paths.enumerate_return_paths(g)
            count, positive = len(listed), sum(1 for p in listed if p.net_budget > 0)
            _emit(paths.paths_to_csv(listed), args.out, res, stdout)
        _note(f"{args.mode} mode: {count} simple return paths, {positive} with positive net budget")
        res.exit_code = EXIT_FINDINGS if positive else EXIT_OK
        return res

    if args.action == "diff":
        fixture = paths.load_table_a2(args.fixture_dir)
        internal = paths.check_fixture_identities(fixture)
        if args.mode == paths.DERIVED_MODE:
            summary = paths.summarize_return_paths(g)
            _emit(_summary_csv(summary), args.out, res, stdout)
            _note(f"derived mode: {summary.count} paths; max net " + ", ".join(f"{k} {v}" for k, v in summary.max_net.items()))
            res.exit_code = EXIT_FINDINGS if summary.violations() or internal else EXIT_OK
            return res
        listed = paths.enumerate_return_paths(g)
        diff = paths.diff_against_tableA2(listed, fixture)
        _emit(_path_diff_csv(diff, internal), args.out, res, stdout)
        _note(
            f"paper mode: {len(listed)} enumerated, {len(fixture)} printed, {len(diff.matched)} matched, "
            f"{len(diff.unmatched_rows)} printed rows unmatched, {len(diff.extra_paths)} extra, "
            f"{diff.covered_sequences}/{diff.fixture_sequences} printed sequences covered, "
            f"{len(diff.discrepancies)} column discrepancies, {len(internal)} internal identity failures"
        )
        res.exit_code = EXIT_OK if diff.clean and not internal else EXIT_FINDINGS
        return res

    audit = paths.cycle_weight_audit(g, args.gain_rule)
    _emit(_cycles_csv(audit), args.out, res, stdout)
    neutral_fail = [c for c in audit.alternations_12() + audit.self_loops_8() if c.weights[args.gain_rule] != 0]
    _note(
        f"{args.mode} mode: {len(audit.cycles)} elementary cycles, {len(audit.positive)} with positive weight, "
        f"{len(neutral_fail)} of the 1-2 / 8-8 loops not weight 0 ({args.gain_rule} rule)"
    )
    res.exit_code = EXIT_FINDINGS if audit.positive or neutral_fail else EXIT_OK
    return res


def _key_text(k: Sequence[int]) -> str:
    return "B{}_sa{}_sq{}_sr{}".format(*k)


def _summary_csv(s: paths.PathSummary) -> str:
    rows = [["count", "", s.count]]
    rows += [["max_net", r, s.max_net[r]] for r in paths.GAIN_RULES]
    rows += [["min_net", r, s.min_net[r]] for r in paths.GAIN_RULES]
    rows += [["prune_edge", f"{_key_text(v)}->{_key_text(w)}", ""] for v, w in s.prune_edges]
    return csv_text(["item", "detail", "value"], rows)


def _path_diff_csv(diff: paths.PathDiff, internal: list[str]) -> str:
    rows: list[list[object]] = []
    for pid, p in diff.matched:
        rows.append(["matched", pid, paths.arrow_text(p.base_sequence[:-1]), "", "", ""])
    for r in diff.unmatched_rows:
        rows.append(["unmatched-row", r.path, r.sequence_text, "", "", ""])
    for d in diff.discrepancies:
        rows.append(["discrepancy", d.path, "", d.column, d.enumerated, d.table])
    seen: dict[tuple[int, ...], int] = {}
    for p in diff.extra_paths:
        seen[p.base_sequence] = seen.get(p.base_sequence, 0) + 1
    for seq, n in sorted(seen.items()):
        rows.append(["extra-sequence", "", paths.arrow_text(seq[:-1]), "count", n, ""])
    for p in diff.positive_nets:
        rows.append(["positive-net", "", paths.arrow_text(p.base_sequence[:-1]), "Net_Budget", p.net_budget, ""])
    for msg in internal:
        rows.append(["table-identity", "", msg, "", "", ""])
    return csv_text(["kind", "path", "sequence", "column", "enumerated", "table"], rows)


def _cycles_csv(audit: paths.CycleAudit) -> str:
    header = ["cycle", "length", "bases", "states"] + [f"weight_{r}" for r in paths.GAIN_RULES]
    rows = []
    for i, c in enumerate(audit.cycles, start=1):
        rows.append(
            [i, len(c.states), paths.arrow_text(c.bases), " ".join(_key_text(s) for s in c.states)]
            + [c.weights[r] for r in paths.GAIN_RULES]
        )
    return csv_text(header, rows)


# --- audit --------------------------------------------------------------------


def trajectory_record(h1: int, step_cap: int) -> dict[str, object]:
    traj = run_trajectory(h1, step_cap)
    return {
        "h1": h1,
        "steps": list(traj.values),
        "bases": [(h - 1) % 8 + 1 for h in traj.values],
        "octaves": [(h - 1) // 8 + 1 for h in traj.values],
        "episodes": [
            {
                "start_index": e.start_index, "entry_value": e.entry_value, "entry_A": e.entry_A,
                "entry_v2": e.entry_v2, "t": e.length, "exit_index": e.exit_index,
            }
            for e in analysis.detect_episodes(traj)
        ],
    }


AUDIT_FIELDS = [
    "h1", "status", "steps", "peak", "episodes", "max_episode", "telescoping_ok", "convergence_ok",
    "rule_violations", "bound_failures", "odd_run_failures", "provenance_failures", "halving_failures",
    "valuation_pairs", "valuation_violations",
]


def cmd_audit(args: argparse.Namespace, stdout: io.TextIOBase) -> CommandResult:
    lo, hi = parse_range(args.range)
    res = CommandResult(EXIT_OK)
    report = analysis.range_audit(lo, hi, args.step_cap, args.jobs)
    summary = report.summary()
    if args.format == "csv":
        text = csv_text(AUDIT_FIELDS, ([getattr(r, f) for f in AUDIT_FIELDS] for r in report.records))
    else:
        lines = []
        for r in report.records:
            rec = trajectory_record(r.h1, args.step_cap)
            rec["checks"] = {f: getattr(r, f) for f in AUDIT_FIELDS[1:]}
            lines.append(json.dumps(rec, separators=(",", ":")))
        lines.append(json.dumps({"summary": summary}, separators=(",", ":")))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out, res, stdout)
    _note("audit " + ", ".join(f"{k}={v}" for k, v in summary.items()))
    if report.cap_exhausted:
        _note("cap exhausted for: " + " ".join(map(str, report.cap_exhausted)))
    res.exit_code = EXIT_FINDINGS if report.findings else EXIT_OK
    return res


# --- graph export -------------------------------------------------------------


def cmd_graph_export(args: argparse.Namespace, stdout: io.TextIOBase) -> CommandResult:
    if args.format not in (None, "dot"):
        raise UsageError("graph-export only writes --format dot")
    res = CommandResult(EXIT_OK)
    _emit(rules.graph_to_dot(rules.build_base_graph()), args.out, res, stdout)
    return res


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the main output here (default: stdout)")
    common.add_argument("--fixture-dir", help="directory holding the reference CSV tables")

    parser = argparse.ArgumentParser(prog="parity-octave", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", parents=[common], help="recompute a reference table and diff it")
    p.add_argument("table", choices=["table1", "table2", "tableB1", "figure2"])
    p.add_argument("--h1", type=int, default=1639, help="start value for figure2 (default 1639)")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("codebook", parents=[common], help="generate the derived codebook or diff it")
    p.add_argument("action", choices=["generate", "diff"])
    p.add_argument("--sample-bound", type=int, default=codebook.DEFAULT_SAMPLE_BOUND)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_codebook)

    p = sub.add_parser("paths", parents=[common], help="return-path enumeration, diff and cycle audit")
    p.add_argument("action", choices=["enumerate", "diff", "cycles"])
    p.add_argument("--mode", choices=list(paths.MODES), default=paths.PAPER)
    p.add_argument("--gain-rule", choices=list(paths.GAIN_RULES), default=paths.PRIMARY_RULE)
    p.add_argument("--sample-bound", type=int, default=codebook.DEFAULT_SAMPLE_BOUND)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("audit", parents=[common], help="sweep a range of start values")
    p.add_argument("--range", required=True, help="LO..HI, inclusive, LO >= 1")
    p.add_argument("--step-cap", type=int, default=DEFAULT_STEP_CAP)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("graph-export", parents=[common], help="write the base transition graph")
    p.add_argument("--format", choices=["dot"], default="dot")
    p.set_defaults(func=cmd_graph_export)
    return parser


def main(argv: Sequence[str] | None = None, stdout: io.TextIOBase | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_ERROR
    handler: Callable[[argparse.Namespace, io.TextIOBase], CommandResult] = args.func
    try:
        return handler(args, stdout or sys.stdout).exit_code  # type: ignore[arg-type]
    except (UsageError, FixtureError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
