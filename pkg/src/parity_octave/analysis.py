"""Persistence episodes, valuation bounds, exact growth identities and range sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .kernel import DEFAULT_STEP_CAP, Trajectory, check_convergence_identity, check_telescoping, run_trajectory
from .octave import v2
from .rules import validate_itinerary

GROWTH = "growth"
DECAY = "decay"
TERMINAL = "terminal"


def _base(h: int) -> int:
    return (h - 1) % 8 + 1


def _octave(h: int) -> int:
    return (h - 1) // 8 + 1


@dataclass(frozen=True)
class Episode:
    """A maximal run of base-7 even-octave values, each stepping 7 -> 7.

    `length` counts those steps; `exit_index` is the index of the base-7,
    odd-octave value the run ends on (None if the trajectory stops first).
    """

    start_index: int
    entry_value: int
    entry_A: int
    entry_v2: int
    length: int
    exit_index: int | None
    exit_value: int | None

    @property
    def complete(self) -> bool:
        return self.exit_index is not None


@dataclass(frozen=True)
class DriftRecord:
    k: int
    A_entry: int
    A_entry_next: int
    ratio: Fraction
    sign: str

    @property
    def log2_ratio(self) -> float:
        """Display only."""
        return math.log2(self.ratio)


@dataclass(frozen=True)
class ValuationViolation:
    k: int
    entry_value: int
    entry_v2: int
    next_entry_value: int
    next_entry_v2: int


@dataclass
class ValuationAudit:
    pairs_checked: int = 0
    violations: list[ValuationViolation] = field(default_factory=list)


@dataclass(frozen=True)
class OddRun:
    start_index: int
    t: int
    h_start: int
    h_after: int

    @property
    def holds(self) -> bool:
        return odd_run_identity(self.h_start, self.h_after, self.t)


def odd_run_identity(h_n: int, h_after: int, t: int) -> bool:
    """(h_{n+t} + 1) 2^t == 3^t (h_n + 1)."""
    return (h_after + 1) << t == 3**t * (h_n + 1)


def detect_episodes(traj: Trajectory | Sequence[int]) -> list[Episode]:
    vals = traj.values if isinstance(traj, Trajectory) else tuple(traj)
    episodes: list[Episode] = []
    i, m = 0, len(vals)
    while i < m:
        h = vals[i]
        if _base(h) == 7 and not _octave(h) & 1:
            j = i
            while j < m and _base(vals[j]) == 7 and not _octave(vals[j]) & 1:
                j += 1
            A = _octave(h)
            episodes.append(
                Episode(
                    start_index=i, entry_value=h, entry_A=A, entry_v2=v2(A), length=j - i,
                    exit_index=j if j < m else None, exit_value=vals[j] if j < m else None,
                )
            )
            i = j
        else:
            i += 1
    return episodes


def check_persistence_bound(e: Episode) -> tuple[bool, bool]:
    """(t <= v2(entry_A), t == v2(entry_A))."""
    return e.length <= e.entry_v2, e.length == e.entry_v2


def log_gain_bound(e: Episode) -> bool:
    """Exact form of the log-growth bound across one episode."""
    if e.length == 0:
        return True
    if e.exit_value is None:
        return False
    return odd_run_identity(e.entry_value, e.exit_value, e.length) and e.length <= e.entry_v2


def odd_runs(traj: Trajectory | Sequence[int]) -> list[OddRun]:
    """Maximal runs of odd values that are followed by another value."""
    vals = traj.values if isinstance(traj, Trajectory) else tuple(traj)
    runs = []
    i, last = 0, len(vals) - 1
    while i < last:
        if vals[i] & 1:
            j = i
            while j < last and vals[j] & 1:
                j += 1
            runs.append(OddRun(start_index=i, t=j - i, h_start=vals[i], h_after=vals[j]))
            i = j
        else:
            i += 1
    return runs


def check_odd_run_identity(traj: Trajectory | Sequence[int]) -> list[OddRun]:
    """Failing runs only; an empty list means every maximal odd run satisfies the identity."""
    return [r for r in odd_runs(traj) if not r.holds]


def return_drift(traj: Trajectory | Sequence[int]) -> list[DriftRecord]:
    eps = detect_episodes(traj)
    out = []
    for k in range(len(eps) - 1):
        a, b = eps[k].entry_A, eps[k + 1].entry_A
        ratio = Fraction(b, a)
        sign = "neg" if ratio < 1 else ("zero" if ratio == 1 else "pos")
        out.append(DriftRecord(k=k, A_entry=a, A_entry_next=b, ratio=ratio, sign=sign))
    return out


def episode_valuation_audit(source: Trajectory | Sequence[int] | Sequence[Episode]) -> ValuationAudit:
    """Check v2(A at next entry) <= v2(A at entry) - 1 for consecutive episodes."""
    items = list(source.values) if isinstance(source, Trajectory) else list(source)
    eps = items if items and isinstance(items[0], Episode) else detect_episodes(items)  # type: ignore[arg-type]
    audit = ValuationAudit()
    for k in range(len(eps) - 1):
        a, b = eps[k], eps[k + 1]
        audit.pairs_checked += 1
        if b.entry_v2 > a.entry_v2 - 1:
            audit.violations.append(ValuationViolation(k, a.entry_value, a.entry_v2, b.entry_value, b.entry_v2))
    return audit


def entry_provenance_failures(traj: Trajectory | Sequence[int], eps: Sequence[Episode] | None = None) -> list[int]:
    """Episode start indices whose preceding value is not a base-6 even-octave value."""
    vals = traj.values if isinstance(traj, Trajectory) else tuple(traj)
    eps = detect_episodes(vals) if eps is None else eps
    bad = []
    for e in eps:
        if e.start_index == 0:
            continue
        prev = vals[e.start_index - 1]
        if not (_base(prev) == 6 and not _octave(prev) & 1):
            bad.append(e.start_index)
    return bad


def halving_gap_failures(traj: Trajectory | Sequence[int], eps: Sequence[Episode] | None = None) -> list[int]:
    """Episode indices k with no even-base value between episode k and episode k+1."""
    vals = traj.values if isinstance(traj, Trajectory) else tuple(traj)
    eps = detect_episodes(vals) if eps is None else eps
    bad = []
    for k in range(len(eps) - 1):
        lo = eps[k].exit_index if eps[k].exit_index is not None else eps[k].start_index
        hi = eps[k + 1].start_index
        if not any(vals[i] % 2 == 0 for i in range(lo, hi)):
            bad.append(k)
    return bad


@dataclass(frozen=True)
class StartRecord:
    h1: int
    status: str
    steps: int
    peak: int
    episodes: int
    max_episode: int
    telescoping_ok: bool
    convergence_ok: bool | None
    rule_violations: int
    bound_failures: int
    odd_run_failures: int
    provenance_failures: int
    halving_failures: int
    valuation_pairs: int
    valuation_violations: int

    @property
    def findings(self) -> int:
        return (
            (not self.telescoping_ok) + (self.convergence_ok is False) + self.rule_violations
            + self.bound_failures + self.odd_run_failures + self.provenance_failures + self.halving_failures
        )


@dataclass
class RangeAuditReport:
    lo: int
    hi: int
    step_cap: int
    records: list[StartRecord] = field(default_factory=list)

    @property
    def cap_exhausted(self) -> list[int]:
        return [r.h1 for r in self.records if r.status != "terminated"]

    def total(self, name: str) -> int:
        return sum(int(getattr(r, name)) for r in self.records)

    def summary(self) -> dict[str, int]:
        recs = self.records
        return {
            "starts": len(recs),
            "terminated": sum(1 for r in recs if r.status == "terminated"),
            "cap_exhausted": len(self.cap_exhausted),
            "telescoping_failures": sum(1 for r in recs if not r.telescoping_ok),
            "convergence_failures": sum(1 for r in recs if r.convergence_ok is False),
            "rule_violations": self.total("rule_violations"),
            "episodes": self.total("episodes"),
            "max_episode": max((r.max_episode for r in recs), default=0),
            "bound_failures": self.total("bound_failures"),
            "odd_run_failures": self.total("odd_run_failures"),
            "provenance_failures": self.total("provenance_failures"),
            "halving_failures": self.total("halving_failures"),
            "valuation_pairs": self.total("valuation_pairs"),
            "valuation_violations": self.total("valuation_violations"),
            "max_steps": max((r.steps for r in recs), default=0),
            "max_peak": max((r.peak for r in recs), default=0),
        }

    @property
    def findings(self) -> int:
        """Violations of identities and rules; valuation-audit outcomes are reported, not counted."""
        return sum(r.findings for r in self.records) + len(self.cap_exhausted)

    def merge(self, other: RangeAuditReport) -> RangeAuditReport:
        recs = sorted(self.records + other.records, key=lambda r: r.h1)
        return RangeAuditReport(min(self.lo, other.lo), max(self.hi, other.hi), self.step_cap, recs)


def audit_start(h1: int, step_cap: int = DEFAULT_STEP_CAP) -> tuple[StartRecord, Trajectory, list[Episode]]:
    traj = run_trajectory(h1, step_cap)
    eps = detect_episodes(traj)
    tele_ok, _ = check_telescoping(traj)
    conv_ok = check_convergence_identity(traj)[0] if traj.terminated else None
    val = episode_valuation_audit(eps)
    rec = StartRecord(
        h1=h1,
        status=traj.status,
        steps=traj.steps,
        peak=traj.peak,
        episodes=len(eps),
        max_episode=max((e.length for e in eps), default=0),
        telescoping_ok=tele_ok,
        convergence_ok=conv_ok,
        rule_violations=len(validate_itinerary(traj)),
        bound_failures=sum(1 for e in eps if e.complete and not all(check_persistence_bound(e))),
        odd_run_failures=len(check_odd_run_identity(traj)),
        provenance_failures=len(entry_provenance_failures(traj, eps)),
        halving_failures=len(halving_gap_failures(traj, eps)),
        valuation_pairs=val.pairs_checked,
        valuation_violations=len(val.violations),
    )
    return rec, traj, eps


def _audit_chunk(args: tuple[int, int, int]) -> RangeAuditReport:
    lo, hi, cap = args
    return RangeAuditReport(lo, hi, cap, [audit_start(h, cap)[0] for h in range(lo, hi + 1)])


def range_audit(lo: int, hi: int, step_cap: int = DEFAULT_STEP_CAP, jobs: int = 1) -> RangeAuditReport:
    if lo < 1 or hi < lo:
        raise ValueError(f"need 1 <= lo <= hi, got {lo}..{hi}")
    if jobs <= 1 or hi - lo < 1000:
        return _audit_chunk((lo, hi, step_cap))
    size = max(1000, (hi - lo + 1) // (jobs * 4))
    chunks = [(a, min(a + size - 1, hi), step_cap) for a in range(lo, hi + 1, size)]
    report = RangeAuditReport(lo, lo, step_cap)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_audit_chunk, chunks):
            report = report.merge(part)
    report.hi = hi
    return report


@dataclass(frozen=True)
class ProfileRow:
    index: int
    h: int
    base: int
    A: int
    segment_tag: str
    kink: bool
    turning: bool

    @property
    def log2_h1(self) -> float:
        """log2(h + 1), for plotting only."""
        return math.log2(self.h + 1)


def figure2_profile(h1: int, step_cap: int = DEFAULT_STEP_CAP) -> list[ProfileRow]:
    """Per-step rows for plotting log2(h+1) along a trajectory.

    segment_tag is the kind of step leaving the value (odd: growth, even:
    decay); the final value repeats the tag of the step into it. `kink` marks
    an exact nonzero second difference of log2(h+1), tested without floats as
    (h_{i+1}+1)(h_{i-1}+1) != (h_i+1)^2. `turning` marks a change of tag.
    """
    vals = run_trajectory(h1, step_cap).values
    m = len(vals)
    tags = [GROWTH if h & 1 else DECAY for h in vals[:-1]]
    tags.append(tags[-1] if tags else TERMINAL)
    rows = []
    for i, h in enumerate(vals):
        kink = 0 < i < m - 1 and (vals[i + 1] + 1) * (vals[i - 1] + 1) != (h + 1) ** 2
        turning = 0 < i < m - 1 and tags[i] != tags[i - 1]
        rows.append(ProfileRow(i, h, _base(h), _octave(h), tags[i], kink, turning))
    return rows


def sweep_episodes(lo: int, hi: int, step_cap: int = DEFAULT_STEP_CAP) -> Iterable[tuple[int, Episode]]:
    for h1 in range(lo, hi + 1):
        for e in detect_episodes(run_trajectory(h1, step_cap)):
            yield h1, e
