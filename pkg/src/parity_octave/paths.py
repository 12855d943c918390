"""Return paths from the forced exit 7->3 back to the re-entry 6->7, with 2-adic budgets.

Path accounting: a path is the vertex list (exit, s1, ..., entry). The exit
edge exit->s1 is not counted; each later vertex contributes its outgoing edge,
the last one being the entry edge 6->7. So length = len(vertices) - 1.

Gain conventions (per counted edge, by its source vertex):

* ``table``: source base is 2 or 3, i.e. the step lands in base 1 or 5.
  This is the convention that reproduces every printed path budget.
* ``odd-octave``: source base odd with an odd octave (s_a = 1).
* ``octave``: source has s_a = 1, whatever the base parity.

Consumption is always one factor of 2 per even-base source.
"""

from __future__ import annotations

import os
import re
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .codebook import PAPER_FIXTURE, Codebook
from .fixtures import TABLE_A2, FixtureError, csv_text, fixture_path, read_csv
from .rules import NEXT_BASE

SourceKey = tuple[int, int, int, int]

PAPER = "paper"
DERIVED_MODE = "derived"
MODES = (PAPER, DERIVED_MODE)

TABLE_RULE = "table"
ODD_OCTAVE_RULE = "odd-octave"
OCTAVE_RULE = "octave"
GAIN_RULES = (TABLE_RULE, ODD_OCTAVE_RULE, OCTAVE_RULE)
PRIMARY_RULE = TABLE_RULE

ENTRY_COST = 1
_BIG = 1 << 30

A2_HEADER = [
    "Path", "Sequence", "Type", "Length", "Even_Steps", "Odd_Steps",
    "v2_Consumed", "v2_Max_Gain", "Entry_Cost", "Net_Budget", "Verdict",
]


def is_exit(v: SourceKey) -> bool:
    return v[0] == 7 and v[1] == 1


def is_entry(v: SourceKey) -> bool:
    return v[0] == 6 and v[1] == 0


def is_persist(v: SourceKey) -> bool:
    return v[0] == 7 and v[1] == 0


def edge_gain(B: int, s_a: int, rule: str = PRIMARY_RULE) -> int:
    if rule == TABLE_RULE:
        return 1 if B in (2, 3) else 0
    if rule == ODD_OCTAVE_RULE:
        return 1 if B % 2 == 1 and s_a == 1 else 0
    if rule == OCTAVE_RULE:
        return 1 if s_a == 1 else 0
    raise ValueError(f"unknown gain rule {rule!r}")


def edge_weight(B: int, s_a: int, rule: str = PRIMARY_RULE) -> int:
    """Gain minus consumption for one counted edge leaving a vertex with base B."""
    return edge_gain(B, s_a, rule) - (1 if B % 2 == 0 else 0)


def octave_parity_between(B: int, B_next: int) -> int:
    """The s_a that makes the selection rule send B to B_next."""
    for s_a in (0, 1):
        if NEXT_BASE[(B, s_a)] == B_next:
            return s_a
    raise ValueError(f"no selection rule leads from {B} to {B_next}")


@dataclass(frozen=True)
class Budget:
    length: int
    even_steps: int
    odd_steps: int
    v2_consumed: int
    gains: Mapping[str, int]
    entry_cost: int = ENTRY_COST

    @property
    def v2_max_gain(self) -> int:
        return self.gains[PRIMARY_RULE]

    def net(self, rule: str = PRIMARY_RULE) -> int:
        return self.gains[rule] - self.v2_consumed - self.entry_cost

    @property
    def net_budget(self) -> int:
        return self.net(PRIMARY_RULE)


def budget_of_steps(steps: Sequence[tuple[int, int]]) -> Budget:
    """Budget from the counted (B, s_a) sources, exit edge already removed."""
    even = sum(1 for B, _ in steps if B % 2 == 0)
    gains = {rule: sum(edge_gain(B, s_a, rule) for B, s_a in steps) for rule in GAIN_RULES}
    return Budget(length=len(steps), even_steps=even, odd_steps=len(steps) - even, v2_consumed=even, gains=gains)


def budget_from_bases(bases: Sequence[int]) -> Budget:
    """Budget of a base itinerary 7,3,...,6 (a trailing 7 is optional).

    Octave parities are recovered from consecutive bases, since every base has
    distinct successors for the two parities.
    """
    seq = list(bases)
    if seq and seq[-1] == 7 and len(seq) > 1:
        seq = seq[:-1]
    if len(seq) < 3 or seq[0] != 7 or seq[1] != 3 or seq[-1] != 6:
        raise ValueError(f"not a return itinerary: {bases}")
    full = seq + [7]
    steps = [(full[i], octave_parity_between(full[i], full[i + 1])) for i in range(1, len(seq))]
    return budget_of_steps(steps)


@dataclass(frozen=True)
class ReturnPath:
    mode: str
    states: tuple[SourceKey, ...]
    budget: Budget

    @property
    def base_sequence(self) -> tuple[int, ...]:
        return tuple(map(itemgetter(0), self.states)) + (7,)

    @property
    def length(self) -> int:
        return self.budget.length

    @property
    def even_steps(self) -> int:
        return self.budget.even_steps

    @property
    def odd_steps(self) -> int:
        return self.budget.odd_steps

    @property
    def v2_consumed(self) -> int:
        return self.budget.v2_consumed

    @property
    def v2_max_gain(self) -> int:
        return self.budget.v2_max_gain

    @property
    def entry_cost(self) -> int:
        return self.budget.entry_cost

    @property
    def net_budget(self) -> int:
        return self.budget.net_budget

    # counts when the exit edge 7->3 is also included
    @property
    def length_with_exit(self) -> int:
        return self.budget.length + 1

    @property
    def odd_steps_with_exit(self) -> int:
        return self.budget.odd_steps + 1

    def sort_key(self) -> tuple:
        return (self.base_sequence, self.length, self.states)


def make_return_path(states: Sequence[SourceKey], mode: str) -> ReturnPath:
    st = tuple(states)
    return ReturnPath(mode=mode, states=st, budget=budget_of_steps([(v[0], v[1]) for v in st[1:]]))


def compute_budget(p: ReturnPath, gain_rule: str = PRIMARY_RULE) -> int:
    """Net budget: gain - consumed - entry cost."""
    return p.budget.net(gain_rule)


@dataclass(frozen=True)
class ReturnSubgraph:
    """Region of the state graph lying between the exit set and the entry set.

    `successors` holds every codebook successor of a region vertex, so the
    entry vertices keep their edges into base 7. Path search never steps onto a
    base-7 vertex; paths stop at the first entry vertex.
    """

    mode: str
    vertices: tuple[SourceKey, ...]
    successors: Mapping[SourceKey, tuple[SourceKey, ...]]
    exit_set: tuple[SourceKey, ...]
    entry_set: tuple[SourceKey, ...]
    entry_edges: tuple[tuple[SourceKey, SourceKey], ...]
    forbidden: tuple[SourceKey, ...]

    def path_successors(self, v: SourceKey) -> tuple[SourceKey, ...]:
        if is_entry(v):
            return ()
        vs = set(self.vertices)
        return tuple(w for w in self.successors[v] if w[0] != 7 and w in vs)

    def core(self) -> tuple[SourceKey, ...]:
        """Region vertices other than base 7: where cycles can live."""
        return tuple(v for v in self.vertices if v[0] != 7)


def mode_of(book: Codebook) -> str:
    return PAPER if book.provenance == PAPER_FIXTURE else DERIVED_MODE


def build_return_subgraph(book: Codebook, mode: str | None = None) -> ReturnSubgraph:
    adj: dict[SourceKey, set[SourceKey]] = defaultdict(set)
    for r in book.rows:
        adj[r.source.key].add(r.next.key)
    succ = {v: tuple(sorted(ws)) for v, ws in adj.items()}
    exits = tuple(sorted(v for v in succ if is_exit(v)))
    if not exits:
        raise ValueError("codebook has no exit states (B=7, s_a=1)")

    def step_on(v: SourceKey) -> tuple[SourceKey, ...]:
        if is_entry(v):
            return ()
        return tuple(w for w in succ.get(v, ()) if w[0] != 7)

    forward: set[SourceKey] = set(exits)
    stack = list(exits)
    while stack:
        v = stack.pop()
        for w in step_on(v):
            if w not in forward:
                forward.add(w)
                stack.append(w)
    backward: set[SourceKey] = {v for v in forward if is_entry(v)}
    changed = True
    while changed:
        changed = False
        for v in forward:
            if v not in backward and any(w in backward for w in step_on(v)):
                backward.add(v)
                changed = True
    region = tuple(sorted(forward & backward))
    entries = tuple(v for v in region if is_entry(v))
    entry_edges = tuple((v, w) for v in entries for w in succ[v] if w[0] == 7)
    return ReturnSubgraph(
        mode=mode or mode_of(book),
        vertices=region,
        successors={v: succ[v] for v in region},
        exit_set=exits,
        entry_set=entries,
        entry_edges=entry_edges,
        forbidden=tuple(sorted(v for v in succ if is_persist(v))),
    )


class _Indexed:
    """Integer-indexed copy of a subgraph for the hot search loops."""

    def __init__(self, g: ReturnSubgraph) -> None:
        self.keys = list(g.vertices)
        idx = {v: i for i, v in enumerate(self.keys)}
        self.succ = [tuple(idx[w] for w in g.path_successors(v)) for v in self.keys]
        self.entry = [is_entry(v) for v in self.keys]
        self.exits = [idx[v] for v in g.exit_set if v in idx]
        self.n = len(self.keys)


def iter_return_paths(
    g: ReturnSubgraph, on_prune: Callable[[SourceKey, SourceKey], None] | None = None
) -> Iterator[ReturnPath]:
    """Yield every simple return path in depth-first order.

    Exits are visited in ascending order and successors in ascending order, so
    the sequence is deterministic. `on_prune(v, w)` is called each time the
    search refuses to revisit w from v (a cycle witness). Budgets are carried
    along the search as running totals rather than recomputed per path.
    """
    ix = _Indexed(g)
    keys, succ, entry = ix.keys, ix.succ, ix.entry
    # per counted vertex: (is even, gain under each rule)
    contrib = [(int(k[0] % 2 == 0),) + tuple(edge_gain(k[0], k[1], r) for r in GAIN_RULES) for k in keys]
    visited = [False] * ix.n
    for e in ix.exits:
        path = [e]
        totals = [(0, 0, 0, 0)]
        stack = [iter(succ[e])]
        visited[e] = True
        while stack:
            w = next(stack[-1], None)
            if w is None:
                stack.pop()
                visited[path.pop()] = False
                totals.pop()
                continue
            if visited[w]:
                if on_prune is not None:
                    on_prune(keys[path[-1]], keys[w])
                continue
            ev, g0, g1, g2 = totals[-1]
            c = contrib[w]
            ev, g0, g1, g2 = ev + c[0], g0 + c[1], g1 + c[2], g2 + c[3]
            if entry[w]:
                n = len(path)
                budget = Budget(
                    length=n, even_steps=ev, odd_steps=n - ev, v2_consumed=ev,
                    gains=dict(zip(GAIN_RULES, (g0, g1, g2))),
                )
                yield ReturnPath(g.mode, tuple(map(keys.__getitem__, path)) + (keys[w],), budget)
            else:
                visited[w] = True
                path.append(w)
                totals.append((ev, g0, g1, g2))
                stack.append(iter(succ[w]))


@dataclass
class Enumeration:
    paths: list[ReturnPath]
    prune_edges: list[tuple[SourceKey, SourceKey]]


def collect_return_paths(g: ReturnSubgraph) -> Enumeration:
    prunes: set[tuple[SourceKey, SourceKey]] = set()
    paths = list(iter_return_paths(g, lambda v, w: prunes.add((v, w))))
    paths.sort(key=ReturnPath.sort_key)
    return Enumeration(paths=paths, prune_edges=sorted(prunes))


def enumerate_return_paths(g: ReturnSubgraph) -> list[ReturnPath]:
    """All simple return paths, ordered by base sequence, then length, then states."""
    return collect_return_paths(g).paths


@dataclass(frozen=True)
class PathSummary:
    mode: str
    count: int
    max_net: Mapping[str, int]
    min_net: Mapping[str, int]
    prune_edges: tuple[tuple[SourceKey, SourceKey], ...]

    def violations(self, rule: str = PRIMARY_RULE) -> bool:
        return self.count > 0 and self.max_net[rule] > 0


def summarize_return_paths(g: ReturnSubgraph) -> PathSummary:
    """Count all simple return paths and bound their nets without listing them.

    The set of completions from a vertex depends only on which vertices still
    reachable from it are already used, so results are cached on that pair.
    The cache stores (count, max and min weight per rule), which compose by
    addition along an edge.
    """
    ix = _Indexed(g)
    weights = [tuple(edge_weight(k[0], k[1], r) for r in GAIN_RULES) for k in ix.keys]
    assert len(GAIN_RULES) == 3
    reach = [0] * ix.n
    for v in range(ix.n):
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in ix.succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        reach[v] = sum(1 << y for y in seen)
    memo: dict[tuple[int, int], tuple[int, int, int, int, int, int, int]] = {}
    prunes: set[tuple[int, int]] = set()
    none = (0, -_BIG, -_BIG, -_BIG, _BIG, _BIG, _BIG)

    # unrolled over the three gain rules; this loop dominates derived-mode cost
    def best(v: int, used: int) -> tuple[int, int, int, int, int, int, int]:
        key = (v, used & reach[v])
        hit = memo.get(key)
        if hit is not None:
            return hit
        c, h0, h1, h2, l0, l1, l2 = none
        for w in succ[v]:
            if (used >> w) & 1:
                prunes.add((v, w))
                continue
            x0, x1, x2 = weights[w]
            if entry[w]:
                sc, s0, s1, s2, t0, t1, t2 = 1, x0, x1, x2, x0, x1, x2
            else:
                sc, s0, s1, s2, t0, t1, t2 = best(w, used | (1 << w))
                if not sc:
                    continue
                s0 += x0; s1 += x1; s2 += x2
                t0 += x0; t1 += x1; t2 += x2
            c += sc
            if s0 > h0: h0 = s0
            if s1 > h1: h1 = s1
            if s2 > h2: h2 = s2
            if t0 < l0: l0 = t0
            if t1 < l1: l1 = t1
            if t2 < l2: l2 = t2
        result = (c, h0, h1, h2, l0, l1, l2)
        memo[key] = result
        return result

    succ, entry = ix.succ, ix.entry
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * ix.n + 100))
    try:
        total, H, L = 0, [-_BIG] * 3, [_BIG] * 3
        for e in ix.exits:
            c, h0, h1, h2, l0, l1, l2 = best(e, 1 << e)
            total += c
            H = [max(a, b) for a, b in zip(H, (h0, h1, h2))]
            L = [min(a, b) for a, b in zip(L, (l0, l1, l2))]
    finally:
        sys.setrecursionlimit(limit)
    # path weights omit the entry cost; fold it in here
    max_net = {r: (H[i] - ENTRY_COST if total else None) for i, r in enumerate(GAIN_RULES)}
    min_net = {r: (L[i] - ENTRY_COST if total else None) for i, r in enumerate(GAIN_RULES)}
    prune_edges = tuple(sorted((ix.keys[v], ix.keys[w]) for v, w in prunes))
    return PathSummary(g.mode, total, max_net, min_net, prune_edges)  # type: ignore[arg-type]


# --- cycles -------------------------------------------------------------------


def elementary_cycles(adj: Mapping[SourceKey, Iterable[SourceKey]]) -> list[tuple[SourceKey, ...]]:
    """All elementary cycles of a digraph (Johnson's circuit search).

    Each cycle is returned once, rotated to start at its smallest vertex.
    """
    order = sorted(set(adj) | {w for ws in adj.values() for w in ws})
    pos = {v: i for i, v in enumerate(order)}
    out_edges = {v: sorted(set(adj.get(v, ())), key=pos.__getitem__) for v in order}
    cycles: list[tuple[SourceKey, ...]] = []

    for s_i, s in enumerate(order):
        # only vertices >= s, restricted to the strong component containing s
        allowed = set(order[s_i:])
        comp = _component_of(s, out_edges, allowed)
        if not any(w in comp for w in out_edges[s]):
            continue
        blocked: set[SourceKey] = set()
        bmap: dict[SourceKey, set[SourceKey]] = defaultdict(set)
        stack: list[SourceKey] = [s]

        def unblock(u: SourceKey) -> None:
            todo = [u]
            while todo:
                x = todo.pop()
                if x in blocked:
                    blocked.discard(x)
                    todo.extend(bmap.pop(x, ()))

        # iterative circuit search
        blocked.add(s)
        frames = [(s, iter([w for w in out_edges[s] if w in comp]), False)]
        while frames:
            v, it, found = frames[-1]
            advanced = False
            for w in it:
                if w == s:
                    cycles.append(tuple(stack))
                    found = True
                elif w not in blocked:
                    frames[-1] = (v, it, found)
                    stack.append(w)
                    blocked.add(w)
                    frames.append((w, iter([x for x in out_edges[w] if x in comp]), False))
                    advanced = True
                    break
            if advanced:
                continue
            frames.pop()
            if found:
                unblock(v)
            else:
                for w in out_edges[v]:
                    if w in comp:
                        bmap[w].add(v)
            stack.pop()
            if frames:
                pv, pit, pfound = frames[-1]
                frames[-1] = (pv, pit, pfound or found)
    return cycles


def _component_of(s: SourceKey, out_edges: Mapping[SourceKey, list[SourceKey]], allowed: set[SourceKey]) -> set[SourceKey]:
    fwd = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for w in out_edges[v]:
            if w in allowed and w not in fwd:
                fwd.add(w)
                stack.append(w)
    rev: dict[SourceKey, list[SourceKey]] = defaultdict(list)
    for v in fwd:
        for w in out_edges[v]:
            if w in fwd:
                rev[w].append(v)
    bwd = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for u in rev[v]:
            if u not in bwd:
                bwd.add(u)
                stack.append(u)
    return fwd & bwd


@dataclass(frozen=True)
class CycleRecord:
    states: tuple[SourceKey, ...]
    weights: Mapping[str, int]

    @property
    def bases(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.states)

    @property
    def weight(self) -> int:
        return self.weights[PRIMARY_RULE]

    def is_alternation_12(self) -> bool:
        return len(self.states) == 2 and sorted(self.bases) == [1, 2]

    def is_self_loop_8(self) -> bool:
        return self.bases == (8,)

    def passes_through(self, a: int, b: int) -> bool:
        bs = self.bases
        return any(bs[i] == a and bs[(i + 1) % len(bs)] == b for i in range(len(bs)))


@dataclass
class CycleAudit:
    mode: str
    cycles: list[CycleRecord]
    rule: str = PRIMARY_RULE
    positive: list[CycleRecord] = field(default_factory=list)

    @property
    def all_nonpositive(self) -> bool:
        return not self.positive

    def alternations_12(self) -> list[CycleRecord]:
        return [c for c in self.cycles if c.is_alternation_12()]

    def self_loops_8(self) -> list[CycleRecord]:
        return [c for c in self.cycles if c.is_self_loop_8()]


def cycle_weight_audit(g: ReturnSubgraph, rule: str = PRIMARY_RULE) -> CycleAudit:
    """Enumerate every elementary cycle among non-base-7 region vertices and weigh it."""
    core = set(g.core())
    adj = {v: [w for w in g.path_successors(v) if w in core] for v in sorted(core)}
    records = []
    for cyc in elementary_cycles(adj):
        weights = {r: sum(edge_weight(v[0], v[1], r) for v in cyc) for r in GAIN_RULES}
        records.append(CycleRecord(states=cyc, weights=weights))
    records.sort(key=lambda c: (len(c.states), c.states))
    audit = CycleAudit(mode=g.mode, cycles=records, rule=rule)
    audit.positive = [c for c in records if c.weights[rule] > 0]
    return audit


# --- reference table of paths ------------------------------------------------


@dataclass(frozen=True)
class TableA2Row:
    path: int
    sequence_text: str
    bases: tuple[int, ...]
    type: str
    length: int
    even_steps: int
    odd_steps: int
    v2_consumed: int
    v2_max_gain: int
    entry_cost: int
    net_budget: int
    verdict: str

    @property
    def base_sequence(self) -> tuple[int, ...]:
        return self.bases + (7,)


_ARROW_SEQ = re.compile(r"^\s*(\d)(?:\s*→\s*(\d))+")


def parse_sequence(text: str) -> tuple[int, ...]:
    """'7→3→1→6 (sa flip)' -> (7, 3, 1, 6); trailing annotations are ignored."""
    m = _ARROW_SEQ.match(text)
    if not m:
        raise ValueError(f"cannot read base sequence from {text!r}")
    return tuple(int(x) for x in re.findall(r"\d", m.group(0)))


def load_table_a2(path: str | os.PathLike[str] | None = None) -> list[TableA2Row]:
    if path is None or os.path.isdir(path):
        path = fixture_path(TABLE_A2, path)
    rows = []
    for i, rec in enumerate(read_csv(path, A2_HEADER), start=2):
        try:
            rows.append(
                TableA2Row(
                    path=int(rec["Path"]),
                    sequence_text=rec["Sequence"],
                    bases=parse_sequence(rec["Sequence"]),
                    type=rec["Type"],
                    length=int(rec["Length"]),
                    even_steps=int(rec["Even_Steps"]),
                    odd_steps=int(rec["Odd_Steps"]),
                    v2_consumed=int(rec["v2_Consumed"]),
                    v2_max_gain=int(rec["v2_Max_Gain"]),
                    entry_cost=int(rec["Entry_Cost"]),
                    net_budget=int(rec["Net_Budget"]),
                    verdict=rec["Verdict"],
                )
            )
        except ValueError as exc:
            raise FixtureError(f"{path} row {i}: {exc}") from None
    return rows


def check_fixture_identities(rows: Iterable[TableA2Row]) -> list[str]:
    """even + odd = length and net = gain - consumed - entry cost, per printed row."""
    out = []
    for r in rows:
        if r.even_steps + r.odd_steps != r.length:
            out.append(f"row {r.path}: even {r.even_steps} + odd {r.odd_steps} != length {r.length}")
        if r.v2_max_gain - r.v2_consumed - r.entry_cost != r.net_budget:
            out.append(
                f"row {r.path}: gain {r.v2_max_gain} - consumed {r.v2_consumed} - {r.entry_cost} != net {r.net_budget}"
            )
    return out


@dataclass(frozen=True)
class ColumnDiscrepancy:
    path: int
    column: str
    enumerated: int
    table: int


@dataclass
class PathDiff:
    matched: list[tuple[int, ReturnPath]] = field(default_factory=list)
    unmatched_rows: list[TableA2Row] = field(default_factory=list)
    extra_paths: list[ReturnPath] = field(default_factory=list)
    discrepancies: list[ColumnDiscrepancy] = field(default_factory=list)
    positive_nets: list[ReturnPath] = field(default_factory=list)
    fixture_sequences: int = 0
    covered_sequences: int = 0

    @property
    def all_sequences_covered(self) -> bool:
        return self.covered_sequences == self.fixture_sequences

    @property
    def clean(self) -> bool:
        return not (self.unmatched_rows or self.extra_paths or self.discrepancies or self.positive_nets)


_COMPARED = (
    ("Length", "length"), ("Even_Steps", "even_steps"), ("Odd_Steps", "odd_steps"),
    ("v2_Consumed", "v2_consumed"), ("v2_Max_Gain", "v2_max_gain"),
    ("Entry_Cost", "entry_cost"), ("Net_Budget", "net_budget"),
)


def diff_against_tableA2(paths: Sequence[ReturnPath], fixture: Sequence[TableA2Row]) -> PathDiff:
    """Match printed rows to enumerated paths by base sequence, one path per row."""
    diff = PathDiff()
    pool: dict[tuple[int, ...], list[ReturnPath]] = defaultdict(list)
    for p in paths:
        pool[p.base_sequence].append(p)
    used: set[int] = set()
    for row in sorted(fixture, key=lambda r: r.path):
        candidates = [p for p in pool.get(row.base_sequence, []) if id(p) not in used]
        if not candidates:
            diff.unmatched_rows.append(row)
            continue
        p = candidates[0]
        used.add(id(p))
        diff.matched.append((row.path, p))
        for col, attr in _COMPARED:
            a, b = getattr(p, attr), getattr(row, attr)
            if a != b:
                diff.discrepancies.append(ColumnDiscrepancy(row.path, col, a, b))
    diff.extra_paths = [p for p in paths if id(p) not in used]
    diff.positive_nets = [p for p in paths if p.net_budget > 0]
    seqs = {r.base_sequence for r in fixture}
    diff.fixture_sequences = len(seqs)
    diff.covered_sequences = len(seqs & set(pool))
    return diff


def arrow_text(bases: Sequence[int]) -> str:
    return "→".join("".join(map(str, bases)))


_ALT_12 = re.compile("(?=121)")
_LOOP_8 = re.compile("(?=88)")


def _describe_digits(digits: str) -> str:
    tags = []
    alt = len(_ALT_12.findall(digits))
    loops8 = len(_LOOP_8.findall(digits))
    if alt:
        tags.append(f"1↔2 x{alt}")
    if loops8:
        tags.append(f"8→8 x{loops8}")
    if "5" in digits[2:]:
        tags.append("via 5")
    return ", ".join(tags) if tags else "direct"


def describe_path(bases: Sequence[int]) -> str:
    """Short tag listing the loops a base itinerary contains."""
    return _describe_digits("".join(map(str, bases)))


def verdict(net: int) -> str:
    if net < 0:
        return "contracts"
    return "neutral" if net == 0 else "regenerates"


def path_rows(paths: Iterable[ReturnPath], start: int = 1) -> Iterator[list[object]]:
    for i, p in enumerate(paths, start=start):
        b = p.budget
        digits = "".join(map(str, map(itemgetter(0), p.states)))  # bases are single digits
        net = b.net_budget
        yield [
            i, "→".join(digits), _describe_digits(digits), b.length, b.even_steps, b.odd_steps,
            b.v2_consumed, b.v2_max_gain, b.entry_cost, net, verdict(net), p.mode,
        ]


def paths_to_csv(paths: Iterable[ReturnPath]) -> str:
    return csv_text(A2_HEADER + ["Mode"], path_rows(paths))
