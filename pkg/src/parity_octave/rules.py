"""Base selection rules, one-step (B, A) updates and the 8-vertex base graph."""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import Trajectory, step
from .octave import BaseOctave, from_base_octave, to_base_octave

# (B, s_a) -> next base. s_a = 1 is the odd octave.
NEXT_BASE: dict[tuple[int, int], int] = {
    (1, 1): 2, (2, 1): 1, (3, 1): 5, (4, 1): 2,
    (5, 1): 8, (6, 1): 3, (7, 1): 3, (8, 1): 4,
    (1, 0): 6, (2, 0): 5, (3, 0): 1, (4, 0): 6,
    (5, 0): 4, (6, 0): 7, (7, 0): 7, (8, 0): 8,
}

PARITY_NAME = {1: "odd", 0: "even"}


@dataclass(frozen=True)
class BaseTransition:
    from_B: int
    octave_parity: int
    to_B: int

    @property
    def parity(self) -> str:
        return PARITY_NAME[self.octave_parity]


@dataclass(frozen=True)
class AffineUpdate:
    """A' = (m*A + c) / 2**r."""

    m: int
    c: int
    r: int

    def apply(self, A: int) -> int:
        num = self.m * A + self.c
        q, rem = divmod(num, 1 << self.r)
        if rem:
            raise ValueError(f"({self.m}*{A}{self.c:+d})/2^{self.r} is not an integer")
        return q


@dataclass(frozen=True)
class BaseGraph:
    vertices: tuple[int, ...]
    edges: tuple[BaseTransition, ...]

    def out_edges(self, B: int) -> list[BaseTransition]:
        return [e for e in self.edges if e.from_B == B]

    def self_loops(self) -> list[BaseTransition]:
        return [e for e in self.edges if e.from_B == e.to_B]


@dataclass(frozen=True)
class ItineraryViolation:
    index: int
    h: int
    h_next: int
    B: int
    s_a: int
    expected_B: int
    actual_B: int


# Closed-form octave updates keyed by (B, s_a): (B', update). Bases 3 and 5 are
# not listed here and go through exact arithmetic instead.
CLOSED_FORMS: dict[tuple[int, int], tuple[int, AffineUpdate]] = {
    # B=1: h' = 12A - 10
    (1, 1): (2, AffineUpdate(3, -1, 1)),
    (1, 0): (6, AffineUpdate(3, -2, 1)),
    # B=7: h' = 12A - 1
    (7, 1): (3, AffineUpdate(3, 1, 1)),
    (7, 0): (7, AffineUpdate(3, 0, 1)),
    # even bases halve: odd A keeps the half-base, even A adds the +4 shift
    (2, 1): (1, AffineUpdate(1, 1, 1)),
    (2, 0): (5, AffineUpdate(1, 0, 1)),
    (4, 1): (2, AffineUpdate(1, 1, 1)),
    (4, 0): (6, AffineUpdate(1, 0, 1)),
    (6, 1): (3, AffineUpdate(1, 1, 1)),
    (6, 0): (7, AffineUpdate(1, 0, 1)),
    (8, 1): (4, AffineUpdate(1, 1, 1)),
    (8, 0): (8, AffineUpdate(1, 0, 1)),
}


def next_base(B: int, s_a: int) -> int:
    try:
        return NEXT_BASE[(B, s_a)]
    except KeyError:
        raise ValueError(f"no selection rule for B={B}, s_a={s_a}") from None


def step_base_octave(bo: BaseOctave) -> BaseOctave:
    return to_base_octave(step(from_base_octave(bo)))


def closed_form_update(B: int, A: int) -> tuple[int, int]:
    """(B', A') from the closed-form update; bases without one use exact stepping."""
    entry = CLOSED_FORMS.get((B, A & 1))
    if entry is None:
        nxt = step_base_octave(BaseOctave(B, A))
        return nxt.B, nxt.A
    B_next, update = entry
    return B_next, update.apply(A)


def build_base_graph() -> BaseGraph:
    edges = tuple(
        BaseTransition(B, s_a, NEXT_BASE[(B, s_a)])
        for B in range(1, 9)
        for s_a in (1, 0)
    )
    return BaseGraph(vertices=tuple(range(1, 9)), edges=edges)


def graph_to_dot(graph: BaseGraph, name: str = "base_transitions") -> str:
    lines = [f"digraph {name} {{"]
    for v in graph.vertices:
        lines.append(f"  {v};")
    for e in graph.edges:
        lines.append(f'  {e.from_B} -> {e.to_B} [parity="{e.parity}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def reentry_sources() -> list[tuple[int, int]]:
    """(B, s_a) pairs from a base other than 7 whose rule leads into base 7."""
    return sorted(k for k, v in NEXT_BASE.items() if v == 7 and k[0] != 7)


def itinerary(traj: Trajectory) -> list[int]:
    return [(h - 1) % 8 + 1 for h in traj.values]


def validate_itinerary(traj: Trajectory) -> list[ItineraryViolation]:
    """Check every consecutive pair of values against the selection rules."""
    out: list[ItineraryViolation] = []
    vals = traj.values
    for i in range(len(vals) - 1):
        h, h_next = vals[i], vals[i + 1]
        B = (h - 1) % 8 + 1
        s_a = ((h - B) // 8 + 1) & 1
        expected = NEXT_BASE[(B, s_a)]
        actual = (h_next - 1) % 8 + 1
        if expected != actual:
            out.append(ItineraryViolation(i, h, h_next, B, s_a, expected, actual))
    return out


def selection_rule_violations(lo: int, hi: int) -> list[tuple[int, int, int]]:
    """(h, expected base, realised base) for every h in [lo, hi] that breaks its rule."""
    bad = []
    for h in range(lo, hi + 1):
        B = (h - 1) % 8 + 1
        s_a = ((h - 1) // 8 + 1) & 1
        h2 = (3 * h + 1) >> 1 if h & 1 else h >> 1
        got = (h2 - 1) % 8 + 1
        want = NEXT_BASE[(B, s_a)]
        if got != want:
            bad.append((h, want, got))
    return bad
