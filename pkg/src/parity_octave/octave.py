"""Base-octave decomposition h = B + 8(A-1) and the parity bits derived from it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

V2_GE3 = "≥3"
V2Class = Union[int, str]


@dataclass(frozen=True, order=True)
class BaseOctave:
    B: int
    A: int

    def __post_init__(self) -> None:
        if not 1 <= self.B <= 8:
            raise ValueError(f"base must be in 1..8, got {self.B}")
        if self.A < 1:
            raise ValueError(f"octave must be >= 1, got {self.A}")

    @property
    def h(self) -> int:
        return self.B + 8 * (self.A - 1)


@dataclass(frozen=True)
class BaseBits:
    s_b: int
    k_b: int
    s_c: int


@dataclass(frozen=True)
class OctaveBits:
    s_a: int
    s_q: int
    s_r: int


@dataclass(frozen=True, order=True)
class ExtendedState:
    """Finite parity descriptor (B, s_b, s_c, s_a, s_q, s_r).

    s_b and s_c are fixed by B; the free coordinates are (B, s_a, s_q, s_r),
    which is what `key` returns.
    """

    B: int
    s_b: int
    s_c: int
    s_a: int
    s_q: int
    s_r: int

    @classmethod
    def from_key(cls, B: int, s_a: int, s_q: int, s_r: int) -> ExtendedState:
        bb = base_bits(B)
        return cls(B, bb.s_b, bb.s_c, s_a, s_q, s_r)

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.B, self.s_a, self.s_q, self.s_r)

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.B, self.s_b, self.s_c, self.s_a, self.s_q, self.s_r)

    def label(self) -> str:
        return f"B{self.B}_sb{self.s_b}_sc{self.s_c}_sa{self.s_a}_sq{self.s_q}_sr{self.s_r}"


def to_base_octave(h: int) -> BaseOctave:
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    B = (h - 1) % 8 + 1
    return BaseOctave(B, 1 + (h - B) // 8)


def from_base_octave(bo: BaseOctave | tuple[int, int]) -> int:
    B, A = (bo.B, bo.A) if isinstance(bo, BaseOctave) else bo
    if not 1 <= B <= 8:
        raise ValueError(f"base must be in 1..8, got {B}")
    if A < 1:
        raise ValueError(f"octave must be >= 1, got {A}")
    return B + 8 * (A - 1)


def base_bits(B: int) -> BaseBits:
    if not 1 <= B <= 8:
        raise ValueError(f"base must be in 1..8, got {B}")
    k_b, s_b = divmod(B, 2)
    return BaseBits(s_b=s_b, k_b=k_b, s_c=k_b % 2)


def octave_bits(A: int) -> OctaveBits:
    if A < 1:
        raise ValueError(f"octave must be >= 1, got {A}")
    return OctaveBits(s_a=A & 1, s_q=(A >> 1) & 1, s_r=(A >> 2) & 1)


def state_of(B: int, A: int) -> ExtendedState:
    ob = octave_bits(A)
    return ExtendedState.from_key(B, ob.s_a, ob.s_q, ob.s_r)


def extract_state(h: int) -> ExtendedState:
    bo = to_base_octave(h)
    return state_of(bo.B, bo.A)


def v2(A: int) -> int:
    """2-adic valuation of a positive integer."""
    if A < 1:
        raise ValueError(f"v2 needs a positive integer, got {A}")
    return (A & -A).bit_length() - 1


def v2_class_from_bits(s_a: int, s_q: int, s_r: int) -> V2Class:
    if s_a:
        return 0
    if s_q:
        return 1
    if s_r:
        return 2
    return V2_GE3


def v2_class(A: int) -> V2Class:
    """v2(A) clipped to {0, 1, 2, "≥3"}, read off the three low bits of A."""
    ob = octave_bits(A)
    return v2_class_from_bits(ob.s_a, ob.s_q, ob.s_r)


def mod8_shift(s_a: int) -> int:
    """Residue contributed to the next base by the octave term: 0 for odd A, 4 for even A."""
    if s_a not in (0, 1):
        raise ValueError(f"s_a must be a bit, got {s_a}")
    return 4 * (1 - s_a)


def parity_factors(s_a: int, s_b: int) -> tuple[int, int]:
    """(even-octave indicator, base-parity sign) = (1 - s_a, 1 - 2 s_b)."""
    if s_a not in (0, 1) or s_b not in (0, 1):
        raise ValueError("parity factors take bits")
    return 1 - s_a, 1 - 2 * s_b


def step_split(bo: BaseOctave) -> int:
    """Next iterate computed as a base part plus an octave part.

    The octave part 4(2 s_b + 1)(A - 1) is a multiple of 4 whose residue mod 8
    is `mod8_shift(s_a)`.
    """
    s_b = bo.B & 1
    base_part = ((2 * s_b + 1) * bo.B + s_b) // 2
    octave_part = 4 * (2 * s_b + 1) * (bo.A - 1)
    return base_part + octave_part
