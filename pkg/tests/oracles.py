"""Deliberately naive reference computations used only by the tests."""

from __future__ import annotations


def classical(n: int) -> int:
    return n // 2 if n % 2 == 0 else 3 * n + 1


def accelerated_by_classical(h: int) -> int:
    """One accelerated step as one or two classical steps."""
    c = classical(h)
    return c if h % 2 == 0 else classical(c)


def naive_trajectory(h: int) -> list[int]:
    out = [h]
    while h != 1:
        h = accelerated_by_classical(h)
        out.append(h)
    return out


def naive_v2(a: int) -> int:
    r = 0
    while a % 2 == 0:
        a //= 2
        r += 1
    return r


def naive_base_octave(h: int) -> tuple[int, int]:
    A = 1
    while h > 8 * A:
        A += 1
    return h - 8 * (A - 1), A
