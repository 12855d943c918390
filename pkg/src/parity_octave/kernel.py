"""Accelerated parity-controlled map, trajectories and net-change bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_STEP_CAP = 10**6

TERMINATED = "terminated"
CAP_EXHAUSTED = "cap_exhausted"


def _require_natural(h: int, name: str = "h") -> None:
    if not isinstance(h, int) or isinstance(h, bool):
        raise TypeError(f"{name} must be an int, got {type(h).__name__}")
    if h < 1:
        raise ValueError(f"{name} must be >= 1, got {h}")


@dataclass(frozen=True)
class StepDecomposition:
    h: int
    k: int
    s: int


@dataclass(frozen=True)
class Trajectory:
    """Iterates from `start` up to and including the first 1, or until the cap."""

    start: int
    values: tuple[int, ...]
    terminated: bool

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def status(self) -> str:
        return TERMINATED if self.terminated else CAP_EXHAUSTED

    @property
    def steps(self) -> int:
        return len(self.values) - 1

    @property
    def peak(self) -> int:
        return max(self.values)


@dataclass(frozen=True)
class NetChangeReport:
    delta_even: int
    delta_odd: int
    delta_all: int
    sum_k: int
    sum_hs: int


def step(h: int) -> int:
    """h/2 for even h, (3h+1)/2 for odd h."""
    _require_natural(h)
    if h & 1:
        return (3 * h + 1) >> 1
    return h >> 1


def step_closed_form(h: int) -> int:
    """Single-formula version of `step`: ((2s+1)(2k+s)+s)/2 with h = 2k+s."""
    _require_natural(h)
    k, s = divmod(h, 2)
    return ((2 * s + 1) * (2 * k + s) + s) // 2


def decompose_parity(h: int) -> StepDecomposition:
    _require_natural(h)
    k, s = divmod(h, 2)
    return StepDecomposition(h=h, k=k, s=s)


def run_trajectory(h1: int, step_cap: int = DEFAULT_STEP_CAP) -> Trajectory:
    """Iterate `step` from h1 until the first 1 (inclusive).

    `step_cap` bounds the number of values emitted. Hitting it is reported via
    ``terminated=False`` rather than an exception.
    """
    _require_natural(h1, "h1")
    if step_cap < 1:
        raise ValueError(f"step_cap must be >= 1, got {step_cap}")
    values = [h1]
    h = h1
    append = values.append
    while h != 1 and len(values) < step_cap:
        h = (3 * h + 1) >> 1 if h & 1 else h >> 1
        append(h)
    return Trajectory(start=h1, values=tuple(values), terminated=(h == 1))


def trajectory_from_values(values: Sequence[int]) -> Trajectory:
    """Wrap an explicit value list (not checked against `step`)."""
    vals = tuple(values)
    if not vals:
        raise ValueError("a trajectory needs at least one value")
    return Trajectory(start=vals[0], values=vals, terminated=vals[-1] == 1 and 1 not in vals[:-1])


def _values(traj: Trajectory | Iterable[int]) -> tuple[int, ...]:
    return traj.values if isinstance(traj, Trajectory) else tuple(traj)


def net_change(traj: Trajectory | Iterable[int]) -> NetChangeReport:
    """Sum the per-step changes over every value except the last."""
    vals = _values(traj)
    if not vals:
        raise ValueError("empty trajectory")
    delta_even = delta_odd = sum_k = sum_hs = 0
    for h in vals[:-1]:
        k, s = divmod(h, 2)
        sum_k += k
        if s:
            delta_odd += k + 1
            sum_hs += h
        else:
            delta_even -= k
    return NetChangeReport(
        delta_even=delta_even,
        delta_odd=delta_odd,
        delta_all=delta_even + delta_odd,
        sum_k=sum_k,
        sum_hs=sum_hs,
    )


def check_telescoping(traj: Trajectory | Iterable[int]) -> tuple[bool, int]:
    """delta_all must equal last - first. Returns (holds, residual)."""
    vals = _values(traj)
    report = net_change(vals)
    residual = report.delta_all - (vals[-1] - vals[0])
    return residual == 0, residual


def check_convergence_identity(traj: Trajectory) -> tuple[bool, int]:
    """h1 - 1 = sum_k - sum_hs on a terminated trajectory. Returns (holds, residual)."""
    if not traj.terminated:
        raise ValueError(f"trajectory from {traj.start} did not reach 1")
    report = net_change(traj)
    residual = (traj.start - 1) - (report.sum_k - report.sum_hs)
    return residual == 0, residual
