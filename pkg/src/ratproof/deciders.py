"""Interval-splitting oracle machines that recover the rational answer bit.

The machine cuts [0, 1] into N intervals, asks for each interval whether
some profile's expected payment lands there (flavor 0) and whether one with
claim bit 1 does (flavor 1), then accepts iff the flavor-1 query of the
highest non-empty interval came back 1.  The oracle is brute force.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Input, ProtocolSpec
from .strategies import Caps, PaymentReport, optimal_profiles


@dataclass(frozen=True)
class IntervalQuery:
    index: int  # 1..N
    flavor: int  # 0: any profile, 1: profile with claim bit 1


def interval_bounds(i: int, N: int) -> tuple[Fraction, Fraction, bool]:
    """(low, high, high_closed) of the i-th interval; only the last is closed."""
    if not 1 <= i <= N:
        raise ValueError(f"interval {i} outside 1..{N}")
    return Fraction(i - 1, N), Fraction(i, N), i == N


def in_interval(u: Fraction, i: int, N: int) -> bool:
    low, high, closed = interval_bounds(i, N)
    return low <= u <= high if closed else low <= u < high


def interval_of(u: Fraction, N: int) -> int | None:
    """Index of the interval holding u, or None when u is outside [0, 1]."""
    if not 0 <= u <= 1:
        return None
    return min(int(u * N) + 1, N)


def strategy_oracle(
    spec: ProtocolSpec,
    x: Input,
    q: IntervalQuery,
    N: int,
    caps: Caps = Caps(),
    report: PaymentReport | None = None,
) -> int:
    report = report or optimal_profiles(spec, x, caps)
    for u, bit in zip(report.payments, report.answer_bits):
        if in_interval(u, q.index, N) and (q.flavor == 0 or bit == 1):
            return 1
    return 0


@dataclass
class DeciderRun:
    N: int
    queries: list
    answers: dict
    top: int | None
    accept: int
    homogeneous: bool


def interval_decider(
    spec: ProtocolSpec, x: Input, N: int, caps: Caps = Caps(), trace: bool = False
):
    """Accept bit of the interval machine; with ``trace`` the full run record."""
    if N < 1:
        raise ValueError("N must be positive")
    report = optimal_profiles(spec, x, caps)
    queries = [IntervalQuery(i, f) for i in range(1, N + 1) for f in (0, 1)]
    # nonadaptive: every query is fixed above before any answer is computed
    answers = {q: strategy_oracle(spec, x, q, N, caps, report) for q in queries}
    nonempty = [i for i in range(1, N + 1) if answers[IntervalQuery(i, 0)]]
    top = max(nonempty) if nonempty else None
    accept = int(top is not None and answers[IntervalQuery(top, 1)] == 1)
    bits = {
        b
        for u, b in zip(report.payments, report.answer_bits)
        if top is not None and in_interval(u, top, N)
    }
    run = DeciderRun(N, queries, answers, top, accept, len(bits) <= 1)
    return run if trace else accept
