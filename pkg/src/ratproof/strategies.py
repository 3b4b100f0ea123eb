"""Strategy-profile enumeration, optimal profiles and utility gaps."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .core import (
    DEFAULT_CAP,
    Input,
    ProtocolSpec,
    StrategyProfile,
    all_tapes,
    expected_payment,
    explore,
    slots,
)
from .errors import InvalidRIP, StrategyCapExceeded


@dataclass(frozen=True)
class Caps:
    profiles: int = DEFAULT_CAP
    tapes: int = DEFAULT_CAP


def reachable_histories(spec: ProtocolSpec, x: Input, caps: Caps = Caps()) -> dict:
    """Histories each (prover, round) slot can see under some profile and tape."""
    layout = slots(spec, x)
    if "V" not in spec.round_kinds:
        return {(i, j): [()] for i, j, _ in layout}
    seen: dict = {(i, j): set() for i, j, _ in layout}
    for _, histories, _, _ in explore(spec, x, caps.profiles):
        for key, history in histories.items():
            seen[key].add(history)
    return {key: sorted(hs) for key, hs in seen.items()}


def profile_count(spec: ProtocolSpec, x: Input, caps: Caps = Caps()) -> int:
    histories = reachable_histories(spec, x, caps)
    count = 1
    for i, j, length in slots(spec, x):
        count *= (2**length) ** len(histories[(i, j)])
    return count


def enumerate_profiles(
    spec: ProtocolSpec, x: Input, caps: Caps = Caps()
) -> Iterator[StrategyProfile]:
    """Every deterministic profile over reachable histories, exactly once.

    Order is lexicographic over the table flattened by (prover, round,
    history); the first key is the most significant.
    """
    histories = reachable_histories(spec, x, caps)
    keys = []
    spaces = []
    for i, j, length in sorted(slots(spec, x)):
        messages = list(all_tapes(length))
        for h in histories[(i, j)]:
            keys.append((i, j, h))
            spaces.append(messages)
    count = 1
    for space in spaces:
        count *= len(space)
    if count > caps.profiles:
        raise StrategyCapExceeded(count, caps.profiles)
    for combo in itertools.product(*spaces):
        yield StrategyProfile(dict(zip(keys, combo)))


def answer_bit(profile: StrategyProfile) -> int:
    return profile.message(0, 0, ())[0]


@dataclass
class PaymentReport:
    """Expected payment of every enumerated profile on one input.

    ``utility_gap`` is ``None`` when no profile carries the opposite answer
    bit.  Only deterministic profiles are enumerated.
    """

    protocol: str
    input: str
    profiles: list[StrategyProfile] = field(repr=False)
    payments: list[Fraction] = field(repr=False)
    answer_bits: list[int] = field(repr=False)
    tapes: int

    def __post_init__(self):
        self.optimum = max(self.payments)
        self.argmax = [k for k, u in enumerate(self.payments) if u == self.optimum]
        bits = {self.answer_bits[k] for k in self.argmax}
        self.invalid = len(bits) > 1
        self.answer_bit = None if self.invalid else bits.pop()
        self.best_opposing = None
        self.utility_gap = None
        if not self.invalid:
            opposing = [
                u for u, b in zip(self.payments, self.answer_bits) if b != self.answer_bit
            ]
            if opposing:
                self.best_opposing = max(opposing)
                self.utility_gap = self.optimum - self.best_opposing

    @property
    def profile_count(self) -> int:
        return len(self.payments)

    def argmax_profiles(self) -> list[StrategyProfile]:
        return [self.profiles[k] for k in self.argmax]

    def distribution(self) -> dict[int, Counter]:
        """payment -> count, split by answer bit."""
        out: dict[int, Counter] = {0: Counter(), 1: Counter()}
        for u, b in zip(self.payments, self.answer_bits):
            out[b][u] += 1
        return out

    def summary(self) -> dict:
        return {
            "protocol": self.protocol,
            "input": self.input,
            "profiles": self.profile_count,
            "tapes": self.tapes,
            "optimum": self.optimum,
            "argmax_count": len(self.argmax),
            "answer_bit": self.answer_bit,
            "invalid_rip": self.invalid,
            "best_opposing": self.best_opposing,
            "utility_gap": self.utility_gap,
            "strategy_class": "deterministic",
        }


@lru_cache(maxsize=512)
def _report(spec: ProtocolSpec, x: Input, caps: Caps) -> PaymentReport:
    profiles = list(enumerate_profiles(spec, x, caps))
    # per-profile SUM over tapes, then MAX over profiles (in PaymentReport)
    payments = [expected_payment(spec, x, s, caps.tapes) for s in profiles]
    bits = [answer_bit(s) for s in profiles]
    return PaymentReport(
        spec.name, str(x), profiles, payments, bits, 2 ** spec.budget(x).randomness
    )


def optimal_profiles(spec: ProtocolSpec, x: Input, caps: Caps = Caps()) -> PaymentReport:
    return _report(spec, x, caps)


def _valid(spec, x, caps) -> PaymentReport:
    report = optimal_profiles(spec, x, caps)
    if report.invalid:
        raise InvalidRIP(
            f"{spec.name} on {x}: optimal profiles (u*={report.optimum}) disagree on the answer bit"
        )
    return report


def rational_answer(spec: ProtocolSpec, x: Input, caps: Caps = Caps()) -> int:
    return _valid(spec, x, caps).answer_bit


def utility_gap(spec: ProtocolSpec, x: Input, caps: Caps = Caps()) -> Fraction | None:
    return _valid(spec, x, caps).utility_gap


@dataclass(frozen=True)
class GapCheck:
    gamma: Fraction
    gaps: dict
    holds: bool


def has_gamma_gap(
    spec: ProtocolSpec, inputs: Iterable[Input], gamma, caps: Caps = Caps()
) -> GapCheck:
    """True iff every input has gap > 1/gamma (strictly) or no opposing profile."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    gaps = {str(x): utility_gap(spec, x, caps) for x in inputs}
    holds = all(g is None or g > 1 / gamma for g in gaps.values())
    return GapCheck(gamma, gaps, holds)
