"""Classical one-round proof systems used as inner blackboxes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from ..core import Bits, Input, all_tapes, bits_to_int
from ..errors import ProtocolError


@dataclass(frozen=True)
class ClassicalProofSystem:
    """One-round accept/reject proof system with declared (c0, s0).

    ``accepts(x, coins, m)`` is the verifier; ``coins`` has
    ``randomness(x)`` bits and ``m`` has ``message_length(x)`` bits.
    """

    name: str
    member: Callable[[Input], bool]
    message_length: Callable[[Input], int]
    randomness: Callable[[Input], int]
    accepts: Callable[[Input, Bits, Bits], bool]
    completeness: Fraction
    soundness: Fraction

    def __post_init__(self):
        if not 0 <= self.soundness < self.completeness <= 1:
            raise ProtocolError(
                f"{self.name}: need 0 <= s0 < c0 <= 1, got ({self.soundness}, {self.completeness})"
            )

    def acceptance_probability(self, x: Input, m: Bits) -> Fraction:
        width = self.randomness(x)
        hits = sum(bool(self.accepts(x, coins, m)) for coins in all_tapes(width))
        return Fraction(hits, 2**width)

    def best_message(self, x: Input) -> tuple[Bits, Fraction]:
        """Lexicographically first message with maximum acceptance probability."""
        best, best_p = None, Fraction(-1)
        for m in all_tapes(self.message_length(x)):
            p = self.acceptance_probability(x, m)
            if p > best_p:
                best, best_p = m, p
        return best, best_p

    def check(self, inputs: Iterable[Input]) -> list[str]:
        """Verify completeness and soundness by enumeration; return failures."""
        problems = []
        for x in inputs:
            _, p = self.best_message(x)
            if self.member(x) and p < self.completeness:
                problems.append(f"{x}: member, best acceptance {p} < c0={self.completeness}")
            if not self.member(x) and p > self.soundness:
                problems.append(f"{x}: nonmember, acceptance {p} > s0={self.soundness}")
        return problems


def _num_vars(x: Input) -> int:
    return x.payload.num_vars


def perfect_sat_checker() -> ClassicalProofSystem:
    """Certificate = assignment; accept iff it satisfies the formula."""
    return ClassicalProofSystem(
        name="sat-perfect",
        member=lambda x: x.payload.is_satisfiable(),
        message_length=_num_vars,
        randomness=lambda x: 0,
        accepts=lambda x, coins, m: x.payload.evaluate(m),
        completeness=Fraction(1),
        soundness=Fraction(0),
    )


def noisy_sat_checker(noise_bits: int = 2) -> ClassicalProofSystem:
    """Accepts satisfying assignments always and any other certificate when
    the ``noise_bits`` coins, read as an integer, fall below 2**noise_bits // 3.

    That false-accept rate is the largest multiple of 2**-noise_bits not above
    the declared soundness 1/3.
    """
    if noise_bits < 2:
        raise ValueError("need at least 2 noise bits for a nonzero false-accept rate")
    threshold = 2**noise_bits // 3

    def accepts(x, coins, m):
        return x.payload.evaluate(m) or bits_to_int(coins) < threshold

    return ClassicalProofSystem(
        name=f"sat-noisy{noise_bits}",
        member=lambda x: x.payload.is_satisfiable(),
        message_length=_num_vars,
        randomness=lambda x: noise_bits,
        accepts=accepts,
        completeness=Fraction(1),
        soundness=Fraction(1, 3),
    )
