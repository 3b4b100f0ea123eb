"""Rational proof for a machine making gamma nonadaptive NP queries."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from ..core import Bits, Budget, Input, ProtocolSpec, StrategyProfile
from .checkers import ClassicalProofSystem
from .np import honest_np_message, np_score


@dataclass(frozen=True)
class OracleMachine:
    """Generates exactly ``gamma`` queries from x alone, then combines answers."""

    name: str
    gamma: int
    queries: Callable[[Input], Sequence[Input]]
    finish: Callable[[Input, Sequence[int]], int]

    def __post_init__(self):
        if self.gamma < 1:
            raise ValueError("gamma must be at least 1")

    def checked_queries(self, x: Input) -> tuple[Input, ...]:
        qs = tuple(self.queries(x))
        if len(qs) != self.gamma:
            raise ValueError(f"{self.name}: {len(qs)} queries on {x}, expected {self.gamma}")
        return qs

    def decide(self, x: Input, oracle: Callable[[Input], bool]) -> int:
        # all queries are fixed before any answer is looked at
        qs = self.checked_queries(x)
        return self.finish(x, [int(oracle(q)) for q in qs])


def parity_machine(gamma: int) -> OracleMachine:
    """Accepts a tuple of gamma formulas iff an odd number are satisfiable."""

    def queries(x):
        return tuple(f.as_input(name=f"{x}.q{k}") for k, f in enumerate(x.payload))

    return OracleMachine(
        name=f"parity{gamma}",
        gamma=gamma,
        queries=queries,
        finish=lambda x, answers: sum(answers) % 2,
    )


class OracleQueryVerifier:
    def __init__(self, machine: OracleMachine, cps: ClassicalProofSystem):
        self.machine = machine
        self.cps = cps

    def send(self, view, rnd):
        raise AssertionError("single prover round")

    def pay(self, view):
        claim = view.read(0, 0, 0)
        offset = 1
        total = Fraction(0)
        answers = []
        for q in self.machine.checked_queries(view.x):
            length = self.cps.message_length(q)
            start = offset

            def certificate(start=start, length=length):
                return tuple(view.read(0, 0, start + 1 + k) for k in range(length))

            c_i = view.read(0, 0, start)
            total += np_score(self.cps, q, c_i, certificate, view.tape)
            answers.append(c_i)
            offset += 1 + length
        if claim != self.machine.finish(view.x, answers):
            return Fraction(-1)
        return total / self.machine.gamma


def build_oracle_query_rip(machine: OracleMachine, cps: ClassicalProofSystem) -> ProtocolSpec:
    """Prover sends c, (c_1, m_1), ..., (c_gamma, m_gamma) in one message.

    Each pair is scored by the NP payment rule and its claim bit is used as
    the oracle answer.  Pays -1 if c differs from the machine's output,
    otherwise the mean inner payment.
    """

    @lru_cache(maxsize=None)
    def budget(x: Input) -> Budget:
        qs = machine.checked_queries(x)
        size = 1 + sum(1 + cps.message_length(q) for q in qs)
        coins = sum(cps.randomness(q) for q in qs)
        return Budget(size, size, coins, ((size,),))

    g = machine.gamma
    support = {Fraction(-1)} | {Fraction(j, 2 * g) for j in range(2 * g + 1)}
    return ProtocolSpec(
        name=f"oracle-rip[{machine.name},{cps.name}]",
        provers=1,
        round_kinds=("P",),
        budget=budget,
        verifier=OracleQueryVerifier(machine, cps),
        normalized=False,
        params={"gamma": g, "machine": machine.name, "checker": cps.name},
        payment_support=frozenset(support),
    )


def honest_oracle_message(
    machine: OracleMachine, cps: ClassicalProofSystem, x: Input
) -> Bits:
    parts: list[int] = [machine.decide(x, cps.member)]
    for q in machine.checked_queries(x):
        parts.extend(honest_np_message(cps, q))
    return tuple(parts)


def honest_oracle_profile(
    machine: OracleMachine, cps: ClassicalProofSystem, x: Input
) -> StrategyProfile:
    return StrategyProfile(
        {(0, 0, ()): honest_oracle_message(machine, cps, x)}, label="honest"
    )
