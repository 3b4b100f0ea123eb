"""Single-round rational proof for an NP language around a classical checker."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from ..core import Bits, Budget, Input, ProtocolSpec, StrategyProfile, Tape
from .checkers import ClassicalProofSystem

HALF = Fraction(1, 2)


def np_score(
    cps: ClassicalProofSystem,
    x: Input,
    claim: int,
    read_certificate: Callable[[], Bits],
    tape: Tape,
    zero_claim_pays: Fraction = HALF,
) -> Fraction:
    """1/2 for a "no" claim; otherwise 1 or 0 as the checker accepts.

    The checker's coins are drawn whatever the claim, so every call consumes
    the same slice of tape.
    """
    coins = tape.take(cps.randomness(x))
    if claim == 0:
        return zero_claim_pays
    return Fraction(1) if cps.accepts(x, coins, read_certificate()) else Fraction(0)


class NPVerifier:
    def __init__(self, cps: ClassicalProofSystem, zero_claim_pays: Fraction = HALF):
        self.cps = cps
        self.zero_claim_pays = zero_claim_pays

    def send(self, view, rnd):
        raise AssertionError("single prover round")

    def pay(self, view):
        length = self.cps.message_length(view.x)
        claim = view.read(0, 0, 0)

        def certificate():
            return tuple(view.read(0, 0, 1 + k) for k in range(length))

        return np_score(
            self.cps, view.x, claim, certificate, view.tape, self.zero_claim_pays
        )


def _budget(cps):
    def budget(x: Input) -> Budget:
        size = 1 + cps.message_length(x)
        return Budget(size, size, cps.randomness(x), ((size,),))

    return budget


def build_np_rip(cps: ClassicalProofSystem) -> ProtocolSpec:
    """One prover sends c || m.  c = 0 pays 1/2; otherwise the checker decides 1 or 0."""
    return ProtocolSpec(
        name=f"np-rip[{cps.name}]",
        provers=1,
        round_kinds=("P",),
        budget=_budget(cps),
        verifier=NPVerifier(cps),
        normalized=True,
        params={"checker": cps.name, "c0": cps.completeness, "s0": cps.soundness},
        payment_support=frozenset({Fraction(0), HALF, Fraction(1)}),
    )


def build_certificate_mip(cps: ClassicalProofSystem) -> ProtocolSpec:
    """Zero-one protocol: pay 1 iff c = 1 and the checker accepts m.

    This is the classical proof system itself viewed as a payment protocol;
    it is not a rational proof for nonmembers (every profile earns 0).
    """
    return ProtocolSpec(
        name=f"certificate-mip[{cps.name}]",
        provers=1,
        round_kinds=("P",),
        budget=_budget(cps),
        verifier=NPVerifier(cps, zero_claim_pays=Fraction(0)),
        normalized=True,
        params={"checker": cps.name, "c0": cps.completeness, "s0": cps.soundness},
        payment_support=frozenset({Fraction(0), Fraction(1)}),
    )


def honest_np_message(cps: ClassicalProofSystem, x: Input) -> Bits:
    if cps.member(x):
        m, _ = cps.best_message(x)
        return (1,) + m
    return (0,) * (1 + cps.message_length(x))


def honest_np_profile(cps: ClassicalProofSystem, x: Input) -> StrategyProfile:
    return StrategyProfile({(0, 0, ()): honest_np_message(cps, x)}, label="honest")
