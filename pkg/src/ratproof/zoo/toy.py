"""Two-bit claim protocol scored with a quadratic (Brier) rule."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable

from ..core import Bits, Budget, Input, ProtocolSpec

# reported probability that x is in L, indexed by (claim, confidence)
REPORT = {
    (1, 1): Fraction(1),
    (1, 0): Fraction(3, 4),
    (0, 0): Fraction(1, 4),
    (0, 1): Fraction(0),
}


def majority(bits: Bits) -> bool:
    return 2 * sum(bits) > len(bits)


def forced_value(language: Callable[[Bits], bool], n: int, known: dict) -> bool | None:
    """Membership if every completion of the probed positions agrees, else None."""
    free = [k for k in range(n) if k not in known]
    values = set()
    for fill in itertools.product((0, 1), repeat=len(free)):
        word = dict(known)
        word.update(zip(free, fill))
        values.add(bool(language(tuple(word[k] for k in range(n)))))
        if len(values) > 1:
            return None
    return values.pop()


class ToyVerifier:
    def __init__(self, language, n):
        self.language = language
        self.n = n

    def send(self, view, rnd):
        raise AssertionError("single prover round")

    def pay(self, view):
        backwards = view.tape.take(1)[0]
        if backwards:
            confidence, claim = view.read(0, 0, 1), view.read(0, 0, 0)
        else:
            claim, confidence = view.read(0, 0, 0), view.read(0, 0, 1)
        order = range(self.n - 1, -1, -1) if backwards else range(self.n)
        known: dict = {}
        outcome = forced_value(self.language, self.n, known)
        for pos in order:
            if outcome is not None:
                break
            known[pos] = view.x.bits[pos]
            outcome = forced_value(self.language, self.n, known)
        view.state["input_probes"] = tuple(known)
        report = REPORT[(claim, confidence)]
        return 1 - (int(outcome) - report) ** 2


def build_toy_constant_comm(
    language: Callable[[Bits], bool] = majority, n: int = 3, name: str = "majority"
) -> ProtocolSpec:
    """Prover sends (claim, confidence); one coin picks the probe direction.

    The verifier reads the two transcript bits in coin-dependent order, then
    probes input positions in that direction until membership is forced, and
    pays 1 - (L(x) - p)^2 for the reported probability p.
    """

    def budget(x: Input) -> Budget:
        if x.n != n:
            raise ValueError(f"toy protocol expects {n}-bit inputs, got {x.n}")
        return Budget(2, 2, 1, ((2,),))

    support = frozenset(1 - (o - p) ** 2 for o in (0, 1) for p in REPORT.values())
    return ProtocolSpec(
        name=f"toy[{name},{n}]",
        provers=1,
        round_kinds=("P",),
        budget=budget,
        verifier=ToyVerifier(language, n),
        normalized=True,
        params={"language": name, "n": n, "scoring": "1-(L-p)^2"},
        payment_support=support,
    )
