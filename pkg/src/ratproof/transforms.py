"""From rational proofs to accept/reject proofs, and threshold amplification."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, NamedTuple

import mpmath

from .core import (
    Budget,
    Input,
    ProtocolSpec,
    StrategyProfile,
    all_tapes,
    execute,
    tape_count,
)
from .errors import GapViolated, NonBinaryPayment, NotNormalized
from .strategies import Caps, enumerate_profiles, optimal_profiles

ZERO_ONE = frozenset({Fraction(0), Fraction(1)})


def ceil_log2(value: Fraction) -> int:
    """Smallest integer e with 2**e >= value (value > 0)."""
    value = Fraction(value)
    if value <= 0:
        raise ValueError("need a positive value")
    e = math.ceil(math.log2(value))
    while Fraction(2) ** e < value:
        e += 1
    while Fraction(2) ** (e - 1) >= value:
        e -= 1
    return e


class _RoundingVerifier:
    def __init__(self, base: ProtocolSpec, extra_bits: int):
        self.base = base
        self.extra_bits = extra_bits

    def send(self, view, rnd):
        return self.base.verifier.send(view, rnd)

    def pay(self, view):
        raw = Fraction(self.base.verifier.pay(view))
        # the extra coins sit right after the base tape, whatever the base used
        view.tape.pos = self.base.budget(view.x).randomness
        draw = view.tape.take_int(self.extra_bits) + 1
        grid = 2**self.extra_bits
        return Fraction(1) if draw <= math.ceil(grid * raw) else Fraction(0)


def round_payments_zero_one(spec: ProtocolSpec, gamma) -> ProtocolSpec:
    """Replace payment R in [0, 1] by a coin paying 1 with probability ceil(G R)/G.

    G = 2**(1 + ceil(log2 gamma)) so every expected payment rises by at most
    1/G <= 1/(2 gamma).  The extra coins are appended to the tape and read as
    an integer r' in {1..G}; the protocol pays 1 iff r' <= ceil(G R).
    """
    if not spec.normalized:
        raise NotNormalized(f"{spec.name}: payments must lie in [0, 1] before rounding")
    gamma = Fraction(gamma)
    extra = max(0, 1 + ceil_log2(gamma))

    def budget(x: Input) -> Budget:
        b = spec.budget(x)
        return replace(b, randomness=b.randomness + extra)

    params = dict(spec.params)
    params["zero_one_rounding"] = {"gamma": gamma, "G": 2**extra, "extra_bits": extra}
    return spec.derive(
        name=f"zero-one({spec.name},gamma={gamma})",
        budget=budget,
        verifier=_RoundingVerifier(spec, extra),
        normalized=True,
        params=params,
        payment_support=ZERO_ONE,
    )


@dataclass(frozen=True)
class AcceptRejectProtocol:
    """Accept iff the underlying zero-one protocol pays 1; the claim bit is ignored."""

    spec: ProtocolSpec
    completeness: Fraction | None = None
    soundness: Fraction | None = None

    def accepts(self, x: Input, r, s: StrategyProfile) -> bool:
        _, pay = execute(self.spec, x, r, s)
        if pay not in ZERO_ONE:
            raise NonBinaryPayment(f"{self.spec.name}: payment {pay} on {x}")
        return pay == 1

    def acceptance_probability(self, x: Input, s: StrategyProfile, caps: Caps = Caps()) -> Fraction:
        total = tape_count(self.spec, x, caps.tapes)
        hits = sum(
            self.accepts(x, r, s) for r in all_tapes(self.spec.budget(x).randomness)
        )
        return Fraction(hits, total)

    def with_parameters(self, c, s) -> "AcceptRejectProtocol":
        return replace(self, completeness=Fraction(c), soundness=Fraction(s))


def to_accept_reject(
    spec: ProtocolSpec, inputs: Iterable[Input] = (), caps: Caps = Caps()
) -> AcceptRejectProtocol:
    """Wrap a zero-one protocol.

    A declared payment support must lie in {0, 1}.  Without a declaration the
    payments on ``inputs`` are enumerated over every profile and tape.
    """
    if spec.payment_support is not None:
        extra = set(spec.payment_support) - ZERO_ONE
        if extra:
            raise NonBinaryPayment(f"{spec.name}: declared payments {sorted(extra)}")
    else:
        for x in inputs:
            for s in enumerate_profiles(spec, x, caps):
                for r in all_tapes(spec.budget(x).randomness):
                    pay = execute(spec, x, r, s)[1]
                    if pay not in ZERO_ONE:
                        raise NonBinaryPayment(f"{spec.name}: payment {pay} on {x}")
    return AcceptRejectProtocol(spec)


@dataclass(frozen=True)
class GapCondition:
    gamma: Fraction
    min_member: Fraction | None
    max_nonmember: Fraction | None
    holds: bool
    vacuous: bool


def check_gap_condition(
    spec: ProtocolSpec,
    members: Iterable[Input],
    nonmembers: Iterable[Input],
    gamma,
    caps: Caps = Caps(),
) -> GapCondition:
    """min over members of u* > max over nonmembers of u* + 1/gamma, strictly."""
    gamma = Fraction(gamma)
    ins = [optimal_profiles(spec, x, caps).optimum for x in members]
    outs = [optimal_profiles(spec, x, caps).optimum for x in nonmembers]
    lo = min(ins) if ins else None
    hi = max(outs) if outs else None
    if lo is None or hi is None:
        return GapCondition(gamma, lo, hi, True, True)
    return GapCondition(gamma, lo, hi, lo > hi + 1 / gamma, False)


class CompletenessSoundness(NamedTuple):
    c: Fraction
    s: Fraction


def extract_completeness_soundness(
    arp: AcceptRejectProtocol,
    members: Iterable[Input],
    nonmembers: Iterable[Input],
    gamma=None,
    caps: Caps = Caps(),
) -> CompletenessSoundness:
    """c = min over members of the best acceptance probability, s = max over
    nonmembers of the best acceptance probability (the best profile dominates
    every other).

    With ``gamma`` (the gap of the protocol before rounding) demands
    c > s + 1/(2 gamma); otherwise demands c > s.
    """
    members, nonmembers = list(members), list(nonmembers)
    if not members or not nonmembers:
        raise ValueError("need at least one member and one nonmember")
    c = min(optimal_profiles(arp.spec, x, caps).optimum for x in members)
    s = max(optimal_profiles(arp.spec, x, caps).optimum for x in nonmembers)
    margin = Fraction(0) if gamma is None else 1 / (2 * Fraction(gamma))
    if not c > s + margin:
        raise GapViolated(f"completeness {c} does not exceed soundness {s} + {margin}")
    return CompletenessSoundness(c, s)


def threshold_acceptance_prob(p, rho: int, tau) -> Fraction:
    """Pr(Binomial(rho, p) > tau), exactly."""
    p, tau = Fraction(p), Fraction(tau)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    first = math.floor(tau) + 1  # smallest count strictly above tau
    if first <= 0:
        return Fraction(1)
    if first > rho:
        return Fraction(0)
    if p == 0:
        return Fraction(0)
    if p == 1:
        return Fraction(1)
    a, b = p.numerator, p.denominator
    miss = b - a
    # sum the shorter side with integer terms comb(rho, k) a^k miss^(rho-k)
    if first > rho - first:
        ks = range(first, rho + 1)
        upper = True
    else:
        ks = range(0, first)
        upper = False
    k0 = ks[0]
    term = math.comb(rho, k0) * a**k0 * miss ** (rho - k0)
    total = 0
    for k in ks:
        total += term
        if k < rho:
            term = term * (rho - k) * a // ((k + 1) * miss)
    tail = Fraction(total, b**rho)
    return tail if upper else 1 - tail


def to_mpf(value: Fraction, digits: int = 60):
    with mpmath.workdps(digits):
        return mpmath.mpf(value.numerator) / value.denominator


@dataclass(frozen=True)
class AmplifiedProtocol:
    """Repeat ``base`` rho times with fresh coins; accept iff more than tau accept."""

    base: AcceptRejectProtocol
    rho: int
    tau: Fraction
    c: Fraction
    s: Fraction
    gamma_prime: Fraction
    n: int

    def completeness_bound(self) -> Fraction:
        return threshold_acceptance_prob(self.c, self.rho, self.tau)

    def soundness_bound(self) -> Fraction:
        return threshold_acceptance_prob(self.s, self.rho, self.tau)

    def certificate(self) -> dict:
        comp, sound = self.completeness_bound(), self.soundness_bound()
        target = Fraction(1, self.n)
        return {
            "rho": self.rho,
            "tau": self.tau,
            "c": self.c,
            "s": self.s,
            "gamma_prime": self.gamma_prime,
            "n": self.n,
            "completeness_tail": comp,
            "soundness_tail": sound,
            "completeness_ok": comp >= 1 - target,
            "soundness_ok": sound <= target,
        }

    def _check_small(self, limit: int):
        if self.rho > limit:
            raise ValueError(f"rho={self.rho} too large for execution (limit {limit})")

    def executed_acceptance(self, x: Input, s: StrategyProfile, limit: int = 64) -> Fraction:
        """Acceptance probability obtained by executing every repetition on
        every tape and convolving the per-repetition outcomes."""
        self._check_small(limit)
        width = self.base.spec.budget(x).randomness
        dist = [Fraction(1)]
        for _ in range(self.rho):
            outcomes = [self.base.accepts(x, r, s) for r in all_tapes(width)]
            p = Fraction(sum(outcomes), len(outcomes))
            nxt = [Fraction(0)] * (len(dist) + 1)
            for k, mass in enumerate(dist):
                nxt[k] += mass * (1 - p)
                nxt[k + 1] += mass * p
            dist = nxt
        return sum(mass for k, mass in enumerate(dist) if k > self.tau)

    def run(self, x: Input, s: StrategyProfile, rng: random.Random, limit: int = 64) -> bool:
        """One sampled execution of the amplified protocol."""
        self._check_small(limit)
        width = self.base.spec.budget(x).randomness
        accepted = 0
        for _ in range(self.rho):
            r = tuple(rng.getrandbits(1) for _ in range(width))
            accepted += self.base.accepts(x, r, s)
        return accepted > self.tau


def repetition_count(c, gamma_prime, n: int, digits: int = 80) -> int:
    """ceil(96 ln(n) gamma'^2 / c), with ln evaluated to ``digits`` digits."""
    c, gamma_prime = Fraction(c), Fraction(gamma_prime)
    with mpmath.workdps(digits):
        value = 96 * mpmath.log(n) * to_mpf(gamma_prime**2, digits) / to_mpf(c, digits)
        rho = int(mpmath.ceil(value))
        if abs(value - mpmath.nint(value)) < mpmath.mpf(10) ** (-digits // 2):
            raise ArithmeticError("repetition count too close to an integer to round safely")
    return rho


def amplify(
    arp: AcceptRejectProtocol, c, gamma_prime, n: int, s=None, rho: int | None = None
) -> AmplifiedProtocol:
    """Threshold repetition driving completeness to >= 1 - 1/n and soundness to <= 1/n.

    ``rho`` overrides the repetition count (tau still follows it); the formula
    never goes below 67, so small executable instances need the override.
    """
    c, gamma_prime = Fraction(c), Fraction(gamma_prime)
    s = arp.soundness if s is None else Fraction(s)
    if s is None:
        raise ValueError("soundness unknown; pass s or extract it first")
    if gamma_prime <= 1:
        raise ValueError("gamma_prime must exceed 1")
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < c <= 1 or s < 0:
        raise ValueError("need 0 < c <= 1 and s >= 0")
    if not c > s + 1 / gamma_prime:
        raise GapViolated(f"c={c} is not above s={s} + 1/{gamma_prime}")
    if rho is None:
        rho = repetition_count(c, gamma_prime, n)
    elif rho < 1:
        raise ValueError("rho must be positive")
    tau = rho * c * (1 - 1 / (4 * gamma_prime))
    assert 0 < tau < rho
    return AmplifiedProtocol(arp, rho, tau, c, s, gamma_prime, n)
