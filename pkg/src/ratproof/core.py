"""Protocol descriptions, single-run execution and exact expected payments.

A protocol is a fixed sequence of rounds.  In a prover round ("P") every
prover sends one message to the verifier; in a verifier round ("V") the
verifier sends one message down each prover's channel.  The verifier is a
deterministic object that draws coins from an explicit tape, left to right,
and reads prover bits only through :class:`VerifierView`, which records the
order of first reads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Protocol, Sequence

from .errors import (
    BudgetExceeded,
    MalformedStrategy,
    ProtocolError,
    RandomnessCapExceeded,
    StrategyCapExceeded,
)

Bits = tuple[int, ...]
Position = tuple[int, int, int]  # (round, prover, bit), all 0-based
History = tuple[Bits, ...]

DEFAULT_CAP = 2**20


def as_bits(value) -> Bits:
    """Coerce "0101", [0, 1] or an existing tuple into a bit tuple."""
    if isinstance(value, str):
        value = [int(ch) for ch in value if not ch.isspace()]
    bits = tuple(int(b) for b in value)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"not a bit sequence: {value!r}")
    return bits


def bits_to_int(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def int_to_bits(value: int, width: int) -> Bits:
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


def bits_str(bits: Sequence[int]) -> str:
    return "".join(map(str, bits))


@dataclass(frozen=True)
class Input:
    """An instance x.  ``bits`` is its encoding; ``payload`` the decoded object
    protocols actually work with (a formula, a tuple of formulas, ...)."""

    bits: Bits
    payload: object = field(default=None, compare=False, hash=False)
    name: str = field(default="", compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "bits", as_bits(self.bits))
        if not self.bits:
            raise ValueError("input must have at least one bit")

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def from_bits(cls, bits, name: str = "") -> "Input":
        bits = as_bits(bits)
        return cls(bits, payload=bits, name=name or bits_str(bits))

    @classmethod
    def encode(cls, payload, text: str, name: str = "") -> "Input":
        """Wrap ``payload`` using the 8-bit encoding of its canonical ``text``."""
        bits = tuple(b for byte in text.encode() for b in int_to_bits(byte, 8))
        return cls(bits, payload=payload, name=name)

    def __str__(self):
        return self.name or bits_str(self.bits)


@dataclass(frozen=True)
class Budget:
    """Declared resources of a protocol on one input.

    ``prover_lengths[j][i]`` is the exact length of prover ``i``'s message in
    round ``j`` (always 0 in verifier rounds).
    """

    communication: int
    message: int
    randomness: int
    prover_lengths: tuple[tuple[int, ...], ...]


class Tape:
    """Random tape consumed left to right."""

    __slots__ = ("bits", "pos")

    def __init__(self, bits: Bits):
        self.bits = bits
        self.pos = 0

    def take(self, count: int) -> Bits:
        end = self.pos + count
        if end > len(self.bits):
            raise BudgetExceeded(
                f"verifier asked for {end} random bits; tape has {len(self.bits)}"
            )
        out = self.bits[self.pos:end]
        self.pos = end
        return out

    def take_int(self, count: int) -> int:
        return bits_to_int(self.take(count))


class VerifierView:
    """Everything a verifier may touch during one run.

    Prover bits are only reachable through :meth:`read`; each position enters
    ``access_trace`` the first time it is read.  ``state`` is scratch space
    for the verifier, private to this run.
    """

    def __init__(self, x: Input, tape: Tape, messages: list, kinds: Sequence[str]):
        self.x = x
        self.tape = tape
        self.state: dict = {}
        self.access_trace: list[Position] = []
        self._values: dict[Position, int] = {}
        self._messages = messages
        self._kinds = kinds

    @property
    def round(self) -> int:
        """Index of the round about to be produced (len of the transcript)."""
        return len(self._messages)

    @property
    def read_values(self) -> dict[Position, int]:
        """Position -> value for every bit read so far, in read order."""
        return dict(self._values)

    def message_length(self, rnd: int, prover: int) -> int:
        self._check_round(rnd)
        return len(self._messages[rnd][prover])

    def read(self, rnd: int, prover: int, bit: int) -> int:
        pos = (rnd, prover, bit)
        if pos in self._values:
            return self._values[pos]
        self._check_round(rnd)
        value = self._lookup(rnd, prover, bit)
        self._values[pos] = value
        self.access_trace.append(pos)
        return value

    def read_message(self, rnd: int, prover: int) -> Bits:
        return tuple(
            self.read(rnd, prover, k) for k in range(self.message_length(rnd, prover))
        )

    def sent(self, rnd: int, prover: int) -> Bits:
        """A message the verifier itself sent earlier (not a transcript read)."""
        if self._kinds[rnd] != "V" or rnd >= len(self._messages):
            raise ProtocolError(f"round {rnd} is not a past verifier round")
        return self._messages[rnd][prover]

    def _check_round(self, rnd: int):
        if rnd >= len(self._messages):
            raise ProtocolError(f"read of round {rnd} before it was produced")
        if self._kinds[rnd] != "P":
            raise ProtocolError(f"round {rnd} is a verifier round")

    def _lookup(self, rnd: int, prover: int, bit: int) -> int:
        msg = self._messages[rnd][prover]
        if bit >= len(msg):
            raise ProtocolError(f"bit {bit} outside message ({rnd}, {prover})")
        return msg[bit]


class Verifier(Protocol):
    def send(self, view: VerifierView, rnd: int) -> tuple[Bits, ...]: ...

    def pay(self, view: VerifierView) -> Fraction: ...


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """Executable (V, P) description.

    ``budget`` maps an input to its declared resources.  ``payment_support``
    optionally declares every payment the verifier can make.  Specs compare
    and hash by identity.
    """

    name: str
    provers: int
    round_kinds: tuple[str, ...]
    budget: Callable[[Input], Budget]
    verifier: Verifier
    normalized: bool = False
    params: Mapping[str, object] = field(default_factory=dict)
    payment_support: frozenset | None = None

    def __post_init__(self):
        if self.provers < 1:
            raise ProtocolError("need at least one prover")
        kinds = tuple(self.round_kinds)
        object.__setattr__(self, "round_kinds", kinds)
        if not kinds or any(k not in ("P", "V") for k in kinds):
            raise ProtocolError(f"bad round structure {kinds!r}")
        if kinds[0] != "P":
            raise ProtocolError("the answer bit must open the protocol")

    @property
    def k(self) -> int:
        return len(self.round_kinds)

    def derive(self, **changes) -> "ProtocolSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class Transcript:
    kinds: tuple[str, ...]
    rounds: tuple[tuple[Bits, ...], ...]
    access_trace: tuple[Position, ...]
    answer_bit: int
    coins_used: int = 0

    @property
    def total_bits(self) -> int:
        return sum(len(m) for msgs in self.rounds for m in msgs)

    def bit(self, pos: Position) -> int:
        rnd, prover, k = pos
        return self.rounds[rnd][prover][k]

    def effective(self) -> Bits:
        """Bits the verifier read, in read order."""
        return tuple(self.bit(p) for p in self.access_trace)


class StrategyProfile:
    """Deterministic joint strategy: (prover, round, history) -> message.

    ``table`` entries win; otherwise ``fallback`` (if given) is consulted.
    A history is the tuple of verifier messages the prover has received.
    """

    __slots__ = ("table", "fallback", "label")

    def __init__(
        self,
        table: Mapping[tuple[int, int, History], Bits] | None = None,
        fallback: Callable[[int, int, History], Sequence[int]] | None = None,
        label: str = "",
    ):
        self.table = dict(table or {})
        self.fallback = fallback
        self.label = label

    @classmethod
    def constant(cls, messages: Mapping[tuple[int, int], Sequence[int]], label=""):
        """Profile that ignores history: ``messages[(prover, round)]``."""
        fixed = {key: as_bits(v) for key, v in messages.items()}

        def fallback(prover, rnd, history):
            return fixed[(prover, rnd)]

        return cls(fallback=fallback, label=label)

    def message(self, prover: int, rnd: int, history: History) -> Bits:
        key = (prover, rnd, history)
        if key in self.table:
            return self.table[key]
        if self.fallback is not None:
            try:
                return as_bits(self.fallback(prover, rnd, history))
            except (KeyError, IndexError) as exc:
                raise MalformedStrategy(f"no message for {key}") from exc
        raise MalformedStrategy(f"no message for {key}")

    def _key(self):
        return tuple(sorted(self.table.items()))

    def __eq__(self, other):
        if not isinstance(other, StrategyProfile):
            return NotImplemented
        if self.fallback is not None or other.fallback is not None:
            return self is other
        return self.table == other.table

    def __hash__(self):
        if self.fallback is not None:
            return id(self)
        return hash(self._key())

    def __repr__(self):
        if self.label:
            return f"StrategyProfile({self.label!r})"
        entries = ", ".join(
            f"P{i}r{j}{list(map(bits_str, h))}->{bits_str(m)}"
            for (i, j, h), m in sorted(self.table.items())
        )
        return f"StrategyProfile({entries})"


def _check_payment(spec: ProtocolSpec, value) -> Fraction:
    if isinstance(value, float):
        raise ProtocolError(f"{spec.name}: floating-point payment {value!r}")
    pay = Fraction(value)
    low = 0 if spec.normalized else -1
    if not low <= pay <= 1:
        raise ProtocolError(f"{spec.name}: payment {pay} outside [{low}, 1]")
    return pay


def execute(
    spec: ProtocolSpec, x: Input, r: Sequence[int], s: StrategyProfile
) -> tuple[Transcript, Fraction]:
    """Run (V, P)(x, r, s) once and return the transcript and payment."""
    budget = spec.budget(x)
    r = tuple(r)
    if len(r) != budget.randomness:
        raise BudgetExceeded(
            f"tape has {len(r)} bits; protocol declares {budget.randomness}"
        )
    messages: list = []
    view = VerifierView(x, Tape(r), messages, spec.round_kinds)
    histories: list[list[Bits]] = [[] for _ in range(spec.provers)]
    total = 0
    for j, kind in enumerate(spec.round_kinds):
        if kind == "V":
            msgs = tuple(as_bits(m) for m in spec.verifier.send(view, j))
            if len(msgs) != spec.provers:
                raise ProtocolError(f"round {j}: verifier sent {len(msgs)} messages")
            for i, m in enumerate(msgs):
                histories[i].append(m)
        else:
            lengths = budget.prover_lengths[j]
            msgs = tuple(
                s.message(i, j, tuple(histories[i])) if lengths[i] else ()
                for i in range(spec.provers)
            )
            for i, m in enumerate(msgs):
                if len(m) != lengths[i]:
                    raise BudgetExceeded(
                        f"round {j}, prover {i}: {len(m)} bits, expected {lengths[i]}"
                    )
        for m in msgs:
            if len(m) > budget.message:
                raise BudgetExceeded(f"round {j}: message of {len(m)} bits > {budget.message}")
            total += len(m)
        if total > budget.communication:
            raise BudgetExceeded(f"communication {total} > {budget.communication}")
        messages.append(msgs)
    payment = _check_payment(spec, spec.verifier.pay(view))
    first = messages[0][0]
    if not first:
        raise ProtocolError("prover 1 sent no answer bit")
    transcript = Transcript(
        spec.round_kinds,
        tuple(messages),
        tuple(view.access_trace),
        first[0],
        view.tape.pos,
    )
    return transcript, payment


def all_tapes(length: int) -> Iterator[Bits]:
    return itertools.product((0, 1), repeat=length)


def tape_count(spec: ProtocolSpec, x: Input, cap: int = DEFAULT_CAP) -> int:
    count = 2 ** spec.budget(x).randomness
    if count > cap:
        raise RandomnessCapExceeded(count, cap)
    return count


def expected_payment(
    spec: ProtocolSpec, x: Input, s: StrategyProfile, cap: int = DEFAULT_CAP
) -> Fraction:
    """E_r[R(x, r, (V, P)(x, r, s))] over every tape, exactly."""
    count = tape_count(spec, x, cap)
    total = Fraction(0)
    for r in all_tapes(spec.budget(x).randomness):
        total += execute(spec, x, r, s)[1]
    return total / count


class _Affine:
    def __init__(self, base: Verifier, scale: Fraction, shift: Fraction):
        self.base = base
        self.scale = scale
        self.shift = shift

    def send(self, view, rnd):
        return self.base.send(view, rnd)

    def pay(self, view):
        return Fraction(self.base.pay(view)) * self.scale + self.shift


def normalize_payments(spec: ProtocolSpec) -> ProtocolSpec:
    """Map raw payments in [-1, 1] to (R + 1) / 2 in [0, 1].

    Already-normalized specs are returned unchanged.
    """
    if spec.normalized:
        return spec
    half = Fraction(1, 2)
    support = None
    if spec.payment_support is not None:
        support = frozenset(v * half + half for v in spec.payment_support)
    params = dict(spec.params)
    params["normalization"] = {"map": "(R+1)/2", "scale": half, "shift": half}
    return spec.derive(
        name=f"normalized({spec.name})",
        verifier=_Affine(spec.verifier, half, half),
        normalized=True,
        params=params,
        payment_support=support,
    )


def slots(spec: ProtocolSpec, x: Input) -> list[tuple[int, int, int]]:
    """(prover, round, length) of every non-empty prover message."""
    budget = spec.budget(x)
    return [
        (i, j, budget.prover_lengths[j][i])
        for j, kind in enumerate(spec.round_kinds)
        if kind == "P"
        for i in range(spec.provers)
        if budget.prover_lengths[j][i]
    ]


def explore(
    spec: ProtocolSpec, x: Input, cap: int = DEFAULT_CAP
) -> Iterator[tuple[Bits, dict, Transcript | None, Fraction | BudgetExceeded]]:
    """Every run the protocol can produce on ``x``.

    Provers choose each message freely (ignoring history), which reaches
    exactly the runs some deterministic profile reaches.  Yields
    ``(tape, histories, transcript, payment)``; ``histories`` maps
    (prover, round) to the history seen there.  Runs that break a budget
    yield the exception in place of the payment and ``None`` transcript.
    """
    budget = spec.budget(x)
    tapes = tape_count(spec, x, cap)
    layout = slots(spec, x)
    paths = 1
    for _, _, length in layout:
        paths *= 2**length
    if tapes * paths > cap:
        raise StrategyCapExceeded(tapes * paths, cap)
    choices = [list(all_tapes(length)) for _, _, length in layout]
    for r in all_tapes(budget.randomness):
        for combo in itertools.product(*choices):
            script = {(i, j): m for (i, j, _), m in zip(layout, combo)}
            seen: dict = {}

            def fallback(prover, rnd, history, script=script, seen=seen):
                seen[(prover, rnd)] = history
                return script[(prover, rnd)]

            try:
                t, pay = execute(spec, x, r, StrategyProfile(fallback=fallback))
            except BudgetExceeded as exc:
                yield r, seen, None, exc
                continue
            yield r, seen, t, pay


@dataclass(frozen=True)
class AuditReport:
    protocol: str
    runs: int
    max_communication: int
    rounds_used: int
    random_bits_consumed: int
    budget: Budget
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def resource_audit(spec: ProtocolSpec, x: Input, cap: int = DEFAULT_CAP) -> AuditReport:
    """Measure communication, rounds and coins over all (r, s) runs."""
    budget = spec.budget(x)
    runs = max_comm = rounds = coins = 0
    violations: list[str] = []

    for r, _, t, pay in explore(spec, x, cap):
        runs += 1
        if t is None:
            violations.append(f"tape {bits_str(r)}: {pay}")
            continue
        max_comm = max(max_comm, t.total_bits)
        rounds = max(rounds, len(t.rounds))
        coins = max(coins, t.coins_used)
    if max_comm > budget.communication:
        violations.append(f"communication {max_comm} > {budget.communication}")
    return AuditReport(
        spec.name, runs, max_comm, rounds, coins, budget, tuple(dict.fromkeys(violations))
    )
