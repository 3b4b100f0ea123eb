"""Two-prover, five-round simulation of a protocol with large communication.

Rounds of the wrapper (0-based):

0. P1 sends ``m1``, its first-round message in the base protocol.
1. V sends the base tape ``r`` to P1.
2. P1 sends ``eff``: the bits the base verifier reads on ``r``, in read order.
3. V replays the base verifier on ``eff``, draws an index (round, prover,
   bit) and sends it to P2 with the base verifier's earlier messages to that
   prover.
4. P2 answers with one bit.

Payment: 0 if the base verifier never read the drawn position, -1 if P2's
bit disagrees with ``eff`` there, else R / (2 C) with R the base payment on
the replay and C the base communication budget.

Each index coordinate is drawn from a power-of-two range; values past the
real range name positions that are never read, so they pay 0.

With ``bind_first_message`` (default) the verifier also compares ``m1``
against the replay wherever the base verifier read prover 1's first
message, and pays -1 on any mismatch.  Without it ``m1`` (and so the answer
bit) is unconstrained by ``eff``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..core import (
    DEFAULT_CAP,
    Bits,
    Budget,
    Input,
    Position,
    ProtocolSpec,
    StrategyProfile,
    Tape,
    VerifierView,
    all_tapes,
    as_bits,
    bits_to_int,
    execute,
    explore,
    int_to_bits,
)
from ..errors import BaseNotNormalized, ProtocolError


def _width(count: int) -> int:
    return (count - 1).bit_length()


@dataclass(frozen=True)
class Geometry:
    base_budget: Budget
    first_len: int
    effective_len: int
    history_len: int
    round_bits: int
    prover_bits: int
    index_bits: int

    @property
    def query_bits(self) -> int:
        return self.round_bits + self.prover_bits + self.index_bits

    @property
    def communication(self) -> int:
        b = self.base_budget
        return (
            self.first_len + b.randomness + self.effective_len
            + self.query_bits + self.history_len + 1
        )


@dataclass(frozen=True)
class Replay:
    values: dict  # Position -> bit, in base read order
    sent: tuple  # per base round, verifier messages (None for prover rounds)
    payment: Fraction


class _ReplayView(VerifierView):
    """Base verifier view whose prover bits come from ``eff`` in read order."""

    def __init__(self, x, tape, messages, kinds, effective):
        super().__init__(x, tape, messages, kinds)
        self._effective = effective
        self._next = 0

    def _lookup(self, rnd, prover, bit):
        if bit >= len(self._messages[rnd][prover]):
            raise ProtocolError(f"bit {bit} outside message ({rnd}, {prover})")
        if self._next >= len(self._effective):
            raise ProtocolError("replay ran past the effective transcript")
        value = self._effective[self._next]
        self._next += 1
        return value


def replay(base: ProtocolSpec, x: Input, r: Bits, effective: Bits) -> Replay:
    budget = base.budget(x)
    messages: list = []
    view = _ReplayView(x, Tape(r), messages, base.round_kinds, effective)
    sent = []
    for j, kind in enumerate(base.round_kinds):
        if kind == "V":
            msgs = tuple(as_bits(m) for m in base.verifier.send(view, j))
            sent.append(msgs)
        else:
            msgs = tuple((0,) * n for n in budget.prover_lengths[j])
            sent.append(None)
        messages.append(msgs)
    payment = Fraction(base.verifier.pay(view))
    return Replay(view.read_values, tuple(sent), payment)


class ReductionVerifier:
    def __init__(self, base: ProtocolSpec, geometry, bind_first_message: bool):
        self.base = base
        self.geometry = geometry
        self.bind = bind_first_message

    def send(self, view, rnd):
        g = self.geometry(view.x)
        if rnd == 1:
            r = view.tape.take(g.base_budget.randomness)
            view.state["r"] = r
            return (r, ())
        effective = view.read_message(2, 0)
        rep = replay(self.base, view.x, view.state["r"], effective)
        view.state["replay"] = rep
        query = view.tape.take(g.query_bits)
        pos = decode_query(self.base, g, query)
        view.state["query"] = pos
        return ((), query + history_for(rep, pos))

    def pay(self, view):
        g = self.geometry(view.x)
        b = view.read(4, 1, 0)
        rep: Replay = view.state["replay"]
        if self.bind:
            for (rnd, prover, bit), value in rep.values.items():
                if rnd == 0 and prover == 0 and view.read(0, 0, bit) != value:
                    return Fraction(-1)
        pos = view.state["query"]
        if pos is None or pos not in rep.values:
            return Fraction(0)
        if b != rep.values[pos]:
            return Fraction(-1)
        return rep.payment / (2 * g.base_budget.communication)


def decode_query(base: ProtocolSpec, g: Geometry, query: Bits) -> Position | None:
    j = bits_to_int(query[: g.round_bits])
    i = bits_to_int(query[g.round_bits : g.round_bits + g.prover_bits])
    k = bits_to_int(query[g.round_bits + g.prover_bits :])
    if j >= base.k or i >= base.provers or base.round_kinds[j] != "P":
        return None
    if k >= g.base_budget.prover_lengths[j][i]:
        return None
    return (j, i, k)


def encode_query(g: Geometry, pos: Position) -> Bits:
    j, i, k = pos
    return (
        int_to_bits(j, g.round_bits)
        + int_to_bits(i, g.prover_bits)
        + int_to_bits(k, g.index_bits)
    )


def history_for(rep: Replay, pos: Position | None) -> Bits:
    """Base verifier's messages to prover ``i`` before round ``j``, concatenated."""
    if pos is None:
        return ()
    j, i, _ = pos
    return tuple(b for msgs in rep.sent[:j] if msgs is not None for b in msgs[i])


def build_communication_reduction(
    base: ProtocolSpec, bind_first_message: bool = True, cap: int = DEFAULT_CAP
) -> ProtocolSpec:
    if not base.normalized:
        raise BaseNotNormalized(f"{base.name}: payments must lie in [0, 1]")

    @lru_cache(maxsize=None)
    def geometry(x: Input) -> Geometry:
        b = base.budget(x)
        longest_read = history = 0
        for _, _, t, pay in explore(base, x, cap):
            if t is None:
                raise pay
            longest_read = max(longest_read, len(t.access_trace))
            history = max(
                history,
                sum(len(m) for kind, msgs in zip(t.kinds, t.rounds) if kind == "V" for m in msgs),
            )
        ell = max(max(row) for row in b.prover_lengths)
        return Geometry(
            base_budget=b,
            first_len=b.prover_lengths[0][0],
            effective_len=longest_read,
            history_len=history,
            round_bits=_width(base.k),
            prover_bits=_width(base.provers),
            index_bits=_width(ell),
        )

    def budget(x: Input) -> Budget:
        g = geometry(x)
        b = g.base_budget
        lengths = (
            (g.first_len, 0),
            (0, 0),
            (g.effective_len, 0),
            (0, 0),
            (0, 1),
        )
        message = max(g.first_len, b.randomness, g.effective_len, g.query_bits + g.history_len, 1)
        return Budget(g.communication, message, b.randomness + g.query_bits, lengths)

    return ProtocolSpec(
        name=f"two-prover[{base.name}]",
        provers=2,
        round_kinds=("P", "V", "P", "V", "P"),
        budget=budget,
        verifier=ReductionVerifier(base, geometry, bind_first_message),
        normalized=False,
        params={
            "base": base.name,
            "bind_first_message": bind_first_message,
            "index_sampling": "each coordinate from a power-of-two range; out-of-range never read",
        },
    )


def _base_of(wrapper: ProtocolSpec) -> ProtocolSpec:
    return wrapper.verifier.base


def lift_profile(wrapper: ProtocolSpec, x: Input, base_profile: StrategyProfile) -> StrategyProfile:
    """Consistent wrapper profile in which both provers follow ``base_profile``."""
    base = _base_of(wrapper)
    g: Geometry = wrapper.verifier.geometry(x)
    table = {(0, 0, ()): base_profile.message(0, 0, ())}
    runs = []
    for r in all_tapes(g.base_budget.randomness):
        t, _ = execute(base, x, r, base_profile)
        eff = t.effective()
        table[(0, 2, (r,))] = eff + (0,) * (g.effective_len - len(eff))
        runs.append(t)
    for t in runs:
        sent = tuple(
            msgs if kind == "V" else None for kind, msgs in zip(t.kinds, t.rounds)
        )
        rep = Replay({}, sent, Fraction(0))
        for query in all_tapes(g.query_bits):
            pos = decode_query(base, g, query)
            bit = t.bit(pos) if pos is not None else 0
            table.setdefault((1, 4, ((), query + history_for(rep, pos))), (bit,))
    return StrategyProfile(table, label=f"lift({base_profile.label or 'base'})")


def inconsistent_tapes(wrapper: ProtocolSpec, x: Input, profile: StrategyProfile) -> list[Bits]:
    """Base tapes on which the provers' answers contradict the replayed transcript.

    A tape counts if P2's bit differs from ``eff`` at some position the base
    verifier reads, or (when binding is on) ``m1`` differs from ``eff``.
    """
    base = _base_of(wrapper)
    g: Geometry = wrapper.verifier.geometry(x)
    bind = wrapper.params["bind_first_message"]
    m1 = profile.message(0, 0, ())
    bad = []
    for r in all_tapes(g.base_budget.randomness):
        eff = profile.message(0, 2, (r,))
        rep = replay(base, x, r, eff)
        for pos, value in rep.values.items():
            if bind and pos[:2] == (0, 0) and m1[pos[2]] != value:
                bad.append(r)
                break
            history = ((), encode_query(g, pos) + history_for(rep, pos))
            if profile.message(1, 4, history)[0] != value:
                bad.append(r)
                break
    return bad


def conditional_payment(
    wrapper: ProtocolSpec, x: Input, profile: StrategyProfile, r: Bits
) -> Fraction:
    """Expected wrapper payment given base tape ``r`` (average over index draws)."""
    g: Geometry = wrapper.verifier.geometry(x)
    total = Fraction(0)
    for query in all_tapes(g.query_bits):
        total += execute(wrapper, x, tuple(r) + query, profile)[1]
    return total / 2**g.query_bits
