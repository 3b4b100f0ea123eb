from fractions import Fraction
from itertools import product

import pytest

from helpers import brute_sat
from ratproof.core import Input, StrategyProfile, execute, expected_payment
from ratproof.errors import BaseNotNormalized, ProtocolError
from ratproof.sat import CNF, formula_tuple_input
from ratproof.strategies import enumerate_profiles, optimal_profiles, rational_answer
from ratproof.zoo import (
    ClassicalProofSystem,
    build_certificate_mip,
    build_communication_reduction,
    build_np_rip,
    build_oracle_query_rip,
    build_toy_constant_comm,
    conditional_payment,
    honest_np_profile,
    honest_oracle_profile,
    inconsistent_tapes,
    lift_profile,
    majority,
    noisy_sat_checker,
    parity_machine,
    perfect_sat_checker,
)
from ratproof.zoo.reduction import encode_query

HALF = Fraction(1, 2)
TOY_INPUTS = ["".join(map(str, w)) for w in product((0, 1), repeat=3)]


# --- classical checkers ---------------------------------------------------


def test_checker_parameters_are_validated():
    with pytest.raises(ProtocolError):
        ClassicalProofSystem("bad", None, None, None, None, Fraction(1, 3), Fraction(1, 2))


def test_checkers_meet_their_declared_bounds(sat_suite):
    xs = [phi.as_input(name) for name, phi, _ in sat_suite]
    assert perfect_sat_checker().check(xs) == []
    assert noisy_sat_checker().check(xs) == []


def test_noisy_checker_false_accept_rate(phi2):
    x = phi2.as_input("phi2")
    for bits in (2, 3, 4):
        cps = noisy_sat_checker(bits)
        p = cps.acceptance_probability(x, (1,))
        assert p == Fraction(2**bits // 3, 2**bits) <= Fraction(1, 3)


# --- NP rational proof ----------------------------------------------------


def test_np_payment_support():
    spec = build_np_rip(perfect_sat_checker())
    assert spec.payment_support == {0, HALF, 1}
    assert spec.provers == 1 and spec.k == 1


def test_np_gap_is_half_everywhere(sat_suite):
    spec = build_np_rip(perfect_sat_checker())
    for name, phi, sat in sat_suite:
        report = optimal_profiles(spec, phi.as_input(name))
        assert report.optimum == (1 if sat else HALF), name
        assert report.answer_bit == int(sat)
        assert report.utility_gap == HALF


def test_np_honest_profile(phi1, phi2):
    cps = perfect_sat_checker()
    spec = build_np_rip(cps)
    assert expected_payment(spec, phi1.as_input(), honest_np_profile(cps, phi1.as_input())) == 1
    assert expected_payment(spec, phi2.as_input(), honest_np_profile(cps, phi2.as_input())) == HALF


def test_noisy_checker_nonmember_bound(phi2):
    cps = noisy_sat_checker()
    spec = build_np_rip(cps)
    report = optimal_profiles(spec, phi2.as_input("phi2"))
    best_claim_one = max(u for u, b in zip(report.payments, report.answer_bits) if b == 1)
    assert best_claim_one <= Fraction(1, 3)
    assert report.answer_bit == 0
    assert report.utility_gap >= Fraction(1, 6)


def test_certificate_protocol_is_zero_one(phi1, phi2):
    spec = build_certificate_mip(perfect_sat_checker())
    assert spec.payment_support == {0, 1}
    assert optimal_profiles(spec, phi1.as_input()).optimum == 1
    assert optimal_profiles(spec, phi2.as_input()).optimum == 0


# --- parity machine -------------------------------------------------------


TUPLES = [
    ("phi1",),
    ("phi2",),
    ("phi1", "phi2"),
    ("phi2", "phi2"),
    ("phi1", "phi1"),
    ("phi1", "phi2", "phi2"),
    ("phi1", "phi1", "phi1"),
]


@pytest.mark.parametrize("names", TUPLES, ids=lambda t: "+".join(t))
def test_parity_protocol_answers_and_bounds(names, request):
    formulas = tuple(request.getfixturevalue(n) for n in names)
    gamma = len(formulas)
    machine, cps = parity_machine(gamma), perfect_sat_checker()
    spec = build_oracle_query_rip(machine, cps)
    x = formula_tuple_input(formulas, "+".join(names))
    report = optimal_profiles(spec, x)
    parity = sum(brute_sat(f.num_vars, f.clauses) for f in formulas) % 2
    assert report.answer_bit == parity
    assert expected_payment(spec, x, honest_oracle_profile(machine, cps, x)) >= HALF
    assert report.utility_gap >= Fraction(1, 2 * gamma)
    assert set(report.payments) <= spec.payment_support


def test_parity_wrong_final_bit_pays_minus_one(phi1, phi2):
    machine, cps = parity_machine(2), perfect_sat_checker()
    spec = build_oracle_query_rip(machine, cps)
    x = formula_tuple_input((phi1, phi2), "pair")
    honest = honest_oracle_profile(machine, cps, x).message(0, 0, ())
    flipped = (1 - honest[0],) + honest[1:]
    assert execute(spec, x, (), StrategyProfile({(0, 0, ()): flipped}))[1] == -1


def test_oracle_machine_rejects_wrong_query_count(phi1):
    with pytest.raises(ValueError):
        parity_machine(2).checked_queries(formula_tuple_input((phi1,), "one"))
    with pytest.raises(ValueError):
        parity_machine(0)


# --- toy constant-communication protocol ----------------------------------


@pytest.mark.parametrize("word", TOY_INPUTS)
def test_toy_answer_is_membership(word):
    spec = build_toy_constant_comm()
    x = Input.from_bits(word)
    assert rational_answer(spec, x) == int(majority(x.bits))
    assert spec.budget(x).communication <= 4


def test_toy_rejects_wrong_length():
    with pytest.raises(ValueError):
        build_toy_constant_comm().budget(Input.from_bits("11"))


# --- two-prover communication reduction -----------------------------------


def test_reduction_needs_normalized_base():
    spec = build_oracle_query_rip(parity_machine(1), perfect_sat_checker())
    with pytest.raises(BaseNotNormalized):
        build_communication_reduction(spec)


def test_reduction_shape():
    wrapper = build_communication_reduction(build_toy_constant_comm())
    assert wrapper.provers == 2 and wrapper.k == 5
    assert wrapper.round_kinds == ("P", "V", "P", "V", "P")


@pytest.mark.parametrize("word", ["110", "000", "011"])
def test_honest_lift_earns_base_payment_over_twice_base_communication(word):
    base = build_toy_constant_comm()
    wrapper = build_communication_reduction(base)
    x = Input.from_bits(word)
    best = optimal_profiles(base, x).argmax_profiles()[0]
    lifted = lift_profile(wrapper, x, best)
    C = base.budget(x).communication
    assert inconsistent_tapes(wrapper, x, lifted) == []
    assert expected_payment(wrapper, x, lifted) == expected_payment(base, x, best) / (2 * C)


def test_query_on_unread_bit_pays_zero(phi2):
    cps = perfect_sat_checker()
    base = build_np_rip(cps)
    wrapper = build_communication_reduction(base)
    x = phi2.as_input("phi2")
    lifted = lift_profile(wrapper, x, honest_np_profile(cps, x))  # claim 0: certificate unread
    g = wrapper.verifier.geometry(x)
    tape = encode_query(g, (0, 0, 1))
    assert execute(wrapper, x, tape, lifted)[1] == 0
    assert execute(wrapper, x, encode_query(g, (0, 0, 0)), lifted)[1] == HALF / (2 * 2)


@pytest.mark.parametrize("word", TOY_INPUTS)
def test_inconsistency_is_penalized_on_every_tape(word):
    base = build_toy_constant_comm()
    wrapper = build_communication_reduction(base)
    x = Input.from_bits(word)
    C = base.budget(x).communication
    for s in enumerate_profiles(wrapper, x):
        for r in inconsistent_tapes(wrapper, x, s):
            # conditioned on the tape: at most (1/C)(R/2 - 1) < 0
            assert conditional_payment(wrapper, x, s, r) <= Fraction(1, C) * (HALF - 1)
        if inconsistent_tapes(wrapper, x, s):
            assert expected_payment(wrapper, x, s) < 0


@pytest.mark.parametrize("word", TOY_INPUTS)
def test_reduction_preserves_rational_answer(word):
    base = build_toy_constant_comm()
    wrapper = build_communication_reduction(base)
    x = Input.from_bits(word)
    assert rational_answer(wrapper, x) == rational_answer(base, x)


def test_unbound_reduction_loses_the_answer_bit():
    wrapper = build_communication_reduction(build_toy_constant_comm(), bind_first_message=False)
    assert optimal_profiles(wrapper, Input.from_bits("110")).invalid


@pytest.mark.parametrize("formula", ["phi1", "phi2"])
def test_reduction_over_np_base(formula, request):
    phi = request.getfixturevalue(formula)
    base = build_np_rip(perfect_sat_checker())
    wrapper = build_communication_reduction(base)
    x = phi.as_input(formula)
    assert rational_answer(wrapper, x) == rational_answer(base, x) == int(phi.is_satisfiable())
