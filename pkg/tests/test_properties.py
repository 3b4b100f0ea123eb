import math
from fractions import Fraction
from itertools import product

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ratproof.core import Budget, Input, ProtocolSpec, StrategyProfile, execute, expected_payment, normalize_payments
from ratproof.deciders import interval_decider
from ratproof.harness.report import Report
from ratproof.sat import CNF, formula_tuple_input
from ratproof.strategies import PaymentReport, enumerate_profiles, optimal_profiles, rational_answer
from ratproof.transforms import round_payments_zero_one, threshold_acceptance_prob, to_accept_reject
from ratproof.zoo import build_np_rip, build_oracle_query_rip, build_toy_constant_comm, parity_machine, perfect_sat_checker

settings.register_profile("ratproof", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ratproof")

X = Input.from_bits((0,), "x")



@st.composite
def cnfs(draw, max_vars=3):
    v = draw(st.integers(1, max_vars))
    lits = st.integers(1, v).flatmap(lambda k: st.sampled_from((k, -k)))
    clauses = draw(st.lists(st.lists(lits, min_size=1, max_size=3), min_size=1, max_size=4))
    return CNF(v, tuple(tuple(c) for c in clauses))


fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=64)
rationals = st.fractions(min_value=-1, max_value=1, max_denominator=64)


class TableVerifier:
    """Pays table[(message, tape)] for a one-bit message and ``coins`` tape bits."""

    def __init__(self, table, coins):
        self.table, self.coins = table, coins

    def send(self, view, rnd):
        raise AssertionError

    def pay(self, view):
        m = view.read_message(0, 0)
        return self.table[(m, view.tape.take(self.coins))]


def table_spec(table, coins, length, normalized, support=None):
    return ProtocolSpec(
        "table", 1, ("P",), lambda x: Budget(length, length, coins, ((length,),)),
        TableVerifier(table, coins), normalized=normalized, payment_support=support,
    )


@st.composite
def table_protocols(draw, values=rationals, normalized=False):
    coins = draw(st.integers(0, 3))
    length = draw(st.integers(1, 2))
    table = {
        (m, r): draw(values)
        for m in product((0, 1), repeat=length)
        for r in product((0, 1), repeat=coins)
    }
    return table_spec(table, coins, length, normalized), table


@given(cnfs(), st.data())
def test_execute_is_a_pure_function(phi, data):
    spec = build_np_rip(perfect_sat_checker())
    x = phi.as_input()
    msg = tuple(data.draw(st.lists(st.integers(0, 1), min_size=1 + phi.num_vars, max_size=1 + phi.num_vars)))
    s = StrategyProfile({(0, 0, ()): msg})
    assert execute(spec, x, (), s) == execute(spec, x, (), s)


@given(table_protocols())
def test_expectation_is_the_exact_tape_average(proto):
    spec, table = proto
    for s in enumerate_profiles(spec, X):
        m = s.message(0, 0, ())
        per_tape = [v for (mm, _), v in table.items() if mm == m]
        assert expected_payment(spec, X, s) == sum(per_tape, Fraction(0)) / len(per_tape)


@given(fractions01, st.integers(1, 16))
def test_rounding_sandwich_on_constant_payments(value, gamma):
    spec = table_spec({((b,), ()): value for b in (0, 1)}, 0, 1, True)
    rounded = round_payments_zero_one(spec, gamma)
    G = rounded.params["zero_one_rounding"]["G"]
    u = expected_payment(rounded, X, StrategyProfile({(0, 0, ()): (0,)}))
    assert u == Fraction(math.ceil(G * value), G)
    assert value <= u <= value + Fraction(1, 2 * gamma)


@given(table_protocols(values=fractions01, normalized=True), st.sampled_from([1, 2, 3, 4, 8]))
def test_rounding_sandwich_on_random_protocols(proto, gamma):
    spec, _ = proto
    rounded = round_payments_zero_one(spec, gamma)
    for s in enumerate_profiles(spec, X):
        u, v = expected_payment(spec, X, s), expected_payment(rounded, X, s)
        assert u <= v <= u + Fraction(1, 2 * gamma)


@given(table_protocols(values=st.sampled_from([Fraction(0), Fraction(1)]), normalized=True))
def test_acceptance_probability_equals_expected_payment(proto):
    spec, _ = proto
    arp = to_accept_reject(spec, [X])
    for s in enumerate_profiles(spec, X):
        assert arp.acceptance_probability(X, s) == expected_payment(spec, X, s)


@settings(max_examples=25)
@given(st.lists(cnfs(max_vars=2), min_size=1, max_size=2))
def test_normalization_halves_the_gap(formulas):
    spec = build_oracle_query_rip(parity_machine(len(formulas)), perfect_sat_checker())
    norm = normalize_payments(spec)
    x = formula_tuple_input(formulas, "t")
    raw, half = optimal_profiles(spec, x), optimal_profiles(norm, x)
    assert half.utility_gap == raw.utility_gap / 2
    assert half.argmax == raw.argmax
    assert rational_answer(norm, x) == rational_answer(spec, x)


@given(table_protocols())
def test_normalization_is_affine_per_profile(proto):
    spec, _ = proto
    norm = normalize_payments(spec)
    for s in enumerate_profiles(spec, X):
        assert expected_payment(norm, X, s) == (expected_payment(spec, X, s) + 1) / 2


payment_lists = st.lists(st.tuples(rationals, st.integers(0, 1)), min_size=1, max_size=12)


@given(payment_lists, st.randoms())
def test_report_is_order_invariant_and_gap_nonnegative(rows, rng):
    pays, bits = [u for u, _ in rows], [b for _, b in rows]
    a = PaymentReport("p", "x", list(range(len(rows))), pays, bits, 1)
    perm = list(range(len(rows)))
    rng.shuffle(perm)
    b = PaymentReport("p", "x", perm, [pays[k] for k in perm], [bits[k] for k in perm], 1)
    assert (a.optimum, a.invalid, a.answer_bit, a.utility_gap) == (b.optimum, b.invalid, b.answer_bit, b.utility_gap)
    assert sorted(a.argmax_profiles()) == sorted(b.argmax_profiles())
    if a.utility_gap is not None:
        assert a.utility_gap >= 0


@given(cnfs(), st.sampled_from([4, 6, 8]))
def test_np_decider_matches_rational_answer(phi, N):
    spec = build_np_rip(perfect_sat_checker())
    x = phi.as_input()
    run = interval_decider(spec, x, N, trace=True)
    assert run.accept == rational_answer(spec, x) == int(phi.is_satisfiable())
    assert run.homogeneous


@given(st.lists(st.integers(0, 1), min_size=3, max_size=3))
def test_toy_protocol_answers_majority(word):
    spec = build_toy_constant_comm()
    assert rational_answer(spec, Input.from_bits(word)) == int(sum(word) >= 2)


@given(fractions01, st.integers(1, 30), st.fractions(min_value=-1, max_value=31, max_denominator=8))
def test_threshold_tail_against_direct_sum(p, rho, tau):
    direct = sum(
        (math.comb(rho, k) * p**k * (1 - p) ** (rho - k) for k in range(rho + 1) if k > tau),
        Fraction(0),
    )
    assert threshold_acceptance_prob(p, rho, tau) == direct


json_leaf = st.one_of(st.none(), st.booleans(), st.integers(-10**6, 10**6), st.text(max_size=8), st.fractions(max_denominator=10**6))
json_tree = st.recursive(
    json_leaf,
    lambda inner: st.one_of(st.lists(inner, max_size=4), st.dictionaries(st.text(max_size=6), inner, max_size=4)),
    max_leaves=12,
)


@given(json_tree, st.lists(st.dictionaries(st.sampled_from(["input", "optimum", "utility_gap"]), json_leaf), max_size=3))
def test_report_round_trip(tree, rows):
    report = Report(version="0", timestamp="t", config={"tree": tree}, protocol={}, gap_table=rows)
    again = Report.from_json(report.to_json())
    assert again == report
