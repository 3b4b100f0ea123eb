"""Instance suites and independent oracles shared by the tests."""

from itertools import product

# filled by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

# (name, num_vars, clauses); at most 3 variables and 4 clauses each
SAT_SUITE = [
    ("phi1", 2, ((1, 2), (-1,))),
    ("phi2", 1, ((1,), (-1,))),
    ("unit", 1, ((1,),)),
    ("neg_unit", 1, ((-1,),)),
    ("taut_pair", 2, ((1, -1), (2,))),
    ("xor2", 2, ((1, 2), (-1, -2))),
    ("xor2_contra", 2, ((1, 2), (-1, -2), (1, -2), (-1, 2))),
    ("chain3", 3, ((1,), (-1, 2), (-2, 3))),
    ("chain3_contra", 3, ((1,), (-1, 2), (-2, 3), (-3,))),
    ("all_equal3", 3, ((1, -2), (2, -3), (3, -1))),
    ("pigeon", 2, ((1,), (2,), (-1, -2))),
    ("wide3", 3, ((1, 2, 3), (-1, -2, -3), (1, -2), (2, -3))),
]


def brute_sat(num_vars, clauses) -> bool:
    """Satisfiability by direct truth-table search (independent of ratproof.sat)."""
    for values in product((False, True), repeat=num_vars):
        if all(any(values[abs(l) - 1] == (l > 0) for l in clause) for clause in clauses):
            return True
    return False


def truth(num_vars, clauses, assignment) -> bool:
    return all(any((assignment[abs(l) - 1] == 1) == (l > 0) for l in c) for c in clauses)


def np_oracle_payment(num_vars, clauses, msg):
    """Payment of message c || m under the perfect certificate checker, from the rule itself."""
    from fractions import Fraction

    if msg[0] == 0:
        return Fraction(1, 2)
    return Fraction(int(truth(num_vars, clauses, msg[1:])))


def fig2_oracle_payment(formulas, msg):
    """Payment of c, (c_1, m_1), ... for the parity machine with perfect inner checkers.

    ``formulas`` is a sequence of (num_vars, clauses).
    """
    from fractions import Fraction

    pos, total, claims = 1, Fraction(0), []
    for v, clauses in formulas:
        part = msg[pos : pos + 1 + v]
        total += np_oracle_payment(v, clauses, part)
        claims.append(part[0])
        pos += 1 + v
    if msg[0] != sum(claims) % 2:
        return Fraction(-1)
    return total / len(formulas)


def all_messages(length):
    return list(product((0, 1), repeat=length))
