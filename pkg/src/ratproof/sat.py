"""Tiny CNF formulas, the DIMACS subset we read and write, and brute force."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

from .core import Input


class DimacsError(ValueError):
    pass


@dataclass(frozen=True)
class CNF:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise DimacsError(f"literal {lit} out of range 1..{self.num_vars}")

    def evaluate(self, assignment) -> bool:
        """``assignment[v - 1]`` is the value of variable v."""
        return all(
            any((assignment[abs(l) - 1] == 1) == (l > 0) for l in clause)
            for clause in self.clauses
        )

    def assignments(self):
        return itertools.product((0, 1), repeat=self.num_vars)

    def satisfying(self) -> list[tuple[int, ...]]:
        return [a for a in self.assignments() if self.evaluate(a)]

    def is_satisfiable(self) -> bool:
        return any(self.evaluate(a) for a in self.assignments())

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, clause + (0,))) for clause in self.clauses]
        return "\n".join(lines) + "\n"

    def as_input(self, name: str = "") -> Input:
        return Input.encode(self, self.to_dimacs(), name=name)


def parse_dimacs(text: str) -> CNF:
    """Parse ``p cnf V C`` plus clause lines of nonzero ints ended by 0."""
    header = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: bad header {line!r}") from None
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer token") from None
        for lit in lits:
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        raise DimacsError("last clause not terminated by 0")
    num_vars, num_clauses = header
    if len(clauses) != num_clauses:
        raise DimacsError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CNF(num_vars, tuple(clauses))


def read_dimacs(path) -> CNF:
    return parse_dimacs(Path(path).read_text())


def formula_tuple_input(formulas, name: str = "") -> Input:
    formulas = tuple(formulas)
    text = "\n".join(f.to_dimacs() for f in formulas)
    return Input.encode(formulas, text, name=name)
