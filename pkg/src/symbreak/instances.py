"""Deterministic generators for the benchmark families this lab studies, plus
a DIMACS CNF reader feeding the 3-SAT reduction."""

from __future__ import annotations

from dataclasses import dataclass

from .breaking import ValueClassPartition, build_puget
from .constraints import AtLeastNValues, Conditional, DisjunctionEq, ParityLink
from .engine import DomainSet, Problem


def pigeonhole_model(n: int) -> Problem:
    """n variables over n+1 interchangeable values, one disjunction per value
    demanding it be used somewhere. Unsatisfiable: n slots cannot cover n+1
    values."""
    if n < 1:
        raise ValueError("need at least one variable")
    scope = tuple(range(n))
    constraints = tuple(DisjunctionEq(j, scope) for j in range(1, n + 2))
    return Problem(
        num_vars=n,
        num_values=n + 1,
        domains=DomainSet.full(n, n + 1),
        constraints=constraints,
        partition=ValueClassPartition.of([range(1, n + 2)]),
    )


def staircase_fixture() -> tuple[Problem, DomainSet]:
    """Five variables over one class of five interchangeable values, domains
    {1}, {1,2}, {1,3}, {1,4}, {5}. Every adjacent-transposition lex constraint
    is already at fixpoint here, yet the full group still prunes value 1 from
    the three middle variables."""
    domains = DomainSet.from_values([[1], [1, 2], [1, 3], [1, 4], [5]])
    problem = Problem(
        num_vars=5,
        num_values=5,
        domains=domains,
        partition=ValueClassPartition.of([range(1, 6)]),
    )
    return problem, domains.copy()


def surjection_fixture() -> tuple[Problem, DomainSet]:
    """Seven variables over one class of four interchangeable values, with a
    tail that forces every value to occur. Arc consistency on the dual
    first-use encoding prunes nothing from the original variables, while full
    filtering removes value 1 from the second variable."""
    domains = DomainSet.from_values([[1], [1, 2], [1, 3], [3, 4], [2], [3], [4]])
    problem = Problem(
        num_vars=7,
        num_values=4,
        domains=domains,
        partition=ValueClassPartition.of([range(1, 5)]),
    )
    return problem, domains.copy()


# First-use domains of the surjection fixture at the arc-consistency fixpoint,
# keyed by value: the only candidate positions for each value's first use.
SURJECTION_FIXTURE_FIRST_USE = {1: [1], 2: [2, 5], 3: [3, 4, 6], 4: [4, 7]}


def chained_pairs_base(k: int) -> Problem:
    """2k+1 variables over 2(k+1) values pairing value i with k+1+i. The first
    k variables slide over {i, i+1}; the rest are pinned to the upper pair
    members. Using an upper member demands its lower partner be used first,
    which k sliding variables cannot cover: unsatisfiable by counting."""
    if k < 1:
        raise ValueError("k must be at least 1")
    num_vars = 2 * k + 1
    num_values = 2 * (k + 1)
    value_lists = [[i, i + 1] for i in range(1, k + 1)]
    value_lists += [[k + 1 + i] for i in range(1, k + 2)]
    pairs = [(i, k + 1 + i) for i in range(1, k + 2)]
    return Problem(
        num_vars=num_vars,
        num_values=num_values,
        domains=DomainSet.from_values(value_lists),
        partition=ValueClassPartition.of(pairs),
    )


def chained_pairs_family(k: int) -> Problem:
    """The dual first-use encoding of the chained-pairs base problem."""
    return build_puget(chained_pairs_base(k)).problem


class DimacsError(ValueError):
    """A malformed DIMACS document; carries the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CNFFormula:
    """A CNF over num_vars boolean variables with clauses of up to three
    signed literals."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            if len(clause) > 3:
                raise ValueError(f"clause {clause} is wider than three literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.num_vars}")


def parse_dimacs(text: str) -> CNFFormula:
    """Parse a DIMACS cnf document; comments are ignored, clause and variable
    counts must match the header, and each clause ends with 0."""
    num_vars = None
    declared_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    current_start = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(lineno, "duplicate problem line")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(lineno, f"malformed problem line {line!r}")
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(lineno, f"malformed problem line {line!r}") from None
            if num_vars < 0 or declared_clauses < 0:
                raise DimacsError(lineno, "negative counts in problem line")
            continue
        if num_vars is None:
            raise DimacsError(lineno, "clause before problem line")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsError(lineno, f"bad token {token!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(lineno, "empty clause")
                if len(current) > 3:
                    raise DimacsError(current_start, f"clause {tuple(current)} wider than three literals")
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(lineno, f"literal {lit} exceeds {num_vars} variables")
                if not current:
                    current_start = lineno
                current.append(lit)

    last = len(text.splitlines())
    if num_vars is None:
        raise DimacsError(max(last, 1), "missing problem line")
    if current:
        raise DimacsError(current_start, "unterminated clause (missing 0)")
    if len(clauses) != declared_clauses:
        raise DimacsError(max(last, 1), f"header declares {declared_clauses} clauses, found {len(clauses)}")
    return CNFFormula(num_vars, tuple(clauses))


def format_dimacs(formula: CNFFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    return "\n".join(lines) + "\n"


def _literal_values(lit: int) -> tuple[int, int]:
    """The two interchangeable values standing for this literal being true."""
    v = abs(lit)
    if lit > 0:
        return (4 * v - 3, 4 * v - 2)
    return (4 * v - 1, 4 * v)


def reduce_3sat(formula: CNFFormula) -> tuple[Problem, ValueClassPartition]:
    """Encode a 3-CNF as a CSP over N+M+1 variables and 4N+2 values.

    Variable i <= N picks one of four values, the odd pair meaning true and
    the even pair false. Each clause variable ranges over the value pairs of
    its literals. A final switch variable selects, by parity, between an
    unsatisfiable distinct-count demand and a satisfiable one, wired through
    parity links. Values pair up into 2N interchangeable classes; the two
    switch values stay unclassed.
    """
    n, m = formula.num_vars, len(formula.clauses)
    switch = n + m
    value_lists: list[list[int]] = []
    for i in range(1, n + 1):
        value_lists.append([4 * i - 3, 4 * i - 2, 4 * i - 1, 4 * i])
    for clause in formula.clauses:
        values: set[int] = set()
        for lit in clause:
            values.update(_literal_values(lit))
        value_lists.append(sorted(values))
    value_lists.append([4 * n + 1, 4 * n + 2])

    constraints = []
    for i in range(n):
        constraints.append(ParityLink(switch, "odd", i, "odd"))
    for j in range(m):
        constraints.append(ParityLink(switch, "odd", n + j, "even"))
    constraints.append(Conditional(switch, "odd", AtLeastNValues(n, n + 1)))
    constraints.append(Conditional(switch, "even", AtLeastNValues(n, n)))

    pairs = []
    for i in range(1, n + 1):
        pairs.append((4 * i - 3, 4 * i - 2))
        pairs.append((4 * i - 1, 4 * i))
    partition = ValueClassPartition.of(pairs)

    problem = Problem(
        num_vars=n + m + 1,
        num_values=4 * n + 2,
        domains=DomainSet.from_values(value_lists),
        constraints=tuple(constraints),
        partition=partition,
    )
    return problem, partition
