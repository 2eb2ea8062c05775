"""Shared helpers: random instance builders and independent oracles.

The oracles here are deliberately written against the raw definitions
(itertools products, tuple comparisons) so they share no code path with the
library's filtering or enumeration.
"""

from __future__ import annotations

import itertools
import random

from symbreak import DomainSet, Problem
from symbreak.breaking import ValueClassPartition
from symbreak.constraints import (
    DisjunctionEq,
    EqImpliesEq,
    EqImpliesLeq,
    ParityLink,
    StrictLess,
)


def make_rng(seed):
    return random.Random(seed)


def random_domain_lists(rng, n, m):
    return [sorted(rng.sample(range(1, m + 1), rng.randint(1, m))) for _ in range(n)]


def random_domains(rng, n, m):
    return DomainSet.from_values(random_domain_lists(rng, n, m))


def random_binary_constraint(rng, n, m):
    a = rng.randrange(n)
    b = rng.randrange(n)
    while b == a:
        b = rng.randrange(n)
    kind = rng.randrange(4)
    if kind == 0:
        return EqImpliesLeq(a, rng.randint(1, m), b, rng.randint(1, m))
    if kind == 1:
        return EqImpliesEq(a, rng.randint(1, m), b, rng.randint(1, m))
    if kind == 2:
        return StrictLess(a, b)
    return ParityLink(a, rng.choice(["odd", "even"]), b, rng.choice(["odd", "even"]))


def random_binary_problem(rng, n_max=5, m_max=5, constraints_max=6):
    n = rng.randint(2, n_max)
    m = rng.randint(2, m_max)
    cons = tuple(
        random_binary_constraint(rng, n, m) for _ in range(rng.randint(0, constraints_max))
    )
    return Problem(n, m, random_domains(rng, n, m), cons)


def random_mixed_problem(rng, n_max=4, m_max=4):
    """Binary constraints plus the occasional disjunction; partitions kept
    small so full enumeration stays cheap."""
    n = rng.randint(2, n_max)
    m = rng.randint(2, m_max)
    cons = [random_binary_constraint(rng, n, m) for _ in range(rng.randint(0, 3))]
    if rng.random() < 0.5:
        cons.append(DisjunctionEq(rng.randint(1, m), range(n)))
    return Problem(n, m, random_domains(rng, n, m), tuple(cons))


def random_symmetric_problem(rng, n_max=4, m_max=4):
    """A problem whose solution set is invariant under its class group:
    every domain holds whole classes (or none), and constraints are drawn
    from class-invariant families only."""
    from symbreak.constraints import AtLeastNValues, DisjunctionEq

    n = rng.randint(2, n_max)
    m = rng.randint(2, m_max)
    part = random_partition(rng, m)
    classed = {v for cls in part.classes for v in cls}
    free = [v for v in range(1, m + 1) if v not in classed]
    lists = []
    for _ in range(n):
        values = set()
        for cls in part.classes:
            if rng.random() < 0.8:
                values.update(cls)
        values.update(v for v in free if rng.random() < 0.5)
        if not values:
            values.update(part.classes[0])
        lists.append(sorted(values))
    cons = ()
    roll = rng.random()
    if roll < 0.3:
        cls = part.classes[rng.randrange(len(part.classes))]
        cons = tuple(DisjunctionEq(j, range(n)) for j in cls)
    elif roll < 0.6:
        cons = (AtLeastNValues(n, rng.randint(1, min(n, m))),)
    return Problem(n, m, DomainSet.from_values(lists), cons, part)


def random_partition(rng, m, max_classes=2):
    values = list(range(1, m + 1))
    rng.shuffle(values)
    classes = []
    while values and len(classes) < max_classes:
        take = rng.randint(2, max(2, len(values)))
        take = min(take, len(values))
        if take < 2:
            break
        classes.append(sorted(values[:take]))
        values = values[take:]
    if not classes:
        classes = [[1, 2]] if m >= 2 else [[1]]
    return ValueClassPartition.of(classes)


def all_total_assignments(domains: DomainSet):
    return itertools.product(*[domains.values(v) for v in range(len(domains))])


def brute_solutions(problem: Problem, domains: DomainSet | None = None):
    """Full product enumeration with per-constraint checks; independent of the
    library's backtracking enumerator."""
    dom = domains if domains is not None else problem.domains
    out = []
    for vec in all_total_assignments(dom):
        if all(c.check(vec) for c in problem.constraints):
            out.append(vec)
    return out


def support_marking_gac(constraints, domains: DomainSet):
    """Single-constraint-set filtering by marking the components of every
    satisfying scope assignment; returns (pruned pair set, wipeout)."""
    scope = sorted({v for c in constraints for v in c.scope})
    width = max(scope) + 1 if scope else 0
    supported = set()
    for combo in itertools.product(*[domains.values(v) for v in scope]):
        vec = [None] * width
        for var, val in zip(scope, combo):
            vec[var] = val
        if all(c.check(vec) for c in constraints):
            supported.update(zip(scope, combo))
    pruned = set()
    wipeout = False
    for var in scope:
        values = domains.values(var)
        kept = [v for v in values if (var, v) in supported]
        pruned.update((var, v) for v in values if (var, v) not in supported)
        if not kept:
            wipeout = True
    return pruned, wipeout


def decomposed_lex_filter(perm, order, domains: DomainSet):
    """Fixpoint of the two-vector lex relaxation with channelling, computed
    from lex-least/lex-greatest tuple comparisons. Returns (pruned, final,
    wipeout)."""
    dom = domains.copy()
    pruned = set()
    inv = perm.inverse()

    def wipe():
        for var in order:
            for v in dom.values(var):
                dom.remove(var, v)
                pruned.add((var, v))
        return pruned, dom, True

    changed = True
    while changed:
        changed = False
        left = [dom.values(v) for v in order]
        if any(not l for l in left):
            return wipe()
        right = [sorted(perm(x) for x in l) for l in left]
        least = [l[0] for l in left]
        greatest = [r[-1] for r in right]
        if tuple(least) > tuple(greatest):
            return wipe()
        for i, var in enumerate(order):
            for v in list(left[i]):
                probe = least[:i] + [v] + least[i + 1 :]
                if tuple(probe) > tuple(greatest) and dom.contains(var, v):
                    dom.remove(var, v)
                    pruned.add((var, v))
                    changed = True
            for w in list(right[i]):
                probe = greatest[:i] + [w] + greatest[i + 1 :]
                if tuple(least) > tuple(probe):
                    v = inv(w)
                    if dom.contains(var, v):
                        dom.remove(var, v)
                        pruned.add((var, v))
                        changed = True
            if dom.is_empty(var):
                return wipe()
    return pruned, dom, False
