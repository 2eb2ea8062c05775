"""Finite-domain variables, bitset domains, and the propagation fixpoint loop.

Variables are indices 0..n-1. Values are small positive integers starting at
1. A domain is an int bitmask with bit v set when value v is present, which
keeps membership tests, removals and copies cheap for the value ranges this
engine targets (at most a few hundred values).

A `Problem` plus a `DomainSet` is a self-contained value: nothing here touches
global state, so independent instances can run on separate threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence, Union


def mask_of(values: Iterable[int]) -> int:
    m = 0
    for v in values:
        if v < 1:
            raise ValueError(f"values must be positive integers, got {v}")
        m |= 1 << v
    return m


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class DomainSet:
    """Per-variable value sets, one bitmask per variable.

    Removal is strict: taking out a value that is not present is a bug in the
    caller and raises. A variable with an empty mask is a wipeout; callers
    treat that as a terminal state and never re-add values.
    """

    __slots__ = ("masks",)

    def __init__(self, masks: Iterable[int]):
        self.masks = list(masks)

    @classmethod
    def full(cls, num_vars: int, num_values: int) -> "DomainSet":
        m = mask_of(range(1, num_values + 1))
        return cls([m] * num_vars)

    @classmethod
    def from_values(cls, value_lists: Iterable[Iterable[int]]) -> "DomainSet":
        return cls([mask_of(vals) for vals in value_lists])

    def copy(self) -> "DomainSet":
        return DomainSet(self.masks)

    def __len__(self) -> int:
        return len(self.masks)

    def contains(self, var: int, value: int) -> bool:
        return bool(self.masks[var] >> value & 1)

    def remove(self, var: int, value: int) -> None:
        bit = 1 << value
        if not self.masks[var] & bit:
            raise ValueError(f"value {value} not in domain of variable {var}")
        self.masks[var] ^= bit

    def assign(self, var: int, value: int) -> None:
        """Shrink the domain of var to the single given value."""
        if not self.masks[var] >> value & 1:
            raise ValueError(f"value {value} not in domain of variable {var}")
        self.masks[var] = 1 << value

    def values(self, var: int) -> list[int]:
        return bits_of(self.masks[var])

    def size(self, var: int) -> int:
        return self.masks[var].bit_count()

    def single_value(self, var: int) -> int:
        mask = self.masks[var]
        if mask == 0 or mask & (mask - 1):
            raise ValueError(f"variable {var} is not assigned a single value")
        return mask.bit_length() - 1

    def is_empty(self, var: int) -> bool:
        return self.masks[var] == 0

    def has_wipeout(self) -> bool:
        return any(m == 0 for m in self.masks)

    def as_lists(self) -> list[list[int]]:
        return [bits_of(m) for m in self.masks]

    def is_subset_of(self, other: "DomainSet") -> bool:
        return all(a & ~b == 0 for a, b in zip(self.masks, other.masks))

    def __eq__(self, other) -> bool:
        return isinstance(other, DomainSet) and self.masks == other.masks

    def __repr__(self) -> str:
        return f"DomainSet({self.as_lists()})"


class Pruning(NamedTuple):
    var: int
    value: int
    cause: object  # the constraint that removed the value, or a short label


@dataclass
class PropagationOutcome:
    """What a propagation run did: the ordered removal log, the wipeout flag,
    and the domains at the fixpoint (or at the point the wipeout surfaced)."""

    prunings: list[Pruning]
    wipeout: bool
    final_domains: DomainSet

    def pruned_pairs(self) -> set[tuple[int, int]]:
        return {(p.var, p.value) for p in self.prunings}


Assignment = Union[Sequence[Optional[int]], dict]


def _as_vector(assignment: Assignment, num_vars: int) -> list[Optional[int]]:
    if isinstance(assignment, dict):
        vec: list[Optional[int]] = [None] * num_vars
        for var, value in assignment.items():
            vec[var] = value
        return vec
    vec = list(assignment)
    if len(vec) != num_vars:
        raise ValueError(f"assignment has {len(vec)} entries, expected {num_vars}")
    return vec


@dataclass(frozen=True)
class Problem:
    """A finite-domain CSP: variable count, value capacity, initial domains,
    constraints, and optionally the interchangeable-value classes."""

    num_vars: int
    num_values: int
    domains: DomainSet
    constraints: tuple = ()
    partition: Optional[object] = None  # ValueClassPartition, kept duck-typed

    def __post_init__(self):
        if len(self.domains) != self.num_vars:
            raise ValueError(
                f"domain set covers {len(self.domains)} variables, expected {self.num_vars}"
            )
        top = mask_of(range(1, self.num_values + 1)) if self.num_values else 0
        for var, mask in enumerate(self.domains.masks):
            if mask & ~top:
                raise ValueError(f"domain of variable {var} exceeds 1..{self.num_values}")
        for c in self.constraints:
            for var in c.scope:
                if not 0 <= var < self.num_vars:
                    raise ValueError(f"constraint {c!r} references variable {var}")
        if self.partition is not None:
            for cls in self.partition.classes:
                for v in cls:
                    if not 1 <= v <= self.num_values:
                        raise ValueError(f"partition value {v} outside 1..{self.num_values}")

    def with_constraints(self, extra) -> "Problem":
        """A copy of this problem with additional constraints appended."""
        return Problem(
            self.num_vars,
            self.num_values,
            self.domains,
            self.constraints + tuple(extra),
            self.partition,
        )


class PropagationEngine:
    """Reusable fixpoint loop over a fixed constraint list.

    The queue is constraint-oriented: a constraint re-enters whenever the
    domain of any variable in its scope changes. Propagators are complete per
    call, so a constraint is not re-queued by its own removals.
    """

    def __init__(self, constraints: Sequence, num_vars: int):
        self.constraints = list(constraints)
        watchers: list[list[int]] = [[] for _ in range(num_vars)]
        for ci, c in enumerate(self.constraints):
            for var in c.scope:
                watchers[var].append(ci)
        self.watchers = watchers

    def run(self, dom: DomainSet, changed: Optional[Iterable[int]] = None, log: Optional[list] = None):
        """Propagate to fixpoint, mutating dom.

        Returns (removal count, wipeout). With `changed` given, only
        constraints watching those variables are seeded; the caller asserts
        that every other constraint is already at fixpoint on dom. Removals
        are appended to `log` as Pruning entries when a list is supplied;
        callers that only need the count skip that cost.
        """
        cons = self.constraints
        watchers = self.watchers
        inq = [False] * len(cons)
        queue: deque[int] = deque()
        if changed is None:
            queue.extend(range(len(cons)))
            for i in range(len(cons)):
                inq[i] = True
        else:
            for var in changed:
                for ci in watchers[var]:
                    if not inq[ci]:
                        inq[ci] = True
                        queue.append(ci)
        count = 0
        while queue:
            ci = queue.popleft()
            inq[ci] = False
            c = cons[ci]
            removed = c.propagate(dom)
            if not removed:
                continue
            count += len(removed)
            if log is not None:
                for var, value in removed:
                    log.append(Pruning(var, value, c))
            touched = {var for var, _ in removed}
            for var in touched:
                if dom.is_empty(var):
                    return count, True
            for var in touched:
                for cj in watchers[var]:
                    if cj != ci and not inq[cj]:
                        inq[cj] = True
                        queue.append(cj)
        return count, False


def propagate_fixpoint(problem: Problem, domains: Optional[DomainSet] = None) -> PropagationOutcome:
    """Run every constraint's propagator to mutual fixpoint.

    Wipeout is a reported outcome, not an error; propagation stops at the
    first empty domain. For monotone propagators the non-wipeout fixpoint is
    unique, so the result does not depend on scheduling order.
    """
    dom = (domains if domains is not None else problem.domains).copy()
    engine = PropagationEngine(problem.constraints, problem.num_vars)
    log: list[Pruning] = []
    _, wipeout = engine.run(dom, log=log)
    return PropagationOutcome(log, wipeout, dom)


def is_solution(problem: Problem, assignment: Assignment) -> bool:
    """True iff the total assignment satisfies every constraint."""
    vec = _as_vector(assignment, problem.num_vars)
    for var, value in enumerate(vec):
        if value is None:
            raise ValueError(f"assignment is partial: variable {var} unassigned")
    return all(c.check(vec) for c in problem.constraints)
