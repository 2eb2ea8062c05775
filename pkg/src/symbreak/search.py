"""Backtracking search with per-node propagation and two labelling modes.

Static mode enumerates the problem as given; callers wanting static symmetry
breaking post the builder constraints first. Symmetry-skipping mode branches,
per class of interchangeable values, only on values already used plus the
single smallest unused one, which visits exactly one representative per
symmetry class of solutions. Candidate narrowing applies to the next
branching variable only; deeper variables keep their full domains until
propagation or branching reaches them.

Counters: a node is one attempted assignment; a branch is a maximal
root-to-leaf path, where a leaf is a wipeout, a solution, or an empty
candidate set. A failure at the root therefore counts zero branches.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .breaking import ValueClassPartition
from .engine import DomainSet, Problem, PropagationEngine


class SearchTimeout(Exception):
    """Raised when a deadline passes mid-search; carries the stats so far."""

    def __init__(self, stats: "SearchStats"):
        super().__init__("search deadline exceeded")
        self.stats = stats


@dataclass
class SearchStats:
    nodes: int = 0
    branches: int = 0
    backtracks: int = 0
    prunings: int = 0
    solutions: int = 0
    wall_ms: float = 0.0

    def as_record(self) -> dict:
        return {
            "nodes": self.nodes,
            "branches": self.branches,
            "backtracks": self.backtracks,
            "prunings": self.prunings,
            "solutions": self.solutions,
        }


@dataclass(frozen=True)
class Strategy:
    var_order: str = "lex"  # lex | min-domain
    mode: str = "static"  # static | ge-tree
    # value order is always ascending

    def __post_init__(self):
        if self.var_order not in ("lex", "min-domain"):
            raise ValueError(f"unknown variable order {self.var_order!r}")
        if self.mode not in ("static", "ge-tree"):
            raise ValueError(f"unknown mode {self.mode!r}")


def ge_tree_candidates(
    partial: dict,
    var: int,
    dom: DomainSet,
    partition: ValueClassPartition,
) -> list[int]:
    """Branching values for var: per class, the values the partial assignment
    already uses plus the smallest unused one; off-class values pass through."""
    used = set(partial.values())
    out = []
    for value in dom.values(var):
        cls = partition.class_of(value)
        if cls is None or value in used:
            out.append(value)
            continue
        smallest_unused = next((v for v in cls if v not in used), None)
        if value == smallest_unused:
            out.append(value)
    return out


def solve(
    problem: Problem,
    domains: Optional[DomainSet] = None,
    strategy: Optional[Strategy] = None,
    goal: str = "all",
    deadline: Optional[float] = None,
    node_hook: Optional[Callable[[dict], None]] = None,
):
    """Search the problem; returns (solutions, stats).

    goal: "first" stops at one solution, "all" collects every one found,
    "count" only counts. Solutions are full value vectors in variable order.
    In ge-tree mode they are one representative per symmetry class.
    """
    strategy = strategy or Strategy()
    if goal not in ("first", "all", "count"):
        raise ValueError(f"unknown goal {goal!r}")
    ge_mode = strategy.mode == "ge-tree"
    partition = problem.partition
    if ge_mode and partition is None:
        raise ValueError("ge-tree mode requires a value class partition on the problem")

    engine = PropagationEngine(problem.constraints, problem.num_vars)
    stats = SearchStats()
    solutions: list[tuple[int, ...]] = []
    num_vars = problem.num_vars
    assigned: list[Optional[int]] = [None] * num_vars
    min_domain = strategy.var_order == "min-domain"
    if ge_mode:
        classes = list(partition.classes)
        class_index = {v: ci for ci, cls in enumerate(classes) for v in cls}
    used_counts: dict[int, int] = {}
    start = time.perf_counter()

    def finish():
        stats.wall_ms = (time.perf_counter() - start) * 1000.0
        return solutions, stats

    dom0 = (domains if domains is not None else problem.domains).copy()
    pruned, wiped = engine.run(dom0)
    stats.prunings += pruned
    if wiped:
        return finish()

    def pick_var(dom: DomainSet) -> Optional[int]:
        if not min_domain:
            for i in range(num_vars):
                if assigned[i] is None:
                    return i
            return None
        best, best_size = None, None
        for i in range(num_vars):
            if assigned[i] is not None:
                continue
            size = dom.size(i)
            if best_size is None or size < best_size:
                best, best_size = i, size
        return best

    def candidates(dom: DomainSet, var: int) -> list[int]:
        values = dom.values(var)
        if not ge_mode:
            return values
        out = []
        smallest_unused: dict[int, Optional[int]] = {}
        for value in values:
            ci = class_index.get(value)
            if ci is None or used_counts.get(value, 0) > 0:
                out.append(value)
                continue
            if ci not in smallest_unused:
                smallest_unused[ci] = next(
                    (v for v in classes[ci] if used_counts.get(v, 0) == 0), None
                )
            if value == smallest_unused[ci]:
                out.append(value)
        return out

    stop = False

    def descend(dom: DomainSet) -> None:
        nonlocal stop
        if deadline is not None and time.perf_counter() > deadline:
            stats.wall_ms = (time.perf_counter() - start) * 1000.0
            raise SearchTimeout(stats)
        var = pick_var(dom)
        if var is None:
            # Checker-only constraints never prune, so leaves are re-verified.
            stats.branches += 1
            vec = tuple(assigned)
            if all(c.check(vec) for c in problem.constraints):
                stats.solutions += 1
                if goal != "count":
                    solutions.append(vec)
                if goal == "first":
                    stop = True
            else:
                stats.backtracks += 1
            return
        cands = candidates(dom, var)
        if not cands:
            stats.branches += 1
            stats.backtracks += 1
            return
        for value in cands:
            stats.nodes += 1
            child = dom.copy()
            child.assign(var, value)
            pruned, wiped = engine.run(child, changed=(var,))
            stats.prunings += pruned
            assigned[var] = value
            if ge_mode:
                used_counts[value] = used_counts.get(value, 0) + 1
            if node_hook is not None:
                node_hook({i: v for i, v in enumerate(assigned) if v is not None})
            if wiped:
                stats.branches += 1
                stats.backtracks += 1
            else:
                descend(child)
            assigned[var] = None
            if ge_mode:
                used_counts[value] -= 1
            if stop:
                return

    descend(dom0)
    return finish()
