"""Minimum removal sets: destroy every solution by deleting few elements.

A removal deletes values from restriction sets.  Each solution dies when
any one of its coordinate values is deleted, so minimum removal is exact
hitting set over the solution list, with atoms (coordinate, value).
Protected coordinates contribute no atoms.  Alongside the exact
branch-and-bound solver there is a greedy companion and the direct
shortcut for systems with at most one free column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .abelian import Element
from .errors import InfeasibleRemovalError, PreconditionError
from .system import (
    DEFAULT_BUDGET,
    RestrictedSystem,
    count_solutions,
    enumerate_solutions,
    remove_elements,
)

Atom = tuple[int, Element]


@dataclass(frozen=True)
class RemovalSolution:
    """Per-coordinate removal sets plus the certificate.

    optimal is True only when the total is a proven minimum;
    lower_bound then records the root relaxation value the proof
    started from.
    """

    removed: tuple[tuple[Element, ...], ...]
    total_size: int
    optimal: bool
    lower_bound: int | None


def _atom_sets(solutions, protected, variables):
    free = [j for j in range(variables) if j not in protected]
    per_solution = []
    for x in solutions:
        atoms = tuple((j, x[j]) for j in free)
        if not atoms:
            raise InfeasibleRemovalError(
                f"solution {x} has every coordinate protected"
            )
        per_solution.append(atoms)
    return per_solution


def _check_protected(protected, variables) -> frozenset[int]:
    out = frozenset(protected)
    for j in out:
        if not 0 <= j < variables:
            raise PreconditionError(f"protected coordinate {j} out of range")
    return out


def _pack(removed_atoms, variables) -> tuple[tuple[Element, ...], ...]:
    sets: list[list[Element]] = [[] for _ in range(variables)]
    for j, v in removed_atoms:
        sets[j].append(v)
    return tuple(tuple(sorted(s)) for s in sets)


def _greedy_atoms(per_solution) -> list[Atom]:
    chosen: list[Atom] = []
    uncovered = list(range(len(per_solution)))
    while uncovered:
        counts: dict[Atom, int] = {}
        for idx in uncovered:
            for atom in per_solution[idx]:
                counts[atom] = counts.get(atom, 0) + 1
        # most coverage; ties go to the lowest coordinate, then value order
        best = min(counts, key=lambda a: (-counts[a], a))
        chosen.append(best)
        uncovered = [
            idx for idx in uncovered if best not in per_solution[idx]
        ]
    return chosen


def _disjoint_bound(per_solution, indices) -> int:
    """Greedy pairwise-atom-disjoint solution packing; its size is a
    lower bound on any hitting set."""
    used: set[Atom] = set()
    bound = 0
    for idx in indices:
        atoms = per_solution[idx]
        if all(a not in used for a in atoms):
            used.update(atoms)
            bound += 1
    return bound


def min_removal_exact(
    system: RestrictedSystem,
    protected=(),
    budget: int = DEFAULT_BUDGET,
) -> RemovalSolution:
    """Provably minimum removal, branch and bound over the solution list.

    The greedy value seeds the incumbent; branching picks an uncovered
    solution with the fewest atoms and tries each of its atoms; subtrees
    are cut with the disjoint-packing bound.  The witness reported for
    the optimal value is the lexicographically first atom set of that
    size, so reruns are reproducible.
    """
    guard = _check_protected(protected, system.variables)
    solutions = enumerate_solutions(system, budget)
    if not solutions:
        return RemovalSolution(
            _pack([], system.variables), 0, True, 0
        )
    per_solution = _atom_sets(solutions, guard, system.variables)

    incumbent = len(_greedy_atoms(per_solution))
    root_bound = _disjoint_bound(per_solution, range(len(per_solution)))
    best = incumbent

    def search(chosen_count: int, uncovered: list[int]) -> None:
        nonlocal best
        if not uncovered:
            best = min(best, chosen_count)
            return
        if chosen_count + _disjoint_bound(per_solution, uncovered) >= best:
            return
        pivot = min(uncovered, key=lambda idx: len(per_solution[idx]))
        for atom in per_solution[pivot]:
            rest = [
                idx for idx in uncovered if atom not in per_solution[idx]
            ]
            search(chosen_count + 1, rest)

    search(0, list(range(len(per_solution))))

    atoms_sorted = sorted({a for atoms in per_solution for a in atoms})
    witness = _lex_first_cover(atoms_sorted, per_solution, best)
    assert witness is not None, "optimal value has no witness"

    removed = _pack(witness, system.variables)
    assert (
        count_solutions(remove_elements(system, removed), budget) == 0
    ), "removal left solutions alive"
    return RemovalSolution(removed, best, True, root_bound)


def _lex_first_cover(atoms_sorted, per_solution, size):
    """First cover of exactly the given size in include-first DFS order,
    which is the lexicographically least one."""

    def dfs(idx: int, chosen: list[Atom], uncovered: list[int]):
        if not uncovered:
            return list(chosen)
        if len(chosen) >= size or idx >= len(atoms_sorted):
            return None
        if len(chosen) + _disjoint_bound(per_solution, uncovered) > size:
            return None
        atom = atoms_sorted[idx]
        rest = [i for i in uncovered if atom not in per_solution[i]]
        if len(rest) < len(uncovered):
            chosen.append(atom)
            hit = dfs(idx + 1, chosen, rest)
            if hit is not None:
                return hit
            chosen.pop()
        return dfs(idx + 1, chosen, uncovered)

    return dfs(0, [], list(range(len(per_solution))))


def greedy_removal(
    system: RestrictedSystem,
    protected=(),
    budget: int = DEFAULT_BUDGET,
) -> RemovalSolution:
    """Most-first greedy removal; feasible whenever the exact solver is."""
    guard = _check_protected(protected, system.variables)
    solutions = enumerate_solutions(system, budget)
    if not solutions:
        return RemovalSolution(_pack([], system.variables), 0, False, None)
    per_solution = _atom_sets(solutions, guard, system.variables)
    chosen = _greedy_atoms(per_solution)
    removed = _pack(chosen, system.variables)
    assert (
        count_solutions(remove_elements(system, removed), budget) == 0
    ), "greedy removal left solutions alive"
    return RemovalSolution(removed, len(chosen), False, None)


def small_m_removal(
    system: RestrictedSystem, budget: int = DEFAULT_BUDGET
) -> RemovalSolution:
    """Direct removal for systems with at most one free column.

    With no free columns the solution is unique if it exists, and its
    first coordinate value is removed.  With one free column, distinct
    solutions are told apart by their last coordinate, so removing the
    set of last coordinates empties the system.
    """
    k, m = system.equations, system.variables
    if m - k >= 2:
        raise PreconditionError("direct route needs at most one free column")
    solutions = enumerate_solutions(system, budget)
    if not solutions:
        return RemovalSolution(_pack([], m), 0, True, 0)
    if m == k:
        atoms = sorted({(0, x[0]) for x in solutions})
        optimal = len(solutions) == 1
    else:
        atoms = sorted({(m - 1, x[m - 1]) for x in solutions})
        optimal = False
    removed = _pack(atoms, m)
    assert (
        count_solutions(remove_elements(system, removed), budget) == 0
    ), "direct removal left solutions alive"
    return RemovalSolution(
        removed,
        len(atoms),
        optimal,
        len(atoms) if optimal else None,
    )
