"""Restricted linear systems over a finite abelian group, and extensions
between them.

A system is A x = b with each coordinate x_i confined to a finite restriction
set X_i.  An extension wraps a second system whose solutions biject with the
original's through per-coordinate value maps; the pipeline composes several
of these, so composition and exhaustive verification live here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .abelian import AbelianGroup, Element
from .errors import (
    AlreadySolutionFree,
    BudgetExceededError,
    PreconditionError,
)
from .intmat import IntMatrix, determinantal_divisor

DEFAULT_BUDGET = 10_000_000

Solution = tuple[Element, ...]


@dataclass(frozen=True)
class RestrictedSystem:
    group: AbelianGroup
    matrix: IntMatrix
    rhs: tuple[Element, ...]
    restrictions: tuple[tuple[Element, ...], ...]
    determinantal: int = field(init=False)
    coprime: bool = field(init=False)

    def __init__(self, group, matrix, rhs, restrictions):
        if matrix.rows > matrix.cols:
            raise PreconditionError("system needs at least as many columns as equations")
        if len(rhs) != matrix.rows:
            raise PreconditionError("right-hand side length does not match equation count")
        if len(restrictions) != matrix.cols:
            raise PreconditionError("restriction count does not match variable count")
        clean_rhs = tuple(group.reduce(v) for v in rhs)
        clean_sets = tuple(
            tuple(sorted({group.reduce(v) for v in xs})) for xs in restrictions
        )
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", clean_rhs)
        object.__setattr__(self, "restrictions", clean_sets)
        dk = determinantal_divisor(matrix, matrix.rows)
        object.__setattr__(self, "determinantal", dk)
        object.__setattr__(self, "coprime", math.gcd(dk, group.order) == 1)

    @property
    def equations(self) -> int:
        return self.matrix.rows

    @property
    def variables(self) -> int:
        return self.matrix.cols

    def is_homogeneous(self) -> bool:
        zero = self.group.zero
        return all(v == zero for v in self.rhs)

    def apply(self, x: Solution) -> tuple[Element, ...]:
        """Evaluate A x componentwise over the group."""
        group = self.group
        out = []
        for row in self.matrix.data:
            acc = [0] * group.rank
            for coeff, elem in zip(row, x):
                if coeff:
                    for c, r in enumerate(elem):
                        acc[c] += coeff * r
            out.append(group.reduce(acc))
        return tuple(out)


@dataclass(frozen=True)
class ThinWitness:
    """A coordinate pinned to a single value across all solutions.

    ``value`` is None exactly when the system has no solutions at all; the
    ``vacuous`` flag marks that convention explicitly.
    """

    coordinate: int
    value: Element | None
    vacuous: bool = False


@dataclass(frozen=True)
class Extension:
    """Target system whose solutions biject with the source's.

    ``mapped_coords`` lists the target coordinates carrying source data (as
    many as the source has variables).  ``coord_map`` sends each of them to
    its source coordinate, and ``value_maps`` translates target restriction
    values back to source ones.  Unmapped target coordinates range over the
    whole group.
    """

    source: RestrictedSystem
    target: RestrictedSystem
    mapped_coords: tuple[int, ...]
    coord_map: dict[int, int]
    value_maps: dict[int, dict[Element, Element]]

    def project(self, y: Solution) -> Solution:
        """Carry a target solution back to a source coordinate vector."""
        out: list[Element | None] = [None] * self.source.variables
        for j in self.mapped_coords:
            out[self.coord_map[j]] = self.value_maps[j][y[j]]
        if any(v is None for v in out):
            raise PreconditionError("extension does not cover every source coordinate")
        return tuple(out)  # type: ignore[arg-type]


def identity_extension(system: RestrictedSystem) -> Extension:
    coords = tuple(range(system.variables))
    return Extension(
        source=system,
        target=system,
        mapped_coords=coords,
        coord_map={j: j for j in coords},
        value_maps={j: {v: v for v in system.restrictions[j]} for j in coords},
    )


def _identity_prefix(matrix: IntMatrix) -> bool:
    k = matrix.rows
    return all(
        matrix.data[i][j] == (1 if i == j else 0) for i in range(k) for j in range(k)
    )


def enumerate_solutions(
    system: RestrictedSystem, budget: int = DEFAULT_BUDGET
) -> list[Solution]:
    """All solutions in lexicographic order of the full coordinate vector.

    With an identity block on the left, only the free coordinates are
    enumerated and the pivots are solved directly; otherwise every candidate
    in the restriction product is checked.  The candidate count is compared
    against the budget before any work happens.
    """
    sets = system.restrictions
    if any(len(xs) == 0 for xs in sets):
        return []
    group = system.group
    k, m = system.equations, system.variables

    if _identity_prefix(system.matrix):
        free_total = math.prod(len(xs) for xs in sets[k:]) if m > k else 1
        if free_total > budget:
            raise BudgetExceededError(
                f"{free_total} candidates exceed the budget of {budget}"
            )
        members = [frozenset(xs) for xs in sets[:k]]
        bdata = [row[k:] for row in system.matrix.data]
        sols: list[Solution] = []
        for tail in product(*sets[k:]) if m > k else [()]:
            head: list[Element] = []
            ok = True
            for i in range(k):
                acc = list(system.rhs[i])
                for coeff, elem in zip(bdata[i], tail):
                    if coeff:
                        for c, r in enumerate(elem):
                            acc[c] -= coeff * r
                pivot = group.reduce(acc)
                if pivot not in members[i]:
                    ok = False
                    break
                head.append(pivot)
            if ok:
                sols.append(tuple(head) + tail)
        sols.sort()
        return sols

    total = math.prod(len(xs) for xs in sets)
    if total > budget:
        raise BudgetExceededError(f"{total} candidates exceed the budget of {budget}")
    sols = [x for x in product(*sets) if system.apply(x) == system.rhs]
    sols.sort()
    return sols


def count_solutions(system: RestrictedSystem, budget: int = DEFAULT_BUDGET) -> int:
    return len(enumerate_solutions(system, budget))


def is_thin(
    system: RestrictedSystem, budget: int = DEFAULT_BUDGET
) -> ThinWitness | None:
    """Find a coordinate constant across all solutions, if any.

    Systems with at most one solution are thin by convention: the report
    names the first coordinate, with a None value when no solution exists.
    """
    sols = enumerate_solutions(system, budget)
    if not sols:
        return ThinWitness(coordinate=0, value=None, vacuous=True)
    if len(sols) == 1:
        return ThinWitness(coordinate=0, value=sols[0][0])
    for j in range(system.variables):
        first = sols[0][j]
        if all(x[j] == first for x in sols):
            return ThinWitness(coordinate=j, value=first)
    return None


def homogenize(
    system: RestrictedSystem, budget: int = DEFAULT_BUDGET
) -> Extension:
    """Translate by the least solution so the right-hand side becomes zero.

    The witness is the smallest solution in enumeration order; each
    restriction set shifts by its coordinate and the value maps undo the
    shift.  Raises AlreadySolutionFree when there is nothing to translate by.
    """
    if system.is_homogeneous():
        return identity_extension(system)
    sols = enumerate_solutions(system, budget)
    if not sols:
        raise AlreadySolutionFree("system has no solutions")
    witness = sols[0]
    group = system.group
    zero_rhs = tuple(group.zero for _ in range(system.equations))
    shifted = tuple(
        tuple(sorted(group.subtract(v, witness[j]) for v in xs))
        for j, xs in enumerate(system.restrictions)
    )
    target = RestrictedSystem(group, system.matrix, zero_rhs, shifted)
    coords = tuple(range(system.variables))
    value_maps = {
        j: {group.subtract(v, witness[j]): v for v in system.restrictions[j]}
        for j in coords
    }
    return Extension(
        source=system,
        target=target,
        mapped_coords=coords,
        coord_map={j: j for j in coords},
        value_maps=value_maps,
    )


@dataclass
class ExtensionReport:
    ok: bool
    dimension_ok: bool
    full_group_ok: bool
    structure_ok: bool
    bijection_ok: bool
    source_count: int
    target_count: int
    problems: list[str]


def verify_extension(
    ext: Extension, budget: int = DEFAULT_BUDGET
) -> ExtensionReport:
    """Check the extension conditions exhaustively.

    Dimensions must grow while preserving the column surplus, unmapped target
    coordinates must range over the whole group, the structural maps must be
    well formed, and projecting the target solutions must hit the source
    solutions bijectively.  Any violation lands in ``problems`` with a
    counterexample where one exists.
    """
    problems: list[str] = []
    src, tgt = ext.source, ext.target

    dimension_ok = (
        tgt.equations >= src.equations
        and tgt.variables >= src.variables
        and tgt.variables - tgt.equations == src.variables - src.equations
    )
    if not dimension_ok:
        problems.append(
            f"dimensions ({src.equations},{src.variables}) -> "
            f"({tgt.equations},{tgt.variables}) break the offset rule"
        )

    full = tgt.group.elements()
    mapped = set(ext.mapped_coords)
    full_group_ok = True
    for j in range(tgt.variables):
        if j not in mapped and tgt.restrictions[j] != full:
            full_group_ok = False
            problems.append(f"unmapped coordinate {j} is restricted")

    structure_ok = True
    if len(ext.mapped_coords) != src.variables:
        structure_ok = False
        problems.append("mapped coordinate count differs from source variable count")
    if sorted(ext.coord_map.get(j, -1) for j in ext.mapped_coords) != list(
        range(src.variables)
    ):
        structure_ok = False
        problems.append("coordinate map is not a bijection onto the source coordinates")
    for j in ext.mapped_coords:
        vmap = ext.value_maps.get(j)
        if vmap is None or set(vmap.keys()) != set(tgt.restrictions[j]):
            structure_ok = False
            problems.append(f"value map at {j} does not cover its restriction set")
            continue
        allowed = set(src.restrictions[ext.coord_map[j]])
        if any(v not in allowed for v in vmap.values()):
            structure_ok = False
            problems.append(f"value map at {j} leaves the source restriction set")

    bijection_ok = False
    source_count = target_count = -1
    if structure_ok:
        ssols = enumerate_solutions(src, budget)
        tsols = enumerate_solutions(tgt, budget)
        source_count, target_count = len(ssols), len(tsols)
        images = [ext.project(y) for y in tsols]
        sset = set(ssols)
        bijection_ok = True
        for y, x in zip(tsols, images):
            if x not in sset:
                bijection_ok = False
                problems.append(f"target solution {y} projects to non-solution {x}")
                break
        if bijection_ok and len(set(images)) != len(images):
            bijection_ok = False
            seen: dict[Solution, Solution] = {}
            for y, x in zip(tsols, images):
                if x in seen:
                    problems.append(
                        f"target solutions {seen[x]} and {y} collide on {x}"
                    )
                    break
                seen[x] = y
        if bijection_ok and set(images) != sset:
            bijection_ok = False
            missing = sorted(sset - set(images))[0]
            problems.append(f"source solution {missing} has no preimage")

    return ExtensionReport(
        ok=dimension_ok and full_group_ok and structure_ok and bijection_ok,
        dimension_ok=dimension_ok,
        full_group_ok=full_group_ok,
        structure_ok=structure_ok,
        bijection_ok=bijection_ok,
        source_count=source_count,
        target_count=target_count,
        problems=problems,
    )


def compose_extensions(first: Extension, second: Extension) -> Extension:
    """Compose source -> mid -> far into a single source -> far extension."""
    if second.source != first.target:
        raise PreconditionError("extensions do not chain: middle systems differ")
    inner_mapped = set(first.mapped_coords)
    mapped = tuple(
        j for j in second.mapped_coords if second.coord_map[j] in inner_mapped
    )
    coord_map = {j: first.coord_map[second.coord_map[j]] for j in mapped}
    value_maps: dict[int, dict[Element, Element]] = {}
    for j in mapped:
        mid = second.coord_map[j]
        inner_map = first.value_maps[mid]
        value_maps[j] = {
            v: inner_map[second.value_maps[j][v]] for v in second.value_maps[j]
        }
    return Extension(
        source=first.source,
        target=second.target,
        mapped_coords=mapped,
        coord_map=coord_map,
        value_maps=value_maps,
    )


def remove_elements(
    system: RestrictedSystem, removed
) -> RestrictedSystem:
    """Copy of the system with the given per-coordinate values deleted."""
    if len(removed) != system.variables:
        raise PreconditionError("removal sets do not match the variable count")
    new_sets = []
    for xs, gone in zip(system.restrictions, removed):
        dropped = {system.group.reduce(v) for v in gone}
        new_sets.append(tuple(v for v in xs if v not in dropped))
    return RestrictedSystem(system.group, system.matrix, system.rhs, tuple(new_sets))


def pull_back_removal(
    ext: Extension, removed, budget: int = DEFAULT_BUDGET
) -> tuple[tuple[Element, ...], ...]:
    """Translate a removal on the target into one on the source.

    Only mapped coordinates may carry removals.  When the target minus its
    removal is solution free, the same is re-checked on the source; a
    violation would mean the extension was not a bijection, so it raises.
    """
    if len(removed) != ext.target.variables:
        raise PreconditionError("removal sets do not match the target variable count")
    mapped = set(ext.mapped_coords)
    out: list[set[Element]] = [set() for _ in range(ext.source.variables)]
    for j, gone in enumerate(removed):
        if not gone:
            continue
        if j not in mapped:
            raise PreconditionError(
                f"coordinate {j} is outside the mapped set but carries removals"
            )
        vmap = ext.value_maps[j]
        for v in gone:
            key = ext.target.group.reduce(v)
            if key not in vmap:
                raise PreconditionError(
                    f"removed value {v} at coordinate {j} is outside the restriction set"
                )
            out[ext.coord_map[j]].add(vmap[key])
    result = tuple(tuple(sorted(s)) for s in out)
    if count_solutions(remove_elements(ext.target, removed), budget) == 0:
        if count_solutions(remove_elements(ext.source, result), budget) != 0:
            raise AssertionError(
                "pulled-back removal left source solutions alive; extension is broken"
            )
    return result
