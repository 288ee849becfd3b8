"""Colored-hypergraph encoding of a circular homogeneous system.

The template has m vertices and one edge per color i: the cyclic window
{i, ..., i+k}.  The host puts a copy of the group at every position; a
window of group values forms the color-i edge exactly when its label,
computed from row i of the kernel matrix, lies in that coordinate's
restriction set.  The host is never materialized: edge membership is a
predicate, and copies of the template are enumerated as assignments in G^m.

Copies group into classes by label vector.  The two verifiers check the
counting facts the encoding stands on: label vectors are exactly the
solutions of the restricted system, every class has exactly |G|^k pairwise
edge-disjoint copies, and every copy's labels solve the system.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .abelian import AbelianGroup, Element
from .errors import BudgetExceededError, PreconditionError
from .intmat import IntMatrix
from .pipeline import CircularSystem
from .system import DEFAULT_BUDGET


@dataclass(frozen=True)
class TemplateHypergraph:
    m: int
    k: int
    edges: tuple[tuple[int, ...], ...]


def build_template(m: int, k: int) -> TemplateHypergraph:
    """The m cyclic windows of k+1 consecutive positions, one per color."""
    if k < 1:
        raise PreconditionError("edge arity needs k >= 1")
    if m < k + 2:
        raise PreconditionError("need m >= k + 2 positions")
    edges = tuple(
        tuple((i + t) % m for t in range(k + 1)) for i in range(m)
    )
    return TemplateHypergraph(m=m, k=k, edges=edges)


@dataclass(frozen=True)
class HostHypergraph:
    """Implicit host: one group copy per position, edges by label predicate.

    Held as raw matrices on purpose, so deliberately corrupted kernels can
    be fed to the verifiers; build from a validated CircularSystem via
    build_host for the honest path.
    """

    group: AbelianGroup
    matrix: IntMatrix
    kernel_matrix: IntMatrix
    modulus: int
    restrictions: tuple[tuple[Element, ...], ...]

    def __post_init__(self):
        k, m = self.matrix.rows, self.matrix.cols
        if self.kernel_matrix.rows != m or self.kernel_matrix.cols != m:
            raise PreconditionError("kernel matrix must be square of size m")
        if len(self.restrictions) != m:
            raise PreconditionError("restriction count does not match positions")
        if m < k + 2:
            raise PreconditionError("need m >= k + 2 positions")

    @property
    def positions(self) -> int:
        return self.matrix.cols

    @property
    def arity_base(self) -> int:
        return self.matrix.rows

    def template(self) -> TemplateHypergraph:
        return build_template(self.positions, self.arity_base)


def build_host(
    group: AbelianGroup,
    circular: CircularSystem,
    restrictions,
) -> HostHypergraph:
    clean = tuple(
        tuple(sorted({group.reduce(v) for v in xs})) for xs in restrictions
    )
    return HostHypergraph(
        group=group,
        matrix=circular.matrix,
        kernel_matrix=circular.kernel_matrix,
        modulus=circular.modulus,
        restrictions=clean,
    )


def host_edge_label(
    host: HostHypergraph, color: int, window: tuple[Element, ...]
) -> tuple[Element, bool]:
    """Label of the color-i window, and whether it forms an edge.

    The window carries the k+1 values at positions i, ..., i+k; the label
    is the kernel-row-i combination of them.
    """
    k, m = host.arity_base, host.positions
    if not 0 <= color < m:
        raise PreconditionError("color out of range")
    if len(window) != k + 1:
        raise PreconditionError("window must hold k + 1 values")
    group = host.group
    acc = group.zero
    for t, g in enumerate(window):
        c = host.kernel_matrix.data[color][(color + t) % m]
        if c:
            acc = group.add(acc, group.scale(c, g))
    return acc, acc in host.restrictions[color]


@dataclass(frozen=True)
class HCopy:
    assignment: tuple[Element, ...]
    labels: tuple[Element, ...]


def _label_vector(host: HostHypergraph, assignment) -> tuple[Element, ...]:
    k, m = host.arity_base, host.positions
    group = host.group
    out = []
    for i in range(m):
        acc = group.zero
        for t in range(k + 1):
            j = (i + t) % m
            c = host.kernel_matrix.data[i][j]
            if c:
                acc = group.add(acc, group.scale(c, assignment[j]))
        out.append(acc)
    return tuple(out)


def enumerate_copies(
    host: HostHypergraph, budget: int = DEFAULT_BUDGET
) -> list[HCopy]:
    """All template copies, in lexicographic order of their assignments.

    A copy is an assignment whose every color label lands in that color's
    restriction set.  The full |G|^m space is walked, so the candidate
    count is checked against the budget first.
    """
    m = host.positions
    group = host.group
    total = group.order**m
    if total > budget:
        raise BudgetExceededError(
            f"{total} assignments exceed the budget of {budget}"
        )
    members = [frozenset(xs) for xs in host.restrictions]
    if any(not s for s in members):
        return []
    copies = []
    for assignment in product(group.elements(), repeat=m):
        labels = _label_vector(host, assignment)
        if all(a in s for a, s in zip(labels, members)):
            copies.append(HCopy(assignment=assignment, labels=labels))
    return copies


@dataclass
class ClassReport:
    ok: bool
    kernel_ok: bool
    labels_match: bool
    class_sizes_ok: bool
    disjoint_ok: bool
    copy_count: int
    class_count: int
    expected_class_size: int
    problems: list[str]


def verify_copy_classes(
    host: HostHypergraph,
    copies: list[HCopy],
    solutions,
) -> ClassReport:
    """Check the class structure of the copy set against the solution list.

    Classes collect copies sharing a label vector.  The distinct label
    vectors must be exactly the given solutions, every class must have
    exactly |G|^k members, and within a class no two copies may share an
    edge (same color with the same window).  The kernel product is
    re-checked here so a corrupted kernel matrix is reported, not trusted.
    """
    problems: list[str] = []
    n = host.group.order
    k, m = host.arity_base, host.positions

    prod_rows = (host.matrix @ host.kernel_matrix).data
    kernel_ok = all(v % host.modulus == 0 for row in prod_rows for v in row)
    if not kernel_ok:
        problems.append("kernel matrix does not annihilate the system matrix")

    classes: dict[tuple[Element, ...], list[HCopy]] = {}
    for copy in copies:
        classes.setdefault(copy.labels, []).append(copy)

    expected = n**k
    labels_match = set(classes) == set(solutions)
    if not labels_match:
        extra = sorted(set(classes) - set(solutions))
        missing = sorted(set(solutions) - set(classes))
        if extra:
            problems.append(f"label vectors that are not solutions: {extra[:3]}")
        if missing:
            problems.append(f"solutions with no copies: {missing[:3]}")

    class_sizes_ok = True
    for label, members in sorted(classes.items()):
        if len(members) != expected:
            class_sizes_ok = False
            problems.append(
                f"class {label} has {len(members)} copies, expected {expected}"
            )

    disjoint_ok = True
    for label, members in sorted(classes.items()):
        for i in range(m):
            windows = set()
            for copy in members:
                w = tuple(copy.assignment[(i + t) % m] for t in range(k + 1))
                if w in windows:
                    disjoint_ok = False
                    problems.append(
                        f"class {label} repeats a color-{i} edge"
                    )
                    break
                windows.add(w)
            if not disjoint_ok:
                break
        if not disjoint_ok:
            break

    return ClassReport(
        ok=kernel_ok and labels_match and class_sizes_ok and disjoint_ok,
        kernel_ok=kernel_ok,
        labels_match=labels_match,
        class_sizes_ok=class_sizes_ok,
        disjoint_ok=disjoint_ok,
        copy_count=len(copies),
        class_count=len(classes),
        expected_class_size=expected,
        problems=problems,
    )


@dataclass
class LabelReport:
    ok: bool
    copy_count: int
    problems: list[str]


def verify_copy_labels(host: HostHypergraph, copies: list[HCopy]) -> LabelReport:
    """Check that every copy's label vector solves the homogeneous system."""
    group = host.group
    zero = group.zero
    problems: list[str] = []
    for copy in copies:
        for row in host.matrix.data:
            acc = zero
            for coeff, elem in zip(row, copy.labels):
                if coeff:
                    acc = group.add(acc, group.scale(coeff, elem))
            if acc != zero:
                problems.append(
                    f"labels {copy.labels} fail the system at assignment "
                    f"{copy.assignment}"
                )
                break
        if problems:
            break
    return LabelReport(ok=not problems, copy_count=len(copies), problems=problems)
