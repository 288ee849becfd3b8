"""Restricted linear systems over finite abelian groups, made finite.

Exact integer normal forms, reduction of restricted systems to standard
circular homogeneous form, the colored-hypergraph encoding whose copies
biject with solutions, and exact minimum removal sets.
"""

from .abelian import (
    AbelianGroup,
    Element,
    linear_map_inverse,
    scalar_inverse,
    scaling_image,
    scaling_preimage,
)
from .errors import (
    AlreadySolutionFree,
    BudgetExceededError,
    InfeasibleRemovalError,
    PreconditionError,
    SchemaError,
)
from .hypergraph import (
    HCopy,
    HostHypergraph,
    TemplateHypergraph,
    build_host,
    build_template,
    enumerate_copies,
    host_edge_label,
    verify_copy_classes,
    verify_copy_labels,
)
from .intmat import (
    IntMatrix,
    SnfResult,
    complete_to_square,
    determinantal_divisor,
    is_n_good,
    n_good_padding,
    smith_normal_form,
)
from .pipeline import (
    CircularSystem,
    PipelineResult,
    build_kernel_matrix,
    circularize,
    extend_to_identity_form,
    full_extension,
    is_circular,
    standardize,
)
from .removal import (
    RemovalSolution,
    greedy_removal,
    min_removal_exact,
    small_m_removal,
)
from .system import (
    DEFAULT_BUDGET,
    Extension,
    ExtensionReport,
    RestrictedSystem,
    ThinWitness,
    compose_extensions,
    count_solutions,
    enumerate_solutions,
    homogenize,
    identity_extension,
    is_thin,
    pull_back_removal,
    remove_elements,
    verify_extension,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "AlreadySolutionFree",
    "BudgetExceededError",
    "CircularSystem",
    "DEFAULT_BUDGET",
    "Element",
    "Extension",
    "ExtensionReport",
    "HCopy",
    "HostHypergraph",
    "InfeasibleRemovalError",
    "IntMatrix",
    "PipelineResult",
    "PreconditionError",
    "RemovalSolution",
    "RestrictedSystem",
    "SchemaError",
    "SnfResult",
    "TemplateHypergraph",
    "ThinWitness",
    "build_host",
    "build_kernel_matrix",
    "build_template",
    "circularize",
    "complete_to_square",
    "compose_extensions",
    "count_solutions",
    "determinantal_divisor",
    "enumerate_copies",
    "enumerate_solutions",
    "extend_to_identity_form",
    "full_extension",
    "greedy_removal",
    "homogenize",
    "identity_extension",
    "host_edge_label",
    "is_circular",
    "is_n_good",
    "is_thin",
    "linear_map_inverse",
    "min_removal_exact",
    "n_good_padding",
    "pull_back_removal",
    "remove_elements",
    "scalar_inverse",
    "scaling_image",
    "scaling_preimage",
    "small_m_removal",
    "smith_normal_form",
    "standardize",
    "verify_copy_classes",
    "verify_copy_labels",
    "verify_extension",
]
