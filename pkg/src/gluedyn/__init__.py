"""gluedyn: compile propositional formulas into succinct automata-network
circuits by gadget gluing, and verify the result against an explicit oracle."""

from .circuits import BitWord, Circuit, CircuitError, Gate, deserialize, serialize
from .gluing import (
    BoundariedGraph,
    GadgetFamily,
    GammaValidationError,
    TreeDecomposition,
    delta,
    family_from_dict,
    glue,
    load_family,
    validate_tree_decomposition,
)
from .oracle import (
    ExplicitDynamics,
    ReductionInstance,
    explicit_dynamics,
    export_dot,
    make_instance,
)
from .sizing import InstanceSizes, Layout, compute_L, solve_N, total_vertices
from .verify import SemanticGraph, check_equivalence, enumerate_semantics, rice_probe

__version__ = "0.1.0"

__all__ = [
    "BitWord",
    "BoundariedGraph",
    "Circuit",
    "CircuitError",
    "ExplicitDynamics",
    "GadgetFamily",
    "GammaValidationError",
    "Gate",
    "InstanceSizes",
    "Layout",
    "ReductionInstance",
    "SemanticGraph",
    "TreeDecomposition",
    "check_equivalence",
    "compute_L",
    "delta",
    "deserialize",
    "enumerate_semantics",
    "explicit_dynamics",
    "export_dot",
    "family_from_dict",
    "glue",
    "load_family",
    "make_instance",
    "rice_probe",
    "serialize",
    "solve_N",
    "total_vertices",
    "validate_tree_decomposition",
]
