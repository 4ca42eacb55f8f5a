"""Exact string-topology algebra: loop product and coproduct models, chain-level
verifiers, Z/2 local systems, and the supporting numeric constructions
(Hamiltonian profiles, conformal annuli, filtered isomorphisms)."""

from .graded import (
    STANDARD,
    GradedVector,
    SignConvention,
    Symbol,
    TensorOperator,
    apply_tensor,
    compose,
    koszul_sign,
    twist,
)
from .identities import (
    AlgebraStructure,
    CoalgebraStructure,
    IdentityReport,
    check_assoc_comm_unit,
    check_coassociativity,
    check_cocommutativity,
    check_sullivan,
    epsilon_rule,
)
from .rings import F2, GF, QQ, ZZ, Ring, ring_from_name
from .sphere import PINNED_CONVENTION, SphereLoopHomology, sweep_conventions

__version__ = "0.1.0"
