"""stratlab: exact and numerical computation on singular subsets and quotients of R^n.

Subpackages by theme: polyalg (exact polynomial arithmetic), diffspace
(spaces and tangent spaces), fields (derivations, flows, orbits), actions
(group actions and stratifications), forms (exterior calculus), hamiltonian
(symplectic structure and momentum maps), spacefile/cli (the .sl front end).
"""

from ._kernels import backend_name
from .polyalg import (
    NormalFormResult,
    ParseError,
    Polynomial,
    RationalFunction,
    jacobian,
    normal_form,
    parse_polynomial,
    parse_rational_function,
)
from .diffspace import (
    GE,
    GT,
    Piece,
    SpaceDef,
    StratumParam,
    TangentSpace,
    delta_profile,
    orbital_tangent,
    zariski_tangent,
)
from .fields import (
    Classification,
    Derivation,
    FlowParams,
    FlowResult,
    OrbitApprox,
    OrbitParams,
    check_local_completeness,
    classify,
    flow,
    is_admissible,
    orbit_explore,
    pushforward_along_flow,
)
from .actions import (
    FiniteGroupAction,
    HilbertMap,
    Stratification,
    TorusAction,
    hilbert_embed,
    infinitesimal_generators,
    orbit_type_partition,
    stabilizer,
    verify_invariant_gens,
)
from .forms import (
    DifferentialForm,
    PolyMap,
    exterior_d,
    find_descent_witness,
    interior_product,
    is_basic,
    is_horizontal,
    is_invariant,
    pullback,
    wedge,
)
from .hamiltonian import (
    MomentumMap,
    SymplecticForm,
    check_sjamaar,
    derive_momentum_map,
    hamiltonian_vector_field,
    poisson_bracket,
    reduced_strata,
    zero_level,
)

__version__ = "0.1.0"
