"""cassis: classification of contracting automorphisms of normal surface
singularities.

The pipeline takes the weighted dual graph of a resolution (plus optional
dynamics annotations, a lifted germ, and orbibundle numbers), contracts it to
its minimal negative model, and decides between the two admissible outcomes:
a cyclic quotient singularity with a normal-form germ, or a weighted
homogeneous singularity presented as a negative orbibundle over an orbifold
base.  The orbit-space surface (Hopf / Kodaira / properly elliptic) follows
from the decision table.
"""

from .classify import (
    AdmissibleDataDocument,
    BundleSpec,
    Classification,
    ClassificationKind,
    CoveringRelation,
    CycleObstructionError,
    GermData,
    OrbitSurfaceKind,
    OrbitSurfaceVerdict,
    ProvenanceStep,
    build_report,
    classify_orbit_surface,
    classify_singularity,
    cyclic_cover_degree,
)
from .dual_graph import (
    CornerAnnotation,
    CyclicQuotientData,
    DualGraphDocument,
    DynamicsAnnotations,
    GraphShape,
    Vertex,
    blow_down,
    chain_weights,
    hj_chain_graph,
    hj_expand,
    hj_fold,
    intersection_matrix,
    is_negative_definite,
    minimal_negative_model,
    shape,
)
from .errors import (
    BadOrbifoldError,
    CassisError,
    ClassificationError,
    DimensionMismatchError,
    GraphStructureError,
    NonAttractingError,
    NotContractibleError,
    NotEquivariantError,
    OrderUnderflowError,
    SingularLinearPartError,
    SNCViolationError,
    UnsupportedJordanError,
)
from .graph_dynamics import (
    CentralVerdict,
    CornerData,
    CycleCertificate,
    HyperbolicityLabeling,
    VertexLabel,
    central_component_check,
    corner_inequality,
    cycle_obstruction,
    propagate_hyperbolicity,
)
from .jets import (
    DiagonalGroup,
    Jet,
    apply_group,
    check_commutes,
    compose,
    equivariant_average,
    invert,
    monomials_of_degree,
    monomials_up_to,
)
from .normal_forms import (
    HJGermCase,
    HJGermKind,
    NormalFormResult,
    ResonanceReport,
    classify_hj_germ,
    equivariance_lattice,
    homological_split,
    koenigs,
    poincare_dulac,
    refine_hj_germ_kind,
    resonances,
)
from .orbifold import (
    OrbibundleData,
    OrbifoldSurface,
    OrbifoldType,
    SmoothCoverData,
    canonical_cover_degree,
    classify_orbifold,
    euler_characteristic,
    is_contractible,
    is_good,
    orbidegree,
    smooth_cover_data,
)
from .scalars import EXACT, FLOAT, FLOAT_TOLERANCE, Cyclo, rat, zeta

__version__ = "0.1.0"
