"""Hyperbolic cone-manifold structures on spaces of weighted points on a circle."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConespaceError,
    ConsistencyError,
    DomainError,
    NumericWarning,
    QuadratureError,
    ValidationError,
)
from .minkowski import (  # noqa: E402
    LorentzForm,
    MinkowskiVector,
    PlaneRelation,
    RelationKind,
    VectorKind,
    lorentz_q,
    make_lightlike,
    make_normal,
    make_point,
    plane_relation,
    point_distance,
    reflect,
)
from .polygon import (  # noqa: E402
    AreaForm,
    MarkedPermutation,
    WeightVector,
    build_area_form,
    embed_polygon,
    equal_weights,
    triangle_coordinates,
    validate_weights,
)
from .polyhedron import (  # noqa: E402
    MarkedBlock,
    TrigBundle,
    build_block,
    closed_geodesic_length,
    cone_angle,
    equal_weight_cone_angle,
    face_relation,
    hexahedron_dihedral,
    n_function,
    pentagon_edge_length,
    volume_x6,
)
