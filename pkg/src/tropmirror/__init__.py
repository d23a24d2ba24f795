"""tropmirror: exact non-archimedean mirror machinery for 4d symplectic
cluster manifolds.

Novikov arithmetic over Q, tropical polytope valuations, eigenray-diagram
geometry, local mirror charts with wall crossing, glued sections with
Hartogs extension and monodromy certificates, volume-form BV calculus, and
filtered homological algebra (torsion = boundary depth).
"""

from .novikov import NovikovScalar, Valuation, nov_mul, nov_unit_inverse, nov_val
from .polytopes import Halfspace, RationalPolygon, convex_hull
from .series import LatticeSeries, eta, hull_val, hyperplane_monomial, xi
from .diagrams import EigenrayDiagram, Node, Ray, shear_apply
from .nodal import (
    NodalPolygon,
    NodeFrame,
    StripData,
    TaggedHalfspace,
    auto_strips,
    chart_transition,
    classify_small,
    decompose_admissible_intersection,
)
from .local_model import (
    NovikovPoint,
    WallCrossSpec,
    f_base,
    g_chart,
    pk_of_point,
    polygon_Pa,
    transition_charts,
    volume_pullback_check,
    wall_cross_series,
)
from .bv import DiffForm, PolyVector, bv_delta, contract_volume, interior_product
from .filtered import FilteredComplex, diagonalize_valuation, invariant_exponents
from .gluing import (
    BoundaryEdge,
    CoverElement,
    GluedSection,
    cocycle_check,
    glue_sections,
    hartogs_extend,
    monodromy_transport,
    project_point,
)

__version__ = "0.1.0"
