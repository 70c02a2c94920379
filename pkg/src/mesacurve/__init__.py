"""Mesa decompositions of PL functions on log curves and the singularities they contract to."""

__version__ = "0.1.0"

from .cohomology import (  # noqa: E402
    INF,
    ExplicitCurve,
    Geometry,
    LineBundleData,
    boundary_value_space,
    cech_h,
    connecting_values,
    evaluate_section,
    generic_acyclicity,
    global_sections,
    riemann_section_space,
)
from .contraction import (  # noqa: E402
    BbarRing,
    bbar_multiply,
    classify_gorenstein,
    contract_fiber,
    genus_of_singularity,
    ring_presentation,
)
from .family import LogFamily, global_radius, is_simple, specialize, validate_mesa_family  # noqa: E402
from .graph import DualGraph, core, genus, unique_path_from_top  # noqa: E402
from .io import parse, serialize  # noqa: E402
from .linebundle import mesa_restriction_shapes, multidegree  # noqa: E402
from .monoid import Face, MonoidElement, face_quotient  # noqa: E402
from .pl import PLFunction, decompose, is_small, mesa_from, validate_pl  # noqa: E402
