"""Lipschitz equivalence of homogeneous self-similar sets with complete overlaps."""
from .algebra import Affine, LambdaPoly, Rational, parse_expr, poly_compose_affine, poly_eval
from .coding import (
    BilipCertificate,
    EdgeWord,
    bilip_constants,
    bilip_map,
    pi_eval,
    sample_bilip_check,
)
from .dimension import box_count_dim, count_matrix, hausdorff_dim, spectral_radius
from .gds import (
    GraphDirectedSystem,
    PieceSpec,
    build_custom_graph,
    build_partition_graph,
    decide_equivalence,
    decide_graph_equivalence,
    signature,
    verify_equations,
)
from .ifs_model import (
    Box,
    ClassCertificate,
    HomogeneousIFS,
    Violation,
    cylinder,
    gamma_signature,
    normalize_right_free,
    reflect,
    validate_class,
)

__version__ = "0.1.0"
