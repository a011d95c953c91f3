"""Exact tools for polynomial vector fields tangent to spheres S^n in R^(n+1)."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .poly import Polynomial, parse_polynomial, format_polynomial, sum_of_squares
from .vector_field import (
    VectorField,
    SkewPolyMatrix,
    CanonicalForm,
    parse_field,
    format_field,
    lie_derivative,
    sphere_polynomial,
    tangency_cofactor,
    is_tangent,
    skew_decompose,
    canonical_decompose,
    layered_decompose,
    homogeneous_decompose,
    assemble,
    invariance_check,
    is_invariant,
    first_integral_check,
    integrability_certificate,
    RING,
    MODULO_SPHERE,
)
from .sphere_geometry import Hyperplane, cone_polynomial, sphere_invariance_check
from .extactic import extactic_polynomial, find_meridians, find_parallels
from .stereographic import push_forward
from .generators import generate, FAMILIES
