"""Exact-arithmetic geometry of two-sensor FDOA curves.

The package constructs the ambient quadric-intersection surface carrying
every FDOA curve, the curves themselves in complex projective 4-space with
their plane quartic and octic projections, the rational maps between them,
exact singularity reports, and a numeric tracer for the real isocurve
branches together with SVG/CSV emission.
"""

from .scalars import ExactScalar, ExtensionSpec, gauss_sqrt, sc
from .polynomials import (
    CP1, ORIGINAL, PARAM, PLANE, Q, U, W, W3, Z,
    Frame, HomogPoly, ProjPoint,
    FrameMismatch, DegreeMismatch, NotOnVariety, SingularTransform, UnknownVariable,
    jacobian_rank_at, linear_divides,
    poly_add, poly_eval, poly_mul, poly_partial, poly_substitute_linear, proj,
)
from .model import (
    ORIGINAL_TO_W, ORIGINAL_TO_Z, W_TO_Z,
    FrameTransform, Scenario,
    AtSensor, NonRealScenario, ScenarioError, ZeroTDOA,
    build_L, build_P, build_Q, build_Q1, build_Q1_Q2, build_Q2, build_Qtilde,
    build_TDOA_L, build_f, build_g, build_h,
    cauchy_schwarz_ok, convert_point, fdoa_value, parse_scenario_text,
    random_equal_velocity, random_scenario,
)

__version__ = "0.1.0"
