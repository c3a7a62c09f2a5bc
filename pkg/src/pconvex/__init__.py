"""Certify p-convexity of implicit domains and synthesize p-plurisubharmonic defining functions."""

from .distance import (
    DistanceField,
    curvature_transport_check,
    delta_field,
    principal_curvatures,
    project,
    project_to_boundary,
    signed_distance,
)
from .domains import ImplicitDomain, catalog, from_spec, parse_domain_arg
from .fields import ScalarField, fd_gradient, fd_hessian
from .linalg import Frame, Spectrum, eigh, min_trace_p, orthonormalize, random_frame, trace_on_plane
from .pconvexity import certify_boundary, is_p_psh_at, sample_boundary, sectional_curvatures
from .synthesis import DefiningFunction, SynthesisConfig, SynthesisParams, synthesize, verify

__version__ = "0.1.0"
