"""Numerical toolkit for the chordal Loewner equation in the upper half-plane.

Trace hulls from driving functions, recover driving functions from slits,
find the unique constant coefficients for several disjoint slits, and test
welding/quasislit/approach properties.
"""

from .driving import (LINEAR, PIECEWISE_CONSTANT, PIECEWISE_SQRT,
                      MultiSlitSystem, SampledDriving)
from .errors import (BranchError, CollisionError, ConvergenceError,
                     DisjointnessError, DomainError, ExhaustedError,
                     GeometryError, InsufficientData, LoewnerError,
                     PairingError, ResolutionError, StepError)
from .forward import (TraceResult, backward_trajectory, self_similar_zigzag,
                      steer_through, trace_multi, trace_single)
from .inverse import (DriveResult, ParameterizedSlit, SlitPolyline,
                      drive_from_slit, hcap_of_slit, polyline_hausdorff,
                      reparameterize_by_hcap)
from .coefficients import (BangBangSchedule, CoefficientSolution,
                           GrowthResult, block_intervals,
                           find_constant_coefficients, grow_alternating,
                           union_hcap_time, verify_solution)
from .maps import (ElementaryMap, MapChain, angle_of_coefficient, boundary_image,
                   chain_eval, coefficient_of_angle, eval_elementary,
                   hcap_moment)
from .welding import (AngleEstimate, DiagnosticsReport, RealTrajectory,
                      WeldingReport, approach_angle, approach_coefficient,
                      hcap_monte_carlo, hsiz, is_welded, local_holder_norms,
                      quasisymmetry_constant, real_trajectory,
                      welding_homeomorphism)

__version__ = "0.1.0"

__all__ = [
    "AngleEstimate", "BangBangSchedule", "BranchError", "CoefficientSolution",
    "CollisionError", "ConvergenceError", "DiagnosticsReport",
    "DisjointnessError", "DomainError", "DriveResult", "ElementaryMap",
    "ExhaustedError", "GeometryError", "GrowthResult", "InsufficientData",
    "LINEAR", "LoewnerError", "MapChain", "MultiSlitSystem",
    "PIECEWISE_CONSTANT", "PIECEWISE_SQRT", "PairingError",
    "ParameterizedSlit", "RealTrajectory", "ResolutionError", "SampledDriving",
    "SlitPolyline", "StepError", "TraceResult", "WeldingReport",
    "angle_of_coefficient", "approach_angle", "approach_coefficient",
    "backward_trajectory", "block_intervals", "boundary_image", "chain_eval",
    "coefficient_of_angle", "drive_from_slit", "eval_elementary",
    "find_constant_coefficients", "grow_alternating", "hcap_moment",
    "hcap_monte_carlo", "hcap_of_slit", "hsiz", "is_welded",
    "local_holder_norms", "polyline_hausdorff", "quasisymmetry_constant",
    "real_trajectory", "reparameterize_by_hcap", "self_similar_zigzag",
    "steer_through", "trace_multi", "trace_single", "union_hcap_time",
    "verify_solution", "welding_homeomorphism",
]
