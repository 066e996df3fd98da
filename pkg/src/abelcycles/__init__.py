"""Limit cycles of Abel equations x' = A(t) x^3 + B(t) x^2.

A and B range over the span of a three-function Chebyshev family.  The
package certifies the family, classifies the pair {A, B}, integrates the
return map with its derivatives, counts non-zero limit cycles with
multiplicity and tracks them under rotation of the vector field.
"""

from .basis import (DEFAULT_NUMERICS, AbelEquation, BasisFamily, Kind, NumericsConfig,
                    denormalize_trinomial, eval_basis, eval_coeffs, normalize_trinomial)
from .chebyshev import (EctCertificate, ect_certificate, et_accuracy_falsifier,
                        shifted_power_wronskian, wronskian, zero_count)
from .classify import ClassificationResult, classify, combination_range, d1_witness, d2_sign
from .continuation import (BifurcationEvent, Branch, FoldPoint, SharpnessResult, SweepResult,
                           branch_monotone, fold_checks, locate_fold, persistence_step,
                           sharpness_demo, sweep)
from .cycles import (BoundVerification, CycleCensus, LimitCycle, LyapunovReport, Stability,
                     basis_integrals, check_bound, find_cycles, isocline_diagnostics,
                     lyapunov_constants, lyapunov_direct, verify_bound)
from .errors import (AbelError, DiagnosticFailure, DomainError, Indeterminate, ParseError,
                     PreconditionViolated, SearchFailure, SingularityError, StepFailure,
                     UnresolvedRoot, UnresolvedZero, ValidationError)
from .flow import (ClosedCycleChecks, Escape, ReturnData, Trajectory, closed_cycle_checks,
                   displacement, integrate, poincare, return_map)

__all__ = [
    "DEFAULT_NUMERICS", "AbelEquation", "BasisFamily", "Kind", "NumericsConfig",
    "denormalize_trinomial", "eval_basis", "eval_coeffs", "normalize_trinomial",
    "EctCertificate", "ect_certificate", "et_accuracy_falsifier", "shifted_power_wronskian",
    "wronskian", "zero_count",
    "ClassificationResult", "classify", "combination_range", "d1_witness", "d2_sign",
    "BifurcationEvent", "Branch", "FoldPoint", "SharpnessResult", "SweepResult",
    "branch_monotone", "fold_checks", "locate_fold", "persistence_step", "sharpness_demo",
    "sweep",
    "BoundVerification", "CycleCensus", "LimitCycle", "LyapunovReport", "Stability",
    "basis_integrals", "check_bound", "find_cycles", "isocline_diagnostics",
    "lyapunov_constants", "lyapunov_direct", "verify_bound",
    "AbelError", "DiagnosticFailure", "DomainError", "Indeterminate", "ParseError",
    "PreconditionViolated", "SearchFailure", "SingularityError", "StepFailure",
    "UnresolvedRoot", "UnresolvedZero", "ValidationError",
    "ClosedCycleChecks", "Escape", "ReturnData", "Trajectory", "closed_cycle_checks",
    "displacement", "integrate", "poincare", "return_map",
]
