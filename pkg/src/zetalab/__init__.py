"""Zeros of zeta-type functions and of their derivatives left of the critical line."""

from .errors import (BudgetError, ConvergenceError, DomainError, PoleError, StepUnderflowError,
                     ZetaLabError)
from .lfunc import (FunctionSpec, ZetaFamily, evaluate, factor_zeta_spec, family_spec, fe_residual,
                    lpsi5_spec, riemann_zeta_spec, spec_from_name, z_rotated)
from .speiser import SpeiserReport, speiser_compare, speiser_pipeline, spira_line_check
from .trajectory import census, classify_theorem3, detect_double_zero, local_quadratic_fit, trace
from .zeros import ZeroRecord, scan_zeros, strip_zero_count, winding_count, zero_free_annulus

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "ConvergenceError", "DomainError", "PoleError", "StepUnderflowError", "ZetaLabError",
    "FunctionSpec", "ZetaFamily", "evaluate", "factor_zeta_spec", "family_spec", "fe_residual",
    "lpsi5_spec", "riemann_zeta_spec", "spec_from_name", "z_rotated",
    "SpeiserReport", "speiser_compare", "speiser_pipeline", "spira_line_check",
    "census", "classify_theorem3", "detect_double_zero", "local_quadratic_fit", "trace",
    "ZeroRecord", "scan_zeros", "strip_zero_count", "winding_count", "zero_free_annulus",
]
