"""Gabor-frame analysis for the triangle window.

Classifies lattice constants against the settled frame/non-frame regions,
constructs and verifies the unique compactly supported dual window on the
hyperbolic strips, certifies the determinant nonvanishing behind those
constructions in exact rational arithmetic, and sweeps singular values of
the rational-lattice matrices for independent spectral evidence.
"""

from .splinecore import (LatticeParams, PiecewisePoly, eval_b2,
                         pp_add, pp_mul, shifted_b2_as_pp)
from .dualsystem import DualityMatrix, build_G, check_sparsity, reduce_to_block
from .certify import (DetCertificate, certify_nonvanishing, certify_params,
                      certify_system, check_closed_forms, det_piecewise,
                      minor_report)
from .dualwindow import (DualWindow, boundary_limits, build_dual, cramer_h,
                         cramer_h_shifted, discontinuity_report, solve_dual_at)
from .frameset import RegionVerdict, classify, region_boundaries, strip_index
from .verify import bessel_bound, cross_check, duality_residual
from .zibulski import (ZZSpectrum, build_phi, build_psi, case_j1_check,
                       case_j3_check, rank_sweep)

__version__ = "0.1.0"

__all__ = [
    "LatticeParams", "PiecewisePoly", "eval_b2", "pp_add", "pp_mul",
    "shifted_b2_as_pp", "DualityMatrix", "build_G", "check_sparsity",
    "reduce_to_block", "DetCertificate", "certify_nonvanishing",
    "certify_params", "certify_system", "check_closed_forms", "det_piecewise",
    "minor_report", "DualWindow", "boundary_limits", "build_dual", "cramer_h",
    "cramer_h_shifted", "discontinuity_report", "solve_dual_at",
    "RegionVerdict", "classify", "region_boundaries", "strip_index",
    "bessel_bound", "cross_check", "duality_residual", "ZZSpectrum",
    "build_phi", "build_psi", "case_j1_check", "case_j3_check", "rank_sweep",
]
