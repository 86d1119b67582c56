"""Zeros of random holomorphic sections twisted by Berezin-Toeplitz operators on the sphere."""

from .geometry import (
    INFINITY,
    ChartPoint,
    SpherePoint,
    Symbol,
    ball_volume,
    fs_distance,
    grad_norm_sq,
    log_f2_laplacian_density,
    stereo_forward,
    stereo_inverse,
)
from .sections import RngSpec, SectionVector, basis_norm_factor, pointwise_norm_sq, sample_random_section
from .toeplitz import (
    OperatorMatrix,
    op_from_symbol_quadrature,
    op_height,
    op_identity,
    op_x1,
    op_x2,
    op_xy_lambda,
)
from .zeros import ZeroSet, apply_operator, count_in_ball, polynomial_roots
from .constants import ConstantsResult, c_n_closed, constants_report, hyp2f1_via_euler, i_n_quadrature, p_n_taylor
from .kernel import ExpansionFit, bergman_diag, expansion_fit, positivity_scan
from .symbols import height_symbol, identity_symbol, make_symbol, operator_factory, xy_symbol
from .experiments import (
    EstimatorReport,
    ExperimentConfig,
    GridReport,
    estimator_E,
    reconstruct_grid,
    simulate,
    theory_value,
)

__version__ = "0.1.0"
