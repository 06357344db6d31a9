"""Numerical laboratory for Dirichlet series: pointwise evaluation with
certified truncation tails, mean-value (moment) experiments, Kronecker torus
flows, and argument-principle zero scans, all with thread-count-independent
results.
"""

__version__ = "0.1.0"

from .coefficients import (
    CoefficientSource,
    ExplicitSource,
    MultiplicativeSource,
    SeriesSpec,
    builtin_series,
    coefficient,
    load_source,
    series_descriptor,
)
from .convolution import (
    convolution_power,
    dirichlet_convolve,
    identity_coefficients,
    inverse_coefficients,
    mollifier_coefficients,
)
from .errors import AccuracyWarning, NumericalError, PreconditionError
from .moments import (
    MomentReport,
    OrderScanReport,
    QuadratureConfig,
    estimate_moment,
    lindelof_product,
    lindelof_target,
    order_scan,
    polynomial_mean_exact,
    shell_disc_distance,
    shell_sum_bound,
    theoretical_target,
)
from .parallel import resolve_threads
from .primes import SmoothSet, factorize, first_primes, log_frequencies, smooth_enumerate
from .series import (
    default_evaluator,
    eval_array,
    partial_eval,
    smooth_truncation_eval,
    tail_norm,
    twisted_eval,
)
from .torus import (
    Box,
    FlowConfig,
    TorusPoint,
    TychonoffBall,
    ball_measure_mc,
    ball_time_average,
    box_from_json,
    box_hitting_fraction,
    flow_config_from_json,
    flow_point,
    standard_box_suite,
    time_average,
    tychonoff_distance,
)
from .zeros import (
    Rectangle,
    RecurrenceReport,
    ZeroRecord,
    density_table,
    mollifier_tail_decay,
    recurrence_scan,
    rouche_verify,
    winding_count,
    winding_on_circle,
    zero_scan,
)
from .zeta import zeta_eval, zeta_values

__all__ = [
    "AccuracyWarning",
    "Box",
    "CoefficientSource",
    "ExplicitSource",
    "FlowConfig",
    "MomentReport",
    "MultiplicativeSource",
    "NumericalError",
    "OrderScanReport",
    "PreconditionError",
    "QuadratureConfig",
    "Rectangle",
    "RecurrenceReport",
    "SeriesSpec",
    "SmoothSet",
    "TorusPoint",
    "TychonoffBall",
    "ZeroRecord",
    "ball_measure_mc",
    "ball_time_average",
    "box_from_json",
    "box_hitting_fraction",
    "builtin_series",
    "coefficient",
    "convolution_power",
    "default_evaluator",
    "density_table",
    "dirichlet_convolve",
    "estimate_moment",
    "eval_array",
    "factorize",
    "first_primes",
    "flow_config_from_json",
    "flow_point",
    "identity_coefficients",
    "inverse_coefficients",
    "lindelof_product",
    "lindelof_target",
    "load_source",
    "log_frequencies",
    "mollifier_coefficients",
    "mollifier_tail_decay",
    "order_scan",
    "partial_eval",
    "polynomial_mean_exact",
    "recurrence_scan",
    "resolve_threads",
    "rouche_verify",
    "series_descriptor",
    "shell_disc_distance",
    "shell_sum_bound",
    "smooth_enumerate",
    "smooth_truncation_eval",
    "standard_box_suite",
    "tail_norm",
    "theoretical_target",
    "time_average",
    "twisted_eval",
    "tychonoff_distance",
    "winding_count",
    "winding_on_circle",
    "zero_scan",
    "zeta_eval",
    "zeta_values",
]
