"""monolab: derivative-sign laboratory for monotonicity classes.

Jets deliver arbitrary-order derivatives of parsed expressions at
configurable precision; exact partition combinatorics expand derivatives
of compositions term by term; numerical sweeps test membership in the
four classes (completely / absolutely monotonic, plain and logarithmic)
and validate the closed-form classification of (1+a/x)^(x+b).
"""

__version__ = "0.1.0"

from .core import DEFAULT_PRECISION, Interval
from .expr import Binding, Expr, evaluate, make_power_expr, parse, to_text
from .jets import Jet, derivatives_from_jet, jet_exp, jet_lift, jet_ln, jet_mul, jet_pow
from .bruno import (
    MultisetPartition,
    bruno_coefficient,
    compose_nth,
    enumerate_partitions,
    exp_of_log,
    signed_terms,
)
from .mono import (
    ClassVerdict,
    GridSpec,
    InclusionVariant,
    MonotoneClass,
    Tolerance,
    check_class,
    verify_inclusion,
)
from .powerexp import (
    ParamPoint,
    RegionReport,
    classify,
    critical_beta,
    log_deriv1,
    log_deriv2,
    p_kernel,
    q_kernel,
    shifted_cm_check,
)
from .laplace import (
    DiscreteMeasure,
    bernstein_synthesize,
    gamma_value,
    log_deriv2_integral,
    power_identity_check,
)

__all__ = [
    "Binding",
    "ClassVerdict",
    "DEFAULT_PRECISION",
    "DiscreteMeasure",
    "Expr",
    "GridSpec",
    "InclusionVariant",
    "Interval",
    "Jet",
    "MonotoneClass",
    "MultisetPartition",
    "ParamPoint",
    "RegionReport",
    "Tolerance",
    "bernstein_synthesize",
    "bruno_coefficient",
    "check_class",
    "classify",
    "compose_nth",
    "critical_beta",
    "derivatives_from_jet",
    "enumerate_partitions",
    "evaluate",
    "exp_of_log",
    "gamma_value",
    "jet_exp",
    "jet_lift",
    "jet_ln",
    "jet_mul",
    "jet_pow",
    "log_deriv1",
    "log_deriv2",
    "log_deriv2_integral",
    "make_power_expr",
    "p_kernel",
    "parse",
    "power_identity_check",
    "q_kernel",
    "shifted_cm_check",
    "signed_terms",
    "to_text",
    "verify_inclusion",
]
