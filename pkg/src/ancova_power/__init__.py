"""Power analysis for covariate-adjusted (ANCOVA) 1:1 randomized trials.

Closed-form power, sample size, and the 1 + R^2/2 power-ratio rule of
thumb, together with a Monte Carlo trial simulator that validates the
analytic formulas.
"""

from .errors import DomainError
from .normal_math import erfc, std_normal_cdf, std_normal_pdf, std_normal_quantile
from .power_engine import (
    ExpansionParams,
    PowerRatioReport,
    TrialDesign,
    adjusted_power_at_fixed_n,
    approx_power_one_term,
    asymptotic_variance,
    exact_power_two_term,
    expansion_params,
    power_ratio_exact,
    power_ratio_series,
    ratio_report,
    required_sample_size,
    rule_of_thumb,
)
from .simulate import (
    FitResult,
    SimConfig,
    SimResult,
    TrialData,
    fit_ancova,
    fit_unadjusted,
    generate_trial,
    run_campaign,
    student_t_critical,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_quantile",
    "erfc",
    "TrialDesign",
    "ExpansionParams",
    "PowerRatioReport",
    "asymptotic_variance",
    "exact_power_two_term",
    "approx_power_one_term",
    "required_sample_size",
    "adjusted_power_at_fixed_n",
    "power_ratio_exact",
    "expansion_params",
    "power_ratio_series",
    "rule_of_thumb",
    "ratio_report",
    "SimConfig",
    "SimResult",
    "TrialData",
    "FitResult",
    "generate_trial",
    "fit_ancova",
    "fit_unadjusted",
    "run_campaign",
    "student_t_critical",
    "__version__",
]
