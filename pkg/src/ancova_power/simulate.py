"""Monte Carlo validation of the analytic power formulas.

Simulates 1:1 randomized trials with one baseline covariate, fits either
an ANCOVA (outcome ~ intercept + treatment + covariate) or an unadjusted
two-sample comparison, and aggregates empirical rejection rates.

Reproducibility: each replication draws from its own Philox stream keyed
by (seed, rep_index), so a replication is a pure function of those two
integers and results do not depend on batching or execution order.
Normal variates come from the inverse-CDF transform through
``normal_math.std_normal_quantile``, keeping the whole stack
self-consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .normal_math import std_normal_quantile
from .power_engine import TrialDesign, asymptotic_variance, exact_power_two_term

__all__ = [
    "SimConfig",
    "SimResult",
    "TrialData",
    "FitResult",
    "generate_trial",
    "fit_ancova",
    "fit_unadjusted",
    "run_campaign",
    "student_t_critical",
]

TEST_KINDS = ("wald_z", "student_t")

# replications whose covariate has (numerically) zero variance cannot be
# adjusted for and are skipped
_COLLINEARITY_VARIANCE_FLOOR = 1e-12

_CHUNK_REPS = 4096


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo campaign: trial shape, analysis, and RNG seed."""

    n_subjects: int
    tau: float
    sigma: float
    rho: float
    alpha: float
    n_reps: int
    seed: int
    test_kind: str = "student_t"
    adjust: bool = True

    def __post_init__(self):
        if self.n_subjects <= 0 or self.n_subjects % 2 != 0:
            raise DomainError(
                f"n_subjects must be a positive even integer (exact 1:1 split), "
                f"got {self.n_subjects}"
            )
        if not (self.sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not (self.rho * self.rho < 1.0):
            raise DomainError(f"rho must satisfy rho^2 < 1, got {self.rho}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n_reps < 1:
            raise DomainError(f"n_reps must be >= 1, got {self.n_reps}")
        if not (0 <= self.seed < 2**64):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.test_kind not in TEST_KINDS:
            raise DomainError(f"test_kind must be one of {TEST_KINDS}, got {self.test_kind!r}")


@dataclass(frozen=True)
class TrialData:
    """Simulated trial: parallel arrays, one entry per subject."""

    treatment: np.ndarray
    covariate: np.ndarray
    outcome: np.ndarray

    def __len__(self) -> int:
        return len(self.outcome)


class FitResult(NamedTuple):
    tau_hat: float
    se_tau_hat: float
    df: int


@dataclass(frozen=True)
class SimResult:
    """Aggregated campaign output next to the analytic reference values."""

    rejection_rate: float
    mc_stderr: float
    mean_tau_hat: float
    empirical_se_tau_hat: float
    analytic_se: float
    analytic_power: float
    n_reps_completed: int


def _rep_uniforms(config: SimConfig, rep_index: int) -> np.ndarray:
    """The 3n uniform draws of one replication, from its keyed stream."""
    key = np.array([config.seed, rep_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    u = rng.random(3 * config.n_subjects)
    # random() lands in [0, 1); keep the quantile's domain open
    return np.maximum(u, 5e-324)


def _decode_trials(config: SimConfig, uniforms: np.ndarray):
    """Map (B, 3n) uniforms to treatment/covariate/outcome arrays (B, n)."""
    n = config.n_subjects
    x = std_normal_quantile(uniforms[:, :n])
    noise_scale = config.sigma * math.sqrt(1.0 - config.rho**2)
    eps = noise_scale * std_normal_quantile(uniforms[:, n:2 * n])

    # balanced permutation: ranks of n iid uniforms pick the treated half
    order = np.argsort(uniforms[:, 2 * n:], axis=1)
    treatment = np.zeros_like(x)
    np.put_along_axis(treatment, order[:, :n // 2], 1.0, axis=1)

    outcome = config.tau * treatment + config.sigma * config.rho * x + eps
    return treatment, x, outcome


def generate_trial(config: SimConfig, rep_index: int) -> TrialData:
    """Simulate one trial: x ~ N(0,1), y = tau*t + sigma*rho*x + eps with
    eps ~ N(0, sigma^2*(1-rho^2)), exactly n/2 subjects per arm."""
    if rep_index < 0:
        raise DomainError(f"rep_index must be nonnegative, got {rep_index}")
    u = _rep_uniforms(config, rep_index)[np.newaxis, :]
    treatment, covariate, outcome = _decode_trials(config, u)
    return TrialData(treatment=treatment[0], covariate=covariate[0], outcome=outcome[0])


def _fit_ancova_batch(treatment, covariate, outcome):
    """OLS of outcome on (1, treatment, covariate) for each row.

    Solves the 3x3 normal equations batch-wise; returns per-row
    (tau_hat, se_tau_hat, covariate sample variance).
    """
    b, n = outcome.shape
    st = treatment.sum(axis=1)
    sx = covariate.sum(axis=1)
    stx = (treatment * covariate).sum(axis=1)
    sxx = (covariate * covariate).sum(axis=1)
    sy = outcome.sum(axis=1)
    sty = (treatment * outcome).sum(axis=1)
    sxy = (covariate * outcome).sum(axis=1)
    syy = (outcome * outcome).sum(axis=1)

    gram = np.empty((b, 3, 3))
    gram[:, 0, 0] = n
    gram[:, 0, 1] = gram[:, 1, 0] = st
    gram[:, 0, 2] = gram[:, 2, 0] = sx
    gram[:, 1, 1] = st  # treatment is 0/1 so sum(t^2) = sum(t)
    gram[:, 1, 2] = gram[:, 2, 1] = stx
    gram[:, 2, 2] = sxx
    moments = np.stack([sy, sty, sxy], axis=1)

    beta = np.linalg.solve(gram, moments[:, :, np.newaxis])[:, :, 0]
    sse = np.maximum(syy - (beta * moments).sum(axis=1), 0.0)
    resid_var = sse / (n - 3)
    gram_inv = np.linalg.inv(gram)
    se_tau = np.sqrt(resid_var * gram_inv[:, 1, 1])

    cov_var = (sxx - sx * sx / n) / (n - 1)
    return beta[:, 1], se_tau, cov_var


def _fit_unadjusted_batch(treatment, outcome):
    """Difference of arm means with pooled-variance standard error."""
    b, n = outcome.shape
    n1 = treatment.sum(axis=1)
    n0 = n - n1
    s1 = (treatment * outcome).sum(axis=1)
    s0 = outcome.sum(axis=1) - s1
    m1 = s1 / n1
    m0 = s0 / n0
    ss0 = ((1.0 - treatment) * (outcome - m0[:, None])**2).sum(axis=1)
    ss1 = (treatment * (outcome - m1[:, None])**2).sum(axis=1)
    pooled = np.maximum(ss0 + ss1, 0.0) / (n - 2)
    se = np.sqrt(pooled * (1.0 / n0 + 1.0 / n1))
    return m1 - m0, se


def fit_ancova(data: TrialData) -> FitResult:
    """OLS fit of the ANCOVA model; tau_hat is the treatment coefficient."""
    _require_both_arms(data)
    if len(data) < 4:
        raise DomainError(f"need at least 4 rows to fit ANCOVA, got {len(data)}")
    t = data.treatment[np.newaxis, :].astype(float)
    x = data.covariate[np.newaxis, :].astype(float)
    y = data.outcome[np.newaxis, :].astype(float)
    if float(np.var(data.covariate, ddof=1)) < _COLLINEARITY_VARIANCE_FLOOR:
        raise np.linalg.LinAlgError("covariate is (numerically) constant; design is collinear")
    tau_hat, se, _ = _fit_ancova_batch(t, x, y)
    return FitResult(float(tau_hat[0]), float(se[0]), len(data) - 3)


def fit_unadjusted(data: TrialData) -> FitResult:
    """Two-sample difference of means with pooled-variance standard error."""
    _require_both_arms(data)
    t = data.treatment[np.newaxis, :].astype(float)
    y = data.outcome[np.newaxis, :].astype(float)
    tau_hat, se = _fit_unadjusted_batch(t, y)
    return FitResult(float(tau_hat[0]), float(se[0]), len(data) - 2)


def _require_both_arms(data: TrialData) -> None:
    n1 = int(np.sum(data.treatment))
    if n1 == 0 or n1 == len(data):
        raise ValueError("dataset must contain both arms")


def run_campaign(config: SimConfig) -> SimResult:
    """Run the full campaign and aggregate rejections.

    Replications are processed in fixed-size chunks with sum-based
    accumulators, so the result is deterministic for a given config no
    matter how the work is scheduled.
    """
    n = config.n_subjects
    df = n - 3 if config.adjust else n - 2
    if config.test_kind == "wald_z":
        critical = std_normal_quantile(1.0 - config.alpha / 2.0)
    else:
        critical = student_t_critical(config.alpha, df)

    n_rejections = 0
    n_completed = 0
    sum_tau = 0.0
    sum_tau_sq = 0.0

    for start in range(0, config.n_reps, _CHUNK_REPS):
        reps = range(start, min(start + _CHUNK_REPS, config.n_reps))
        uniforms = np.stack([_rep_uniforms(config, r) for r in reps])
        treatment, covariate, outcome = _decode_trials(config, uniforms)

        if config.adjust:
            tau_hat, se, cov_var = _fit_ancova_batch(treatment, covariate, outcome)
            ok = cov_var >= _COLLINEARITY_VARIANCE_FLOOR
        else:
            tau_hat, se = _fit_unadjusted_batch(treatment, outcome)
            ok = np.ones(len(tau_hat), dtype=bool)

        reject = ok & (np.abs(tau_hat) > critical * se)
        n_rejections += int(reject.sum())
        n_completed += int(ok.sum())
        sum_tau += float(tau_hat[ok].sum())
        sum_tau_sq += float((tau_hat[ok] ** 2).sum())

    rate = n_rejections / n_completed
    mean_tau = sum_tau / n_completed
    if n_completed > 1:
        emp_var = max(sum_tau_sq - n_completed * mean_tau**2, 0.0) / (n_completed - 1)
    else:
        emp_var = 0.0

    design = TrialDesign(alpha=config.alpha, tau=config.tau, sigma=config.sigma,
                         n_total=float(n), r=config.rho if config.adjust else 0.0)
    return SimResult(
        rejection_rate=rate,
        mc_stderr=math.sqrt(rate * (1.0 - rate) / n_completed),
        mean_tau_hat=mean_tau,
        empirical_se_tau_hat=math.sqrt(emp_var),
        analytic_se=math.sqrt(asymptotic_variance(design)),
        analytic_power=exact_power_two_term(design),
        n_reps_completed=n_completed,
    )


# --- Student t critical values via the regularized incomplete beta ---

def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def _t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= t) for t >= 0."""
    if t == 0.0:
        return 1.0
    return _betainc_reg(0.5 * df, 0.5, df / (df + t * t))


def student_t_critical(alpha: float, df: int) -> float:
    """Two-sided critical value t such that P(|T_df| > t) = alpha.

    Bisection on the incomplete-beta t CDF; converges to the normal
    critical value as df grows. Accurate to ~1e-8.
    """
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")

    lo, hi = 0.0, 2.0
    while _t_two_sided_p(hi, df) > alpha:
        hi *= 2.0
        if hi > 1e308:
            raise ArithmeticError("failed to bracket the t critical value")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _t_two_sided_p(mid, df) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10 * max(1.0, lo):
            break
    return 0.5 * (lo + hi)
