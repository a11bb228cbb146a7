"""Weighted maximum-likelihood estimation and goodness-of-fit reporting.

All families are fitted by the same two-stage scheme: derivative-free
simplex descent to locate the basin, then quasi-Newton polish driven by
central-difference gradients, both on transformed coordinates (log for
positive parameters, logit for the tail deformation, shifted log for the
extension parameter bounded above).  Convergence is judged by the
max-abs transformed gradient of the weight-normalized log-likelihood,
the numerical surrogate for the score equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .data import WeightedSample
from .distributions import (
    EKG1Params,
    EKG2Params,
    KappaGenParams,
    NetWealthMixtureParams,
    WeibullParams,
    ekg1_logpdf,
    ekg2_logpdf,
    kgen_from_normalized,
    kgen_logpdf,
    _weibull_logpdf,
)
from .errors import (
    DegenerateDataError,
    DomainError,
    MomentDivergenceError,
    SupportViolationError,
)
from . import inequality as ineq

MODEL_TAGS = ("kappagen", "weibull", "ekg1", "ekg2", "mixture", "kappagen_normalized")

_SCORE_TOL = 1e-4
_MIN_EFFECTIVE_BRANCH = 30.0


@dataclass(frozen=True)
class FitConfig:
    """Controls for a maximum-likelihood fit."""

    model: str = "kappagen"
    max_iter: int = 500
    rel_tol: float = 1e-9
    multistart: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_TAGS:
            raise DomainError(f"unknown model {self.model!r}; expected one of {MODEL_TAGS}")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if not self.rel_tol > 0.0:
            raise DomainError("rel_tol must be positive")
        if self.multistart < 1:
            raise DomainError("multistart must be at least 1")


@dataclass(frozen=True)
class GoodnessOfFit:
    """Log-likelihood plus money-amount measures on the decile grid."""

    loglik: float
    lrsse: float
    aeg: float


@dataclass(frozen=True)
class FitResult:
    """Estimated parameters with convergence and fit diagnostics."""

    model: str
    params: object
    loglik: float
    converged: bool
    iterations: int
    score_norm: float
    gof: GoodnessOfFit | None = None
    scale: float | None = None
    flags: tuple = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# log-likelihood


def _mixture_loglik_terms(values, p: NetWealthMixtureParams):
    out = np.empty_like(values)
    neg = values < 0.0
    zero = values == 0.0
    pos = values > 0.0
    with np.errstate(divide="ignore"):
        if np.any(neg):
            out[neg] = math.log(p.theta1) if p.theta1 > 0.0 else -math.inf
            if p.theta1 > 0.0:
                out[neg] += _weibull_logpdf(-values[neg], p.negative_branch)
        out[zero] = math.log(p.theta2) if p.theta2 > 0.0 else -math.inf
        if np.any(pos):
            out[pos] = math.log(p.theta3) if p.theta3 > 0.0 else -math.inf
            if p.theta3 > 0.0:
                out[pos] += kgen_logpdf(values[pos], p.positive_branch)
    return out


def _logpdf_terms(model, params, values):
    if model == "mixture":
        return _mixture_loglik_terms(values, params)
    bad = ~(values > 0.0)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SupportViolationError(
            f"observation {idx} (value {values[idx]}) outside the positive support "
            f"of model {model!r}", index=idx, value=float(values[idx]))
    if model in ("kappagen", "kappagen_normalized"):
        return kgen_logpdf(values, params)
    if model == "weibull":
        return _weibull_logpdf(values, params)
    if model == "ekg1":
        return ekg1_logpdf(values, params)
    if model == "ekg2":
        return ekg2_logpdf(values, params)
    raise DomainError(f"unknown model {model!r}")


def loglik(sample: WeightedSample, model, params):
    """Weighted log-likelihood sum(w_i * ln f(x_i)), computed in log space."""
    terms = _logpdf_terms(model, params, sample.values)
    return float(np.sum(sample.weights * np.asarray(terms, dtype=float)))


# ---------------------------------------------------------------------------
# transforms between optimizer coordinates and parameter objects


def _sigmoid(t):
    return 1.0 / (1.0 + math.exp(-t)) if t > -500.0 else 0.0


def _logit(x):
    x = min(max(x, 1e-12), 1.0 - 1e-12)
    return math.log(x / (1.0 - x))


def _decode(model, vec):
    if model == "kappagen":
        return KappaGenParams(math.exp(vec[0]), math.exp(vec[1]),
                              min(_sigmoid(vec[2]), 1.0 - 1e-12))
    if model == "weibull":
        return WeibullParams(math.exp(vec[0]), math.exp(vec[1]))
    if model == "ekg1":
        q = math.exp(vec[2])
        return EKG1Params(math.exp(vec[0]), math.exp(vec[1]), q,
                          1.0 / (2.0 * q) - math.exp(vec[3]))
    if model == "ekg2":
        return EKG2Params(math.exp(vec[0]), math.exp(vec[1]),
                          math.exp(vec[2]), math.exp(vec[3]))
    raise DomainError(f"no continuous transform for model {model!r}")


def _encode(model, params):
    if model == "kappagen":
        return np.array([math.log(params.alpha), math.log(params.beta),
                         _logit(params.kappa)])
    if model == "weibull":
        return np.array([math.log(params.shape), math.log(params.scale)])
    if model == "ekg1":
        return np.array([math.log(params.a), math.log(params.b), math.log(params.q),
                         math.log(max(1.0 / (2.0 * params.q) - params.r, 1e-12))])
    if model == "ekg2":
        return np.array([math.log(params.a), math.log(params.b),
                         math.log(params.p), math.log(params.q)])
    raise DomainError(f"no continuous transform for model {model!r}")


# ---------------------------------------------------------------------------
# initial values


def _weighted_lstsq(x, y, w):
    sw = w.sum()
    mx = np.sum(w * x) / sw
    my = np.sum(w * y) / sw
    sxx = np.sum(w * (x - mx) ** 2)
    if sxx <= 0.0:
        return math.nan, math.nan
    slope = np.sum(w * (x - mx) * (y - my)) / sxx
    return slope, my - slope * mx


def _initial_shape_scale(values, weights):
    """Shape and scale from a weighted least-squares line on the
    double-log survival plot, restricted to the distribution bulk."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order]
    cw = np.cumsum(w)
    total = cw[-1]
    cdf_mid = (cw - 0.5 * w) / total
    bulk = (cdf_mid > 0.01) & (cdf_mid < 0.9) & (v > 0.0)
    if bulk.sum() >= 5:
        x = np.log(v[bulk])
        y = np.log(-np.log1p(-cdf_mid[bulk]))
        slope, intercept = _weighted_lstsq(x, y, w[bulk])
        if math.isfinite(slope) and slope > 0.0:
            alpha0 = min(max(slope, 0.05), 50.0)
            beta0 = math.exp(-intercept / slope)
            if math.isfinite(beta0) and beta0 > 0.0:
                return alpha0, beta0, (v, w, cdf_mid)
    mean = float(np.sum(values * weights) / weights.sum())
    return 1.0, max(mean, 1e-12), (v, w, cdf_mid)


def _initial_kgen(values, weights):
    """(alpha0, beta0, kappa0): bulk regression pins the shape and scale,
    the upper-decile survival slope pins the tail deformation."""
    alpha0, beta0, (v, w, cdf_mid) = _initial_shape_scale(values, weights)
    kappa0 = 0.25
    tail = (cdf_mid >= 0.9) & (cdf_mid < 1.0) & (v > 0.0)
    if tail.sum() >= 10:
        slope, _ = _weighted_lstsq(np.log(v[tail]), np.log1p(-cdf_mid[tail]), w[tail])
        if math.isfinite(slope) and slope < 0.0:
            kappa0 = alpha0 / (-slope)
    return alpha0, beta0, min(max(kappa0, 0.01), 0.9)


def _initial_vector(model, values, weights):
    alpha0, beta0, kappa0 = _initial_kgen(values, weights)
    if model == "kappagen":
        return _encode(model, KappaGenParams(alpha0, beta0, kappa0))
    if model == "weibull":
        return _encode(model, WeibullParams(alpha0, beta0))
    if model == "ekg1":
        q0 = 1.0 / (2.0 * kappa0)
        return _encode(model, EKG1Params(alpha0, beta0, q0, 0.0))
    if model == "ekg2":
        q0 = 1.0 / (2.0 * kappa0)
        b0 = beta0 * (2.0 * kappa0) ** (-1.0 / alpha0)
        return _encode(model, EKG2Params(alpha0, b0, 1.0, q0))
    raise DomainError(f"no initializer for model {model!r}")


# ---------------------------------------------------------------------------
# optimizer core


def _central_gradient(fun, x, step=6e-6):
    grad = np.empty_like(x)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return grad


def _two_stage_minimize(fun, x0, config):
    """Simplex descent into the basin, then quasi-Newton polish."""
    stage1 = minimize(fun, x0, method="Nelder-Mead",
                      options={"maxiter": config.max_iter,
                               "xatol": 1e-6, "fatol": 1e-10})
    grad = lambda x: _central_gradient(fun, x)
    stage2 = minimize(fun, stage1.x, method="BFGS", jac=grad,
                      options={"maxiter": config.max_iter,
                               "gtol": max(config.rel_tol * 10.0, 1e-11)})
    best = stage2 if stage2.fun <= stage1.fun else stage1
    iterations = int(stage1.nit) + int(stage2.nit)
    return best.x, float(best.fun), iterations


def _fit_transformed(model, sample, config, objective_params=None):
    """Multistart two-stage maximization of the mean log-likelihood."""
    values = sample.values
    weights = sample.weights
    total_w = sample.total_weight
    if np.unique(values[weights > 0.0]).size < 2:
        raise DegenerateDataError("sample has a single distinct value")

    decode = objective_params or (lambda vec: _decode(model, vec))

    def negative_mean_loglik(vec):
        if np.any(np.abs(vec) > 60.0):
            return 1e12
        try:
            params = decode(vec)
            value = loglik(sample, model, params) / total_w
        except (DomainError, MomentDivergenceError, OverflowError):
            return 1e12
        if not math.isfinite(value):
            return 1e12
        return -value

    if objective_params is None:
        x0 = _initial_vector(model, values, weights)
    else:
        alpha0, _, kappa0 = _initial_kgen(values, weights)
        x0 = np.array([math.log(alpha0), _logit(kappa0)])

    best = None
    iterations = 0
    for replicate in range(config.multistart):
        rng = np.random.default_rng([config.seed, replicate])
        start = x0 if replicate == 0 else x0 + rng.normal(0.0, 0.35, size=x0.size)
        x_opt, f_opt, nit = _two_stage_minimize(negative_mean_loglik, start, config)
        iterations += nit
        if best is None or f_opt < best[1]:
            best = (x_opt, f_opt)
    x_opt, f_opt = best
    score = _central_gradient(negative_mean_loglik, x_opt)
    score_norm = float(np.max(np.abs(score)))
    converged = math.isfinite(f_opt) and f_opt < 1e11 and score_norm <= _SCORE_TOL
    params = decode(x_opt)
    return params, -f_opt * total_w, converged, iterations, score_norm


# ---------------------------------------------------------------------------
# public fitting entry points


def fit_mle(sample: WeightedSample, config: FitConfig):
    """Maximize the weighted log-likelihood for the configured family."""
    if config.model == "mixture":
        return fit_mixture(sample, config)
    if config.model == "kappagen_normalized":
        return fit_normalized(sample, config)
    params, ll, converged, iterations, score_norm = _fit_transformed(
        config.model, sample, config)
    gof = goodness_of_fit(sample, config.model, params)
    return FitResult(model=config.model, params=params, loglik=ll,
                     converged=converged, iterations=iterations,
                     score_norm=score_norm, gof=gof)


def fit_normalized(sample: WeightedSample, config: FitConfig):
    """Two-parameter fit on mean-scaled data with the scale pinned to
    give unit mean; returns unit-mean-scale parameters plus the scaling
    factor used."""
    bad = ~(sample.values > 0.0)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SupportViolationError(
            f"observation {idx} (value {sample.values[idx]}) outside the positive support",
            index=idx, value=float(sample.values[idx]))
    scale = sample.weighted_mean()
    scaled = WeightedSample(sample.values / scale, sample.weights)

    def decode(vec):
        alpha = math.exp(vec[0])
        kappa = min(_sigmoid(vec[1]), 1.0 - 1e-12)
        if kappa > 0.0 and alpha / kappa <= 1.0:
            raise MomentDivergenceError("unit-mean scale needs alpha/kappa > 1")
        return kgen_from_normalized(alpha, kappa)

    cfg = FitConfig(model="kappagen", max_iter=config.max_iter,
                    rel_tol=config.rel_tol, multistart=config.multistart,
                    seed=config.seed)
    params, ll, converged, iterations, score_norm = _fit_transformed(
        "kappagen", scaled, cfg, objective_params=decode)
    gof = goodness_of_fit(scaled, "kappagen", params)
    return FitResult(model="kappagen_normalized", params=params, loglik=ll,
                     converged=converged, iterations=iterations,
                     score_norm=score_norm, gof=gof, scale=scale)


def fit_mixture(sample: WeightedSample, config: FitConfig):
    """Net-wealth mixture fit.

    The component proportions are the weighted shares of the support
    partition (their closed-form maximum-likelihood values); the Weibull
    branch is fitted on |negatives| and the positive branch on the
    positives with the shared machinery.
    """
    values = sample.values
    weights = sample.weights
    total_w = sample.total_weight
    neg = values < 0.0
    zero = values == 0.0
    pos = values > 0.0
    w_neg = float(weights[neg].sum())
    w_zero = float(weights[zero].sum())
    w_pos = float(weights[pos].sum())
    if w_pos <= 0.0:
        raise DegenerateDataError(
            "mixture fit needs positive observations; positive branch unidentifiable")
    theta1 = w_neg / total_w
    theta2 = w_zero / total_w
    theta3 = w_pos / total_w

    flags = []
    iterations = 0
    converged = True
    score_norm = 0.0

    if w_neg > 0.0:
        neg_sample = WeightedSample(-values[neg], weights[neg])
        if neg_sample.effective_size() < _MIN_EFFECTIVE_BRANCH:
            flags.append("negative branch has fewer than 30 effective observations")
        cfg = FitConfig(model="weibull", max_iter=config.max_iter,
                        rel_tol=config.rel_tol, multistart=config.multistart,
                        seed=config.seed)
        try:
            wb_params, _, wb_conv, wb_iter, wb_score = _fit_transformed(
                "weibull", neg_sample, cfg)
            converged &= wb_conv
            iterations += wb_iter
            score_norm = max(score_norm, wb_score)
        except DegenerateDataError:
            # one distinct magnitude cannot pin two parameters; fall back to
            # an exponential branch matching the weighted mean magnitude
            wb_params = WeibullParams(1.0, neg_sample.weighted_mean())
            flags.append("negative branch degenerate; exponential fallback used")
    else:
        wb_params = WeibullParams(1.0, 1.0)
        flags.append("no negative observations; negative branch fixed at defaults")

    pos_sample = WeightedSample(values[pos], weights[pos])
    if pos_sample.effective_size() < _MIN_EFFECTIVE_BRANCH:
        flags.append("positive branch has fewer than 30 effective observations")
    cfg = FitConfig(model="kappagen", max_iter=config.max_iter,
                    rel_tol=config.rel_tol, multistart=config.multistart,
                    seed=config.seed)
    kg_params, _, kg_conv, kg_iter, kg_score = _fit_transformed(
        "kappagen", pos_sample, cfg)
    converged &= kg_conv
    iterations += kg_iter
    score_norm = max(score_norm, kg_score)

    params = NetWealthMixtureParams(negative_branch=wb_params, theta1=theta1,
                                    theta2=theta2, theta3=theta3,
                                    positive_branch=kg_params)
    ll = loglik(sample, "mixture", params)
    gof = goodness_of_fit(sample, "mixture", params)
    return FitResult(model="mixture", params=params, loglik=ll,
                     converged=converged, iterations=iterations,
                     score_norm=score_norm, gof=gof, flags=tuple(flags))


# ---------------------------------------------------------------------------
# goodness of fit


def _model_lorenz(model, params, u):
    from .distributions import ekg1_quantile, ekg2_quantile

    if model in ("kappagen", "kappagen_normalized"):
        return np.asarray(ineq.kgen_lorenz(u, params), dtype=float)
    if model == "weibull":
        proxy = KappaGenParams(params.shape, params.scale, 0.0)
        return np.asarray(ineq.kgen_lorenz(u, proxy), dtype=float)
    if model == "ekg2":
        return np.asarray(ineq.ekg2_lorenz(u, params), dtype=float)
    if model == "ekg1":
        qf = lambda t: ekg1_quantile(t, params)
        mean = ineq.quantile_mean(qf)
        return np.array([ineq.quantile_lorenz(float(ui), qf, mean) for ui in u])
    if model == "mixture":
        return np.asarray(ineq.mixture_lorenz(u, params), dtype=float)
    raise DomainError(f"unknown model {model!r}")


def _model_gini(model, params):
    from .distributions import ekg1_quantile, ekg2_quantile

    if model in ("kappagen", "kappagen_normalized"):
        return ineq.kgen_gini(params)
    if model == "weibull":
        return ineq.kgen_gini(KappaGenParams(params.shape, params.scale, 0.0))
    if model == "ekg1":
        return ineq.quantile_gini(lambda t: ekg1_quantile(t, params))
    if model == "ekg2":
        return ineq.quantile_gini(lambda t: ekg2_quantile(t, params))
    if model == "mixture":
        return ineq.mixture_gini(params)
    raise DomainError(f"unknown model {model!r}")


def goodness_of_fit(sample: WeightedSample, model, params):
    """Log-likelihood plus Lorenz-curve and Gini discrepancy measures.

    LRSSE is the root of the summed squared gaps between the observed and
    model Lorenz curves on the interior decile grid; AEG is the absolute
    gap between the observed and model Gini.
    """
    ll = loglik(sample, model, params)
    deciles = np.arange(1, 10) / 10.0
    curve = ineq.empirical_lorenz(sample)
    l_emp = curve.interpolate(deciles)
    l_mod = _model_lorenz(model, params, deciles)
    lrsse = float(np.sqrt(np.sum((l_emp - l_mod) ** 2)))
    aeg = abs(ineq.empirical_gini(sample) - _model_gini(model, params))
    return GoodnessOfFit(loglik=ll, lrsse=lrsse, aeg=aeg)
