"""Parametric distribution families built on the deformed exponential.

Four families:

* the three-parameter base model (alpha, beta, kappa) with Weibull-like
  bulk and Pareto upper tail of exponent alpha/kappa;
* a net-wealth mixture of a Weibull branch for negative values, a point
  mass at zero, and the base model for positive values;
* two four-parameter extensions, one defined through its quantile
  function (ekg1_*) and one through an incomplete-beta CDF (ekg2_*).

Parameter objects are frozen dataclasses validated on construction;
evaluation functions accept scalars or numpy arrays and are pure.
Sampling takes an explicit seed and owns its generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deformed import SMALL_KAPPA, kappa_exp, log_kappa_exp
from .errors import DomainError, MomentDivergenceError
from .special import inv_reg_inc_beta, log_gamma, reg_inc_beta

_TINY_KAPPA = 1e-10  # below this the Weibull closed forms are exact to 1e-9


def _asarray(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _restore(arr, scalar):
    return float(arr) if scalar else arr


# ---------------------------------------------------------------------------
# parameter sets


@dataclass(frozen=True)
class KappaGenParams:
    """Shape alpha > 0, scale beta > 0 (income units), tail deformation
    kappa in [0, 1)."""

    alpha: float
    beta: float
    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not (math.isfinite(self.kappa) and 0.0 <= self.kappa < 1.0):
            raise DomainError(f"kappa must lie in [0, 1), got {self.kappa}")

    @property
    def tail_exponent(self):
        """Pareto exponent alpha/kappa of the upper tail (inf when kappa=0)."""
        return math.inf if self.kappa == 0.0 else self.alpha / self.kappa


@dataclass(frozen=True)
class WeibullParams:
    """Weibull shape and scale, both strictly positive."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.shape) and self.shape > 0.0):
            raise DomainError(f"shape must be positive, got {self.shape}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class EKG1Params:
    """Quantile-defined four-parameter extension: a, b, q > 0 and r < 1/(2q)."""

    a: float
    b: float
    q: float
    r: float

    def __post_init__(self):
        for name in ("a", "b", "q"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive, got {v}")
        if not (math.isfinite(self.r) and self.r < 1.0 / (2.0 * self.q)):
            raise DomainError(f"r must be below 1/(2q) = {1.0 / (2.0 * self.q)}, got {self.r}")


@dataclass(frozen=True)
class EKG2Params:
    """Incomplete-beta-defined four-parameter extension; all parameters
    positive, b is the scale."""

    a: float
    b: float
    p: float
    q: float

    def __post_init__(self):
        for name in ("a", "b", "p", "q"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class NetWealthMixtureParams:
    """Convex mixture: Weibull branch on negatives, atom at zero, base
    model on positives, with proportions (theta1, theta2, theta3)."""

    negative_branch: WeibullParams
    theta1: float
    theta2: float
    theta3: float
    positive_branch: KappaGenParams

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        total = self.theta1 + self.theta2 + self.theta3
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"mixture proportions must sum to 1, got {total}")

    @property
    def rho(self):
        """Total mass at or below zero, theta1 + theta2."""
        return self.theta1 + self.theta2


# ---------------------------------------------------------------------------
# base family


def kgen_logpdf(x, p: KappaGenParams):
    """Log-density of the base model; requires x > 0."""
    arr, scalar = _asarray(x)
    if np.any(~(arr > 0.0)):
        raise DomainError("kgen_logpdf requires x > 0")
    a, b, k = p.alpha, p.beta, p.kappa
    rel = arr / b
    with np.errstate(over="ignore", divide="ignore"):
        y = rel ** a
        base = math.log(a / b) + (a - 1.0) * np.log(rel)
        if k < _TINY_KAPPA:
            out = base - y
        else:
            out = base - np.arcsinh(k * y) / k - 0.5 * np.log1p((k * y) ** 2)
    return _restore(out, scalar)


def kgen_pdf(x, p: KappaGenParams):
    """Density of the base model; requires x > 0, integrates to 1."""
    with np.errstate(over="ignore", under="ignore"):
        out = np.exp(np.asarray(kgen_logpdf(x, p), dtype=float))
    _, scalar = _asarray(x)
    return _restore(out, scalar)


def kgen_cdf(x, p: KappaGenParams):
    """Distribution function 1 - exp_k(-(x/beta)^alpha); 0 below the support."""
    arr, scalar = _asarray(x)
    pos = arr > 0.0
    out = np.zeros_like(arr)
    if np.any(pos):
        with np.errstate(over="ignore"):
            y = (arr[pos] / p.beta) ** p.alpha
        out[pos] = -np.expm1(np.asarray(log_kappa_exp(-y, p.kappa), dtype=float))
    return _restore(out, scalar)


def kgen_ccdf(x, p: KappaGenParams):
    """Survival function exp_k(-(x/beta)^alpha)."""
    arr, scalar = _asarray(x)
    pos = arr > 0.0
    out = np.ones_like(arr)
    if np.any(pos):
        with np.errstate(over="ignore"):
            y = (arr[pos] / p.beta) ** p.alpha
        out[pos] = kappa_exp(-y, p.kappa)
    return _restore(out, scalar)


def kgen_quantile(u, p: KappaGenParams):
    """Closed-form quantile beta * [ln_k(1/(1-u))]^(1/alpha) for u in [0, 1)."""
    arr, scalar = _asarray(u)
    if np.any(~((arr >= 0.0) & (arr < 1.0))):
        raise DomainError("kgen_quantile requires 0 <= u < 1")
    t = -np.log1p(-arr)
    k = p.kappa
    if k < _TINY_KAPPA:
        core = t
    else:
        with np.errstate(over="ignore"):
            core = np.sinh(k * t) / k
    out = p.beta * core ** (1.0 / p.alpha)
    return _restore(out, scalar)


def _check_moment_order(r, p: KappaGenParams):
    if not -p.alpha < r:
        raise MomentDivergenceError(
            f"moment of order {r} diverges: requires r > -alpha = {-p.alpha}")
    if p.kappa > 0.0 and not r < p.alpha / p.kappa:
        raise MomentDivergenceError(
            f"moment of order {r} diverges: requires r < alpha/kappa = {p.alpha / p.kappa}")


def kgen_moment(r, p: KappaGenParams):
    """Raw moment E[X^r]; exists only for -alpha < r < alpha/kappa."""
    r = float(r)
    _check_moment_order(r, p)
    if r == 0.0:
        return 1.0
    a, b, k = p.alpha, p.beta, p.kappa
    if k < _TINY_KAPPA:
        return b ** r * math.exp(log_gamma(1.0 + r / a))
    # gamma ratio in log space: the individual factors explode as kappa -> 0
    c = 1.0 / (2.0 * k)
    d = r / (2.0 * a)
    log_ratio = log_gamma(c - d) - log_gamma(c + d)
    return (b ** r * (2.0 * k) ** (-r / a)
            * math.exp(log_gamma(1.0 + r / a) + log_ratio) / (1.0 + r * k / a))


def kgen_mean(p: KappaGenParams):
    """Mean of the base model; requires alpha/kappa > 1."""
    return kgen_moment(1.0, p)


def kgen_variance(p: KappaGenParams):
    """Variance of the base model; requires alpha/kappa > 2."""
    m1 = kgen_moment(1.0, p)
    m2 = kgen_moment(2.0, p)
    return m2 - m1 * m1


def kgen_mode(p: KappaGenParams):
    """Interior mode for alpha > 1, None otherwise (pole at the origin)."""
    a, b, k = p.alpha, p.beta, p.kappa
    if a <= 1.0:
        return None
    if k < SMALL_KAPPA:
        return b * ((a - 1.0) / a) ** (1.0 / a)
    c = a - 1.0
    lead = (a * a + 2.0 * k * k * c) / (2.0 * k * k * (a * a - k * k))
    d = 4.0 * k * k * (a * a - k * k) * c * c / (a * a + 2.0 * k * k * c) ** 2
    # sqrt(1+d)-1 evaluated without cancellation; d is O(kappa^2) near 0
    bracket = d / (math.sqrt(1.0 + d) + 1.0)
    return b * math.exp(math.log(lead * bracket) / (2.0 * a))


def kgen_sample(n, p: KappaGenParams, seed):
    """Inversion sampling: quantile applied to n uniforms, seed-deterministic."""
    n = int(n)
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    return kgen_quantile(rng.random(n), p)


def kgen_from_normalized(alpha, kappa):
    """Parameters with unit mean for the given shape pair (alpha, kappa).

    The scale solves m(alpha, beta, kappa) = 1, written through the
    rate form lambda = beta^(-alpha).
    """
    probe = KappaGenParams(alpha, 1.0, kappa)  # validates the shape pair
    a, k = probe.alpha, probe.kappa
    if k > 0.0 and not a / k > 1.0:
        raise MomentDivergenceError(
            f"unit-mean scale requires alpha/kappa > 1, got {a / k}")
    if k < _TINY_KAPPA:
        beta = math.exp(-log_gamma(1.0 + 1.0 / a))
    else:
        c = 1.0 / (2.0 * k)
        d = 1.0 / (2.0 * a)
        log_lambda = -math.log(2.0 * k) + a * (
            log_gamma(1.0 / a) - math.log(k + a) + log_gamma(c - d) - log_gamma(c + d))
        beta = math.exp(-log_lambda / a)
    return KappaGenParams(alpha, beta, kappa)


# ---------------------------------------------------------------------------
# quantile-defined extension (ekg1)


def _log_sinh(t):
    """log(sinh(t)) for t > 0, stable for both tiny and large t."""
    small = t < 1e-4
    with np.errstate(divide="ignore"):
        out = np.where(small,
                       np.log(np.where(small, t, 1.0)) + t * t / 6.0,
                       t + np.log1p(-np.exp(-2.0 * np.where(small, 1.0, t))) - math.log(2.0))
    return out


def _ekg1_log_bracket(t, p: EKG1Params):
    """Log of the quantile bracket 2q e^(-rt) sinh(t/(2q)) at t = -ln(1-u)."""
    return math.log(2.0 * p.q) - p.r * t + _log_sinh(t / (2.0 * p.q))


def ekg1_quantile(u, p: EKG1Params):
    """Closed-form quantile of the quantile-defined extension, u in [0, 1)."""
    arr, scalar = _asarray(u)
    if np.any(~((arr >= 0.0) & (arr < 1.0))):
        raise DomainError("ekg1_quantile requires 0 <= u < 1")
    t = -np.log1p(-arr)
    out = np.zeros_like(arr)
    pos = t > 0.0
    if np.any(pos):
        with np.errstate(over="ignore"):
            out[pos] = p.b * np.exp(_ekg1_log_bracket(t[pos], p) / p.a)
    return _restore(out, scalar)


def _ekg1_t_from_x(x, p: EKG1Params):
    """Invert the quantile at x > 0 for t = -ln(1-u), by bisection in ln t.

    The log-bracket is strictly increasing in t (its derivative is
    coth(t/2q)/(2q) - r > 1/(2q) - r > 0), so the root is unique.
    """
    target = p.a * np.log(x / p.b)
    slope = 1.0 / (2.0 * p.q) - p.r
    ln_lo = np.full_like(target, -700.0)
    ln_hi = np.maximum(np.log(np.maximum((target - math.log(p.q)) / slope, 1.0)) + 2.0, 3.0)
    # guarantee the upper bracket
    for _ in range(60):
        high = _ekg1_log_bracket(np.exp(ln_hi), p) < target
        if not np.any(high):
            break
        ln_hi = np.where(high, ln_hi + 2.0, ln_hi)
    for _ in range(80):
        mid = 0.5 * (ln_lo + ln_hi)
        below = _ekg1_log_bracket(np.exp(mid), p) < target
        ln_lo = np.where(below, mid, ln_lo)
        ln_hi = np.where(below, ln_hi, mid)
    return np.exp(0.5 * (ln_lo + ln_hi))


def ekg1_cdf(x, p: EKG1Params):
    """Distribution function by numeric inversion of the closed quantile."""
    arr, scalar = _asarray(x)
    if np.any(arr < 0.0):
        arr = np.maximum(arr, 0.0)
    out = np.zeros_like(arr)
    pos = arr > 0.0
    if np.any(pos):
        t = _ekg1_t_from_x(arr[pos], p)
        out[pos] = -np.expm1(-t)
    return _restore(out, scalar)


def _ekg1_log_density_at_t(t, p: EKG1Params):
    """Log density expressed through t = -ln(1-u) > 0."""
    a, b, q, r = p.a, p.b, p.q, p.r
    tau = t / (2.0 * q)
    lg = _ekg1_log_bracket(t, p)
    # cosh(tau) - 2qr sinh(tau) = e^tau [(1-2qr)/2 + (1+2qr) e^(-2tau)/2] > 0
    log_denom = tau + np.log((1.0 - 2.0 * q * r) / 2.0
                             + (1.0 + 2.0 * q * r) * np.exp(-2.0 * tau) / 2.0)
    return math.log(a / b) + (1.0 - 1.0 / a) * lg - (1.0 - r) * t - log_denom


def ekg1_density_at_u(u, p: EKG1Params):
    """Density expressed in terms of the cumulative probability u in (0, 1)."""
    arr, scalar = _asarray(u)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("ekg1_density_at_u requires 0 < u < 1")
    t = -np.log1p(-arr)
    with np.errstate(over="ignore", under="ignore"):
        out = np.exp(_ekg1_log_density_at_t(t, p))
    return _restore(out, scalar)


def ekg1_pdf(x, p: EKG1Params):
    """Density at x > 0, evaluated through the numeric inverse of the quantile."""
    arr, scalar = _asarray(x)
    if np.any(~(arr > 0.0)):
        raise DomainError("ekg1_pdf requires x > 0")
    t = _ekg1_t_from_x(arr, p)
    with np.errstate(over="ignore", under="ignore"):
        out = np.exp(_ekg1_log_density_at_t(t, p))
    return _restore(out, scalar)


def ekg1_logpdf(x, p: EKG1Params):
    """Log-density at x > 0 (numeric inversion, used by the fitting engine)."""
    arr, scalar = _asarray(x)
    if np.any(~(arr > 0.0)):
        raise DomainError("ekg1_logpdf requires x > 0")
    t = _ekg1_t_from_x(arr, p)
    return _restore(_ekg1_log_density_at_t(t, p), scalar)


def ekg1_sample(n, p: EKG1Params, seed):
    """Inversion sampling from the closed-form quantile."""
    n = int(n)
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    return ekg1_quantile(rng.random(n), p)


# ---------------------------------------------------------------------------
# incomplete-beta-defined extension (ekg2)


def _ekg2_transform(x, p: EKG2Params):
    """Map x >= 0 to (z, ln z, ln(1-z)) with z = y/D, 1-z = 1/D^2,
    D = (y + sqrt(y^2 + 4))/2 and y = (x/b)^a; z lies in [0, 1)."""
    with np.errstate(over="ignore", divide="ignore"):
        y = (x / p.b) ** p.a
        big = y > 1e100
        y_safe = np.where(big, 1.0, y)
        ln_d = np.where(big, np.log(np.where(big, y, 1.0)),
                        np.log(0.5 * (y_safe + np.sqrt(y_safe * y_safe + 4.0))))
        log1mz = -2.0 * ln_d
        z = -np.expm1(log1mz)
        lnz = np.where(y > 0.0, np.log(np.where(y > 0.0, y, 1.0)) - ln_d, -np.inf)
    return z, lnz, log1mz


def ekg2_cdf(x, p: EKG2Params):
    """Distribution function I_z(p, q) through the algebraic z-transform."""
    arr, scalar = _asarray(x)
    arr = np.maximum(arr, 0.0)
    z, _, _ = _ekg2_transform(arr, p)
    out = reg_inc_beta(np.clip(z, 0.0, 1.0), p.p, p.q)
    return _restore(np.asarray(out, dtype=float), scalar)


def ekg2_quantile(u, p: EKG2Params):
    """Closed-form quantile b z^(1/a) (1-z)^(-1/(2a)) with z the inverse
    regularized incomplete beta of u."""
    arr, scalar = _asarray(u)
    if np.any(~((arr >= 0.0) & (arr < 1.0))):
        raise DomainError("ekg2_quantile requires 0 <= u < 1")
    z = np.asarray(inv_reg_inc_beta(arr, p.p, p.q), dtype=float)
    out = np.zeros_like(z)
    pos = z > 0.0
    if np.any(pos):
        zp = z[pos]
        with np.errstate(over="ignore"):
            out[pos] = p.b * np.exp(np.log(zp) / p.a - np.log1p(-zp) / (2.0 * p.a))
    return _restore(out, scalar)


def ekg2_logpdf(x, p: EKG2Params):
    """Log-density at x > 0."""
    arr, scalar = _asarray(x)
    if np.any(~(arr > 0.0)):
        raise DomainError("ekg2_logpdf requires x > 0")
    a, b, pp, q = p.a, p.b, p.p, p.q
    z, lnz, log1mz = _ekg2_transform(arr, p)
    ln_beta = log_gamma(pp) + log_gamma(q) - log_gamma(pp + q)
    out = (math.log(a / b) - ln_beta + (pp - 1.0 / a) * lnz
           + (q + 1.0 / (2.0 * a)) * log1mz - np.log1p(-0.5 * z))
    return _restore(out, scalar)


def ekg2_pdf(x, p: EKG2Params):
    """Density at x > 0; lower tail ~ x^(ap-1), upper tail ~ x^(-2aq-1)."""
    with np.errstate(over="ignore", under="ignore"):
        out = np.exp(np.asarray(ekg2_logpdf(x, p), dtype=float))
    _, scalar = _asarray(x)
    return _restore(out, scalar)


def ekg2_sample(n, p: EKG2Params, seed):
    """Inversion sampling from the closed-form quantile."""
    n = int(n)
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    return ekg2_quantile(rng.random(n), p)


# ---------------------------------------------------------------------------
# net-wealth mixture


def _weibull_logpdf(z, w: WeibullParams):
    """Weibull log-density at z > 0."""
    s, lam = w.shape, w.scale
    rel = z / lam
    with np.errstate(over="ignore", divide="ignore"):
        return math.log(s / lam) + (s - 1.0) * np.log(rel) - rel ** s


def mixture_pdf(w, p: NetWealthMixtureParams):
    """Continuous density plus atom report: returns (density, atom).

    density carries theta1 * Weibull(|w|) below zero and theta3 * base
    density above; atom is theta2 exactly at w = 0 and 0 elsewhere.  The
    point mass is never folded into the density value.
    """
    arr, scalar = _asarray(w)
    dens = np.zeros_like(arr)
    atom = np.zeros_like(arr)
    neg = arr < 0.0
    pos = arr > 0.0
    if np.any(neg):
        with np.errstate(under="ignore"):
            dens[neg] = p.theta1 * np.exp(_weibull_logpdf(-arr[neg], p.negative_branch))
    if np.any(pos):
        dens[pos] = p.theta3 * kgen_pdf(arr[pos], p.positive_branch)
    atom[arr == 0.0] = p.theta2
    if scalar:
        return float(dens), float(atom)
    return dens, atom


def mixture_cdf(w, p: NetWealthMixtureParams):
    """Right-continuous mixture CDF with a jump of size theta2 at zero."""
    arr, scalar = _asarray(w)
    out = np.empty_like(arr)
    rho = p.rho
    neg = arr < 0.0
    pos = arr > 0.0
    if np.any(neg):
        s, lam = p.negative_branch.shape, p.negative_branch.scale
        with np.errstate(over="ignore", under="ignore"):
            out[neg] = p.theta1 * np.exp(-((-arr[neg]) / lam) ** s)
    out[arr == 0.0] = rho
    if np.any(pos):
        out[pos] = rho + (1.0 - rho) * np.asarray(
            kgen_cdf(arr[pos], p.positive_branch), dtype=float)
    return _restore(out, scalar)


def mixture_moment(r, p: NetWealthMixtureParams):
    """Raw moment of integer order r >= 1.

    theta1 (-1)^r lambda^r Gamma(1 + r/s) from the negative branch plus
    theta3 times the positive-branch moment; the atom contributes zero.
    """
    ri = int(r)
    if ri != r or ri < 1:
        raise DomainError(f"moment order must be a positive integer, got {r}")
    s, lam = p.negative_branch.shape, p.negative_branch.scale
    neg_part = (-1.0) ** ri * lam ** ri * math.exp(log_gamma(1.0 + ri / s))
    pos_part = kgen_moment(ri, p.positive_branch) if p.theta3 > 0.0 else 0.0
    return p.theta1 * neg_part + p.theta3 * pos_part


def mixture_mean(p: NetWealthMixtureParams):
    """Mean net wealth; may be negative."""
    return mixture_moment(1, p)


def mixture_sample(n, p: NetWealthMixtureParams, seed):
    """Inversion sampling of the mixture CDF.

    A single uniform per draw selects the component and the value:
    Weibull inversion with sign flip below theta1, exact zeros on
    [theta1, rho), base-model inversion above.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    out = np.zeros(n)
    rho = p.rho
    neg = u < p.theta1
    pos = u >= rho
    if np.any(neg):
        s, lam = p.negative_branch.shape, p.negative_branch.scale
        un = np.maximum(u[neg], 1e-300)
        out[neg] = -lam * np.log(p.theta1 / un) ** (1.0 / s)
    if np.any(pos):
        v = (u[pos] - rho) / (1.0 - rho)
        out[pos] = kgen_quantile(v, p.positive_branch)
    return out
