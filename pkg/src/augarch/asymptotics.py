"""Long-run covariance estimation and asymptotic covariance assembly.

The joint limit law of the quantile and absolute-moment estimators has a
2x2 covariance built from the long-run (co)variances of three observable
series: the raw observations u_t, the centred absolute powers
v_t = |x_t - xbar|**r, and the quantile influence terms
w_t = (p - 1{x_t <= qhat}) / fhat(qhat).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import innovations
from .estimators import centred_abs_moment, sample_quantile

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TriCov:
    """Long-run second-order summaries of the three influence series."""

    var_u: float
    var_v: float
    var_w: float
    cov_uv: float
    cov_uw: float
    cov_vw: float
    f_at_q: float
    q_p: float
    lag: int
    r: float
    p: float

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.var_u, self.cov_uv, self.cov_uw],
                [self.cov_uv, self.var_v, self.cov_vw],
                [self.cov_uw, self.cov_vw, self.var_w],
            ]
        )


@dataclass(frozen=True)
class GammaMatrix:
    """Asymptotic covariance of sqrt(n) * (quantile error, moment error)."""

    g11: float
    g22: float
    g12: float
    psd_warning: bool = False

    @property
    def g21(self) -> float:
        return self.g12

    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])


def default_lag(n: int) -> int:
    return int(math.floor(n ** (1.0 / 3.0)))


def long_run_cov(a, b, lag: int) -> float:
    """Bartlett-weighted two-sided long-run covariance of two series.

    Returns C0 + sum_{i=1}^{lag} (1 - i/(lag+1)) * (C_i + C_{-i}) with
    C_i = (1/n) sum_t (a_{t+i} - abar)(b_t - bbar). Both series are centred
    at their sample means; normalization is 1/n at every displacement.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise ValueError("series must be 1-d and of equal length")
    n = a.size
    if not 0 <= lag < n / 2:
        raise ValueError("lag must satisfy 0 <= lag < n/2")
    da = np.ascontiguousarray(a - a.mean())
    db = np.ascontiguousarray(b - b.mean())
    total = float(da @ db) / n
    for i in range(1, lag + 1):
        w = 1.0 - i / (lag + 1.0)
        c_fwd = float(da[i:] @ db[: n - i]) / n
        c_bwd = float(da[: n - i] @ db[i:]) / n
        total += w * (c_fwd + c_bwd)
    return total


def autocovariance(a, i: int) -> float:
    """Sample autocovariance at displacement i >= 0, 1/n normalization."""
    a = np.asarray(a, dtype=np.float64)
    n = a.size
    if not 0 <= i < n:
        raise ValueError("displacement out of range")
    da = a - a.mean()
    return float(da[i:] @ da[: n - i]) / n


def absolute_autocovariance_sum(a, lag: int) -> float:
    """sum_{i=0}^{lag} |C_i|; a summability diagnostic for lag choice."""
    a = np.asarray(a, dtype=np.float64)
    da = np.ascontiguousarray(a - a.mean())
    n = a.size
    total = 0.0
    for i in range(lag + 1):
        total += abs(float(da[i:] @ da[: n - i]) / n)
    return total


def estimate_density_at_quantile(xs, p: float, bandwidth: float | None = None) -> float:
    """Gaussian kernel density estimate at the sample p-quantile.

    Bandwidth defaults to 0.9 * min(std, IQR/1.34) * n**(-1/5).
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size < 100:
        raise ValueError("need at least 100 observations for a usable density")
    q = sample_quantile(xs, p)
    if bandwidth is None:
        sd = float(np.std(xs, ddof=1))
        q25, q75 = np.percentile(xs, [25.0, 75.0])
        spread = min(sd, (q75 - q25) / 1.34)
        bandwidth = 0.9 * spread * xs.size ** (-0.2)
    if not bandwidth > 0:
        raise ValueError("bandwidth must be > 0 (degenerate sample?)")
    z = (q - xs) / bandwidth
    f = float(np.mean(np.exp(-0.5 * z * z))) * _INV_SQRT_2PI / bandwidth
    if not f > 0:
        raise ValueError("density estimate vanished at the target quantile")
    return f


def estimate_tricov(path, p: float, r: float, lag: int | None = None) -> TriCov:
    """Long-run covariance summaries of one realized path.

    path may be a simulation Path or a plain 1-d array of observations.
    """
    xs = np.asarray(getattr(path, "x", path), dtype=np.float64)
    n = xs.size
    if lag is None:
        lag = default_lag(n)
    if n < 10 * max(lag, 1):
        raise ValueError("series too short for the requested lag window")
    qhat = sample_quantile(xs, p)
    f = estimate_density_at_quantile(xs, p)
    xbar = float(np.mean(xs))
    u = xs
    v = np.power(np.abs(xs - xbar), r) if r != 2.0 else np.square(xs - xbar)
    w = (p - (xs <= qhat).astype(np.float64)) / f
    return TriCov(
        var_u=long_run_cov(u, u, lag),
        var_v=long_run_cov(v, v, lag),
        var_w=long_run_cov(w, w, lag),
        cov_uv=long_run_cov(u, v, lag),
        cov_uw=long_run_cov(u, w, lag),
        cov_vw=long_run_cov(v, w, lag),
        f_at_q=f,
        q_p=qhat,
        lag=lag,
        r=r,
        p=p,
    )


def assemble_gamma(tc: TriCov, a_coeff: float, r: float | None = None) -> GammaMatrix:
    """Combine long-run summaries into the 2x2 asymptotic covariance.

    a_coeff is E[sign(X - mu) * |X - mu|**(r-1)] (unscaled by r); it couples
    the moment estimator to the estimated mean.
    """
    if r is None:
        r = tc.r
    ra = r * a_coeff
    g11 = tc.var_w
    g22 = ra * ra * tc.var_u + tc.var_v - 2.0 * ra * tc.cov_uv
    g12 = -ra * tc.cov_uw + tc.cov_vw
    mat = np.array([[g11, g12], [g12, g22]])
    eigs = np.linalg.eigvalsh(mat)
    psd_warning = bool(eigs[0] < -1e-8 * max(abs(g11) + abs(g22), 1e-300))
    if psd_warning:
        warnings.warn(
            "assembled covariance is not positive semidefinite "
            f"(min eigenvalue {eigs[0]:.3e}); sampling noise or lag window too short",
            stacklevel=2,
        )
    return GammaMatrix(g11=g11, g22=g22, g12=g12, psd_warning=psd_warning)


# -- closed forms for serially independent observations ----------------------

def _truncated_abs_moment(dist, r: float, c: float) -> float:
    """integral of |e|**r over (-inf, c] under the innovation density."""
    if dist.kind == "gaussian":
        half = 0.5 * innovations.abs_moment(dist, r)
        t = special.gammainc((r + 1.0) / 2.0, c * c / 2.0)
        return half * (1.0 + t) if c >= 0 else half * (1.0 - t)
    from scipy import integrate

    lo, hi = innovations.support(dist)
    c = min(max(c, lo), hi)
    pdf = lambda e: innovations.density(dist, e)
    if c <= 0:
        val, _ = integrate.quad(lambda e: abs(e) ** r * pdf(e), lo, c, limit=400)
        return val
    half = 0.5 * innovations.abs_moment(dist, r)
    val, _ = integrate.quad(lambda e: e**r * pdf(e), 0.0, c, limit=400)
    return half + val


def iid_gamma(dist, p: float, r: float, scale: float = 1.0) -> GammaMatrix:
    """Closed-form asymptotic covariance when x_t = scale * eps_t, iid.

    Supported innovation laws are symmetric with a density, so the
    mean-coupling coefficient vanishes and the entries reduce to
    g11 = p(1-p)/f(q)^2, g22 = Var(|X|^r),
    g12 = -Cov(1{X<=q}, |X|^r)/f(q).
    """
    if dist.kind == "rademacher":
        raise ValueError("closed form needs a density; rademacher has none")
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if not scale > 0:
        raise ValueError("scale must be > 0")
    c = innovations.quantile(dist, p)
    f_eps = innovations.density(dist, c)
    if not f_eps > 0:
        raise ValueError("innovation density vanishes at the target quantile")
    m_r = innovations.abs_moment(dist, r)
    m_2r = innovations.abs_moment(dist, 2.0 * r)
    if not (math.isfinite(m_r) and math.isfinite(m_2r)):
        raise ValueError("moment of order 2r diverges for this innovation law")
    g11 = p * (1.0 - p) / f_eps**2 * scale**2
    g22 = (m_2r - m_r * m_r) * scale ** (2.0 * r)
    cov_ind = _truncated_abs_moment(dist, r, c) - p * m_r
    g12 = -cov_ind / f_eps * scale ** (r + 1.0)
    return GammaMatrix(g11=g11, g22=g22, g12=g12)
