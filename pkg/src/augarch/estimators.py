"""Sample quantile and absolute-moment estimators plus their residual probes.

The quantile estimator is the order statistic of rank ceil(n*p); selection
via np.partition gives the same value as sorting and indexing, without the
full sort.
"""

from __future__ import annotations

import math

import numpy as np


def sample_quantile(xs, p: float) -> float:
    """Order statistic of rank ceil(n*p) (1-based), for 0 < p <= 1."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a non-empty 1-d array")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    n = xs.size
    m = n * p
    # guard against n*p landing a hair above an integer through rounding
    nearest = round(m)
    if nearest >= 1 and abs(m - nearest) <= 32.0 * np.finfo(np.float64).eps * n:
        k = int(nearest)
    else:
        k = int(math.ceil(m))
    k = min(max(k, 1), n)
    return float(np.partition(xs, k - 1)[k - 1])


def centred_abs_moment(xs, r: float, mu: float | None = None) -> float:
    """Mean of |x - mu|**r; mu defaults to the sample mean."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a non-empty 1-d array")
    if r <= 0:
        raise ValueError("r must be > 0")
    centre = float(np.mean(xs)) if mu is None else float(mu)
    d = xs - centre
    if r == 2.0:
        return float(np.mean(np.square(d)))
    if r == 1.0:
        return float(np.mean(np.abs(d)))
    return float(np.mean(np.power(np.abs(d), r)))


def signed_power_coeff(xs, r: float, mu: float) -> float:
    """Mean of sign(x - mu) * |x - mu|**(r-1), with sign(0) = 0.

    This is the sample version of the linear coefficient that couples the
    moment estimator to the sample mean; at r = 2 it reduces to the mean
    deviation, at r = 1 to the mean sign.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a non-empty 1-d array")
    d = xs - float(mu)
    if r == 2.0:
        return float(np.mean(d))
    if r == 1.0:
        return float(np.mean(np.sign(d)))
    return float(np.mean(np.sign(d) * np.power(np.abs(d), r - 1.0)))


def bahadur_residual(xs, p: float, q_true: float, f_at_q: float) -> float:
    """Gap between the sample quantile and its linearized form.

    Returns (qhat - q_true) + (p - Fn(q_true)) / f_at_q, where Fn is the
    empirical distribution function. f_at_q must be positive.
    """
    if not f_at_q > 0:
        raise ValueError("f_at_q must be > 0")
    xs = np.asarray(xs, dtype=np.float64)
    qhat = sample_quantile(xs, p)
    fn = float(np.mean(xs <= q_true))
    return (qhat - float(q_true)) + (p - fn) / float(f_at_q)


def moment_repr_residual(xs, r: float, mu: float, linear_coeff: float) -> float:
    """Remainder of the linearization of the moment estimator around mu.

    linear_coeff is the population coupling coefficient
    r * E[(X - mu)**(r-1) * sign(X - mu)**r]. Returns
    sqrt(n) * (moment at sample mean - moment at mu
               + (sample mean - mu) * linear_coeff).
    At r = 2 the identity
    mean((x - xbar)**2) = mean((x - mu)**2) - (xbar - mu)**2 makes the
    residual exactly -sqrt(n) * (xbar - mu)**2 for centred data.
    """
    xs = np.asarray(xs, dtype=np.float64)
    n = xs.size
    m_hat = centred_abs_moment(xs, r)
    m_at_mu = centred_abs_moment(xs, r, mu)
    xbar = float(np.mean(xs))
    return math.sqrt(n) * (m_hat - m_at_mu + (xbar - float(mu)) * float(linear_coeff))
