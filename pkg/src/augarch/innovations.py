"""Innovation distributions: mean 0, variance 1 by analytic standardization.

Each distribution carries closed-form moment oracles so that condition
checks and covariance targets never rely on empirical standardization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

KINDS = ("gaussian", "student_t", "rademacher", "uniform")

#: marker for divergent moments
INFINITE = math.inf


@dataclass(frozen=True)
class InnovationDist:
    """Distribution of the innovation sequence, standardized to mean 0 / var 1.

    kind:
        "gaussian"    standard normal
        "student_t"   Student-t with nu > 2, scaled by sqrt((nu-2)/nu)
        "rademacher"  +-1 with probability 1/2 each
        "uniform"     uniform on [-sqrt(3), sqrt(3)]
    """

    kind: str
    nu: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown innovation kind {self.kind!r}")
        if self.kind == "student_t":
            if self.nu is None or not self.nu > 2:
                raise ValueError("student_t requires nu > 2")
        elif self.nu is not None:
            raise ValueError(f"nu is only a parameter of student_t, not {self.kind}")

    @property
    def descriptor(self) -> str:
        if self.kind == "student_t":
            return f"student_t(nu={self.nu:g})"
        return self.kind

    # scale applied to a raw Student-t draw so the variance is exactly 1
    @property
    def _t_scale(self) -> float:
        assert self.nu is not None
        return math.sqrt((self.nu - 2.0) / self.nu)


GAUSSIAN = InnovationDist("gaussian")

_UNIF_HALF_WIDTH = math.sqrt(3.0)


def sample_innovations(dist: InnovationDist, n: int, seed) -> np.ndarray:
    """Draw n iid innovations; same (dist, n, seed) gives bit-identical output.

    seed may be an int or a numpy SeedSequence (for spawned replication
    streams).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    if dist.kind == "gaussian":
        return rng.standard_normal(n)
    if dist.kind == "student_t":
        return rng.standard_t(dist.nu, n) * dist._t_scale
    if dist.kind == "rademacher":
        return rng.integers(0, 2, n).astype(np.float64) * 2.0 - 1.0
    return rng.uniform(-_UNIF_HALF_WIDTH, _UNIF_HALF_WIDTH, n)


def abs_moment(dist: InnovationDist, order: float) -> float:
    """E[|eps|^order] for any real order >= 0, +inf when divergent."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if order == 0:
        return 1.0
    if dist.kind == "gaussian":
        return math.exp(0.5 * order * math.log(2.0) + special.gammaln((order + 1.0) / 2.0)) / math.sqrt(math.pi)
    if dist.kind == "student_t":
        nu = dist.nu
        if order >= nu:
            return INFINITE
        log_val = (
            0.5 * order * math.log(nu - 2.0)
            + special.gammaln((order + 1.0) / 2.0)
            + special.gammaln((nu - order) / 2.0)
            - 0.5 * math.log(math.pi)
            - special.gammaln(nu / 2.0)
        )
        return math.exp(log_val)
    if dist.kind == "rademacher":
        return 1.0
    # uniform on [-a, a], a = sqrt(3): E|x|^r = a^r / (r + 1)
    return 3.0 ** (order / 2.0) / (order + 1.0)


def innovation_moment(dist: InnovationDist, k: int) -> float:
    """E[eps^k] for even k >= 2; +inf marker when the moment diverges."""
    if k < 2 or k % 2 != 0:
        raise ValueError("k must be an even integer >= 2")
    return abs_moment(dist, float(k))


def raw_moment(dist: InnovationDist, k: int) -> float:
    """E[eps^k] for any integer k >= 0; odd moments vanish by symmetry."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 1.0
    if k % 2 == 1:
        # all supported distributions are symmetric about 0
        return 0.0 if abs_moment(dist, float(k)) < INFINITE else INFINITE
    return abs_moment(dist, float(k))


def mean_abs(dist: InnovationDist) -> float:
    """E|eps|; a distribution constant used by some volatility recursions."""
    return abs_moment(dist, 1.0)


def density(dist: InnovationDist, x: float) -> float:
    """Marginal density at x; rademacher has none and raises."""
    if dist.kind == "gaussian":
        return float(stats.norm.pdf(x))
    if dist.kind == "student_t":
        s = dist._t_scale
        return float(stats.t.pdf(np.asarray(x) / s, df=dist.nu) / s)
    if dist.kind == "uniform":
        inside = np.abs(x) <= _UNIF_HALF_WIDTH
        return float(np.where(inside, 1.0 / (2.0 * _UNIF_HALF_WIDTH), 0.0))
    raise ValueError("rademacher has no density")


def cdf(dist: InnovationDist, x: float) -> float:
    if dist.kind == "gaussian":
        return float(stats.norm.cdf(x))
    if dist.kind == "student_t":
        return float(stats.t.cdf(np.asarray(x) / dist._t_scale, df=dist.nu))
    if dist.kind == "uniform":
        return float(np.clip((x + _UNIF_HALF_WIDTH) / (2.0 * _UNIF_HALF_WIDTH), 0.0, 1.0))
    if x < -1.0:
        return 0.0
    return 0.5 if x < 1.0 else 1.0


def quantile(dist: InnovationDist, prob: float) -> float:
    if not 0.0 < prob < 1.0:
        raise ValueError("prob must be in (0, 1)")
    if dist.kind == "gaussian":
        return float(stats.norm.ppf(prob))
    if dist.kind == "student_t":
        return float(stats.t.ppf(prob, df=dist.nu) * dist._t_scale)
    if dist.kind == "uniform":
        return float(-_UNIF_HALF_WIDTH + 2.0 * _UNIF_HALF_WIDTH * prob)
    return -1.0 if prob <= 0.5 else 1.0


def support(dist: InnovationDist) -> tuple[float, float]:
    """Closure of the support as an interval (rademacher: the two atoms)."""
    if dist.kind in ("gaussian", "student_t"):
        return (-math.inf, math.inf)
    if dist.kind == "uniform":
        return (-_UNIF_HALF_WIDTH, _UNIF_HALF_WIDTH)
    return (-1.0, 1.0)


def expect(dist: InnovationDist, fn, tol: float = 1e-10) -> float:
    """E[fn(eps)] by exact summation (discrete) or adaptive quadrature.

    fn must accept scalar floats. The integration is split at 0 so kinks
    of |eps|-shaped integrands do not degrade accuracy.
    """
    if dist.kind == "rademacher":
        return 0.5 * (float(fn(-1.0)) + float(fn(1.0)))
    if dist.kind == "uniform":
        h = 1.0 / (2.0 * _UNIF_HALF_WIDTH)
        lo, _ = integrate.quad(fn, -_UNIF_HALF_WIDTH, 0.0, epsabs=tol, epsrel=tol, limit=200)
        hi, _ = integrate.quad(fn, 0.0, _UNIF_HALF_WIDTH, epsabs=tol, epsrel=tol, limit=200)
        return h * (lo + hi)

    pdf = (lambda x: math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)) if dist.kind == "gaussian" else None
    if pdf is None:
        nu, s = dist.nu, dist._t_scale

        def pdf(x):
            return stats.t.pdf(x / s, df=nu) / s

    def integrand(x):
        return float(fn(x)) * pdf(x)

    lo, _ = integrate.quad(integrand, -np.inf, 0.0, epsabs=tol, epsrel=tol, limit=400)
    hi, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=tol, epsrel=tol, limit=400)
    return lo + hi


def log_square_mean(dist: InnovationDist) -> float:
    """E[log(eps^2)], the stationary drift of log-volatility recursions."""
    if dist.kind == "gaussian":
        # digamma(1/2) + log 2 = -euler_gamma - log 2
        return -np.euler_gamma - math.log(2.0)
    if dist.kind == "rademacher":
        return 0.0
    return expect(dist, lambda x: math.log(x * x) if x != 0.0 else -np.inf)
