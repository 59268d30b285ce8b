"""Volatility model catalogue and path simulation.

Twelve conditional-volatility recursions are represented through one pair of
equations: the observation x_t = sqrt(sigma2_t) * eps_t and a recursion on a
transform of sigma2_t,

    T(sigma2_t) = sum_i g_i(eps_{t-i}) + sum_j c_j(eps_{t-j}) * T(sigma2_{t-j}),

where T(x) = x**delta for the power group and T(x) = log(x) for the log
group. Family-specific g_i and c_j are evaluated by eval_g / eval_c.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import innovations
from .innovations import InnovationDist

POWER_FAMILIES = (
    "apgarch",
    "agarch",
    "gjr_garch",
    "garch",
    "arch",
    "tgarch",
    "tsgarch",
    "pgarch",
    "vgarch",
    "ngarch",
)
LOG_FAMILIES = ("mgarch", "egarch")
FAMILIES = POWER_FAMILIES + LOG_FAMILIES

# families whose transform exponent is pinned by their defining recursion
FIXED_DELTA = {
    "agarch": 1.0,
    "gjr_garch": 1.0,
    "garch": 1.0,
    "arch": 1.0,
    "vgarch": 1.0,
    "ngarch": 1.0,
    "tgarch": 0.5,
    "tsgarch": 0.5,
}
FREE_DELTA = ("apgarch", "pgarch")

# families whose g_i depends on the innovation (all others use the constant
# omega/p)
_INNOVATION_G = ("vgarch", "mgarch", "egarch")


class NumericAbortError(RuntimeError):
    """Volatility recursion left the representable range (explosive spec)."""

    def __init__(self, step: int, seed, message: str | None = None):
        self.step = step
        self.seed = seed
        super().__init__(
            message or f"volatility recursion overflowed at step {step} (seed {seed!r})"
        )


@dataclass(frozen=True)
class ModelSpec:
    """One conditional-volatility model.

    Parameter constraints: omega > 0, alpha_i >= 0, -1 <= gamma_i <= 1,
    beta_j >= 0. Coefficient sequences are padded with zeros up to
    max(p, q) so mismatched orders share one indexing convention.

    delta is always the exponent of the volatility transform x**delta. It
    is a free parameter only for apgarch and pgarch (note the conventional
    pgarch power equals 2*delta); it is pinned for the remaining power
    families and must be omitted for the log families.
    """

    family: str
    p: int = 1
    q: int = 1
    omega: float = 1.0
    alpha: tuple = ()
    gamma: tuple = ()
    beta: tuple = ()
    delta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if not self.omega > 0:
            raise ValueError("omega must be > 0")

        width = max(self.p, self.q)
        alpha = self._pad("alpha", self.alpha, self.p, width)
        gamma = self._pad("gamma", self.gamma, self.p, width)
        beta = self._pad("beta", self.beta, self.q, width)
        for i, a in enumerate(alpha):
            if a < 0:
                raise ValueError(f"alpha[{i}] must be >= 0")
        for i, g in enumerate(gamma):
            if not -1.0 <= g <= 1.0:
                raise ValueError(f"gamma[{i}] must be in [-1, 1]")
        for j, b in enumerate(beta):
            if b < 0:
                raise ValueError(f"beta[{j}] must be >= 0")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)

        if self.family in LOG_FAMILIES:
            if self.delta is not None:
                raise ValueError(
                    "delta is not a free parameter for log-volatility families"
                )
        elif self.family in FIXED_DELTA:
            pinned = FIXED_DELTA[self.family]
            if self.delta is None:
                object.__setattr__(self, "delta", pinned)
            elif self.delta != pinned:
                raise ValueError(f"{self.family} has fixed delta {pinned}")
        else:
            if self.delta is None:
                raise ValueError(f"{self.family} requires an explicit delta > 0")
            if not self.delta > 0:
                raise ValueError("delta must be > 0")

    @staticmethod
    def _pad(name, values, max_given, width):
        values = tuple(float(v) for v in values)
        if len(values) > max_given:
            raise ValueError(
                f"{name} has {len(values)} entries but at most {max_given} are allowed"
            )
        return values + (0.0,) * (width - len(values))

    @property
    def lambda_kind(self) -> str:
        return "log" if self.family in LOG_FAMILIES else "power"

    @property
    def n_c(self) -> int:
        """Number of recursive coefficient terms c_j."""
        if self.family in ("vgarch", "mgarch", "egarch"):
            return self.q
        return max(self.p, self.q)

    @property
    def max_lag(self) -> int:
        return max(self.p, self.n_c, 1)


@dataclass(eq=False)
class Path:
    """A simulated realization with its provenance."""

    x: np.ndarray
    sigma2: np.ndarray
    n: int
    burn_in: int
    seed: object
    spec: ModelSpec
    dist: InnovationDist = field(default=innovations.GAUSSIAN)


def _pow(x, m: float):
    if m == 1.0:
        return x
    if m == 2.0:
        return np.square(x)
    return np.power(x, m)


def eval_g(spec: ModelSpec, i: int, eps, dist: InnovationDist | None = None):
    """g_i evaluated at eps (scalar or array). 1-based index, 1 <= i <= p."""
    if not 1 <= i <= spec.p:
        raise IndexError(f"g index {i} out of range 1..{spec.p}")
    eps = np.asarray(eps, dtype=np.float64)
    base = spec.omega / spec.p
    a, g = spec.alpha[i - 1], spec.gamma[i - 1]
    if spec.family == "vgarch":
        return base + a * np.square(eps + g)
    if spec.family == "mgarch":
        return base + a * np.log(np.square(eps))
    if spec.family == "egarch":
        if dist is None:
            raise ValueError("egarch g_i needs the innovation distribution")
        return base + a * (np.abs(eps) - innovations.mean_abs(dist)) + g * eps
    return np.zeros_like(eps) + base


def eval_c(spec: ModelSpec, j: int, eps):
    """c_j evaluated at eps (scalar or array). 1-based index, 1 <= j <= n_c."""
    if not 1 <= j <= spec.n_c:
        raise IndexError(f"c index {j} out of range 1..{spec.n_c}")
    eps = np.asarray(eps, dtype=np.float64)
    a, g, b = spec.alpha[j - 1], spec.gamma[j - 1], spec.beta[j - 1]
    fam = spec.family
    if fam in ("apgarch", "agarch"):
        return a * _pow(np.abs(eps) - g * eps, 2.0 * spec.delta) + b
    if fam == "gjr_garch":
        astar = a * (1.0 - g) ** 2
        gstar = 4.0 * a * g
        return b + astar * np.square(eps) + gstar * np.square(np.minimum(eps, 0.0))
    if fam == "garch":
        return a * np.square(eps) + b
    if fam == "arch":
        return a * np.square(eps)
    if fam == "tgarch":
        return a * np.abs(eps) - a * g * eps + b
    if fam == "tsgarch":
        return a * np.abs(eps) + b
    if fam == "pgarch":
        return a * _pow(np.abs(eps), 2.0 * spec.delta) + b
    if fam == "ngarch":
        return a * np.square(eps + g) + b
    # vgarch, mgarch, egarch: the recursive coefficient is the constant beta_j
    return np.zeros_like(eps) + b


def lambda_transform(spec: ModelSpec, x):
    """The volatility transform applied to sigma2 values (must be > 0)."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("transform domain is x > 0")
    if spec.lambda_kind == "log":
        return np.log(x)
    d = spec.delta
    if d == 1.0:
        return x
    if d == 0.5:
        return np.sqrt(x)
    return np.power(x, d)


def lambda_inverse(spec: ModelSpec, y):
    """Inverse of the volatility transform; returns sigma2 values."""
    y = np.asarray(y, dtype=np.float64)
    if spec.lambda_kind == "log":
        return np.exp(y)
    d = spec.delta
    if np.any(y <= 0):
        raise ValueError("inverse transform domain is y > 0 for the power group")
    if d == 1.0:
        return y
    if d == 0.5:
        return np.square(y)
    return np.power(y, 1.0 / d)


# -- simulation internals ----------------------------------------------------

def _uses_recursive_form(spec: ModelSpec) -> bool:
    # The arch recursion is driven directly by past innovations: its
    # volatility is a finite window of eps, so simulation folds the
    # alpha terms into g and keeps no recursive coefficients.
    return spec.family != "arch"


def _sim_n_c(spec: ModelSpec) -> int:
    return spec.n_c if _uses_recursive_form(spec) else 0


def _sim_max_lag(spec: ModelSpec) -> int:
    return max(spec.p, _sim_n_c(spec), 1)


def _sim_g_slice(spec: ModelSpec, dist: InnovationDist, i: int, seg: np.ndarray):
    """g_i applied to one aligned innovation slice; scalar when constant."""
    if spec.family == "arch":
        return spec.omega / spec.p + spec.alpha[i - 1] * np.square(seg)
    if spec.family in _INNOVATION_G:
        return eval_g(spec, i, seg, dist)
    return spec.omega / spec.p


def _sim_g_mean(spec: ModelSpec, dist: InnovationDist, i: int) -> float:
    if spec.family == "arch":
        return spec.omega / spec.p + spec.alpha[i - 1]
    if spec.family == "vgarch":
        return spec.omega / spec.p + spec.alpha[i - 1] * (1.0 + spec.gamma[i - 1] ** 2)
    if spec.family == "mgarch":
        return spec.omega / spec.p + spec.alpha[i - 1] * innovations.log_square_mean(dist)
    # egarch: both innovation terms are centred; all remaining g_i are constant
    return spec.omega / spec.p


def _half_split_mean(dist, coef_plus, coef_minus, power, const) -> float:
    """E[coef_sgn * |eps|**power + const] for a symmetric innovation law."""
    m = innovations.abs_moment(dist, power)
    if not math.isfinite(m):
        return math.inf
    return 0.5 * (coef_plus + coef_minus) * m + const


def c_mean(spec: ModelSpec, dist: InnovationDist, j: int) -> float:
    """E[c_j(eps)], +inf when the required moment diverges."""
    a, g, b = spec.alpha[j - 1], spec.gamma[j - 1], spec.beta[j - 1]
    fam = spec.family
    if fam in ("apgarch", "agarch"):
        d2 = 2.0 * spec.delta if fam == "apgarch" else 2.0
        return _half_split_mean(dist, a * (1.0 - g) ** d2, a * (1.0 + g) ** d2, d2, b)
    if fam == "gjr_garch":
        return _half_split_mean(dist, a * (1.0 - g) ** 2, a * (1.0 + g) ** 2, 2.0, b)
    if fam == "garch":
        return _half_split_mean(dist, a, a, 2.0, b)
    if fam == "arch":
        return _half_split_mean(dist, a, a, 2.0, 0.0)
    if fam == "tgarch":
        return _half_split_mean(dist, a * (1.0 - g), a * (1.0 + g), 1.0, b)
    if fam == "tsgarch":
        return _half_split_mean(dist, a, a, 1.0, b)
    if fam == "pgarch":
        return _half_split_mean(dist, a, a, 2.0 * spec.delta, b)
    if fam == "ngarch":
        m2 = innovations.raw_moment(dist, 2)
        return a * (m2 + g * g) + b
    return b


@functools.lru_cache(maxsize=256)
def stationary_level(spec: ModelSpec, dist: InnovationDist) -> float:
    """Mean of the transformed volatility under stationarity, when it exists.

    Falls back to the transform of omega when the fixed point is undefined
    (mean recursion not contracting, or a required moment diverges); the
    burn-in then does the real work of approaching the stationary law.
    """
    gbar = sum(_sim_g_mean(spec, dist, i) for i in range(1, spec.p + 1))
    cbar = sum(c_mean(spec, dist, j) for j in range(1, _sim_n_c(spec) + 1))
    if math.isfinite(gbar) and math.isfinite(cbar) and cbar < 1.0:
        return gbar / (1.0 - cbar)
    return float(lambda_transform(spec, spec.omega))


_OVERFLOW_LIMIT = 1e300


def _recurse_py(gsum, cs, lam0, lam):
    n_c, total = cs.shape[0], gsum.shape[0]
    for t in range(total):
        acc = gsum[t]
        for j in range(1, n_c + 1):
            prev = lam[t - j] if t >= j else lam0
            acc = acc + cs[j - 1, t] * prev
        lam[t] = acc
        if not (acc == acc) or acc > _OVERFLOW_LIMIT or acc < -_OVERFLOW_LIMIT:
            return t
    return -1


try:  # sequential kernel; numba keeps the big Monte Carlo runs affordable
    import numba

    _recurse = numba.njit(cache=True, nogil=True)(_recurse_py)
except ImportError:  # pragma: no cover - exercised only without numba
    _recurse = _recurse_py


def _build_inputs(spec, dist, total, maxlag, seed):
    eps_full = innovations.sample_innovations(dist, maxlag + total, seed)
    gsum = np.zeros(total)
    for i in range(1, spec.p + 1):
        seg = eps_full[maxlag - i : maxlag - i + total]
        gsum = gsum + _sim_g_slice(spec, dist, i, seg)
    gsum = np.asarray(gsum, dtype=np.float64)
    if gsum.ndim == 0:
        gsum = np.full(total, float(gsum))
    n_c = _sim_n_c(spec)
    cs = np.empty((n_c, total))
    for j in range(1, n_c + 1):
        cs[j - 1] = eval_c(spec, j, eps_full[maxlag - j : maxlag - j + total])
    return eps_full, gsum, cs


def _invert_levels(spec, lam, seed):
    if spec.lambda_kind == "log":
        sigma2 = np.exp(lam)
        bad = ~np.isfinite(sigma2) | (sigma2 <= 0.0)
        if bad.any():
            raise NumericAbortError(int(np.argmax(bad)), seed)
        return sigma2
    if np.any(lam <= 0):
        raise NumericAbortError(
            int(np.argmax(lam <= 0)),
            seed,
            "transformed volatility left the positive domain "
            f"at step {int(np.argmax(lam <= 0))} (seed {seed!r})",
        )
    return lambda_inverse(spec, lam)


def simulate_path(
    spec: ModelSpec,
    dist: InnovationDist,
    n: int,
    burn_in: int = 5000,
    seed=0,
) -> Path:
    """Simulate n observations after discarding a burn-in prefix.

    The recursion starts from the stationary mean of the transformed
    volatility (see stationary_level); burn-in then approximates the
    stationary solution. Raises NumericAbortError for explosive parameter
    sets instead of clamping.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    total = burn_in + n
    maxlag = _sim_max_lag(spec)
    eps_full, gsum, cs = _build_inputs(spec, dist, total, maxlag, seed)
    lam0 = stationary_level(spec, dist)
    lam = np.empty(total)
    bad = _recurse(gsum, cs, lam0, lam)
    if bad >= 0:
        raise NumericAbortError(int(bad), seed)
    sigma2 = _invert_levels(spec, lam, seed)
    x = np.sqrt(sigma2) * eps_full[maxlag:]
    return Path(
        x=x[burn_in:],
        sigma2=sigma2[burn_in:],
        n=n,
        burn_in=burn_in,
        seed=seed,
        spec=spec,
        dist=dist,
    )


def delta_dependent_path(
    spec: ModelSpec,
    dist: InnovationDist,
    n: int,
    delta: int,
    seed=0,
    burn_in: int = 5000,
) -> Path:
    """Windowed surrogate: each x_t uses only the innovations eps_{t-delta..t}.

    The recursion is restarted delta steps back from the stationary level;
    contributions that would need older innovations are replaced by their
    unconditional means. Shares the innovation stream of simulate_path with
    the same seed, so gaps are estimable by pairing, and reproduces the full
    path bit for bit once delta covers the whole sample.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    total = burn_in + n
    maxlag = _sim_max_lag(spec)
    eps_full = innovations.sample_innovations(dist, maxlag + total, seed)

    gslices = []
    for i in range(1, spec.p + 1):
        seg = eps_full[maxlag - i : maxlag - i + total]
        gslices.append(_sim_g_slice(spec, dist, i, seg))
    gbars = [_sim_g_mean(spec, dist, i) for i in range(1, spec.p + 1)]
    n_c = _sim_n_c(spec)
    cs = [eval_c(spec, j, eps_full[maxlag - j : maxlag - j + total]) for j in range(1, n_c + 1)]
    cbars = [c_mean(spec, dist, j) for j in range(1, n_c + 1)]
    lam0 = stationary_level(spec, dist)

    levels = [np.full(total, lam0)]
    for k in range(1, delta + 1):
        lev = np.zeros(total)
        for i in range(1, spec.p + 1):
            lev = lev + (gslices[i - 1] if i <= k else gbars[i - 1])
        for j in range(1, n_c + 1):
            if j <= k:
                prev = np.empty(total)
                prev[:j] = lam0
                prev[j:] = levels[k - j][: total - j]
                lev = lev + cs[j - 1] * prev
            else:
                lev = lev + cbars[j - 1] * lam0
        levels.append(np.asarray(lev, dtype=np.float64))

    lam = levels[delta]
    if not np.isfinite(lam).all() or np.abs(lam).max() > _OVERFLOW_LIMIT:
        bad = int(np.argmax(~np.isfinite(lam) | (np.abs(lam) > _OVERFLOW_LIMIT)))
        raise NumericAbortError(bad, seed)
    sigma2 = _invert_levels(spec, lam, seed)
    x = np.sqrt(sigma2) * eps_full[maxlag:]
    return Path(
        x=x[burn_in:],
        sigma2=sigma2[burn_in:],
        n=n,
        burn_in=burn_in,
        seed=seed,
        spec=spec,
        dist=dist,
    )
