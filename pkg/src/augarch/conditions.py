"""Machine-checked premises for the limit theory, with three-valued verdicts.

Four checks are exposed:

* moment_finite        - the innovation absolute moment of order 2r exists
* nonneg_components    - every g_i and c_j is nonnegative on the support
* norm_contraction     - sum_j ||c_j(eps)||_s < 1 at s = max(1, r/delta),
                         with sum_i ||g_i(eps)||_s finite (power group)
* exp_moment           - sum_j |c_j| < 1 and E[exp(4r sum_i g_i(eps)^2)]
                         finite (log group; the finiteness half is a
                         Monte Carlo diagnostic, not a proof)

Closed forms are used whenever the effective order is an integer or the
component reduces to a pure scale form; everything else falls back to a
large fixed-seed Monte Carlo draw with a 3-standard-error decision band,
returning "inconclusive" when the band straddles the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import innovations, models
from .innovations import InnovationDist
from .models import ModelSpec

SATISFIED = "satisfied"
NOT_SATISFIED = "not_satisfied"
INCONCLUSIVE = "inconclusive"

DEFAULT_MC_SIZE = 10_000_000
DEFAULT_MC_SEED = 20260822


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    verdict: str
    lhs_value: float
    threshold: float
    r: float
    s: float | None = None
    method: str = "closed_form"
    lhs_stderr: float | None = None
    norm_sum: float | None = None
    diagnostic: bool = False
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == SATISFIED


def effective_order(r: float, delta: float) -> float:
    """Norm order at which the contraction must hold: max(1, r/delta)."""
    return max(1.0, r / delta)


def _is_integer(s: float) -> bool:
    return abs(s - round(s)) < 1e-12 and round(s) >= 1


# -- closed-form expectations of component powers -----------------------------
#
# Most c_j reduce on each half-line to coef * |eps|**m + const with
# coef, const >= 0, so for symmetric innovations
# E[c**s] = 0.5 * sum_{sign} E[(coef_sign |eps|**m + const)**s].

def _scale_form(spec: ModelSpec, j: int):
    """(m, coef_plus, coef_minus, const) of c_j, or None if not of that shape."""
    a, g, b = spec.alpha[j - 1], spec.gamma[j - 1], spec.beta[j - 1]
    fam = spec.family
    if fam == "garch":
        return 2.0, a, a, b
    if fam == "arch":
        return 2.0, a, a, 0.0
    if fam == "agarch":
        return 2.0, a * (1.0 - g) ** 2, a * (1.0 + g) ** 2, b
    if fam == "apgarch":
        d2 = 2.0 * spec.delta
        return d2, a * (1.0 - g) ** d2, a * (1.0 + g) ** d2, b
    if fam == "gjr_garch":
        return 2.0, a * (1.0 - g) ** 2, a * (1.0 + g) ** 2, b
    if fam == "tgarch":
        return 1.0, a * (1.0 - g), a * (1.0 + g), b
    if fam == "tsgarch":
        return 1.0, a, a, b
    if fam == "pgarch":
        return 2.0 * spec.delta, a, a, b
    if fam in ("vgarch", "mgarch", "egarch"):
        return 1.0, 0.0, 0.0, b
    return None  # ngarch


def _half_split_power_mean(dist, m, cplus, cminus, const, s):
    """E[(coef_sign |eps|**m + const)**s], or None when no closed form applies."""
    if cplus == 0.0 and cminus == 0.0:
        return const**s
    if const == 0.0:
        mom = innovations.abs_moment(dist, m * s)
        if not math.isfinite(mom):
            return math.inf
        return 0.5 * (cplus**s + cminus**s) * mom
    if not _is_integer(s):
        return None
    si = round(s)
    total = 0.0
    for coef in (cplus, cminus):
        part = 0.0
        for k in range(si + 1):
            if coef == 0.0 and k > 0:
                continue
            mom = innovations.abs_moment(dist, m * k)
            if not math.isfinite(mom):
                return math.inf
            part += math.comb(si, k) * coef**k * const ** (si - k) * mom
        total += 0.5 * part
    return total


def _shifted_even_moment(dist, k: int, shift: float) -> float:
    """E[(eps + shift)**(2k)] from raw innovation moments."""
    total = 0.0
    for m in range(2 * k + 1):
        mom = innovations.raw_moment(dist, m)
        if not math.isfinite(mom):
            return math.inf
        if mom == 0.0:
            continue
        total += math.comb(2 * k, m) * mom * shift ** (2 * k - m)
    return total


def _trinomial_power_mean(dist, coef, shift, const, s):
    """E[(coef (eps + shift)**2 + const)**s], or None without a closed form."""
    if coef == 0.0:
        return const**s
    if not _is_integer(s):
        return None
    si = round(s)
    total = 0.0
    for k in range(si + 1):
        mom = _shifted_even_moment(dist, k, shift)
        if not math.isfinite(mom):
            return math.inf
        total += math.comb(si, k) * coef**k * const ** (si - k) * mom
    return total


def _closed_c_power_mean(spec, dist, j, s):
    if spec.family == "ngarch":
        a, g, b = spec.alpha[j - 1], spec.gamma[j - 1], spec.beta[j - 1]
        return _trinomial_power_mean(dist, a, g, b, s)
    m, cp, cm, const = _scale_form(spec, j)
    return _half_split_power_mean(dist, m, cp, cm, const, s)


def _c_required_order(spec, j, s) -> float:
    """Innovation moment order whose divergence forces E|c_j|**s = inf."""
    if spec.family == "ngarch":
        return 2.0 * s if spec.alpha[j - 1] > 0 else 0.0
    m, cp, cm, _ = _scale_form(spec, j)
    return m * s if (cp > 0 or cm > 0) else 0.0


def _mc_power_mean(values: np.ndarray, s: float):
    y = np.power(np.abs(values), s)
    mean = float(np.mean(y))
    se = float(np.std(y, ddof=1)) / math.sqrt(y.size)
    return mean, se


def _band_verdict(value, se, threshold):
    if value + 3.0 * se < threshold:
        return SATISFIED
    if value - 3.0 * se >= threshold:
        return NOT_SATISFIED
    return INCONCLUSIVE


# -- the four checks ----------------------------------------------------------

def check_moment(dist: InnovationDist, r: float) -> ConditionReport:
    """Existence of the innovation absolute moment of order 2r."""
    if r <= 0:
        raise ValueError("r must be > 0")
    val = innovations.abs_moment(dist, 2.0 * r)
    ok = math.isfinite(val)
    return ConditionReport(
        condition="moment_finite",
        verdict=SATISFIED if ok else NOT_SATISFIED,
        lhs_value=val,
        threshold=math.inf,
        r=r,
        s=2.0 * r,
        method="closed_form",
        detail="absolute innovation moment of order 2r"
        + ("" if ok else "; diverges for this law"),
    )


def _egarch_g_min(spec, dist, i):
    """Infimum of g_i over the innovation support (piecewise linear in eps)."""
    mu1 = innovations.mean_abs(dist)
    base = spec.omega / spec.p - spec.alpha[i - 1] * mu1
    a, g = spec.alpha[i - 1], spec.gamma[i - 1]
    lo, hi = innovations.support(dist)
    if dist.kind == "rademacher":
        return min(base + a * 1.0 + g, base + a * 1.0 - g) + 0.0
    cands = [base]
    for e in (lo, hi):
        if math.isinf(e):
            slope = a + g if e > 0 else a - g
            if slope < 0:
                return -math.inf
        else:
            cands.append(base + a * abs(e) + g * e)
    return min(cands)


def check_positivity(spec: ModelSpec, dist: InnovationDist | None = None) -> ConditionReport:
    """Almost-sure nonnegativity of every g_i and c_j.

    Power-group components are nonnegative by the admissible parameter
    ranges alone. Log-group components depend on the innovation law, so
    dist is required there; a violating innovation value is reported in
    the detail string when one exists.
    """
    kw = dict(condition="nonneg_components", r=0.0, threshold=0.0, method="analytic")
    if spec.family not in models.LOG_FAMILIES:
        return ConditionReport(
            verdict=SATISFIED,
            lhs_value=0.0,
            detail="nonnegative for every admissible parameter set",
            **kw,
        )
    if dist is None:
        raise ValueError("log-group positivity depends on the innovation law")

    worst = math.inf
    witness = None
    for i in range(1, spec.p + 1):
        a = spec.alpha[i - 1]
        if spec.family == "mgarch":
            if a == 0.0:
                gmin = spec.omega / spec.p
            elif dist.kind == "rademacher":
                gmin = spec.omega / spec.p  # log(eps**2) = 0 at eps = +-1
            else:
                # g_i < 0 exactly when |eps| < exp(-omega / (2 p alpha_i))
                bound = math.exp(-spec.omega / (2.0 * spec.p * a))
                e = bound / 2.0
                gmin = -math.inf
                witness = e
        else:  # egarch
            gmin = _egarch_g_min(spec, dist, i)
            if gmin < 0:
                mu1 = innovations.mean_abs(dist)
                witness = 0.0 if spec.omega / spec.p - a * mu1 < 0 else None
        worst = min(worst, gmin)
    if worst >= 0:
        return ConditionReport(
            verdict=SATISFIED,
            lhs_value=float(worst),
            detail="component infimum over the innovation support is nonnegative",
            **kw,
        )
    detail = "a g component takes negative values on the innovation support"
    if witness is not None:
        val = float(min(models.eval_g(spec, i, witness, dist) for i in range(1, spec.p + 1)))
        detail += f"; e.g. eps = {witness:.6g} gives g = {val:.6g}"
    return ConditionReport(verdict=NOT_SATISFIED, lhs_value=float(worst), detail=detail, **kw)


def _mc_eps(dist, mc_size, seed):
    return innovations.sample_innovations(dist, mc_size, seed)


def check_polynomial(
    spec: ModelSpec,
    dist: InnovationDist,
    r: float,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> ConditionReport:
    """Contraction of the recursive coefficients in the s-norm, power group.

    s = max(1, r/delta). lhs_value is the unrooted E|c_1|**s for a single
    recursive term and the rooted norm sum otherwise; the verdict always
    compares the rooted sum against 1. Monte Carlo entries get a
    3-standard-error decision band.
    """
    if spec.family in models.LOG_FAMILIES:
        raise ValueError("use check_exponential for log-volatility families")
    if r <= 0:
        raise ValueError("r must be > 0")
    s = effective_order(r, spec.delta)
    eps = None
    moments, stderrs, methods = [], [], []
    for j in range(1, spec.n_c + 1):
        order = _c_required_order(spec, j, s)
        if order > 0 and not math.isfinite(innovations.abs_moment(dist, order)):
            moments.append(math.inf)
            stderrs.append(0.0)
            methods.append("closed_form")
            continue
        closed = _closed_c_power_mean(spec, dist, j, s)
        if closed is not None:
            moments.append(closed)
            stderrs.append(0.0)
            methods.append("closed_form")
        else:
            if eps is None:
                eps = _mc_eps(dist, mc_size, seed)
            mean, se = _mc_power_mean(models.eval_c(spec, j, eps), s)
            moments.append(mean)
            stderrs.append(se)
            methods.append("monte_carlo")

    detail = ""
    g_finite = True
    if spec.family == "vgarch":
        for i in range(1, spec.p + 1):
            a, g = spec.alpha[i - 1], spec.gamma[i - 1]
            if a > 0 and not math.isfinite(innovations.abs_moment(dist, 2.0 * s)):
                g_finite = False
                break
            closed = _trinomial_power_mean(dist, a, g, spec.omega / spec.p, s)
            if closed is None:
                if eps is None:
                    eps = _mc_eps(dist, mc_size, seed)
                mean, _ = _mc_power_mean(models.eval_g(spec, i, eps), s)
                closed = mean
            if not math.isfinite(closed):
                g_finite = False
                break
        if not g_finite:
            detail = "driving-term norm sum diverges"

    if any(math.isinf(m) for m in moments) or not g_finite:
        return ConditionReport(
            condition="norm_contraction",
            verdict=NOT_SATISFIED,
            lhs_value=math.inf,
            threshold=1.0,
            r=r,
            s=s,
            method="closed_form",
            norm_sum=math.inf,
            detail=detail or "a required innovation moment diverges",
        )

    rooted = [m ** (1.0 / s) for m in moments]
    rooted_se = [
        (se / s) * m ** (1.0 / s - 1.0) if se > 0 and m > 0 else 0.0
        for m, se in zip(moments, stderrs)
    ]
    norm_sum = float(sum(rooted))
    sum_se = float(math.sqrt(sum(e * e for e in rooted_se)))
    verdict = _band_verdict(norm_sum, sum_se, 1.0)
    single = spec.n_c == 1
    return ConditionReport(
        condition="norm_contraction",
        verdict=verdict,
        lhs_value=float(moments[0]) if single else norm_sum,
        threshold=1.0,
        r=r,
        s=s,
        method="monte_carlo" if "monte_carlo" in methods else "closed_form",
        lhs_stderr=(stderrs[0] if single else sum_se) if "monte_carlo" in methods else None,
        norm_sum=norm_sum,
        detail=detail,
    )


def check_exponential(
    spec: ModelSpec,
    dist: InnovationDist,
    r: float,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> ConditionReport:
    """Log-group premise: |c| contraction plus an exponential moment.

    The contraction half (sum_j |beta_j| < 1) is exact. The finiteness of
    E[exp(4 r sum_i g_i(eps)**2)] cannot be decided from a sample, so the
    report is flagged diagnostic: the verdict combines the exact half with
    a max-to-sum stability heuristic on growing sample prefixes, which a
    slowly exploding integrand can fool.
    """
    if spec.family not in models.LOG_FAMILIES:
        raise ValueError("use check_polynomial for power-volatility families")
    if r <= 0:
        raise ValueError("r must be > 0")
    contraction = float(sum(abs(b) for b in spec.beta[: spec.n_c]))
    if contraction >= 1.0:
        return ConditionReport(
            condition="exp_moment",
            verdict=NOT_SATISFIED,
            lhs_value=contraction,
            threshold=1.0,
            r=r,
            method="closed_form",
            norm_sum=contraction,
            diagnostic=True,
            detail="recursive coefficient sum is not a contraction",
        )

    if dist.kind == "rademacher":
        ly = np.array(
            [
                4.0
                * r
                * sum(
                    float(models.eval_g(spec, i, e, dist)) ** 2
                    for i in range(1, spec.p + 1)
                )
                for e in (-1.0, 1.0)
            ]
        )
        val = float(np.mean(np.exp(ly)))
        return ConditionReport(
            condition="exp_moment",
            verdict=SATISFIED,
            lhs_value=contraction,
            threshold=1.0,
            r=r,
            method="closed_form",
            norm_sum=contraction,
            diagnostic=True,
            detail=f"two-point innovation law; exponential moment = {val:.6g}",
        )
    if dist.kind == "uniform" and spec.family == "egarch":
        # g is continuous on a compact support, so the integrand is bounded
        return ConditionReport(
            condition="exp_moment",
            verdict=SATISFIED,
            lhs_value=contraction,
            threshold=1.0,
            r=r,
            method="closed_form",
            norm_sum=contraction,
            diagnostic=True,
            detail="bounded innovation support with continuous g; moment is finite",
        )

    eps = _mc_eps(dist, mc_size, seed)
    gsq = np.zeros_like(eps)
    for i in range(1, spec.p + 1):
        gi = models.eval_g(spec, i, eps, dist)
        gsq += np.square(gi)
    ly = 4.0 * r * gsq
    # max-to-sum ratios over doubling prefixes; a stable, small ratio is the
    # signature of an integrable tail at this sample size
    ratios = []
    for k in range(7):
        nk = max(2, mc_size >> (6 - k))
        seg = ly[:nk]
        ratios.append(float(np.exp(seg.max() - logsumexp(seg))))
    mean_log = float(logsumexp(ly) - math.log(ly.size))
    full = ratios[-1]
    if full <= 0.05 and full <= 1.5 * ratios[0] + 1e-12:
        exp_verdict = SATISFIED
    elif full >= 0.2:
        exp_verdict = NOT_SATISFIED
    else:
        exp_verdict = INCONCLUSIVE
    detail = (
        f"exponential-moment estimate exp({mean_log:.4g}); "
        f"max-to-sum ratios {ratios[0]:.3g} -> {full:.3g} over doubling prefixes"
    )
    return ConditionReport(
        condition="exp_moment",
        verdict=exp_verdict,
        lhs_value=contraction,
        threshold=1.0,
        r=r,
        method="monte_carlo",
        norm_sum=contraction,
        diagnostic=True,
        detail=detail,
    )


def check_all(
    spec: ModelSpec,
    dist: InnovationDist,
    r: float,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> list[ConditionReport]:
    """Moment, positivity, and the group-appropriate contraction check."""
    reports = [check_moment(dist, r), check_positivity(spec, dist)]
    if spec.family in models.LOG_FAMILIES:
        reports.append(check_exponential(spec, dist, r, mc_size, seed))
    else:
        reports.append(check_polynomial(spec, dist, r, mc_size, seed))
    return reports


# -- benchmark table ----------------------------------------------------------

@dataclass(frozen=True)
class Table2Row:
    family: str
    r: float
    printed_exponent: float
    closed_value: float
    mc_value: float
    mc_stderr: float
    verdict_exponent: float
    verdict_value: float
    verdict: str
    published_variant: float | None = None
    flagged: bool = False
    note: str = ""


def benchmark_spec(family: str) -> ModelSpec:
    """The parameter set used in the reference contraction table."""
    common = dict(p=1, q=1)
    table = {
        "apgarch": dict(omega=0.1, alpha=(0.1,), gamma=(0.3,), beta=(0.8,), delta=0.75),
        "agarch": dict(omega=0.1, alpha=(0.1,), gamma=(0.3,), beta=(0.8,)),
        "gjr_garch": dict(omega=0.1, alpha=(0.1,), gamma=(0.5,), beta=(0.8,)),
        "garch": dict(omega=0.05, alpha=(0.1,), beta=(0.8,)),
        "arch": dict(omega=0.1, alpha=(0.5,), q=0),
        "tgarch": dict(omega=0.1, alpha=(0.1,), gamma=(0.3,), beta=(0.8,)),
        "tsgarch": dict(omega=0.1, alpha=(0.1,), beta=(0.8,)),
        "pgarch": dict(omega=0.1, alpha=(0.1,), beta=(0.8,), delta=0.5),
        "vgarch": dict(omega=0.1, alpha=(0.1,), gamma=(0.3,), beta=(0.9,)),
        "ngarch": dict(omega=0.1, alpha=(0.1,), gamma=(0.3,), beta=(0.8,)),
        "mgarch": dict(omega=0.1, alpha=(0.05,), beta=(0.9,)),
        "egarch": dict(omega=0.1, alpha=(0.1,), gamma=(-0.05,), beta=(0.9,)),
    }
    kw = dict(common)
    kw.update(table[family])
    return ModelSpec(family=family, **kw)


# printed exponent and published closed value per row; None means the
# published value matches the definitional one
_TABLE2_PLAN = [
    # (family, r, printed_exponent or None -> use max(1, r/delta), published_variant)
    ("apgarch", 1.0, 1.0, None),
    ("agarch", 1.0, 1.0, None),
    ("gjr_garch", 1.0, 1.0, None),
    ("garch", 1.0, 1.0, None),
    ("garch", 2.0, 2.0, "cross_term"),
    ("arch", 2.0, 2.0, None),
    ("tgarch", 2.0, 2.0, None),
    ("tsgarch", 1.0, 1.0, None),
    ("pgarch", 1.0, 2.0, "linear_coef"),
    ("vgarch", 1.0, 1.0, None),
    ("ngarch", 1.0, 1.0, None),
]


def _published_value(kind: str, spec: ModelSpec, dist: InnovationDist) -> float:
    a, b = spec.alpha[0], spec.beta[0]
    if kind == "cross_term":
        # quoted value carries a single alpha*beta cross term instead of two
        return a * a * innovations.raw_moment(dist, 4) + a * b + b * b
    # quoted value carries alpha to the first power on the squared term
    mu1 = innovations.mean_abs(dist)
    return a + 2.0 * a * b * mu1 + b * b


def table2_rows(
    dist: InnovationDist = innovations.GAUSSIAN,
    mc_size: int = DEFAULT_MC_SIZE,
    seed: int = DEFAULT_MC_SEED,
) -> list[Table2Row]:
    """Recompute the reference contraction table at the benchmark parameters.

    Each power-group row carries the definitional closed value of
    E|c_1|**s at the exponent the reference prints, a Monte Carlo replica
    of the same expectation, and the contraction verdict at the effective
    exponent max(1, r/delta). Rows whose quoted value disagrees with the
    definitional one are flagged and carry the quoted number alongside.
    """
    rows: list[Table2Row] = []
    eps = _mc_eps(dist, mc_size, seed)
    for family, r, printed_s, variant in _TABLE2_PLAN:
        spec = benchmark_spec(family)
        closed = _closed_c_power_mean(spec, dist, 1, printed_s)
        if closed is None:
            raise AssertionError("benchmark printed exponents all have closed forms")
        mc_value, mc_se = _mc_power_mean(models.eval_c(spec, 1, eps), printed_s)
        s_star = effective_order(r, spec.delta)
        if s_star == printed_s:
            verdict_value, verdict_se = closed, 0.0
        else:
            vclosed = _closed_c_power_mean(spec, dist, 1, s_star)
            if vclosed is not None:
                verdict_value, verdict_se = vclosed, 0.0
            else:
                verdict_value, verdict_se = _mc_power_mean(
                    models.eval_c(spec, 1, eps), s_star
                )
        verdict = _band_verdict(verdict_value, verdict_se, 1.0)
        published = _published_value(variant, spec, dist) if variant else None
        note = ""
        if variant == "cross_term":
            note = "quoted closed form drops half the cross term; definitional value used for the verdict"
        elif variant == "linear_coef":
            note = "quoted closed form is linear in the shock coefficient where the definitional one is quadratic"
        elif s_star != printed_s:
            note = f"printed exponent {printed_s:g}; contraction verdict taken at {s_star:g}"
        rows.append(
            Table2Row(
                family=family,
                r=r,
                printed_exponent=printed_s,
                closed_value=float(closed),
                mc_value=mc_value,
                mc_stderr=mc_se,
                verdict_exponent=s_star,
                verdict_value=float(verdict_value),
                verdict=verdict,
                published_variant=published,
                flagged=variant is not None,
                note=note,
            )
        )
    for family in ("mgarch", "egarch"):
        spec = benchmark_spec(family)
        rep = check_exponential(spec, dist, 1.0, mc_size=mc_size, seed=seed)
        contraction = float(sum(abs(b) for b in spec.beta[: spec.n_c]))
        rows.append(
            Table2Row(
                family=family,
                r=1.0,
                printed_exponent=1.0,
                closed_value=contraction,
                mc_value=contraction,
                mc_stderr=0.0,
                verdict_exponent=1.0,
                verdict_value=contraction,
                verdict=rep.verdict,
                note="exponential-moment half is a sampling diagnostic: " + rep.detail,
            )
        )
    return rows
