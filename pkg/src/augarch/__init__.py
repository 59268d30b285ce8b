"""Simulation and verification toolkit for augmented conditional-volatility
processes: twelve model families behind one transformed recursion, sample
quantile and absolute-moment estimators, machine-checked stationarity
premises, the 2x2 asymptotic covariance of the joint estimator, and a
replicated harness that verifies the limit law empirically.
"""

from .asymptotics import (
    GammaMatrix,
    TriCov,
    assemble_gamma,
    estimate_density_at_quantile,
    estimate_tricov,
    iid_gamma,
    long_run_cov,
)
from .conditions import (
    ConditionReport,
    Table2Row,
    check_all,
    check_exponential,
    check_moment,
    check_polynomial,
    check_positivity,
    table2_rows,
)
from .config import ConfigError, RunConfig, load_config, parse_config
from .estimators import (
    bahadur_residual,
    centred_abs_moment,
    moment_repr_residual,
    sample_quantile,
    signed_power_coeff,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    NedDecay,
    OracleTruths,
    iid_truths,
    ned_decay,
    oracle_truths,
    run_clt,
    run_experiment,
    run_fclt,
)
from .innovations import GAUSSIAN, InnovationDist, sample_innovations
from .models import (
    FAMILIES,
    ModelSpec,
    NumericAbortError,
    Path,
    delta_dependent_path,
    eval_c,
    eval_g,
    lambda_inverse,
    lambda_transform,
    simulate_path,
)

__version__ = "0.1.0"

__all__ = [
    "GAUSSIAN",
    "FAMILIES",
    "ConditionReport",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "GammaMatrix",
    "InnovationDist",
    "ModelSpec",
    "NedDecay",
    "NumericAbortError",
    "OracleTruths",
    "Path",
    "RunConfig",
    "Table2Row",
    "TriCov",
    "assemble_gamma",
    "bahadur_residual",
    "centred_abs_moment",
    "check_all",
    "check_exponential",
    "check_moment",
    "check_polynomial",
    "check_positivity",
    "delta_dependent_path",
    "estimate_density_at_quantile",
    "estimate_tricov",
    "eval_c",
    "eval_g",
    "iid_gamma",
    "iid_truths",
    "lambda_inverse",
    "lambda_transform",
    "load_config",
    "long_run_cov",
    "moment_repr_residual",
    "ned_decay",
    "oracle_truths",
    "parse_config",
    "run_clt",
    "run_experiment",
    "run_fclt",
    "sample_innovations",
    "sample_quantile",
    "signed_power_coeff",
    "simulate_path",
    "table2_rows",
]
