"""Plain-text run configuration.

One key-value pair per line, sections expressed as dotted prefixes:

    # benchmark run
    model.family = garch
    model.omega  = 0.05
    model.alpha  = 0.1
    model.beta   = 0.8
    innovation.kind = gaussian
    experiment.p = 0.95
    experiment.r = 2
    experiment.n = 20000
    experiment.m = 2000
    experiment.seed = 1

Lists are written either as JSON ([0.25, 0.5, 1.0]) or comma-separated
(0.25, 0.5, 1.0); a bare number is accepted where a one-element list is
meant. Lines starting with # and blank lines are ignored. Unknown or
duplicated keys are errors, reported with their line number.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .innovations import InnovationDist
from .models import ModelSpec


class ConfigError(ValueError):
    """Malformed configuration; the message carries line/key context."""


_DEFAULTS = {
    "innovation.kind": "gaussian",
    "experiment.seed": 0,
    "experiment.burn_in": 5000,
    "experiment.lag": "floor(n**(1/3))",
    "experiment.scaling": "literal",
    "experiment.tolerance_rel": 0.10,
    "experiment.tolerance_fclt": 0.15,
    "output.precision": 17,
}

_STR_KEYS = {
    "model.family",
    "innovation.kind",
    "experiment.scaling",
    "output.dir",
    "output.csv",
}
_INT_KEYS = {
    "model.p",
    "model.q",
    "experiment.n",
    "experiment.m",
    "experiment.seed",
    "experiment.burn_in",
    "experiment.lag",
    "experiment.threads",
    "output.precision",
}
_FLOAT_KEYS = {
    "model.omega",
    "model.delta",
    "innovation.nu",
    "experiment.p",
    "experiment.r",
    "experiment.tolerance_rel",
    "experiment.tolerance_fclt",
}
_LIST_KEYS = {
    "model.alpha",
    "model.gamma",
    "model.beta",
    "experiment.t_grid",
    "experiment.delta_grid",
}
_ALL_KEYS = _STR_KEYS | _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration; fields a command does not need stay None."""

    spec: ModelSpec | None
    dist: InnovationDist
    p: float | None
    r: float | None
    n: int | None
    replications: int | None
    seed: int
    burn_in: int
    lag: int | None
    t_grid: tuple | None
    delta_grid: tuple | None
    scaling: str
    threads: int | None
    tolerance_rel: float
    tolerance_fclt: float
    out_dir: str | None
    out_csv: str | None
    precision: int
    defaults_used: tuple

    def resolved_lag(self) -> int | None:
        if self.lag is not None:
            return self.lag
        if self.n is None:
            return None
        return int(math.floor(self.n ** (1.0 / 3.0)))


def _scalar(token: str):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token.strip("\"'")


def _as_int(key, value, line):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"line {line}: key {key} needs an integer, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ConfigError(f"line {line}: key {key} needs an integer, got {value!r}")
        value = int(value)
    return value


def _as_float(key, value, line):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"line {line}: key {key} needs a number, got {value!r}")
    return float(value)


def _as_list(key, raw, line):
    raw = raw.strip()
    if raw.startswith("["):
        try:
            items = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {line}: key {key}: bad list syntax ({exc.msg})") from exc
        if not isinstance(items, list):
            raise ConfigError(f"line {line}: key {key} needs a list")
    elif "," in raw:
        items = [_scalar(tok.strip()) for tok in raw.split(",") if tok.strip()]
    else:
        items = [_scalar(raw)]
    out = []
    for item in items:
        out.append(_as_float(key, item, line))
    return tuple(out)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse configuration text; raises ConfigError with line context."""
    values: dict = {}
    lines: dict = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}, line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{source}, line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(
                f"{source}, line {lineno}: duplicate key {key!r} (first set on line {lines[key]})"
            )
        lines[key] = lineno
        if not raw:
            raise ConfigError(f"{source}, line {lineno}: key {key!r} has no value")
        if key in _LIST_KEYS:
            values[key] = _as_list(key, raw, lineno)
        elif key in _INT_KEYS:
            values[key] = _as_int(key, _scalar(raw), lineno)
        elif key in _FLOAT_KEYS:
            values[key] = _as_float(key, _scalar(raw), lineno)
        else:
            values[key] = str(_scalar(raw))

    defaults_used = tuple(k for k in _DEFAULTS if k not in values)

    dist_kind = values.get("innovation.kind", "gaussian")
    try:
        dist = InnovationDist(dist_kind, nu=values.get("innovation.nu"))
    except ValueError as exc:
        raise ConfigError(f"{source}: innovation block: {exc}") from exc

    spec = None
    if "model.family" in values:
        try:
            spec = ModelSpec(
                family=values["model.family"],
                p=values.get("model.p", 1),
                q=values.get("model.q", 1),
                omega=values.get("model.omega", 1.0),
                alpha=values.get("model.alpha", ()),
                gamma=values.get("model.gamma", ()),
                beta=values.get("model.beta", ()),
                delta=values.get("model.delta"),
            )
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"{source}: model block: {exc}") from exc
    elif any(k.startswith("model.") for k in values):
        raise ConfigError(f"{source}: model block needs model.family")

    delta_grid = values.get("experiment.delta_grid")
    if delta_grid is not None:
        delta_grid = tuple(int(d) for d in delta_grid)

    return RunConfig(
        spec=spec,
        dist=dist,
        p=values.get("experiment.p"),
        r=values.get("experiment.r"),
        n=values.get("experiment.n"),
        replications=values.get("experiment.m"),
        seed=values.get("experiment.seed", 0),
        burn_in=values.get("experiment.burn_in", 5000),
        lag=values.get("experiment.lag"),
        t_grid=values.get("experiment.t_grid"),
        delta_grid=delta_grid,
        scaling=values.get("experiment.scaling", "literal"),
        threads=values.get("experiment.threads"),
        tolerance_rel=values.get("experiment.tolerance_rel", 0.10),
        tolerance_fclt=values.get("experiment.tolerance_fclt", 0.15),
        out_dir=values.get("output.dir"),
        out_csv=values.get("output.csv"),
        precision=values.get("output.precision", 17),
        defaults_used=defaults_used,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text, source=path)
