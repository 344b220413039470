"""Config-file ingestion for the command line.

Experiments are described by INI files with ``[model]``, ``[problem]`` and
``[run]`` sections (plus an optional ``[gamma]`` section for the reduction
experiment).  Keys are validated against a closed schema: unknown sections
or keys are rejected, as are keys that do not apply to the chosen model
kind or horizon mode.  Shipped presets mirror the two benchmark parameter
tables; ``--override section.key=value`` rewrites single entries before
validation.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dynamics import FullParams, ReducedParams
from .errors import ModelError
from .transcribe import ProblemSpec

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "preset_path", "PRESETS"]

PRESETS = ("table1_fixed", "table1_free", "table2_fixed", "table2_free")


class ConfigError(ModelError, ValueError):
    """Malformed or contradictory experiment configuration."""


def _as_float(section, key, raw):
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _as_int(section, key, raw):
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from exc


def _as_float_list(section, key, raw):
    try:
        return [float(tok) for tok in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number list") from exc


_MODEL_KEYS = {
    "kind": str,
    "b1_0": float,
    "b2_0": float,
    "b1": float,
    "b2": float,
    "d1": float,
    "d2": float,
    "k": float,
    "s_h": float,
}
_PROBLEM_KEYS = {
    "mode": str,
    "t": float,
    "t0": float,
    "alpha": float,
    "m": float,
    "n": int,
    "penalty_eps": float,
    "p0": float,
    "n1_0": float,
    "n2_0": float,
    "margin": float,
    "substeps": int,
    "t_lo": float,
    "t_hi": float,
}
_RUN_KEYS = {
    "out_dir": str,
    "seed": int,
    "max_iters": int,
    "tol": float,
    "u0": float,
    "starts": list,
    "slide": bool,
}
_GAMMA_KEYS = {
    "eps_values": list,
    "policy": str,
    "level": float,
    "t": float,
    "n": int,
    "substeps": int,
    "d1": float,
    "d2": float,
    "k": float,
    "s_h": float,
}
_SCHEMAS = {
    "model": _MODEL_KEYS,
    "problem": _PROBLEM_KEYS,
    "run": _RUN_KEYS,
    "gamma": _GAMMA_KEYS,
}


def _coerce(section: str, raw_items: dict) -> dict:
    schema = _SCHEMAS[section]
    out = {}
    for key, raw in raw_items.items():
        key_l = key.lower()
        if key_l not in schema:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        kind = schema[key_l]
        if kind is bool:
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean")
            out[key_l] = low in ("true", "1", "yes")
        elif kind is float:
            out[key_l] = _as_float(section, key, raw)
        elif kind is int:
            out[key_l] = _as_int(section, key, raw)
        elif kind is list:
            out[key_l] = _as_float_list(section, key, raw)
        else:
            out[key_l] = raw.strip()
    return out


@dataclass
class ExperimentConfig:
    """Validated experiment description plus its typed echo for manifests."""

    kind: str  # "reduced" | "full"
    params: object
    problem: dict
    run: dict
    gamma: dict | None
    echo: dict

    def problem_spec(self) -> ProblemSpec:
        p = self.problem
        common = dict(
            system=self.kind,
            params=self.params,
            M=p["m"],
            n=p["n"],
            penalty_eps=p["penalty_eps"],
            margin=p.get("margin", 10.0),
            substeps=p.get("substeps"),
        )
        if self.kind == "reduced":
            common["initial_state"] = p.get("p0", 0.0)
        elif "n1_0" in p or "n2_0" in p:
            common["initial_state"] = (
                p.get("n1_0", self.params.n1_star),
                p.get("n2_0", 0.0),
            )
        if p["mode"] == "fixed":
            return ProblemSpec(mode="fixed", T=p["t"], **common)
        t_bounds = None
        if "t_lo" in p or "t_hi" in p:
            t_bounds = (p.get("t_lo", 0.1 * p["t0"]), p.get("t_hi", 10.0 * p["t0"]))
        return ProblemSpec(
            mode="free", T0=p["t0"], alpha=p["alpha"], t_bounds=t_bounds, **common
        )


def _build_params(model: dict):
    kind = model.get("kind")
    if kind not in ("reduced", "full"):
        raise ConfigError("[model] kind must be 'reduced' or 'full'")
    required = (
        ("b1_0", "b2_0", "d1", "d2", "k", "s_h")
        if kind == "reduced"
        else ("b1", "b2", "d1", "d2", "k", "s_h")
    )
    missing = [k for k in required if k not in model]
    if missing:
        raise ConfigError(f"[model] missing keys: {', '.join(missing)}")
    extra = set(model) - set(required) - {"kind"}
    if extra:
        raise ConfigError(
            f"[model] keys {sorted(extra)} do not apply to kind = {kind}"
        )
    if kind == "reduced":
        return ReducedParams(
            b1_0=model["b1_0"],
            b2_0=model["b2_0"],
            d1=model["d1"],
            d2=model["d2"],
            K=model["k"],
            s_h=model["s_h"],
        )
    return FullParams(
        b1=model["b1"],
        b2=model["b2"],
        d1=model["d1"],
        d2=model["d2"],
        K=model["k"],
        s_h=model["s_h"],
    )


def _validate_problem(kind: str, p: dict) -> dict:
    mode = p.get("mode")
    if mode not in ("fixed", "free"):
        raise ConfigError("[problem] mode must be 'fixed' or 'free'")
    for key in ("m", "n", "penalty_eps"):
        if key not in p:
            raise ConfigError(f"[problem] missing key {key}")
    if mode == "fixed":
        if "t" not in p:
            raise ConfigError("[problem] fixed mode needs T")
        for bad in ("t0", "alpha", "t_lo", "t_hi"):
            if bad in p:
                raise ConfigError(f"[problem] {bad} only applies to free mode")
    else:
        if "t0" not in p or "alpha" not in p:
            raise ConfigError("[problem] free mode needs T0 and alpha")
        if "t" in p:
            raise ConfigError("[problem] T only applies to fixed mode")
    if kind == "reduced":
        for bad in ("n1_0", "n2_0", "margin"):
            if bad in p:
                raise ConfigError(f"[problem] {bad} only applies to the full model")
    elif "p0" in p:
        raise ConfigError("[problem] p0 only applies to the reduced model")
    return p


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply 'section.key=value' strings onto the raw string table."""
    for item in overrides or ():
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, value = item.split("=", 1)
        section, key = dotted.split(".", 1)
        section = section.strip().lower()
        if section not in _SCHEMAS:
            raise ConfigError(f"override targets unknown section [{section}]")
        raw.setdefault(section, {})[key.strip().lower()] = value.strip()
    return raw


def preset_path(name: str) -> Path:
    """Filesystem path of a shipped preset config."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return Path(str(resources.files("iitopt").joinpath(f"presets/{name}.ini")))


def load_config(path_or_preset, overrides=None) -> ExperimentConfig:
    """Read, override and validate a config file (or shipped preset name)."""
    path = Path(path_or_preset)
    if not path.exists():
        name = str(path_or_preset)
        if name in PRESETS:
            path = preset_path(name)
        else:
            raise ConfigError(f"config file {path_or_preset!r} not found")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    raw = {s.lower(): dict(parser.items(s)) for s in parser.sections()}
    unknown = set(raw) - set(_SCHEMAS)
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    raw = apply_overrides(raw, overrides)
    for required in ("model", "problem"):
        if required not in raw:
            raise ConfigError(f"missing section [{required}]")

    model = _coerce("model", raw["model"])
    problem = _validate_problem(model.get("kind"), _coerce("problem", raw["problem"]))
    run = _coerce("run", raw.get("run", {}))
    gamma = _coerce("gamma", raw["gamma"]) if "gamma" in raw else None
    params = _build_params(model)

    echo = {"model": model, "problem": problem, "run": run}
    if gamma is not None:
        echo["gamma"] = gamma
    return ExperimentConfig(
        kind=model["kind"], params=params, problem=problem, run=run, gamma=gamma, echo=echo
    )
