"""
YAML configuration documents.

Two document types share ``schema_version: 1``: solver documents (a ``solver``
section) and experiment documents (``experiment``, ``model``, ``corruption``,
``algorithms`` and an optional ``solver`` override section). A third, the
settings document, carries the ``logging`` defaults of the command-line tool.
Unknown keys are rejected with the dotted path of the offending key.
"""

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import yaml

from ..core.errors import ArgumentError, ConfigError
from ..harness.experiment import ExperimentSpec, SignalKind
from ..losses.kinds import LossKind, LossName
from ..models.generation import ModelKind
from ..solver.config import InitName, InitPolicy, SolverConfig, StepName, StepPolicy, preset
from ..truncation.masks import TruncationKind, TruncationName
from .logs import LOG_FORMATS

SCHEMA_VERSION = 1

SOLVER_KEYS = {
    "preset", "name", "loss", "lambda", "epsilon", "truncation", "gamma_e", "gamma_ub",
    "gamma_h", "step", "mu", "k0", "mu_max", "beta", "c", "mu0", "max_iters", "stop_tol",
    "init", "scale_per_measurement", "scale_by_init_norm", "init_scale",
}
EXPERIMENT_KEY_TYPES: Dict[str, type] = {
    "name": str, "trials": int, "base_seed": int, "success_threshold": float,
    "relative_success": bool, "fresh_signal_per_trial": bool, "threads": int,
    "are_cap": float, "curves": bool,
}
EXPERIMENT_KEYS = set(EXPERIMENT_KEY_TYPES)
MODEL_KEYS = {"kind", "n", "alphas", "l_patterns", "signal"}
CORRUPTION_KEYS = {"sigmas", "thetas", "rhos", "snr_db", "signed_outliers"}
OVERRIDE_KEYS = {"max_iters", "stop_tol"}
LOGGING_KEYS = {"level", "format", "include_timestamps"}
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

PathLike = Union[str, Path]


@dataclass
class Settings:
    """Command-line defaults from the settings document."""

    log_level: str = "WARNING"
    log_format: str = "json"
    include_timestamps: bool = True
    solver: Optional[SolverConfig] = None
    experiment_defaults: Dict[str, Any] = field(default_factory=dict)


def load_yaml(path: PathLike) -> Dict[str, Any]:
    """Parse a YAML mapping; OSError propagates, syntax errors become ConfigError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}", path=str(path)) from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", path=str(path))
    return data


def _join(prefix: str, key: str) -> str:
    return f"{prefix}.{key}" if prefix else key


def _section(data: Dict[str, Any], key: str, allowed: Iterable[str], prefix: str = "",
             required: bool = False) -> Dict[str, Any]:
    path = _join(prefix, key)
    if key not in data or data[key] is None:
        if required:
            raise ConfigError(f"Missing section '{path}'", key=path)
        return {}
    section = data[key]
    if not isinstance(section, dict):
        raise ConfigError(f"Section '{path}' must be a mapping", key=path)
    _reject_unknown(section, allowed, path)
    return section


def _reject_unknown(section: Dict[str, Any], allowed: Iterable[str], prefix: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        path = _join(prefix, str(unknown[0]))
        raise ConfigError(f"Unknown key '{path}'", key=path)


def _typed(value: Any, kind: type, path: str) -> Any:
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind in (bool, str) and isinstance(value, kind):
        return value
    raise ConfigError(f"'{path}' must be of type {kind.__name__}, got {value!r}", key=path)


def _get(section: Dict[str, Any], key: str, kind: type, default: Any, prefix: str) -> Any:
    if key not in section or section[key] is None:
        return default
    return _typed(section[key], kind, _join(prefix, key))


def _get_list(section: Dict[str, Any], key: str, kind: type, default: Optional[List[Any]],
              prefix: str) -> Optional[List[Any]]:
    if key not in section or section[key] is None:
        return default
    value = section[key]
    path = _join(prefix, key)
    items = value if isinstance(value, list) else [value]
    return [_typed(item, kind, f"{path}[{i}]") for i, item in enumerate(items)]


def _enum(enum_type, value: Any, path: str):
    try:
        return enum_type(_typed(value, str, path))
    except ValueError as exc:
        choices = ", ".join(e.value for e in enum_type)
        raise ConfigError(f"'{path}' must be one of {choices}, got {value!r}", key=path) from exc


def check_schema_version(data: Dict[str, Any]) -> None:
    if "schema_version" not in data:
        raise ConfigError("Missing 'schema_version'", key="schema_version")
    version = _typed(data["schema_version"], int, "schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version {version}", key="schema_version")


def parse_solver(section: Dict[str, Any], prefix: str = "solver") -> SolverConfig:
    """
    Build a SolverConfig from a solver mapping.

    A ``preset`` key selects the starting point; every other key overrides it.
    """
    _reject_unknown(section, SOLVER_KEYS, prefix)
    base = preset(_typed(section["preset"], str, _join(prefix, "preset"))) \
        if section.get("preset") is not None else SolverConfig()

    try:
        loss_name = _enum(LossName, section["loss"], _join(prefix, "loss")) \
            if "loss" in section else base.loss.name
        loss = LossKind(
            loss_name,
            lam=_get(section, "lambda", float, base.loss.lam, prefix),
            epsilon=_get(section, "epsilon", float, base.loss.epsilon, prefix),
        )

        trunc_name = _enum(TruncationName, section["truncation"], _join(prefix, "truncation")) \
            if "truncation" in section else base.truncation.name
        truncation = TruncationKind(
            trunc_name,
            gamma_e=_get(section, "gamma_e", float, base.truncation.gamma_e, prefix),
            gamma_ub=_get(section, "gamma_ub", float, base.truncation.gamma_ub, prefix),
            gamma_h=_get(section, "gamma_h", float, base.truncation.gamma_h, prefix),
        )

        step_name = _enum(StepName, section["step"], _join(prefix, "step")) \
            if "step" in section else base.step.name
        step = dataclasses.replace(
            base.step,
            name=step_name,
            mu=_get(section, "mu", float, base.step.mu, prefix),
            k0=_get(section, "k0", float, base.step.k0, prefix),
            mu_max=_get(section, "mu_max", float, base.step.mu_max, prefix),
            beta=_get(section, "beta", float, base.step.beta, prefix),
            c=_get(section, "c", float, base.step.c, prefix),
            mu0=_get(section, "mu0", float, base.step.mu0, prefix),
        )

        init = base.init
        if "init" in section:
            init_name = _enum(InitName, section["init"], _join(prefix, "init"))
            if init_name is InitName.PROVIDED:
                raise ConfigError("Provided initialization is not available from files",
                                  key=_join(prefix, "init"))
            init = InitPolicy(init_name)

        return dataclasses.replace(
            base,
            loss=loss,
            truncation=truncation,
            step=step,
            init=init,
            max_iters=_get(section, "max_iters", int, base.max_iters, prefix),
            stop_tol=_get(section, "stop_tol", float, base.stop_tol, prefix),
            scale_per_measurement=_get(section, "scale_per_measurement", bool,
                                       base.scale_per_measurement, prefix),
            scale_by_init_norm=_get(section, "scale_by_init_norm", bool,
                                    base.scale_by_init_norm, prefix),
            init_scale=_get(section, "init_scale", float, base.init_scale, prefix),
            name=_get(section, "name", str, base.name, prefix),
        )
    except ConfigError:
        raise
    except ArgumentError as exc:
        raise ConfigError(str(exc), key=prefix) from exc


def load_solver_config(path: PathLike) -> SolverConfig:
    """Read a solver document."""
    try:
        data = load_yaml(path)
        _reject_unknown(data, {"schema_version", "solver"}, "")
        check_schema_version(data)
        return parse_solver(_section(data, "solver", SOLVER_KEYS, required=True))
    except ConfigError as exc:
        exc.path = str(path)
        raise


def _parse_algorithms(value: Any) -> List[Union[str, SolverConfig]]:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ConfigError("'algorithms' must be a list", key="algorithms")
    algorithms: List[Union[str, SolverConfig]] = []
    for i, entry in enumerate(value):
        path = f"algorithms[{i}]"
        if isinstance(entry, str):
            preset(entry)
            algorithms.append(entry)
        elif isinstance(entry, dict):
            if not entry.get("name"):
                raise ConfigError(f"Inline algorithm '{path}' needs a name", key=f"{path}.name")
            algorithms.append(parse_solver(entry, prefix=path))
        else:
            raise ConfigError(f"'{path}' must be a preset name or a mapping", key=path)
    return algorithms


def parse_experiment(data: Dict[str, Any],
                     defaults: Optional[Dict[str, Any]] = None) -> ExperimentSpec:
    """
    Build and validate an ExperimentSpec from an experiment document.

    ``defaults`` holds ``experiment`` keys from the settings document; keys the
    document sets itself take precedence.
    """
    _reject_unknown(data, {"schema_version", "experiment", "model", "corruption", "algorithms",
                           "solver"}, "")
    check_schema_version(data)
    exp = {**(defaults or {}), **_section(data, "experiment", EXPERIMENT_KEYS)}
    model = _section(data, "model", MODEL_KEYS, required=True)
    corruption = _section(data, "corruption", CORRUPTION_KEYS)
    overrides = _section(data, "solver", OVERRIDE_KEYS)

    base = ExperimentSpec(algorithms=[])
    try:
        spec = ExperimentSpec(
            algorithms=_parse_algorithms(data.get("algorithms")),
            name=_get(exp, "name", str, base.name, "experiment"),
            model=_enum(ModelKind, model["kind"], "model.kind") if "kind" in model
            else base.model,
            n=_get(model, "n", int, base.n, "model"),
            alphas=_get_list(model, "alphas", float, base.alphas, "model"),
            l_patterns=_get_list(model, "l_patterns", int, base.l_patterns, "model"),
            signal=_enum(SignalKind, model["signal"], "model.signal") if "signal" in model
            else base.signal,
            sigmas=_get_list(corruption, "sigmas", float, base.sigmas, "corruption"),
            thetas=_get_list(corruption, "thetas", float, base.thetas, "corruption"),
            rhos=_get_list(corruption, "rhos", float, base.rhos, "corruption"),
            snr_dbs=_get_list(corruption, "snr_db", float, None, "corruption"),
            signed_outliers=_get(corruption, "signed_outliers", bool, False, "corruption"),
            trials=_get(exp, "trials", int, base.trials, "experiment"),
            base_seed=_get(exp, "base_seed", int, base.base_seed, "experiment"),
            max_iters=_get(overrides, "max_iters", int, None, "solver"),
            stop_tol=_get(overrides, "stop_tol", float, None, "solver"),
            success_threshold=_get(exp, "success_threshold", float, base.success_threshold,
                                   "experiment"),
            relative_success=_get(exp, "relative_success", bool, False, "experiment"),
            fresh_signal_per_trial=_get(exp, "fresh_signal_per_trial", bool, False, "experiment"),
            curves=_get(exp, "curves", bool, False, "experiment"),
            are_cap=_get(exp, "are_cap", float, base.are_cap, "experiment"),
            threads=_get(exp, "threads", int, base.threads, "experiment"),
        )
        spec.validate()
    except ConfigError:
        raise
    except ArgumentError as exc:
        raise ConfigError(str(exc)) from exc
    return spec


def load_experiment(path: PathLike,
                    defaults: Optional[Dict[str, Any]] = None) -> ExperimentSpec:
    """Read and validate an experiment document on top of settings defaults."""
    try:
        return parse_experiment(load_yaml(path), defaults)
    except ConfigError as exc:
        exc.path = str(path)
        raise


def load_settings(path: PathLike) -> Settings:
    """
    Read a settings document.

    The ``logging`` section sets the log defaults, the optional ``solver``
    section the configuration ``solve`` falls back to, and ``experiment`` the
    defaults ``bench`` applies under every experiment document.
    """
    data = load_yaml(path)
    try:
        return _parse_settings(data)
    except ConfigError as exc:
        exc.path = str(path)
        raise


def _parse_settings(data: Dict[str, Any]) -> Settings:
    _reject_unknown(data, {"schema_version", "logging", "solver", "experiment"}, "")
    check_schema_version(data)
    section = _section(data, "logging", LOGGING_KEYS)
    experiment = _section(data, "experiment", EXPERIMENT_KEYS)
    for key, kind in EXPERIMENT_KEY_TYPES.items():
        if key in experiment:
            experiment[key] = _get(experiment, key, kind, None, "experiment")
    solver_section = _section(data, "solver", SOLVER_KEYS)
    defaults = Settings()
    level = _get(section, "level", str, defaults.log_level, "logging").upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"'logging.level' must be one of {', '.join(LOG_LEVELS)}",
                          key="logging.level")
    fmt = _get(section, "format", str, defaults.log_format, "logging")
    if fmt not in LOG_FORMATS:
        raise ConfigError(f"'logging.format' must be one of {', '.join(LOG_FORMATS)}",
                          key="logging.format")
    return Settings(
        log_level=level,
        log_format=fmt,
        include_timestamps=_get(section, "include_timestamps", bool,
                                defaults.include_timestamps, "logging"),
        solver=parse_solver(solver_section) if solver_section else None,
        experiment_defaults={k: v for k, v in experiment.items() if v is not None},
    )
