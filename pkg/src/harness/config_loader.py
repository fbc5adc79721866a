#!/usr/bin/env python3
"""
Configuration Loader
====================

Flat YAML configuration (``key: value``) mapped onto ``ExperimentSpec``.
Unknown keys are rejected, values are coerced to the type of the documented
default, and the assembled spec is validated before it is returned.

Precedence: code defaults < config file < ``--set key=value`` overrides.
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import yaml

from src.harness.experiment import ExperimentSpec
from src.utils.error_handling import ConfigurationError
from src.utils.logging_config import get_component_logger

logger = get_component_logger("harness.config")

# key -> (section, attribute, type); section "" is the spec itself
CONFIG_KEYS: Dict[str, Tuple[str, str, type]] = {
    "strategy": ("", "strategy", str),
    "num_seeds": ("", "num_seeds", int),
    "base_seed": ("", "base_seed", int),
    "output_dir": ("", "output_dir", str),
    "n_jobs": ("", "n_jobs", int),
    "architecture": ("", "architecture", str),
    # training
    "epochs": ("train", "epochs", int),
    "learning_rate": ("train", "learning_rate", float),
    "weight_decay": ("train", "weight_decay", float),
    "hidden": ("train", "hidden", int),
    "out": ("train", "out", int),
    "dropout": ("train", "dropout", float),
    "da_weight": ("train", "da_weight", float),
    "max_path_length": ("train", "max_path_length", int),
    "temperature": ("train", "temperature", float),
    "log_every": ("train", "log_every", int),
    # selection
    "gamma": ("select", "gamma", float),
    "hops": ("select", "hops", int),
    "budget": ("select", "budget", int),
    "normalize_scores": ("select", "normalize", bool),
    "scoring": ("select", "scoring", str),
    # dataset
    "dataset": ("dataset", "kind", str),
    "source_dir": ("dataset", "source_dir", str),
    "source_name": ("dataset", "source_name", str),
    "target_dir": ("dataset", "target_dir", str),
    "target_name": ("dataset", "target_name", str),
    "num_classes": ("synthetic", "num_classes", int),
    "nodes_per_class": ("synthetic", "nodes_per_class", int),
    "num_features": ("synthetic", "num_features", int),
    "p_intra": ("synthetic", "p_intra", float),
    "p_inter": ("synthetic", "p_inter", float),
    "class_separation": ("synthetic", "class_separation", float),
    "shift_scale": ("synthetic", "shift_scale", float),
    "noise_scale": ("synthetic", "noise_scale", float),
    "source_label_fraction": ("synthetic", "source_label_fraction", float),
}


def coerce_value(key: str, value: Any, expected: type) -> Any:
    """Coerce a parsed YAML scalar to ``expected`` or raise ConfigurationError."""
    if expected in (int, float) and isinstance(value, str):
        # PyYAML reads exponent literals without a dot (1e-4) as strings
        try:
            value = float(value)
        except ValueError:
            pass
    if expected is bool:
        if isinstance(value, bool):
            return value
    elif expected is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif expected is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif expected is str:
        if isinstance(value, (str, int, float)) and not isinstance(value, bool):
            return str(value)
    raise ConfigurationError(
        f"config key '{key}' expects {expected.__name__}",
        {"key": key, "value": repr(value)},
    )


def _section(spec: ExperimentSpec, name: str):
    if name == "":
        return spec
    if name == "synthetic":
        return spec.dataset.synthetic
    return getattr(spec, name)


def apply_settings(spec: ExperimentSpec, settings: Mapping[str, Any], origin: str = "config") -> ExperimentSpec:
    for key, raw in settings.items():
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"unknown config key '{key}'", {"key": key, "origin": origin})
        section, attribute, expected = CONFIG_KEYS[key]
        value = coerce_value(key, raw, expected)
        setattr(_section(spec, section), attribute, value)
        if section == "synthetic" and attribute == "num_classes":
            spec.dataset.num_classes = value
    return spec


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError("config file not found", {"path": str(path)})
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config file is not valid YAML: {exc}", {"path": str(path)}) from exc
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigurationError("config file must be a flat key/value mapping", {"path": str(path)})
    nested = [key for key, value in document.items() if isinstance(value, (dict, list))]
    if nested:
        raise ConfigurationError("config values must be scalars", {"keys": nested, "path": str(path)})
    return document


def parse_overrides(pairs: Sequence[str]) -> Dict[str, Any]:
    """``["gamma=0.5", "normalize_scores=true"]`` -> typed mapping via YAML scalars."""
    overrides: Dict[str, Any] = {}
    for pair in pairs:
        key, separator, text = pair.partition("=")
        if not separator or not key.strip():
            raise ConfigurationError("override must look like key=value", {"override": pair})
        try:
            overrides[key.strip()] = yaml.safe_load(text) if text.strip() else ""
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"cannot parse override value: {exc}", {"override": pair}) from exc
    return overrides


def load_experiment_spec(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentSpec:
    spec = ExperimentSpec()
    if path is not None:
        apply_settings(spec, read_config_file(path), origin=str(path))
        logger.info(f"📋 Configuration loaded from {path}")
    if overrides:
        apply_settings(spec, overrides, origin="overrides")
    return spec.validate()


def dump_config(spec: ExperimentSpec) -> Dict[str, Any]:
    """Inverse of ``apply_settings``: the documented flat keys and their values."""
    return {key: getattr(_section(spec, section), attribute) for key, (section, attribute, _) in CONFIG_KEYS.items()}


__all__ = [
    "CONFIG_KEYS",
    "coerce_value",
    "apply_settings",
    "read_config_file",
    "parse_overrides",
    "load_experiment_spec",
    "dump_config",
]
