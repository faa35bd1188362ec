"""Python access to the specflow experiments and a few core maps."""

import json

from specflow._core import (
    ConfigError,
    ConstructionError,
    DomainError,
    choose_constants,
    command_names,
    snap_vector,
    suspend1d,
)
from specflow import _core

__all__ = [
    "ConfigError",
    "ConstructionError",
    "DomainError",
    "choose_constants",
    "command_names",
    "run",
    "shift_f",
    "shift_h",
    "snap_vector",
    "suspend1d",
]


def _config_text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return json.dumps(config)


def _region_text(region):
    return region if isinstance(region, str) else json.dumps(region)


def shift_f(region, K, v, x, L=None):
    """Image of x under the shift map f over region (a {dim, boxes} dict)."""
    return _core.shift_f(_region_text(region), K, v, x, L)


def shift_h(region, K, v, x, L=None):
    """Image of x under the truncated shift map h."""
    return _core.shift_h(_region_text(region), K, v, x, L)


def run(command, config=None, fmt="json"):
    """Run an experiment; returns (report dict, {artifact name: text})."""
    report, artifacts = _core.run_command(command, _config_text(config), fmt)
    return json.loads(report), dict(artifacts)
