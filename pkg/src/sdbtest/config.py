"""Flat ``key = value`` configuration files.

Blank lines and ``#`` comments are ignored.  Every key is optional; command
line flags override file values.  Environment variables are never read.
"""
from __future__ import annotations

import configparser
from fractions import Fraction
from pathlib import Path

from .generator import GeneratorConfig
from .harness import CampaignConfig


class ConfigError(ValueError):
    pass


def _int(v: str) -> int:
    return int(v)


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _list(v: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in v.replace(";", ",").split(",") if s.strip())


def _faults(v: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in v.split(";") if s.strip())


SCHEMA = {
    "target": str,
    "seed": _int,
    "workers": _int,
    "queries": _int,
    "runs": _int,
    "n": _int,
    "m": _int,
    "fault": _faults,
    "out": str,
    "delay": float,
    "client_command": str,
    "predicates": _list,
    "oracle_crosscheck": _bool,
    "coord_min": _int,
    "coord_max": _int,
    "entry_min": _int,
    "entry_max": _int,
    "max_points_per_line": _int,
    "max_rings": _int,
    "max_elements": _int,
    "derivative_probability": Fraction,
    "empty_probability": Fraction,
    "timing_ns": lambda v: tuple(int(x) for x in _list(v)),
    "timing_reps": _int,
}

DEFAULTS = {
    "target": "reference", "seed": 0, "workers": 1, "queries": 100, "runs": 10, "n": 50, "m": 2,
    "fault": (), "out": "sdbtest-report", "delay": 0.0, "client_command": None, "predicates": None,
    "oracle_crosscheck": False, "coord_min": 0, "coord_max": 1000, "entry_min": -5, "entry_max": 5,
    "max_points_per_line": 8, "max_rings": 2, "max_elements": 4,
    "derivative_probability": Fraction(1, 2), "empty_probability": Fraction(1, 20),
    "timing_ns": (1, 10, 50, 100), "timing_reps": 10,
}


def parse_config_text(text: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                   inline_comment_prefixes=("#",))
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    out = {}
    for key, raw in cp["run"].items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[key] = SCHEMA[key](raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return out


def load_config(path: str | Path | None, overrides: dict | None = None) -> dict:
    """Defaults, then the file, then non-None ``overrides``."""
    values = dict(DEFAULTS)
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        values.update(parse_config_text(text))
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    return values


def campaign_from(values: dict) -> CampaignConfig:
    try:
        gen = GeneratorConfig(
            geometry_count=values["n"], table_count=values["m"],
            coordinate_range=(values["coord_min"], values["coord_max"]),
            max_points_per_line=values["max_points_per_line"], max_rings=values["max_rings"],
            max_elements=values["max_elements"],
            derivative_probability=values["derivative_probability"],
            empty_probability=values["empty_probability"], seed=values["seed"])
        return CampaignConfig(
            generator=gen, queries_per_run=values["queries"], runs=values["runs"],
            dialect=values["target"], predicates=values["predicates"],
            oracle_crosscheck=values["oracle_crosscheck"], seed=values["seed"],
            workers=values["workers"], faults=tuple(values["fault"]), delay=values["delay"],
            entry_range=(values["entry_min"], values["entry_max"]),
            command=values["client_command"], out_dir=values["out"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
