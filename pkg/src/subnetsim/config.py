"""Scenario configuration: the :class:`SimConfig` record and its flat TOML format.

A config document is a flat list of ``key = value`` lines (TOML syntax, no
tables). Absent optional keys take the factory-hall defaults; only
``num_subnetworks`` and ``aps_per_subnetwork`` are mandatory.
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = [
    "ConfigError",
    "ConfigParseError",
    "ConfigValidationError",
    "SimConfig",
    "POWER_MODES",
    "parse_config",
    "load_config",
    "dump_config",
]

POWER_MODES = ("fixed", "apr")


class ConfigError(ValueError):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """The document is not well-formed, or names an unknown key / wrong type."""


class ConfigValidationError(ConfigError):
    """The document parsed but violates a scenario invariant."""


@dataclass(frozen=True)
class SimConfig:
    num_subnetworks: int
    aps_per_subnetwork: int

    hall_side_m: float = 100.0
    hall_height_m: float = 15.0
    subnetwork_radius_m: float = 5.0
    min_center_separation_m: float = 10.0
    sensors_per_subnetwork: int = 5
    total_antennas: int = 20
    ap_height_m: float = 5.0
    sensor_height_m: float = 1.5

    carrier_freq_ghz: float = 6.0
    bandwidth_hz: float = 1e8
    packet_duration_s: float = 50e-6
    packet_error_rate: float = 1e-6
    uplink_fraction: float = 0.4
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0

    lbt_threshold_dbm: float = -72.0
    power_mode: str = "apr"
    tx_power_dbm: float = -15.0
    apr_start_dbm: float = -15.0
    apr_step_db: float = 1.0
    apr_floor_dbm: float = -60.0
    # Whether deferred sub-networks still radiate into the survivors' UI term.
    include_deferred_interference: bool = False

    clutter_size_m: float = 2.0
    clutter_density: float = 0.6
    effective_clutter_height_m: float = 10.0
    # 0.45 x the TR 38.901 InF pair (4.3 / 7.2 dB), fitted by benchmarks/calibrate_shadowing.py
    shadow_sigma_los_db: float = 1.94
    shadow_sigma_nlos_db: float = 3.24
    min_link_distance_m: float = 1.0

    num_drops: int = 1000
    fading_realizations_per_drop: int = 1
    master_seed: int = 1

    placement_max_attempts: int = 1_000_000
    placement_stall_attempts: int = 10_000
    zf_max_condition: float = 1e12

    def __post_init__(self):
        _validate(self)

    @property
    def antennas_per_ap(self) -> int:
        return self.total_antennas // self.aps_per_subnetwork

    @property
    def num_sensors(self) -> int:
        return self.num_subnetworks * self.sensors_per_subnetwork

    @property
    def num_aps(self) -> int:
        return self.num_subnetworks * self.aps_per_subnetwork

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


_REQUIRED = ("num_subnetworks", "aps_per_subnetwork")


def _check(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigValidationError(message)


def _validate(cfg: SimConfig) -> None:
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.type in ("float", float):
            _check(math.isfinite(value), f"{f.name} must be finite, got {value!r}")

    for name in ("num_subnetworks", "aps_per_subnetwork", "sensors_per_subnetwork",
                 "total_antennas", "num_drops", "fading_realizations_per_drop",
                 "placement_max_attempts", "placement_stall_attempts"):
        _check(getattr(cfg, name) >= 1, f"{name} must be a positive integer")
    _check(cfg.total_antennas % cfg.aps_per_subnetwork == 0,
           f"total_antennas mod aps_per_subnetwork must be 0 "
           f"({cfg.total_antennas} mod {cfg.aps_per_subnetwork} = "
           f"{cfg.total_antennas % cfg.aps_per_subnetwork})")
    _check(cfg.total_antennas >= cfg.sensors_per_subnetwork,
           "zero-forcing needs total_antennas >= sensors_per_subnetwork")
    _check(0.0 < cfg.uplink_fraction <= 1.0, "uplink_fraction must lie in (0, 1]")
    _check(0.0 < cfg.packet_error_rate < 0.5, "packet_error_rate must lie in (0, 0.5)")
    _check(0.0 < cfg.clutter_density < 1.0, "clutter_density must lie in (0, 1)")
    for name in ("hall_side_m", "hall_height_m", "subnetwork_radius_m", "min_center_separation_m",
                 "ap_height_m", "sensor_height_m", "clutter_size_m",
                 "effective_clutter_height_m", "min_link_distance_m", "carrier_freq_ghz",
                 "bandwidth_hz", "packet_duration_s", "apr_step_db", "zf_max_condition"):
        _check(getattr(cfg, name) > 0.0, f"{name} must be > 0")
    _check(cfg.ap_height_m <= cfg.hall_height_m, "ap_height_m exceeds hall_height_m")
    _check(cfg.sensor_height_m <= cfg.hall_height_m, "sensor_height_m exceeds hall_height_m")
    _check(2 * cfg.subnetwork_radius_m <= cfg.hall_side_m,
           "a sub-network disk does not fit inside the hall")
    _check(cfg.shadow_sigma_los_db >= 0 and cfg.shadow_sigma_nlos_db >= 0,
           "shadowing standard deviations must be >= 0")
    _check(cfg.power_mode in POWER_MODES, f"power_mode must be one of {POWER_MODES}")
    _check(cfg.apr_floor_dbm <= cfg.apr_start_dbm, "apr_floor_dbm must not exceed apr_start_dbm")
    _check(0 <= cfg.master_seed < 2**64, "master_seed must be a 64-bit unsigned integer")


_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _coerce(key: str, value):
    kind = _FIELD_TYPES[key]
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigParseError(f"field {key!r}: expected a boolean, got {value!r}")
        return value
    if isinstance(value, bool):
        raise ConfigParseError(f"field {key!r}: expected {kind}, got a boolean")
    if kind == "int":
        if not isinstance(value, int):
            raise ConfigParseError(f"field {key!r}: expected an integer, got {value!r}")
        return value
    if kind == "float":
        if not isinstance(value, (int, float)):
            raise ConfigParseError(f"field {key!r}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigParseError(f"field {key!r}: expected a string, got {value!r}")
    return value


def config_from_mapping(values: dict) -> SimConfig:
    """Build a config from already-decoded key/value pairs."""
    unknown = sorted(set(values) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigParseError(f"unknown key(s): {', '.join(unknown)}")
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigValidationError(f"missing required key(s): {', '.join(missing)}")
    return SimConfig(**{k: _coerce(k, v) for k, v in values.items()})


def parse_config(text: str) -> SimConfig:
    """Parse a flat TOML document into a validated :class:`SimConfig`."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"malformed config: {exc}") from None
    for key, value in doc.items():
        if isinstance(value, (dict, list)):
            raise ConfigParseError(f"field {key!r}: nested tables/arrays are not allowed")
    return config_from_mapping(doc)


def load_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = repr(value)
        return text if ("." in text or "e" in text or "n" in text) else text + ".0"
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dump_config(cfg: SimConfig) -> str:
    """Serialize every field; ``parse_config(dump_config(c)) == c``."""
    lines = [f"{f.name} = {_format_value(getattr(cfg, f.name))}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"
