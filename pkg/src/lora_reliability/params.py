"""Network constants, unit conversions, and the spreading-factor schedule.

Configuration values are carried in their customary units (dBm, dB, Hz, km)
and converted to linear/SI units only at the point of use, so every number
stays traceable to its data sheet value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

SPEED_OF_LIGHT_M_S = 299792458.0


class ConfigError(ValueError):
    """Invalid configuration value or malformed config file."""


@dataclass(frozen=True)
class SfParams:
    """Radio parameters of one spreading factor.

    The annulus bounds are fractions of the cell radius; a device whose
    distance falls inside ``[annulus_inner_frac * R, annulus_outer_frac * R)``
    is assigned this SF (the outermost annulus is closed at ``R``).
    """

    sf: int
    bitrate_kbps: float
    airtime_ms: float
    tx_per_hour: int
    # Receiver sensitivity is kept for documentation/link-budget checks;
    # the SIR/SNR model is driven by snr_threshold_db alone.
    sensitivity_dbm: float
    snr_threshold_db: float
    annulus_inner_frac: float
    annulus_outer_frac: float


_SF_TABLE: tuple[SfParams, ...] = (
    SfParams(7, 5.468, 36.6, 98, -123.0, -6.0, 0 / 6, 1 / 6),
    SfParams(8, 3.125, 64.0, 56, -126.0, -9.0, 1 / 6, 2 / 6),
    SfParams(9, 1.757, 113.0, 31, -129.0, -12.0, 2 / 6, 3 / 6),
    SfParams(10, 0.967, 204.0, 17, -132.0, -15.0, 3 / 6, 4 / 6),
    SfParams(11, 0.537, 372.0, 9, -134.5, -17.5, 4 / 6, 5 / 6),
    SfParams(12, 0.293, 682.0, 5, -137.0, -20.0, 5 / 6, 6 / 6),
)

SF_MIN = 7
SF_MAX = 12


def sf_table() -> list[SfParams]:
    """Return the six-row SF schedule in SF order 7..12."""
    return list(_SF_TABLE)


def sf_params(sf: int) -> SfParams:
    """Return the schedule row for one spreading factor."""
    if not SF_MIN <= sf <= SF_MAX:
        raise ValueError(f"spreading factor must be in {SF_MIN}..{SF_MAX}, got {sf}")
    return _SF_TABLE[sf - SF_MIN]


@dataclass(frozen=True)
class NetworkConfig:
    """Deployment and channel constants for a single-gateway cell.

    Defaults describe the reference EU868 deployment: one 125 kHz channel at
    868.10 MHz, 19 dBm transmit power, 1% duty cycle, a 12 km cell split into
    six equal-width SF annuli, and an average of 1500 end devices.
    """

    bandwidth_hz: float = 125_000.0
    carrier_hz: float = 868.1e6
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 6.0
    path_loss_exponent: float = 2.7
    tx_power_dbm: float = 19.0
    duty_cycle: float = 0.01
    mean_devices: float = 1500.0
    cell_radius_km: float = 12.0
    annuli: int = 6
    # 1 m clamp: the free-space gain diverges as d -> 0 and the plotted range
    # never goes below ~0.1 km, so the clamp is physically inert.
    min_distance_km: float = 0.001
    realizations: int = 100_000
    seed: int = 1

    def __post_init__(self) -> None:
        if self.bandwidth_hz <= 0:
            raise ConfigError(f"bandwidth_hz must be > 0, got {self.bandwidth_hz}")
        if self.carrier_hz <= 0:
            raise ConfigError(f"carrier_hz must be > 0, got {self.carrier_hz}")
        if self.path_loss_exponent <= 2:
            raise ConfigError(
                f"path_loss_exponent must be > 2, got {self.path_loss_exponent}"
            )
        if not 0 < self.duty_cycle <= 1:
            raise ConfigError(f"duty_cycle must be in (0, 1], got {self.duty_cycle}")
        if self.mean_devices < 0:
            raise ConfigError(f"mean_devices must be >= 0, got {self.mean_devices}")
        if self.cell_radius_km <= 0:
            raise ConfigError(f"cell_radius_km must be > 0, got {self.cell_radius_km}")
        if self.annuli != 6:
            raise ConfigError(f"annuli is fixed at 6, got {self.annuli}")
        if not 0 < self.min_distance_km < self.cell_radius_km:
            raise ConfigError(
                "min_distance_km must satisfy 0 < min_distance_km < cell_radius_km, "
                f"got {self.min_distance_km}"
            )
        if self.realizations <= 0:
            raise ConfigError(f"realizations must be > 0, got {self.realizations}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")


def dbm_to_mw(x_dbm: float) -> float:
    """Convert a dBm power level to linear milliwatts."""
    return 10.0 ** (x_dbm / 10.0)


def mw_to_dbm(x_mw: float) -> float:
    """Convert linear milliwatts to dBm (inverse of :func:`dbm_to_mw`)."""
    if x_mw <= 0:
        raise ValueError(f"power must be > 0 mW, got {x_mw}")
    return 10.0 * math.log10(x_mw)


def db_to_linear(x_db: float) -> float:
    """Convert a dB ratio to a linear ratio."""
    return 10.0 ** (x_db / 10.0)


def noise_floor_dbm(cfg: NetworkConfig) -> float:
    """Thermal noise floor in dBm: density + receiver noise figure + 10*log10(BW)."""
    if cfg.bandwidth_hz <= 0:
        raise ConfigError(f"bandwidth_hz must be > 0, got {cfg.bandwidth_hz}")
    return cfg.noise_density_dbm_hz + cfg.noise_figure_db + 10.0 * math.log10(cfg.bandwidth_hz)


def wavelength_m(cfg: NetworkConfig) -> float:
    """Carrier wavelength in meters."""
    if cfg.carrier_hz <= 0:
        raise ConfigError(f"carrier_hz must be > 0, got {cfg.carrier_hz}")
    return SPEED_OF_LIGHT_M_S / cfg.carrier_hz


# --- config file handling -------------------------------------------------
#
# Flat `key = value` text, one key per line, keys exactly matching the
# NetworkConfig field names.  `#` starts a comment; blank lines are ignored.
# Unknown or duplicate keys are errors; omitted keys keep their defaults.

_INT_FIELDS = frozenset({"annuli", "realizations", "seed"})
_FIELD_NAMES = frozenset(f.name for f in fields(NetworkConfig))


def _parse_value(key: str, raw: str) -> float | int:
    try:
        if key in _INT_FIELDS:
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return float(raw)
    except ValueError:
        raise ConfigError(f"config key {key!r} has a non-numeric value {raw!r}") from None


def parse_config_text(text: str) -> dict[str, float | int]:
    """Parse config-file text into a {field: value} mapping."""
    values: dict[str, float | int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        values[key] = _parse_value(key, raw_value.strip())
    return values


def load_config(path: str, **overrides: float | int) -> NetworkConfig:
    """Load a config file and apply keyword overrides on top of it."""
    with open(path, "r", encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    values.update(overrides)
    return NetworkConfig(**values)  # type: ignore[arg-type]
