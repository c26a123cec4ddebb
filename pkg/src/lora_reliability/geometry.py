"""Spatial deployment sampling.

Devices form a Poisson point process on the cell disk: the device count is
Poisson with the configured mean and, given the count, positions are i.i.d.
uniform by area.  Each device gets the SF of the annulus its distance falls
in, a fresh unit-mean fading draw, and an independent Bernoulli activity flag
with the duty-cycle probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import sample_fading
from .params import SF_MIN, SF_MAX, ConfigError, NetworkConfig, dbm_to_mw

TWO_PI = 2.0 * math.pi


class OutOfCellError(ValueError):
    """Distance outside the [0, R] cell range."""


@dataclass(frozen=True)
class Position:
    distance_km: float
    angle_rad: float


@dataclass(frozen=True)
class EndDevice:
    """One end device: where it is, which SF it uses, and its channel state."""

    position: Position
    sf: int
    tx_power_mw: float
    fading: float  # squared fading magnitude, unit-mean exponential
    active: bool


@dataclass(frozen=True)
class Realization:
    """One sampled interference field: the desired device plus candidate
    interferers (only those with ``active=True`` contribute interference)."""

    desired: EndDevice
    interferers: list[EndDevice]


def sample_device_count(mean: float, rng: np.random.Generator) -> int:
    """Draw the number of deployed devices, Poisson with the given mean."""
    if mean < 0:
        raise ConfigError(f"device-count mean must be >= 0, got {mean}")
    return int(rng.poisson(mean))


def sample_uniform_position(
    radius_km: float, min_distance_km: float, rng: np.random.Generator
) -> Position:
    """Sample a position uniform by area on the disk of the given radius.

    Distance is ``max(d_min, R * sqrt(U))`` so that the squared distance is
    uniform on [0, R^2] apart from the tiny clamp at the center.
    """
    if not 0 < min_distance_km < radius_km:
        raise ConfigError(
            f"need 0 < min_distance ({min_distance_km}) < radius ({radius_km})"
        )
    u = rng.random()
    v = rng.random()
    return Position(max(min_distance_km, radius_km * math.sqrt(u)), TWO_PI * v)


def annulus_to_sf(distance_km: float, cell_radius_km: float) -> int:
    """Map a gateway distance to its annulus SF.

    Annuli are the six equal-width rings ``[k*R/6, (k+1)*R/6)``; boundaries
    belong to the outer ring and the outermost ring is closed at ``R``.
    """
    if not 0 <= distance_km <= cell_radius_km:
        raise OutOfCellError(
            f"distance {distance_km} km outside cell [0, {cell_radius_km}] km"
        )
    return min(SF_MIN + int(6.0 * distance_km / cell_radius_km), SF_MAX)


def sample_realization(
    cfg: NetworkConfig, desired_distance_km: float, rng: np.random.Generator
) -> Realization:
    """Sample one interference field around a desired device pinned at the
    given distance.

    The desired device gets the annulus SF of its distance and a fresh fading
    draw.  Interferer candidates are Poisson(mean_devices) many, placed
    uniformly by area, and each is active independently with probability
    ``duty_cycle``.
    """
    if not cfg.min_distance_km <= desired_distance_km <= cfg.cell_radius_km:
        raise OutOfCellError(
            f"desired distance {desired_distance_km} km outside "
            f"[{cfg.min_distance_km}, {cfg.cell_radius_km}] km"
        )
    tx_mw = dbm_to_mw(cfg.tx_power_dbm)
    desired = EndDevice(
        position=Position(desired_distance_km, 0.0),
        sf=annulus_to_sf(desired_distance_km, cfg.cell_radius_km),
        tx_power_mw=tx_mw,
        fading=sample_fading(rng),
        active=True,
    )

    n = sample_device_count(cfg.mean_devices, rng)
    radial = rng.random(n)
    angular = rng.random(n)
    fadings = rng.exponential(size=n)
    active = rng.random(n) < cfg.duty_cycle

    radius = cfg.cell_radius_km
    d_min = cfg.min_distance_km
    interferers = [
        EndDevice(
            position=Position(d, TWO_PI * float(angular[i])),
            sf=annulus_to_sf(d, radius),
            tx_power_mw=tx_mw,
            fading=float(fadings[i]),
            active=bool(active[i]),
        )
        for i, d in enumerate(
            max(d_min, radius * math.sqrt(float(u))) for u in radial
        )
    ]
    return Realization(desired=desired, interferers=interferers)
