"""Seeded Monte Carlo sweeps: success probability versus distance and
coverage probability versus the average number of devices.

Determinism contract: every (point, batch) work unit draws from its own
generator seeded by ``(seed, stream tag, point index, batch index)`` and
partial results are merged in index order, so output is bit-identical no
matter how many workers run the sweep.

The interference field is sampled in its thinned form: instead of drawing
Poisson(mean_devices) candidates and keeping each with the duty-cycle
probability, the engine draws the active interferers directly as
Poisson(duty_cycle * mean_devices) with i.i.d. uniform positions.  The two
procedures produce identically distributed active fields, and only active
interferers enter any SIR; the object-level path in :mod:`geometry` keeps
the explicit candidate-plus-thinning form.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import (
    JOINT_MODES,
    SIR_MODES,
    ScenarioProbabilities,
    combine_sf,
    combine_snr_sf,
    outage_closed_form,
    success_from_sir,
    success_from_sir_array,
)
from .channel import ChannelModel, path_loss, path_loss_array, snr_success_probability
from .geometry import annulus_to_sf, sample_realization
from .interference import CO_CHANNEL_REJECTION, sir_sample
from .params import SF_MIN, NetworkConfig, db_to_linear, dbm_to_mw, sf_table

DISTANCE_GRID_POINTS = 120
DENSITY_GRID_POINTS = 30

# Fixed batch size: realizations are simulated in vectorized chunks of this
# many; changing it changes the random streams, so it is part of the
# reproducibility contract.
_BATCH = 4096

# Stream tags keep the generator families of the different draw purposes
# disjoint.  The density sweep samples the desired-device distances from a
# point-independent stream so the noise-only column is exactly identical
# across the density grid.
_TAG_DISTANCE = 0
_TAG_DENSITY_DESIRED = 1
_TAG_DENSITY_FIELD = 2
_TAG_MEAN_SIR = 3


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep: the abscissa grid, per-point realization count, seed,
    and the combination modes."""

    kind: str  # "distance" | "density"
    grid: tuple[float, ...]
    realizations_per_point: int
    seed: int
    joint_mode: str = "success-product"
    sir_mode: str = "substitution"

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        if self.kind not in ("distance", "density"):
            raise ValueError(f"kind must be 'distance' or 'density', got {self.kind!r}")
        if not self.grid:
            raise ValueError("grid must not be empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        low = self.grid[0]
        if self.kind == "distance" and low <= 0:
            raise ValueError(f"distance grid must be positive, got {low}")
        if self.kind == "density" and low < 0:
            raise ValueError(f"density grid must be non-negative, got {low}")
        if self.realizations_per_point < 1:
            raise ValueError(
                f"realizations_per_point must be >= 1, got {self.realizations_per_point}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.joint_mode not in JOINT_MODES:
            raise ValueError(f"joint_mode must be one of {JOINT_MODES}, got {self.joint_mode!r}")
        if self.sir_mode not in SIR_MODES:
            raise ValueError(f"sir_mode must be one of {SIR_MODES}, got {self.sir_mode!r}")


@dataclass(frozen=True)
class CurvePoint:
    """One sweep abscissa with its per-scenario means and standard errors."""

    abscissa: float
    probs: ScenarioProbabilities
    stderr: ScenarioProbabilities


@dataclass(frozen=True)
class SirStats:
    """Summary of one scenario's SIR draws at a fixed desired distance.

    The scenario SIR is a ratio of fading mixtures and is heavy-tailed; its
    sample mean can be unstable (for a single co-SF interferer it is a ratio
    of exponentials, whose mean diverges), so the median and the fraction of
    infinite draws are reported alongside.
    """

    mean: float  # mean of the finite draws; inf when every draw is inf
    median: float  # median over all draws, infinities included
    inf_fraction: float
    count: int


def default_distance_grid(
    cfg: NetworkConfig, points: int = DISTANCE_GRID_POINTS
) -> tuple[float, ...]:
    """Evenly spaced distances from 0.1 km to the cell edge."""
    return tuple(float(x) for x in np.linspace(0.1, cfg.cell_radius_km, points))


def default_density_grid(
    n_bar_max: float = 3000.0, points: int = DENSITY_GRID_POINTS
) -> tuple[float, ...]:
    """Log-spaced mean device counts from 1 to ``n_bar_max`` inclusive."""
    if n_bar_max <= 1:
        raise ValueError(f"n_bar_max must be > 1, got {n_bar_max}")
    grid = np.geomspace(1.0, n_bar_max, points)
    grid[0], grid[-1] = 1.0, float(n_bar_max)
    return tuple(float(x) for x in grid)


class _MeanAcc:
    """Running mean/standard-error accumulator, merged in batch order."""

    __slots__ = ("count", "total", "total_sq")

    def __init__(self) -> None:
        self.count = 0
        self.total = 0.0
        self.total_sq = 0.0

    def add(self, values: np.ndarray) -> None:
        self.count += values.size
        self.total += float(values.sum())
        self.total_sq += float((values * values).sum())

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        var = (self.total_sq - self.total * self.total / self.count) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)


class _FiniteAcc:
    """Accumulates the finite entries of SIR draws for the mean-SIR mode."""

    __slots__ = ("finite_count", "finite_total")

    def __init__(self) -> None:
        self.finite_count = 0
        self.finite_total = 0.0

    def add(self, gammas: np.ndarray) -> None:
        finite = gammas[np.isfinite(gammas)]
        self.finite_count += finite.size
        self.finite_total += float(finite.sum())

    @property
    def mean_or_inf(self) -> float:
        if self.finite_count == 0:
            return math.inf
        return self.finite_total / self.finite_count


def _batches(n: int, size: int = _BATCH) -> list[tuple[int, int]]:
    full, rem = divmod(n, size)
    out = [(i, size) for i in range(full)]
    if rem:
        out.append((full, rem))
    return out


def _field_sirs(
    rng: np.random.Generator,
    s_desired: np.ndarray,
    annulus_desired: int | np.ndarray,
    n_bar: float,
    cfg: NetworkConfig,
    model: ChannelModel,
    tx_mw: float,
    rejection: float = CO_CHANNEL_REJECTION,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample one batch of active interference fields and return the three
    scenario SIR arrays (inf where the relevant interferer set is empty)."""
    batch = s_desired.shape[0]
    counts = rng.poisson(cfg.duty_cycle * n_bar, size=batch)
    total = int(counts.sum())
    g_max = np.full(batch, np.inf)
    g_co = np.full(batch, np.inf)
    g_inter = np.full(batch, np.inf)
    if total == 0:
        return g_max, g_co, g_inter

    u = rng.random(total)
    dist = np.maximum(cfg.min_distance_km, cfg.cell_radius_km * np.sqrt(u))
    ann = np.minimum((6.0 * dist / cfg.cell_radius_km).astype(np.int64), 5)
    fading = rng.exponential(size=total)
    powers = tx_mw * fading * path_loss_array(dist, model)

    owner = np.repeat(np.arange(batch), counts)
    same = ann == (annulus_desired[owner] if np.ndim(annulus_desired) else annulus_desired)
    co_power = np.bincount(owner, weights=np.where(same, powers, 0.0), minlength=batch)
    inter_power = np.bincount(owner, weights=np.where(same, 0.0, powers), minlength=batch)
    strongest = np.zeros(batch)
    np.maximum.at(strongest, owner[same], powers[same])

    # Masked divisions keep the empty-set points at inf and avoid 0/0.
    nz = strongest > 0.0
    g_max[nz] = rejection * s_desired[nz] / strongest[nz]
    nz = co_power > 0.0
    g_co[nz] = s_desired[nz] / co_power[nz]
    nz = inter_power > 0.0
    g_inter[nz] = s_desired[nz] / inter_power[nz]
    return g_max, g_co, g_inter


def _joint_success(s_co: np.ndarray, s_inter: np.ndarray, mode: str) -> np.ndarray:
    if mode == "success-product":
        return s_co * s_inter
    return 1.0 - (1.0 - s_co) * (1.0 - s_inter)


def _distance_point(
    cfg: NetworkConfig,
    model: ChannelModel,
    spec: SweepSpec,
    point_index: int,
    d_km: float,
    tx_mw: float,
) -> CurvePoint:
    annulus_idx = annulus_to_sf(d_km, cfg.cell_radius_km) - SF_MIN
    p_snr = snr_success_probability(d_km, annulus_idx + SF_MIN, cfg, model.path_loss_form)
    gain = path_loss(d_km, model)
    substitution = spec.sir_mode == "substitution"
    success = {key: _MeanAcc() for key in ("max_co", "co", "sf")}
    gammas = {key: _FiniteAcc() for key in ("max_co", "co", "inter")}

    for batch_index, batch in _batches(spec.realizations_per_point):
        rng = np.random.default_rng([spec.seed, _TAG_DISTANCE, point_index, batch_index])
        fading = rng.exponential(size=batch)
        s_desired = (tx_mw * gain) * fading
        g_max, g_co, g_inter = _field_sirs(
            rng, s_desired, annulus_idx, cfg.mean_devices, cfg, model, tx_mw
        )
        if substitution:
            s_max = success_from_sir_array(g_max)
            s_co = success_from_sir_array(g_co)
            s_inter = success_from_sir_array(g_inter)
            success["max_co"].add(s_max)
            success["co"].add(s_co)
            success["sf"].add(_joint_success(s_co, s_inter, spec.joint_mode))
        else:
            gammas["max_co"].add(g_max)
            gammas["co"].add(g_co)
            gammas["inter"].add(g_inter)

    if substitution:
        p_sf = success["sf"].mean
        se_sf = success["sf"].stderr
        probs = ScenarioProbabilities(
            p_snr=p_snr,
            p_max_co=success["max_co"].mean,
            p_co=success["co"].mean,
            p_sf=p_sf,
            p_snr_sf=p_snr * p_sf,
        )
        stderr = ScenarioProbabilities(
            p_snr=0.0,
            p_max_co=success["max_co"].stderr,
            p_co=success["co"].stderr,
            p_sf=se_sf,
            p_snr_sf=p_snr * se_sf,
        )
    else:
        mean_co = gammas["co"].mean_or_inf
        mean_inter = gammas["inter"].mean_or_inf
        p_sf = combine_sf(
            outage_closed_form(mean_co), outage_closed_form(mean_inter), spec.joint_mode
        )
        probs = ScenarioProbabilities(
            p_snr=p_snr,
            p_max_co=success_from_sir(gammas["max_co"].mean_or_inf),
            p_co=success_from_sir(mean_co),
            p_sf=p_sf,
            p_snr_sf=combine_snr_sf(p_snr, p_sf),
        )
        stderr = ScenarioProbabilities(0.0, 0.0, 0.0, 0.0, 0.0)
    return CurvePoint(abscissa=d_km, probs=probs, stderr=stderr)


def _density_point(
    cfg: NetworkConfig,
    model: ChannelModel,
    spec: SweepSpec,
    point_index: int,
    n_bar: float,
    tx_mw: float,
    theta_linear: np.ndarray,
) -> CurvePoint:
    substitution = spec.sir_mode == "substitution"
    success = {key: _MeanAcc() for key in ("snr", "max_co", "co", "sf", "snr_sf")}
    gammas = {key: _FiniteAcc() for key in ("max_co", "co", "inter")}

    for batch_index, batch in _batches(spec.realizations_per_point):
        # Desired positions come from a point-independent stream so the
        # noise-only coverage column is bit-identical across the grid.
        rng_desired = np.random.default_rng([spec.seed, _TAG_DENSITY_DESIRED, batch_index])
        rng_field = np.random.default_rng(
            [spec.seed, _TAG_DENSITY_FIELD, point_index, batch_index]
        )
        u = rng_desired.random(batch)
        d = np.maximum(cfg.min_distance_km, cfg.cell_radius_km * np.sqrt(u))
        ann = np.minimum((6.0 * d / cfg.cell_radius_km).astype(np.int64), 5)
        gain = path_loss_array(d, model)
        s_snr = np.exp(-(model.noise_mw * theta_linear[ann]) / (tx_mw * gain))
        success["snr"].add(s_snr)

        fading = rng_field.exponential(size=batch)
        s_desired = tx_mw * gain * fading
        g_max, g_co, g_inter = _field_sirs(
            rng_field, s_desired, ann, n_bar, cfg, model, tx_mw
        )
        if substitution:
            s_max = success_from_sir_array(g_max)
            s_co = success_from_sir_array(g_co)
            s_inter = success_from_sir_array(g_inter)
            s_sf = _joint_success(s_co, s_inter, spec.joint_mode)
            success["max_co"].add(s_max)
            success["co"].add(s_co)
            success["sf"].add(s_sf)
            success["snr_sf"].add(s_snr * s_sf)
        else:
            gammas["max_co"].add(g_max)
            gammas["co"].add(g_co)
            gammas["inter"].add(g_inter)

    p_snr = success["snr"].mean
    se_snr = success["snr"].stderr
    if substitution:
        probs = ScenarioProbabilities(
            p_snr=p_snr,
            p_max_co=success["max_co"].mean,
            p_co=success["co"].mean,
            p_sf=success["sf"].mean,
            p_snr_sf=success["snr_sf"].mean,
        )
        stderr = ScenarioProbabilities(
            p_snr=se_snr,
            p_max_co=success["max_co"].stderr,
            p_co=success["co"].stderr,
            p_sf=success["sf"].stderr,
            p_snr_sf=success["snr_sf"].stderr,
        )
    else:
        mean_co = gammas["co"].mean_or_inf
        mean_inter = gammas["inter"].mean_or_inf
        p_sf = combine_sf(
            outage_closed_form(mean_co), outage_closed_form(mean_inter), spec.joint_mode
        )
        probs = ScenarioProbabilities(
            p_snr=p_snr,
            p_max_co=success_from_sir(gammas["max_co"].mean_or_inf),
            p_co=success_from_sir(mean_co),
            p_sf=p_sf,
            p_snr_sf=combine_snr_sf(p_snr, p_sf),
        )
        stderr = ScenarioProbabilities(se_snr, 0.0, 0.0, 0.0, 0.0)
    return CurvePoint(abscissa=n_bar, probs=probs, stderr=stderr)


def _run_points(worker, n_points: int, threads: int) -> list[CurvePoint]:
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or n_points <= 1:
        return [worker(i) for i in range(n_points)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(n_points)))


def success_vs_distance(
    cfg: NetworkConfig,
    spec: SweepSpec,
    *,
    path_loss_form: str = "standard",
    threads: int = 1,
) -> list[CurvePoint]:
    """Per-scenario success probability at each grid distance, with the
    desired device pinned at the abscissa and the interference field
    resampled every realization."""
    if spec.kind != "distance":
        raise ValueError(f"spec.kind must be 'distance', got {spec.kind!r}")
    for d in spec.grid:
        if not cfg.min_distance_km <= d <= cfg.cell_radius_km:
            raise ValueError(
                f"grid distance {d} km outside "
                f"[{cfg.min_distance_km}, {cfg.cell_radius_km}] km"
            )
    model = ChannelModel.from_config(cfg, path_loss_form)
    tx_mw = dbm_to_mw(cfg.tx_power_dbm)

    def worker(i: int) -> CurvePoint:
        return _distance_point(cfg, model, spec, i, spec.grid[i], tx_mw)

    return _run_points(worker, len(spec.grid), threads)


def coverage_vs_density(
    cfg: NetworkConfig,
    spec: SweepSpec,
    *,
    path_loss_form: str = "standard",
    threads: int = 1,
) -> list[CurvePoint]:
    """Per-scenario coverage probability at each mean device count: the
    spatial average of success probability over a uniformly-by-area random
    desired-device location."""
    if spec.kind != "density":
        raise ValueError(f"spec.kind must be 'density', got {spec.kind!r}")
    model = ChannelModel.from_config(cfg, path_loss_form)
    tx_mw = dbm_to_mw(cfg.tx_power_dbm)
    theta_linear = np.array([db_to_linear(row.snr_threshold_db) for row in sf_table()])

    def worker(i: int) -> CurvePoint:
        return _density_point(cfg, model, spec, i, spec.grid[i], tx_mw, theta_linear)

    return _run_points(worker, len(spec.grid), threads)


def estimate_mean_sir(
    cfg: NetworkConfig,
    d_km: float,
    n: int,
    seed: int,
    path_loss_form: str = "standard",
    rejection: float = CO_CHANNEL_REJECTION,
) -> dict[str, SirStats]:
    """Sample-mean SIR per scenario at a fixed desired distance, feeding the
    ``mean-sir`` mode.  Keys: ``max_co``, ``co``, ``inter``."""
    if n < 1:
        raise ValueError(f"need n >= 1 realizations, got {n}")
    model = ChannelModel.from_config(cfg, path_loss_form)
    rng = np.random.default_rng([seed, _TAG_MEAN_SIR])
    draws: dict[str, list[float]] = {"max_co": [], "co": [], "inter": []}
    for _ in range(n):
        sample = sir_sample(sample_realization(cfg, d_km, rng), model, rejection)
        draws["max_co"].append(sample.gamma_max_co)
        draws["co"].append(sample.gamma_co)
        draws["inter"].append(sample.gamma_inter)

    stats = {}
    for key, values in draws.items():
        arr = np.asarray(values)
        finite = arr[np.isfinite(arr)]
        stats[key] = SirStats(
            mean=float(finite.mean()) if finite.size else math.inf,
            median=float(np.median(arr)),
            inf_fraction=float(np.count_nonzero(~np.isfinite(arr))) / n,
            count=n,
        )
    return stats
