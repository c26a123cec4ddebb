"""Command-line front end: run sweeps, evaluate closed forms, and check the
model's internal consistency.  Sweep results are emitted as RFC-4180-style
CSV with LF line endings and full-precision decimal numbers so any plotting
tool can reproduce the curves."""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import analytic, montecarlo
from .channel import PATH_LOSS_FORMS, ChannelModel, snr_success_probability
from .geometry import annulus_to_sf, sample_realization
from .interference import sir_sample, split_interference_power
from .params import (
    ConfigError,
    NetworkConfig,
    dbm_to_mw,
    mw_to_dbm,
    parse_config_text,
    sf_table,
)

SEED_ENV_VAR = "LORA_REL_SEED"
DESK_REALIZATIONS = 10_000

CSV_COLUMNS = (
    "p_snr",
    "p_max_co",
    "p_co",
    "p_sf",
    "p_snr_sf",
    "se_snr",
    "se_max_co",
    "se_co",
    "se_sf",
    "se_snr_sf",
)


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips the float."""
    return repr(float(x))


def curve_to_csv(points: list[montecarlo.CurvePoint], abscissa_name: str) -> str:
    """Render sweep points as CSV text (LF endings, trailing newline)."""
    lines = [",".join((abscissa_name,) + CSV_COLUMNS)]
    for pt in points:
        p, se = pt.probs, pt.stderr
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    pt.abscissa,
                    p.p_snr,
                    p.p_max_co,
                    p.p_co,
                    p.p_sf,
                    p.p_snr_sf,
                    se.p_snr,
                    se.p_max_co,
                    se.p_co,
                    se.p_sf,
                    se.p_snr_sf,
                )
            )
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_file_values(path: str | None) -> dict[str, float | int]:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _build_config(args: argparse.Namespace) -> tuple[NetworkConfig, dict[str, float | int]]:
    """Table-default < config file < flags < env-var seed fallback."""
    file_values = _load_file_values(getattr(args, "config", None))
    values = dict(file_values)
    if getattr(args, "mean_devices", None) is not None:
        values["mean_devices"] = args.mean_devices
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    elif "seed" not in values and os.environ.get(SEED_ENV_VAR):
        raw = os.environ[SEED_ENV_VAR]
        try:
            values["seed"] = int(raw)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    return NetworkConfig(**values), file_values  # type: ignore[arg-type]


def _resolve_realizations(
    args: argparse.Namespace, cfg: NetworkConfig, file_values: dict
) -> int:
    """--realizations wins; otherwise an explicit config-file value or
    --full selects cfg.realizations; otherwise the desk-scale default."""
    if args.realizations is not None:
        return args.realizations
    if "realizations" in file_values or args.full:
        return cfg.realizations
    return DESK_REALIZATIONS


def _cmd_sweep_distance(args: argparse.Namespace) -> int:
    cfg, file_values = _build_config(args)
    spec = montecarlo.SweepSpec(
        kind="distance",
        grid=montecarlo.default_distance_grid(cfg),
        realizations_per_point=_resolve_realizations(args, cfg, file_values),
        seed=cfg.seed,
        joint_mode=args.joint_mode,
        sir_mode=args.sir_mode,
    )
    points = montecarlo.success_vs_distance(
        cfg, spec, path_loss_form=args.path_loss_form, threads=args.threads
    )
    _emit(curve_to_csv(points, "d_km"), args.out)
    return 0


def _cmd_sweep_density(args: argparse.Namespace) -> int:
    cfg, file_values = _build_config(args)
    spec = montecarlo.SweepSpec(
        kind="density",
        grid=montecarlo.default_density_grid(args.n_bar_max),
        realizations_per_point=_resolve_realizations(args, cfg, file_values),
        seed=cfg.seed,
        joint_mode=args.joint_mode,
        sir_mode=args.sir_mode,
    )
    points = montecarlo.coverage_vs_density(
        cfg, spec, path_loss_form=args.path_loss_form, threads=args.threads
    )
    _emit(curve_to_csv(points, "n_bar"), args.out)
    return 0


def _cmd_closed_form(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    by_gamma = args.gamma_bar is not None
    by_distance = args.distance is not None or args.sf is not None
    if by_gamma == by_distance:
        parser.error("give exactly one of --gamma-bar or --distance with --sf")
    if by_gamma:
        if args.gamma_bar < 0:
            parser.error(f"--gamma-bar must be >= 0, got {args.gamma_bar}")
        outage = analytic.outage_closed_form(args.gamma_bar)
        sys.stdout.write(
            f"gamma_bar={_fmt(args.gamma_bar)} outage={_fmt(outage)} "
            f"success={_fmt(1.0 - outage)}\n"
        )
        return 0
    if args.distance is None or args.sf is None:
        parser.error("--distance and --sf must be given together")
    cfg, _ = _build_config(args)
    p = snr_success_probability(args.distance, args.sf, cfg, args.path_loss_form)
    sys.stdout.write(f"d_km={_fmt(args.distance)} sf={args.sf} p_snr={_fmt(p)}\n")
    return 0


# --- validate: closed-form oracle suite and invariant checks ---------------


def _check_outage_quadrature() -> tuple[bool, str]:
    worst = 0.0
    for gamma in (0.01, 0.1, 1.0, 2.0, 10.0, 100.0, 1e4):
        numeric = analytic.outage_numeric_oracle(gamma, rel_tol=1e-9)
        closed = analytic.outage_closed_form(gamma)
        worst = max(worst, abs(numeric - closed))
        bound_mode = analytic.outage_numeric_oracle(gamma, rel_tol=1e-9, error_rate="bound")
        if bound_mode < numeric:
            return False, f"bound-mode quadrature below exact mode at gamma={gamma}"
    return worst < 1e-6, f"max |quadrature - closed form| = {worst:.3e}"


def _check_q_function() -> tuple[bool, str]:
    if abs(analytic.q_function(0.0) - 0.5) >= 1e-12:
        return False, "q_function(0) != 0.5"
    xs = [0.1 * k for k in range(1, 81)]
    ok = all(analytic.q_bound(x) >= analytic.q_function(x) for x in xs)
    return ok, "q_function(0)=0.5; bound dominates tail on (0, 8]"


def _check_sf_schedule() -> tuple[bool, str]:
    rows = sf_table()
    ok = (
        len(rows) == 6
        and all(a.snr_threshold_db > b.snr_threshold_db for a, b in zip(rows, rows[1:]))
        and all(a.airtime_ms < b.airtime_ms for a, b in zip(rows, rows[1:]))
        and all(a.bitrate_kbps > b.bitrate_kbps for a, b in zip(rows, rows[1:]))
        and rows[0].annulus_inner_frac == 0.0
        and rows[-1].annulus_outer_frac == 1.0
        and all(
            a.annulus_outer_frac == b.annulus_inner_frac for a, b in zip(rows, rows[1:])
        )
    )
    return ok, "SF schedule monotone, annuli tile [0, 1]"


def _check_conversion_round_trip() -> tuple[bool, str]:
    for exp in range(-12, 4):
        x = 10.0**exp * 3.7
        if abs(dbm_to_mw(mw_to_dbm(x)) - x) > 1e-12 * x:
            return False, f"dBm/mW round trip off at {x}"
    return True, "dBm/mW round trip within 1e-12 relative"


def _check_saw_tooth(cfg: NetworkConfig) -> tuple[bool, str]:
    r = cfg.cell_radius_km
    for k in range(1, 6):
        boundary = k * r / 6.0
        below = boundary * (1.0 - 1e-9)
        above = boundary * (1.0 + 1e-9)
        p_below = snr_success_probability(below, annulus_to_sf(below, r), cfg)
        p_above = snr_success_probability(above, annulus_to_sf(above, r), cfg)
        if p_above <= p_below:
            return False, f"no upward jump at annulus boundary {boundary} km"
    return True, "noise-only success jumps upward at all 5 annulus boundaries"


def _check_interference_algebra(cfg: NetworkConfig, realizations: int = 200) -> tuple[bool, str]:
    model = ChannelModel.from_config(cfg)
    rng = np.random.default_rng([cfg.seed, 4])
    checked_dominance = 0
    for _ in range(realizations):
        d = float(
            max(cfg.min_distance_km, cfg.cell_radius_km * math.sqrt(rng.random()))
        )
        r = sample_realization(cfg, d, rng)
        same, other = split_interference_power(r, model)
        total = math.fsum(
            dev.tx_power_mw
            * dev.fading
            * (model.wavelength_m / (4.0 * math.pi * 1000.0 * dev.position.distance_km))
            ** model.path_loss_exponent
            for dev in r.interferers
            if dev.active
        )
        if total > 0 and abs((same + other) - total) > 1e-9 * total:
            return False, "co-SF + inter-SF power does not add up to the total"
        sirs = sir_sample(r, model)
        if math.isfinite(sirs.gamma_co):
            checked_dominance += 1
            if 4.0 * sirs.gamma_co > sirs.gamma_max_co:
                return False, "sum-based SIR exceeds a quarter of the max-based SIR"
    return True, (
        f"power split adds up on {realizations} fields; dominance held on "
        f"{checked_dominance} non-empty co-SF sets"
    )


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg, _ = _build_config(args)
    checks = [
        ("outage quadrature vs closed form", _check_outage_quadrature),
        ("gaussian tail and bound", _check_q_function),
        ("sf schedule", _check_sf_schedule),
        ("unit conversions", _check_conversion_round_trip),
        ("annulus saw-tooth", lambda: _check_saw_tooth(cfg)),
        ("interference algebra", lambda: _check_interference_algebra(cfg)),
    ]
    failures = 0
    for name, check in checks:
        ok, detail = check()
        status = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        sys.stdout.write(f"{status} {name}: {detail}\n")
    sys.stdout.write(
        f"{len(checks) - failures}/{len(checks)} checks passed\n"
    )
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lora-reliability",
        description=(
            "Success and coverage probability of LoRa uplinks under noise, "
            "same-SF, and cross-SF interference: closed forms plus a seeded "
            "Monte Carlo sweep engine."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--seed", type=int, help=f"RNG seed (fallback: ${SEED_ENV_VAR})")
    common.add_argument(
        "--path-loss-form",
        choices=PATH_LOSS_FORMS,
        default="standard",
        help="free-space gain variant (default: standard)",
    )

    sweep = argparse.ArgumentParser(add_help=False, parents=[common])
    sweep.add_argument(
        "--realizations", type=int, metavar="N", help="realizations per sweep point"
    )
    sweep.add_argument(
        "--full",
        action="store_true",
        help=f"full-scale run (config realizations) instead of the desk default {DESK_REALIZATIONS}",
    )
    sweep.add_argument(
        "--mean-devices", type=float, metavar="N_BAR", help="average number of end devices"
    )
    sweep.add_argument(
        "--joint-mode", choices=analytic.JOINT_MODES, default="success-product"
    )
    sweep.add_argument("--sir-mode", choices=analytic.SIR_MODES, default="substitution")
    sweep.add_argument(
        "--threads",
        type=int,
        default=1,
        metavar="N",
        help="worker threads (affects wall time only, never output bytes)",
    )
    sweep.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")

    sub = parser.add_subparsers(dest="command", required=True)

    p_dist = sub.add_parser(
        "sweep-distance",
        parents=[sweep],
        help="success probability vs distance from the gateway (CSV)",
    )
    p_dist.set_defaults(func=_cmd_sweep_distance)

    p_dens = sub.add_parser(
        "sweep-density",
        parents=[sweep],
        help="coverage probability vs average number of devices (CSV)",
    )
    p_dens.add_argument(
        "--n-bar-max", type=float, default=3000.0, help="largest mean device count"
    )
    p_dens.set_defaults(func=_cmd_sweep_density)

    p_cf = sub.add_parser(
        "closed-form",
        parents=[common],
        help="evaluate the outage closed form or the noise-only success",
    )
    p_cf.add_argument("--gamma-bar", type=float, help="mean SIR (linear)")
    p_cf.add_argument("--distance", type=float, metavar="D_KM")
    p_cf.add_argument("--sf", type=int, choices=range(7, 13))
    p_cf.set_defaults(func=lambda args: _cmd_closed_form(args, p_cf))

    p_val = sub.add_parser(
        "validate",
        parents=[common],
        help="run the closed-form oracle suite and invariant checks",
    )
    p_val.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    except (ValueError, OSError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    except analytic.QuadratureError as err:
        sys.stderr.write(f"numerical failure: {err}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
