"""Batch command-line front end.

Subcommands locate, sweep, montecarlo, and heatmap load a scenario
config, run the corresponding experiment, and write CSV/JSON artifacts
plus a run manifest recording every resolved parameter and the master
seed. Flags mirror config keys and take precedence over file values,
which take precedence over built-in defaults. Outputs land in the
directory chosen by --output-dir, the run.output_dir key, or the
PINCHLOC_OUTPUT_DIR environment variable, in that order.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .config import RunConfig, apply_overrides, load_config
from .errors import PinchlocError
from .simulate import Scenario, heatmap, monte_carlo, noise_sweep, run_trial

__all__ = ["main", "build_parser"]

MANIFEST_NAME = "run_manifest.json"


def _fmt(value: float) -> str:
    """Serialize a float at 17 significant digits (lossless round-trip)."""
    return format(float(value), ".17g")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="YAML scenario file (defaults apply when omitted)")
    parser.add_argument("--output-dir", default=None,
                        help="directory for result files (created if missing)")
    parser.add_argument("--format", choices=("csv", "json"), default=None,
                        help="tabular output format (default csv)")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed for all random draws")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker threads for trial execution (results are identical)")
    parser.add_argument("--pa-count", type=int, default=None,
                        help="number of evenly placed antennas")
    parser.add_argument("--placement", choices=("midpoint", "endpoint"), default=None,
                        help="even-placement rule along the waveguide")
    parser.add_argument("--user-index", type=int, default=None,
                        help="index of the scenario user to localize")
    parser.add_argument("--weights", choices=("snr", "uniform"), default=None,
                        help="least-squares row weighting")
    parser.add_argument("--clamp-policy", choices=("floor", "discard"), default=None,
                        help="handling of floor-clamped measurements")
    parser.add_argument("--constants", choices=("approx", "exact"), default=None,
                        help="guide propagation-constant formula")
    parser.add_argument("--range-cap", type=float, default=None,
                        help="distance cap implied by the power floor (default room diagonal; inf disables)")
    parser.add_argument("--power-floor", type=float, default=None,
                        help="absolute lower bound on powers entering the RSSI inversion")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinchloc",
        description="Indoor RSSI positioning simulator over a pinched dielectric waveguide.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("locate", help="run one localization trial and report the estimate")
    _add_common_flags(p)
    p.add_argument("--trial-index", type=int, default=0,
                   help="trial key selecting the noise draw (default 0)")

    p = sub.add_parser("sweep", help="mean/variance of error over a noise x antenna-count grid")
    _add_common_flags(p)
    p.add_argument("--trials", type=int, default=None,
                   help="trials per grid point (default 200)")
    p.add_argument("--noise-levels-dbm", type=float, nargs="+", default=None,
                   help="noise powers in dBm")
    p.add_argument("--pa-counts", type=int, nargs="+", default=None,
                   help="antenna counts to sweep")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the table")

    p = sub.add_parser("montecarlo", help="repeated localization of one user")
    _add_common_flags(p)
    p.add_argument("--trials", type=int, default=None,
                   help="number of trials (default 1000)")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the table")

    p = sub.add_parser("heatmap", help="per-cell mean error over a room-spanning grid")
    _add_common_flags(p)
    p.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"), default=None,
                   help="grid cells along x and y (default 60 100)")
    p.add_argument("--trials-per-cell", type=int, default=None,
                   help="trials per grid cell (default 50)")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG figure next to the table")

    return parser


def _resolve(args: argparse.Namespace) -> tuple[Scenario, RunConfig]:
    scenario, run = load_config(args.config)
    grid = getattr(args, "grid", None)
    return apply_overrides(
        scenario,
        run,
        seed=args.seed,
        output_dir=args.output_dir,
        format=args.format,
        workers=args.workers,
        user_index=args.user_index,
        pa_count=args.pa_count,
        placement=args.placement,
        weights=args.weights,
        clamp_policy=args.clamp_policy,
        constants=args.constants,
        range_cap=args.range_cap,
        power_floor=args.power_floor,
        trials=getattr(args, "trials", None),
        noise_levels_dbm=(
            tuple(args.noise_levels_dbm) if getattr(args, "noise_levels_dbm", None) else None
        ),
        pa_counts=tuple(args.pa_counts) if getattr(args, "pa_counts", None) else None,
        grid_nx=grid[0] if grid else None,
        grid_ny=grid[1] if grid else None,
        trials_per_cell=getattr(args, "trials_per_cell", None),
    )


def _scenario_dict(scenario: Scenario) -> dict:
    noise = scenario.noise
    return {
        "room": {"d1": scenario.room.d1, "d2": scenario.room.d2, "h": scenario.room.h},
        "pas": {"positions": list(scenario.pa_layout.y_positions)},
        "users": [[u.x, u.y] for u in scenario.users],
        "tx": {"f_c": scenario.carrier.f_c, "power": scenario.tx.power},
        "waveguide": {
            "eps_r": scenario.material.eps_r,
            "tan_delta": scenario.material.tan_delta,
            "k_c": scenario.material.k_c,
        },
        "noise": {
            "sigma2_dbm": noise.sigma2_dbm,
            "chi_std_scale": noise.chi_std_scale,
            "chi_std_watts": noise.chi_std_watts,
            "per_pa_noise": list(noise.per_pa_noise) if noise.per_pa_noise else None,
        },
        "constants": scenario.constants_mode,
        "weights": scenario.weight_mode,
        "clamp_policy": scenario.clamp_policy,
        "range_cap": scenario.resolved_range_cap(),
        "power_floor": scenario.power_floor,
    }


def _write_manifest(
    out_dir: str,
    command: str,
    scenario: Scenario,
    run: RunConfig,
    params: dict,
    outputs: list[str],
) -> str:
    manifest = {
        "command": command,
        "seed": scenario.master_seed,
        "scenario": _scenario_dict(scenario),
        "params": {**params, "format": run.format, "workers": run.workers},
        "outputs": outputs,
    }
    path = os.path.join(out_dir, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _write_table(out_dir: str, stem: str, fmt: str, header: list[str], rows: list[list]) -> str:
    """Write rows as CSV (17-significant-digit floats) or JSON records."""
    if fmt == "json":
        path = os.path.join(out_dir, f"{stem}.json")
        records = [dict(zip(header, row)) for row in rows]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(records, fh, indent=2)
            fh.write("\n")
        return path
    path = os.path.join(out_dir, f"{stem}.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return path


def cmd_locate(scenario: Scenario, run: RunConfig, args: argparse.Namespace) -> int:
    result = run_trial(scenario, user_index=run.user_index, trial_index=args.trial_index)
    user = scenario.users[run.user_index]
    estimate = result.estimate
    record = {
        "user_index": run.user_index,
        "trial_index": args.trial_index,
        "x_true": user.x,
        "y_true": user.y,
        "x_hat": estimate.x,
        "y_hat": estimate.y,
        "error_m": result.error,
        "v_hat": estimate.v_hat,
        "residual_norm": estimate.residual_norm,
        "range_clamped": estimate.range_clamped,
        "v_clamped": estimate.v_clamped,
    }
    text = json.dumps(record, indent=2)
    print(text)
    out_dir = run.output_dir
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "locate.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")
    _write_manifest(
        out_dir,
        "locate",
        scenario,
        run,
        {"user_index": run.user_index, "trial_index": args.trial_index},
        ["locate.json"],
    )
    return 0


def cmd_sweep(scenario: Scenario, run: RunConfig, args: argparse.Namespace) -> int:
    trials = run.trials if run.trials is not None else 200
    result = noise_sweep(
        scenario,
        list(run.noise_levels_dbm),
        list(run.pa_counts),
        trials=trials,
        placement=run.placement,
        user_index=run.user_index,
        workers=run.workers,
    )
    header = ["noise_dbm", "pa_count", "trials", "mean_error_m", "variance_m2"]
    rows = [
        [p.noise_dbm, p.pa_count, p.trials, p.mean_error, p.variance]
        for p in result.points
    ]
    out_dir = run.output_dir
    os.makedirs(out_dir, exist_ok=True)
    path = _write_table(out_dir, "sweep", run.format, header, rows)
    outputs = [os.path.basename(path)]
    if args.plot:
        from . import plots

        png = os.path.join(out_dir, "sweep.png")
        plots.render_sweep(result, png)
        outputs.append(os.path.basename(png))
    _write_manifest(
        out_dir,
        "sweep",
        scenario,
        run,
        {
            "trials": trials,
            "noise_levels_dbm": list(run.noise_levels_dbm),
            "pa_counts": list(run.pa_counts),
            "placement": run.placement,
            "user_index": run.user_index,
        },
        outputs,
    )
    print(f"wrote {path} ({len(rows)} points)")
    return 0


def cmd_montecarlo(scenario: Scenario, run: RunConfig, args: argparse.Namespace) -> int:
    trials = run.trials if run.trials is not None else 1000
    result = monte_carlo(scenario, trials=trials, user_index=run.user_index, workers=run.workers)
    header = ["trial", "error_m", "x_hat", "y_hat", "clamped"]
    rows = [
        [
            t.trial_index,
            t.error,
            t.estimate.x,
            t.estimate.y,
            int(t.range_clamped or t.v_clamped),
        ]
        for t in result.trials
    ]
    out_dir = run.output_dir
    os.makedirs(out_dir, exist_ok=True)
    path = _write_table(out_dir, "montecarlo", run.format, header, rows)
    outputs = [os.path.basename(path)]
    if args.plot:
        from . import plots

        png = os.path.join(out_dir, "montecarlo.png")
        plots.render_montecarlo(result, png)
        outputs.append(os.path.basename(png))
    _write_manifest(
        out_dir,
        "montecarlo",
        scenario,
        run,
        {"trials": trials, "user_index": run.user_index},
        outputs,
    )
    summary = result.summary
    print(
        f"wrote {path} (mean_error_m={_fmt(summary.mean_error)} "
        f"variance_m2={_fmt(summary.variance)})"
    )
    return 0


def cmd_heatmap(scenario: Scenario, run: RunConfig, args: argparse.Namespace) -> int:
    grid = heatmap(
        scenario,
        nx=run.grid_nx,
        ny=run.grid_ny,
        trials_per_cell=run.trials_per_cell,
        workers=run.workers,
    )
    header = ["x_m", "y_m", "mean_error_m", "normalized_error"]
    rows = []
    for iy in range(grid.ny):
        for ix in range(grid.nx):
            rows.append(
                [
                    float(grid.x_centers[ix]),
                    float(grid.y_centers[iy]),
                    float(grid.mean_error[iy, ix]),
                    float(grid.normalized[iy, ix]),
                ]
            )
    out_dir = run.output_dir
    os.makedirs(out_dir, exist_ok=True)
    path = _write_table(out_dir, "heatmap", run.format, header, rows)
    outputs = [os.path.basename(path)]
    if args.plot:
        from . import plots

        png = os.path.join(out_dir, "heatmap.png")
        plots.render_heatmap(grid, scenario, png)
        outputs.append(os.path.basename(png))
    _write_manifest(
        out_dir,
        "heatmap",
        scenario,
        run,
        {"grid": [run.grid_nx, run.grid_ny], "trials_per_cell": run.trials_per_cell},
        outputs,
    )
    print(f"wrote {path} ({len(rows)} cells)")
    return 0


_COMMANDS = {
    "locate": cmd_locate,
    "sweep": cmd_sweep,
    "montecarlo": cmd_montecarlo,
    "heatmap": cmd_heatmap,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario, run = _resolve(args)
        return _COMMANDS[args.command](scenario, run, args)
    except PinchlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
