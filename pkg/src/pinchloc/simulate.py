"""Experiment harness: Monte-Carlo runs, noise sweeps, error heatmaps.

Every trial is keyed by (master_seed, trial_index, pa_index), so any
result here is a pure function of the scenario and the seed. Trials
may run on several worker threads; scheduling cannot change results
because draws depend only on their keys and aggregation always reduces
in trial order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import CarrierConfig, NoiseModel, PropagationConstants, TxConfig, WaveguideMaterial
from .channel import propagation_constants_approx, propagation_constants_exact
from .errors import ConfigError
from .geometry import PaLayout, Room, UserPosition, even_pa_placement
from .ranging import DEFAULT_POWER_FLOOR, measurements_for_user, range_cap_floor
from .solver import PositionEstimate, WeightSpec, locate

__all__ = [
    "Scenario",
    "TrialResult",
    "SweepPoint",
    "SweepResult",
    "MonteCarloResult",
    "HeatmapGrid",
    "run_trial",
    "monte_carlo",
    "noise_sweep",
    "heatmap",
]


@dataclass(frozen=True)
class Scenario:
    """Complete experiment description.

    Estimation policy knobs:

    constants_mode
        "approx" closed-form guide constants or "exact" with the
        cut-off wavenumber honored.
    weight_mode
        "snr" or "uniform" row weighting.
    clamp_policy
        "floor" keeps floor-clamped measurements, "discard" drops them
        when enough clean rows remain.
    range_cap
        Distance bound implied by the power floor; None selects the
        room diagonal (no in-room target can be farther), math.inf
        disables the cap leaving only the absolute power_floor.
    power_floor
        Absolute lower bound on powers entering the RSSI inversion.
    """

    room: Room
    pa_layout: PaLayout
    users: tuple[UserPosition, ...]
    carrier: CarrierConfig
    material: WaveguideMaterial
    tx: TxConfig
    noise: NoiseModel
    master_seed: int = 1111
    constants_mode: str = "approx"
    weight_mode: str = "snr"
    clamp_policy: str = "floor"
    range_cap: float | None = None
    power_floor: float = DEFAULT_POWER_FLOOR

    def __post_init__(self) -> None:
        object.__setattr__(self, "users", tuple(self.users))
        if not self.users:
            raise ConfigError("users must contain at least one position")
        self.pa_layout.validate_in_room(self.room)
        for user in self.users:
            user.validate_in_room(self.room)
        if self.constants_mode not in ("approx", "exact"):
            raise ConfigError(f"run.constants must be 'approx' or 'exact', got {self.constants_mode!r}")
        if self.weight_mode not in ("snr", "uniform"):
            raise ConfigError(f"run.weights must be 'snr' or 'uniform', got {self.weight_mode!r}")
        if self.clamp_policy not in ("floor", "discard"):
            raise ConfigError(f"run.clamp_policy must be 'floor' or 'discard', got {self.clamp_policy!r}")
        if self.power_floor <= 0:
            raise ConfigError(f"run.power_floor must be positive, got {self.power_floor}")
        if self.range_cap is not None and self.range_cap <= 0:
            raise ConfigError(f"run.range_cap must be positive, got {self.range_cap}")

    def constants(self) -> PropagationConstants:
        if self.constants_mode == "exact":
            return propagation_constants_exact(self.material, self.carrier)
        return propagation_constants_approx(self.material, self.carrier)

    def resolved_range_cap(self) -> float:
        if self.range_cap is not None:
            return self.range_cap
        r = self.room
        return math.sqrt(r.d1 ** 2 + r.d2 ** 2 + r.h ** 2)

    def power_floors(self) -> tuple[float, ...]:
        """Per-antenna power floor: absolute backstop or the range cap."""
        constants = self.constants()
        cap = self.resolved_range_cap()
        return tuple(
            max(self.power_floor, range_cap_floor(pa_y, cap, self.tx, constants, self.carrier))
            for pa_y in self.pa_layout.y_positions
        )

    def weight_spec(self) -> WeightSpec:
        if self.weight_mode == "uniform":
            return WeightSpec(mode="uniform")
        noise_powers = tuple(
            self.noise.noise_power(i) for i in range(self.pa_layout.count)
        )
        return WeightSpec(mode="snr", noise_powers=noise_powers)


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one localization trial against a known ground truth."""

    trial_index: int
    estimate: PositionEstimate
    error: float
    range_clamped: bool
    v_clamped: bool


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated error statistics at one (noise, antenna count) point."""

    noise_dbm: float
    pa_count: int
    trials: int
    mean_error: float
    variance: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]


@dataclass(frozen=True)
class MonteCarloResult:
    summary: SweepPoint
    trials: tuple[TrialResult, ...]


@dataclass(frozen=True, eq=False)
class HeatmapGrid:
    """Per-cell mean localization error over a room-spanning grid.

    mean_error and normalized are (ny, nx) arrays indexed [iy, ix];
    normalized is mean_error / grid maximum (all zeros for an all-zero
    grid), so values lie in [0, 1] with the worst cell at exactly 1.
    """

    nx: int
    ny: int
    x_centers: np.ndarray
    y_centers: np.ndarray
    mean_error: np.ndarray
    normalized: np.ndarray


def _trial(scenario: Scenario, user: UserPosition, trial_index: int) -> TrialResult:
    measurements = measurements_for_user(scenario, user, trial_index)
    estimate = locate(
        measurements,
        scenario.room.h,
        scenario.weight_spec(),
        clamp_policy=scenario.clamp_policy,
    )
    error = math.hypot(estimate.x - user.x, estimate.y - user.y)
    return TrialResult(
        trial_index=trial_index,
        estimate=estimate,
        error=error,
        range_clamped=estimate.range_clamped,
        v_clamped=estimate.v_clamped,
    )


def run_trial(scenario: Scenario, user_index: int = 0, trial_index: int = 0) -> TrialResult:
    """One measurement-collection plus locate pass, keyed by trial index."""
    return _trial(scenario, scenario.users[user_index], trial_index)


def _map_trials(fn, indices, workers: int):
    """Evaluate fn over trial indices, preserving index order."""
    if workers <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))


def _variance(errors: np.ndarray) -> float:
    if errors.size < 2:
        return 0.0
    return float(np.var(errors, ddof=1))


def monte_carlo(
    scenario: Scenario,
    trials: int = 1000,
    user_index: int = 0,
    workers: int = 1,
) -> MonteCarloResult:
    """Repeated localization of one user under independent noise draws.

    Reports the per-trial series plus the sample mean and unbiased
    (n - 1 denominator) sample variance of the error.
    """
    if trials < 1:
        raise ConfigError(f"run.trials must be >= 1, got {trials}")
    user = scenario.users[user_index]
    results = _map_trials(lambda t: _trial(scenario, user, t), range(trials), workers)
    errors = np.array([r.error for r in results])
    summary = SweepPoint(
        noise_dbm=scenario.noise.sigma2_dbm,
        pa_count=scenario.pa_layout.count,
        trials=trials,
        mean_error=float(np.mean(errors)),
        variance=_variance(errors),
    )
    return MonteCarloResult(summary=summary, trials=tuple(results))


def noise_sweep(
    scenario: Scenario,
    noise_levels_dbm: list[float],
    pa_counts: list[int],
    trials: int = 200,
    placement: str = "midpoint",
    user_index: int = 0,
    workers: int = 1,
) -> SweepResult:
    """Mean/variance of error over a (noise level, antenna count) grid.

    Antenna layouts are rebuilt by even placement for each count, and
    every grid point reuses the same trial keys, so comparisons across
    noise levels and counts are paired.
    """
    if trials < 1:
        raise ConfigError(f"run.trials must be >= 1, got {trials}")
    points = []
    for level in noise_levels_dbm:
        for count in pa_counts:
            sub = replace(
                scenario,
                pa_layout=even_pa_placement(scenario.room, count, placement),
                noise=replace(scenario.noise, sigma2_dbm=level, per_pa_noise=None),
            )
            user = sub.users[user_index]
            results = _map_trials(lambda t, s=sub, u=user: _trial(s, u, t), range(trials), workers)
            errors = np.array([r.error for r in results])
            points.append(
                SweepPoint(
                    noise_dbm=level,
                    pa_count=count,
                    trials=trials,
                    mean_error=float(np.mean(errors)),
                    variance=_variance(errors),
                )
            )
    return SweepResult(points=tuple(points))


def heatmap(
    scenario: Scenario,
    nx: int = 60,
    ny: int = 100,
    trials_per_cell: int = 50,
    workers: int = 1,
) -> HeatmapGrid:
    """Mean localization error for a synthetic user at each cell center.

    Cell (ix, iy) is centered at ((ix + 0.5) d1/nx, (iy + 0.5) d2/ny)
    and runs trials_per_cell trials keyed by consecutive trial indices
    (cell-major), keeping draws independent across cells and runs
    reproducible under any scheduling.
    """
    if nx < 2 or ny < 2:
        raise ConfigError(f"grid must be at least 2x2, got {nx}x{ny}")
    if trials_per_cell < 1:
        raise ConfigError(f"run.trials_per_cell must be >= 1, got {trials_per_cell}")
    x_centers = (np.arange(nx) + 0.5) * scenario.room.d1 / nx
    y_centers = (np.arange(ny) + 0.5) * scenario.room.d2 / ny

    def cell_mean(cell: int) -> float:
        iy, ix = divmod(cell, nx)
        user = UserPosition(float(x_centers[ix]), float(y_centers[iy]))
        base = cell * trials_per_cell
        errs = [_trial(scenario, user, base + t).error for t in range(trials_per_cell)]
        return float(np.mean(errs))

    means = _map_trials(cell_mean, range(nx * ny), workers)
    mean_error = np.array(means).reshape(ny, nx)
    peak = float(mean_error.max())
    normalized = mean_error / peak if peak > 0 else np.zeros_like(mean_error)
    return HeatmapGrid(
        nx=nx,
        ny=ny,
        x_centers=x_centers,
        y_centers=y_centers,
        mean_error=mean_error,
        normalized=normalized,
    )
