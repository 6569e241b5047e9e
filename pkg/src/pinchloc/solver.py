"""Weighted least-squares lateration.

Squaring the range equation d^2 = x^2 + (y_li - y)^2 + h^2 and
substituting v = x^2 + y^2 linearizes the problem: each antenna
contributes one row of

    [-2 y_li, 1] [y, v]^T = d_hat^2 - y_li^2 - h^2

The stacked system A Y = b is solved by SNR-weighted least squares and
x is recovered from v afterwards. Two distinct antenna coordinates
suffice for rank 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RankDeficiencyError, SolveError
from .ranging import RangeMeasurement

__all__ = [
    "CONDITION_LIMIT",
    "WEIGHT_NOISE_FLOOR",
    "LinearSystem",
    "WeightSpec",
    "PositionEstimate",
    "build_system",
    "solve_wls",
    "recover_position",
    "locate",
]

# Condition-number guard on the 2x2 normal matrix.
CONDITION_LIMIT = 1e12

# Noise powers below this are lifted before dividing, so noiseless
# configurations produce finite SNR weights.
WEIGHT_NOISE_FLOOR = 1e-18


@dataclass(frozen=True)
class WeightSpec:
    """Row weighting mode: "snr" uses P_ik / N_i, "uniform" uses 1."""

    mode: str = "snr"
    noise_powers: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("snr", "uniform"):
            raise ValueError(f"weight mode must be 'snr' or 'uniform', got {self.mode!r}")

    def weights(self, measurements: list[RangeMeasurement]) -> np.ndarray:
        if self.mode == "uniform":
            return np.ones(len(measurements))
        if self.noise_powers is not None:
            # noise_powers is indexed by antenna, so subsets stay aligned
            noise = np.array([self.noise_powers[m.pa_index] for m in measurements])
        else:
            noise = np.ones(len(measurements))
        noise = np.maximum(noise, WEIGHT_NOISE_FLOOR)
        powers = np.array([m.effective_power for m in measurements])
        return powers / noise


@dataclass(frozen=True)
class LinearSystem:
    """Stacked lateration rows A [y, v]^T = b with positive weights."""

    a_matrix: np.ndarray
    b_vector: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if len(self.a_matrix) < 2:
            raise RankDeficiencyError("lateration needs at least 2 rows")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be strictly positive")


@dataclass(frozen=True)
class PositionEstimate:
    """Recovered 2-D coordinate with solve diagnostics."""

    x: float
    y: float
    v_hat: float
    residual_norm: float
    v_clamped: bool
    range_clamped: bool = False


def build_system(
    measurements: list[RangeMeasurement],
    h: float,
    weights: WeightSpec = WeightSpec(),
) -> LinearSystem:
    """Assemble the linear lateration system from range measurements.

    Raises RankDeficiencyError when fewer than two measurements are
    given or all antenna coordinates coincide.
    """
    if len(measurements) < 2:
        raise RankDeficiencyError(
            f"need at least 2 measurements, got {len(measurements)}"
        )
    ys = np.array([m.pa_y for m in measurements])
    if np.unique(ys).size < 2:
        raise RankDeficiencyError("all antenna coordinates identical; rank < 2")
    d_hat = np.array([m.estimated_distance for m in measurements])
    a_matrix = np.column_stack([-2.0 * ys, np.ones(len(ys))])
    b_vector = d_hat ** 2 - ys ** 2 - h ** 2
    return LinearSystem(a_matrix=a_matrix, b_vector=b_vector, weights=weights.weights(measurements))


def solve_wls(system: LinearSystem) -> tuple[float, float, float]:
    """Minimize ||w^(1/2) (A Y - b)||^2 over Y = [y, v].

    Returns (y_hat, v_hat, residual_norm). Raises SolveError when the
    weighted normal matrix is numerically rank deficient.
    """
    a = system.a_matrix
    b = system.b_vector
    w = system.weights
    normal = a.T @ (w[:, None] * a)
    if not np.all(np.isfinite(normal)) or np.linalg.cond(normal) > CONDITION_LIMIT:
        raise SolveError("weighted normal matrix is numerically rank deficient")
    # Factorize the square-root-weighted rows instead of solving the
    # normal equations: rounding is then amplified by cond(A), not its
    # square, which keeps the minimizer stable under a common rescaling
    # of the weights. Normalizing by the largest weight removes the
    # scale before it can distort the row magnitudes.
    root_w = np.sqrt(w / w.max())
    solution, *_ = np.linalg.lstsq(root_w[:, None] * a, root_w * b, rcond=None)
    y_hat, v_hat = solution
    residual = np.sqrt(w) * (a @ solution - b)
    return float(y_hat), float(v_hat), float(np.linalg.norm(residual))


def recover_position(
    y_hat: float,
    v_hat: float,
    residual_norm: float = 0.0,
    range_clamped: bool = False,
) -> PositionEstimate:
    """Recover x from v = x^2 + y^2, taking the in-room root x >= 0.

    The mirrored solution at -x lies behind the waveguide wall, outside
    the room, so the positive root is always selected. A noise-driven
    negative v - y^2 is clamped to zero and flagged.
    """
    gap = v_hat - y_hat ** 2
    v_clamped = gap < 0
    x = math.sqrt(max(gap, 0.0))
    return PositionEstimate(
        x=x,
        y=y_hat,
        v_hat=v_hat,
        residual_norm=residual_norm,
        v_clamped=v_clamped,
        range_clamped=range_clamped,
    )


def locate(
    measurements: list[RangeMeasurement],
    h: float,
    weights: WeightSpec = WeightSpec(),
    clamp_policy: str = "floor",
) -> PositionEstimate:
    """Full pipeline: build the system, solve, recover the coordinate.

    clamp_policy controls how floor-clamped measurements enter the
    system: "floor" keeps them with their floored power (they read as
    at-the-cap ranges with small SNR weights); "discard" drops them
    when at least two distinct-coordinate unclamped measurements
    remain, and otherwise falls back to keeping everything.
    """
    if clamp_policy not in ("floor", "discard"):
        raise ValueError(f"clamp policy must be 'floor' or 'discard', got {clamp_policy!r}")
    kept = measurements
    if clamp_policy == "discard":
        clean = [m for m in measurements if not m.clamped]
        if len({m.pa_y for m in clean}) >= 2:
            kept = clean
    y_hat, v_hat, residual = solve_wls(build_system(kept, h, weights))
    return recover_position(
        y_hat,
        v_hat,
        residual,
        range_clamped=any(m.clamped for m in measurements),
    )
