"""RSSI range estimation.

Inverts a received power back to a distance through the known channel
model:

    d_hat = lambda * e^(-alpha * pa_y) / (4 pi sqrt(P / P_k))

Noise can push a measured power to zero or below, where the inversion
is undefined; powers are therefore floored before inverting and the
affected measurement is flagged. The floor value doubles as a range
cap: flooring at the clean received power of a distance d_max bounds
every estimate by d_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .channel import CarrierConfig, PropagationConstants, TxConfig, received_power
from .errors import ConfigError
from .geometry import UserPosition

if TYPE_CHECKING:
    from .simulate import Scenario

__all__ = [
    "DEFAULT_POWER_FLOOR",
    "RangeMeasurement",
    "estimate_distance",
    "range_cap_floor",
    "collect_measurements",
    "measurements_for_user",
]

# Backstop floor for direct calls; ~8 orders below typical received
# powers, so it only engages on noise-driven non-positive readings.
DEFAULT_POWER_FLOOR = 1e-15


@dataclass(frozen=True)
class RangeMeasurement:
    """One antenna's power reading and inverted distance estimate.

    received_power is the raw reading P_ik; effective_power is the
    floored value actually inverted (they differ only when clamped).
    """

    pa_index: int
    pa_y: float
    received_power: float
    effective_power: float
    estimated_distance: float
    clamped: bool


def estimate_distance(
    p_received: float,
    p_tx: float,
    pa_y: float,
    alpha: float,
    carrier: CarrierConfig,
    floor: float = DEFAULT_POWER_FLOOR,
    pa_index: int = 0,
) -> RangeMeasurement:
    """Invert one received power to a distance estimate.

    Parameters
    ----------
    p_received : float
        Measured power P_ik in watts; may be negative under noise.
    p_tx : float
        Known transmit power P_k in watts, strictly positive.
    pa_y : float
        Waveguide coordinate of the measuring antenna.
    alpha : float
        Guide attenuation constant in Np/m.
    carrier : CarrierConfig
        Supplies the wavelength.
    floor : float
        Minimum power admitted to the inversion, strictly positive.
        Powers below it are replaced by it and flagged.
    pa_index : int
        Index recorded on the returned measurement.

    Returns
    -------
    RangeMeasurement
        Finite positive distance estimate with the clamp flag.
    """
    if p_tx <= 0:
        raise ConfigError(f"tx.power must be positive, got {p_tx}")
    if floor <= 0:
        raise ConfigError(f"power floor must be positive, got {floor}")
    clamped = p_received < floor
    p_eff = max(p_received, floor)
    d_hat = carrier.wavelength * math.exp(-alpha * pa_y) / (
        4.0 * math.pi * math.sqrt(p_eff / p_tx)
    )
    return RangeMeasurement(
        pa_index=pa_index,
        pa_y=pa_y,
        received_power=p_received,
        effective_power=p_eff,
        estimated_distance=d_hat,
        clamped=clamped,
    )


def range_cap_floor(
    pa_y: float,
    cap_distance: float,
    tx: TxConfig,
    constants: PropagationConstants,
    carrier: CarrierConfig,
) -> float:
    """Power floor equivalent to capping the estimate at cap_distance.

    Returns the clean received power of a target at cap_distance through
    the antenna at pa_y. Flooring measured powers at this value bounds
    the inverted distance by cap_distance, so a reading too weak to be
    produced from inside the capped region is clamped to its boundary
    instead of being extrapolated to an arbitrarily large range.
    """
    if cap_distance <= 0:
        raise ConfigError(f"range cap must be positive, got {cap_distance}")
    if math.isinf(cap_distance):
        return 0.0
    amplitude = carrier.wavelength * math.exp(-constants.alpha * pa_y) / (
        4.0 * math.pi * cap_distance
    )
    return amplitude ** 2 * tx.power


def measurements_for_user(
    scenario: "Scenario", user: UserPosition, trial_index: int = 0
) -> list[RangeMeasurement]:
    """One noisy range measurement per antenna for the given user.

    Antennas are read in layout order; antenna i draws its noise from
    the stream keyed by (master_seed, trial_index, i), so the list is
    reproducible and independent of scheduling.
    """
    constants = scenario.constants()
    floors = scenario.power_floors()
    out = []
    for i, pa_y in enumerate(scenario.pa_layout.y_positions):
        power = received_power(
            pa_y,
            user,
            scenario.room.h,
            scenario.tx,
            scenario.noise,
            constants,
            scenario.carrier,
            master_seed=scenario.master_seed,
            trial_index=trial_index,
            pa_index=i,
        )
        out.append(
            estimate_distance(
                power,
                scenario.tx.power,
                pa_y,
                constants.alpha,
                scenario.carrier,
                floor=floors[i],
                pa_index=i,
            )
        )
    return out


def collect_measurements(
    scenario: "Scenario", user_index: int = 0, trial_index: int = 0
) -> list[RangeMeasurement]:
    """Measurements for one of the scenario's ground-truth users."""
    return measurements_for_user(scenario, scenario.users[user_index], trial_index)
