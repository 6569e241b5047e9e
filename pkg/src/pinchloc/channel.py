"""Free-space channel and lossy dielectric waveguide propagation.

The uplink signal of a user reaches the access point through one
pinching antenna at a time: a spherical-wave free-space segment from
the user up to the antenna, then a guided segment of length y_li along
the waveguide. The received power of that two-segment path is

    P = | lambda * e^(-alpha * y_li) / (4 pi d) |^2 * P_k + chi

where d is the 3-D antenna-user distance, alpha the guide attenuation
constant, P_k the transmit power, and chi an additive zero-mean
Gaussian perturbation of the power readout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError, EvanescentModeError
from .geometry import UserPosition, distance_3d
from . import streams

__all__ = [
    "SPEED_OF_LIGHT",
    "CHI_STD_SCALE",
    "CarrierConfig",
    "WaveguideMaterial",
    "PropagationConstants",
    "TxConfig",
    "NoiseModel",
    "large_scale_gain",
    "small_scale_phase",
    "propagation_constants_approx",
    "propagation_constants_exact",
    "waveguide_transfer",
    "received_signal",
    "received_power",
]

SPEED_OF_LIGHT = 299792458.0

# Standard deviation of the power-domain perturbation chi, as a fraction
# of the configured linear noise power. The noise power alone does not
# fix chi's scale (a variance in W^2 and a standard deviation in W differ
# by seven orders of magnitude at -40 dBm); 0.3 calibrates the simulator
# to sub-meter mean errors in a typical room. Override per NoiseModel.
CHI_STD_SCALE = 0.3


@dataclass(frozen=True)
class CarrierConfig:
    """Carrier frequency and derived wavelength."""

    f_c: float
    c: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if self.f_c <= 0:
            raise ConfigError(f"tx.f_c must be positive, got {self.f_c}")

    @property
    def wavelength(self) -> float:
        return self.c / self.f_c


@dataclass(frozen=True)
class WaveguideMaterial:
    """Dielectric parameters of the waveguide.

    k_c is the cut-off wavenumber of the guided mode; the default 0
    selects the unbounded-dielectric approximation.
    """

    eps_r: float
    tan_delta: float
    k_c: float = 0.0

    def __post_init__(self) -> None:
        if self.eps_r < 1:
            raise ConfigError(f"waveguide.eps_r must be >= 1, got {self.eps_r}")
        if not 0 <= self.tan_delta < 0.1:
            raise ConfigError(f"waveguide.tan_delta must be in [0, 0.1), got {self.tan_delta}")
        if self.k_c < 0:
            raise ConfigError(f"waveguide.k_c must be >= 0, got {self.k_c}")


@dataclass(frozen=True)
class PropagationConstants:
    """Attenuation constant alpha (Np/m) and phase constant beta (rad/m)."""

    alpha: float
    beta: float

    @property
    def gamma(self) -> complex:
        return complex(self.alpha, self.beta)


@dataclass(frozen=True)
class TxConfig:
    """Transmit power and unit-magnitude symbol."""

    power: float
    symbol: complex = 1 + 0j

    def __post_init__(self) -> None:
        if self.power <= 0:
            raise ConfigError(f"tx.power must be positive, got {self.power}")
        if abs(abs(self.symbol) - 1.0) > 1e-12:
            raise ConfigError(f"tx.symbol must have unit magnitude, got |s|={abs(self.symbol)}")


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise configuration.

    sigma2_dbm is the configured noise power. chi, the power-domain
    perturbation, is drawn as N(0, chi_std^2) with chi_std equal to
    chi_std_watts when given, otherwise chi_std_scale * sigma2_watts.
    per_pa_noise optionally overrides the per-antenna noise powers N_i
    used for SNR weighting; they default to sigma2_watts everywhere.
    """

    sigma2_dbm: float
    per_pa_noise: tuple[float, ...] | None = None
    chi_std_scale: float = CHI_STD_SCALE
    chi_std_watts: float | None = None

    def __post_init__(self) -> None:
        if self.chi_std_scale < 0:
            raise ConfigError(f"noise.chi_std_scale must be >= 0, got {self.chi_std_scale}")
        if self.chi_std_watts is not None and self.chi_std_watts < 0:
            raise ConfigError(f"noise.chi_std_watts must be >= 0, got {self.chi_std_watts}")
        if self.per_pa_noise is not None:
            object.__setattr__(self, "per_pa_noise", tuple(float(n) for n in self.per_pa_noise))
            if any(n < 0 for n in self.per_pa_noise):
                raise ConfigError("noise.per_pa_noise entries must be >= 0")

    @property
    def sigma2_watts(self) -> float:
        return dbm_to_watts(self.sigma2_dbm)

    @property
    def chi_std(self) -> float:
        if self.chi_std_watts is not None:
            return self.chi_std_watts
        return self.chi_std_scale * self.sigma2_watts

    def noise_power(self, pa_index: int) -> float:
        if self.per_pa_noise is not None:
            return self.per_pa_noise[pa_index]
        return self.sigma2_watts


def dbm_to_watts(dbm: float) -> float:
    """Convert a dBm level to watts: 10^(dbm/10) / 1000."""
    return 10.0 ** (dbm / 10.0) / 1000.0


def large_scale_gain(d: float, carrier: CarrierConfig) -> float:
    """Free-space amplitude gain lambda / (4 pi d).

    Parameters
    ----------
    d : float
        Propagation distance in meters, strictly positive.
    carrier : CarrierConfig
        Supplies the wavelength.

    Returns
    -------
    float
        Dimensionless amplitude, strictly decreasing in d.
    """
    if d <= 0:
        raise DomainError(f"distance must be positive, got {d}")
    return carrier.wavelength / (4.0 * math.pi * d)


def small_scale_phase(d: float, carrier: CarrierConfig) -> complex:
    """Unit-magnitude phase factor exp(-j 2 pi d / lambda)."""
    if d < 0:
        raise DomainError(f"distance must be >= 0, got {d}")
    return cmath.exp(-2j * math.pi * d / carrier.wavelength)


def propagation_constants_approx(
    material: WaveguideMaterial, carrier: CarrierConfig
) -> PropagationConstants:
    """Low-loss constants for a wave guided in an unbounded dielectric.

    alpha = pi * sqrt(eps_r) * tan_delta / lambda
    beta  = 2 pi * sqrt(eps_r) / lambda
    """
    lam = carrier.wavelength
    root_eps = math.sqrt(material.eps_r)
    alpha = math.pi * root_eps * material.tan_delta / lam
    beta = 2.0 * math.pi * root_eps / lam
    return PropagationConstants(alpha=alpha, beta=beta)


def propagation_constants_exact(
    material: WaveguideMaterial, carrier: CarrierConfig
) -> PropagationConstants:
    """Low-loss constants honoring the mode cut-off wavenumber k_c.

    With k_r = 2 pi sqrt(eps_r) / lambda the lossless wavenumber:

    beta  = sqrt(k_r^2 - k_c^2)
    alpha = k_r^2 * tan_delta / (2 beta)

    Collapses to the approximate form as k_c -> 0. Raises
    EvanescentModeError when k_c >= k_r (no propagating wave).
    """
    k_r = 2.0 * math.pi * math.sqrt(material.eps_r) / carrier.wavelength
    if material.k_c >= k_r:
        raise EvanescentModeError(
            f"cut-off wavenumber {material.k_c} >= material wavenumber {k_r}"
        )
    beta = math.sqrt(k_r ** 2 - material.k_c ** 2)
    alpha = k_r ** 2 * material.tan_delta / (2.0 * beta)
    return PropagationConstants(alpha=alpha, beta=beta)


def waveguide_transfer(y: float, constants: PropagationConstants) -> complex:
    """In-guide transfer factor e^(-(alpha + j beta) y) over length y."""
    if y < 0:
        raise DomainError(f"guide length must be >= 0, got {y}")
    return cmath.exp(-complex(constants.alpha, constants.beta) * y)


def received_signal(
    pa_y: float,
    user: UserPosition,
    h: float,
    tx: TxConfig,
    noise: NoiseModel,
    constants: PropagationConstants,
    carrier: CarrierConfig,
    master_seed: int = 0,
    trial_index: int = 0,
    pa_index: int = 0,
) -> complex:
    """Complex baseband sample at the access point for one antenna slot.

    Composes free-space gain and phase with the guided-segment transfer,
    scales by sqrt(P_k) s_k, and adds complex AWGN of variance
    sigma2_watts drawn from the keyed stream. Noiseless configurations
    produce a deterministic sample.
    """
    d = distance_3d(pa_y, user, h)
    gain = large_scale_gain(d, carrier) * small_scale_phase(d, carrier)
    guided = waveguide_transfer(pa_y, constants)
    sample = gain * guided * math.sqrt(tx.power) * tx.symbol
    sigma2 = noise.sigma2_watts
    if sigma2 > 0:
        sample += streams.complex_normal(master_seed, trial_index, pa_index, sigma2)
    return sample


def clean_received_power(
    pa_y: float,
    user: UserPosition,
    h: float,
    tx: TxConfig,
    constants: PropagationConstants,
    carrier: CarrierConfig,
) -> float:
    """Noiseless received power of one antenna path in watts."""
    d = distance_3d(pa_y, user, h)
    amplitude = large_scale_gain(d, carrier) * math.exp(-constants.alpha * pa_y)
    return amplitude ** 2 * tx.power


def received_power(
    pa_y: float,
    user: UserPosition,
    h: float,
    tx: TxConfig,
    noise: NoiseModel,
    constants: PropagationConstants,
    carrier: CarrierConfig,
    master_seed: int = 0,
    trial_index: int = 0,
    pa_index: int = 0,
) -> float:
    """Noisy received power of one antenna path in watts.

    Returns |lambda e^(-alpha y_li) / (4 pi d)|^2 P_k + chi with chi a
    zero-mean Gaussian of standard deviation noise.chi_std drawn from
    the stream keyed by (master_seed, trial_index, pa_index). May be
    negative under heavy noise; ranging clamps downstream.
    """
    power = clean_received_power(pa_y, user, h, tx, constants, carrier)
    chi_std = noise.chi_std
    if chi_std > 0:
        power += chi_std * streams.standard_normal(master_seed, trial_index, pa_index)
    return power
