"""Fabry-Perot cavity formed by two identical lossless fiber Bragg gratings."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import ConfigError, ExpansionDomain

# |Theta - m pi| beyond which the linearized round-trip phase is not trusted
EXPANSION_LIMIT = 0.3


@dataclass(frozen=True)
class CavitySpec:
    reflectivity: float  # |R|, amplitude
    length: float
    resonance_frequency: float
    resonance_order: int = 0
    reflection_phase: float = 0.0

    def __post_init__(self):
        if not 0 < self.reflectivity < 1:
            raise ConfigError(f"|R| must lie in (0, 1), got {self.reflectivity}")
        if not self.length > 0:
            raise ConfigError(f"cavity length must be positive, got {self.length}")

    @classmethod
    def from_power_reflectivity(cls, r2, length, resonance_frequency, **kw):
        return cls(float(np.sqrt(r2)), length, resonance_frequency, **kw)

    @property
    def power_transmissivity(self):
        return 1.0 - self.reflectivity**2

    @property
    def finesse(self):
        return np.pi * self.reflectivity / (1 - self.reflectivity**2)


@dataclass(frozen=True)
class DriveSpec:
    probe_frequency: float
    input_power: float

    def __post_init__(self):
        if self.input_power < 0:
            raise ConfigError(f"input power must be non-negative, got {self.input_power}")


@dataclass(frozen=True)
class CavityParams:
    kappa: float
    eta: float
    finesse: float
    detuning: float  # Delta_c = omega_p - omega_c


def damping_rate(spec: CavitySpec, v_g: float) -> float:
    R = spec.reflectivity
    return (1 - R**2) * v_g / (R * spec.length)


def pumping_rate(spec: CavitySpec, drive: DriveSpec, v_g: float) -> float:
    R = spec.reflectivity
    return float(np.sqrt((1 - R**2) * v_g * drive.input_power / (2 * R * spec.length * hbar * drive.probe_frequency)))


def cavity_params(spec: CavitySpec, drive: DriveSpec, v_g: float) -> CavityParams:
    return CavityParams(
        kappa=damping_rate(spec, v_g),
        eta=pumping_rate(spec, drive, v_g),
        finesse=spec.finesse,
        detuning=drive.probe_frequency - spec.resonance_frequency,
    )


def transmission(spec: CavitySpec, v_g: float, probe_frequency):
    """P_out/P_in with the round-trip phase linearized about the resonance."""
    R2 = spec.reflectivity**2
    detuning = np.asarray(probe_frequency) - spec.resonance_frequency
    phase_offset = spec.length / v_g * detuning
    if np.any(np.abs(phase_offset) > EXPANSION_LIMIT):
        warnings.warn(
            f"|Theta - m pi| up to {np.max(np.abs(phase_offset)):.3g} rad exceeds {EXPANSION_LIMIT}",
            ExpansionDomain,
            stacklevel=2,
        )
    return (1 - R2) ** 2 / ((1 - R2) ** 2 + 4 * R2 * phase_offset**2)


def empty_cavity_photon_number(params: CavityParams) -> float:
    return params.eta**2 / (params.kappa**2 / 4 + params.detuning**2)


def transmitted_power(kappa: float, probe_frequency: float, n_cav):
    return 0.5 * hbar * probe_frequency * kappa * np.asarray(n_cav)
