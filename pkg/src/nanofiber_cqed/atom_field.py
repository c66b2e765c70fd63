"""Atom-cavity coupling, surface-shifted transition frequency and atomic decay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c, epsilon_0, hbar

from .errors import ConfigError, SurfaceCutoff
from .fiber_modes import GuidedModeSolution, guided_decay_rate

# vdW shift diverges at the surface; closer positions are refused
SURFACE_CUTOFF = 5e-9

KHZ_UM3 = 2 * np.pi * 1e3 * 1e-18  # angular-frequency * m^3 per (kHz um^3)


@dataclass(frozen=True)
class AtomSpec:
    """Two-level atom driven on a sigma+ transition.

    The vdW coefficients are stored as C3/hbar in rad/s * m^3.
    """

    bare_frequency: float
    natural_linewidth: float
    c3_ground: float
    c3_excited: float
    dipole_component: int = 1

    def __post_init__(self):
        if not self.natural_linewidth > 0:
            raise ConfigError("natural linewidth must be positive")
        if self.dipole_component != 1:
            raise ConfigError("only the sigma+ transition (q=+1) is supported")
        if not self.c3_excited > self.c3_ground > 0:
            raise ConfigError("need C3e > C3g > 0")

    @property
    def dipole_moment(self) -> float:
        # free-space relation gamma0 = omega0^3 d^2 / (3 pi eps0 hbar c^3)
        w0 = self.bare_frequency
        return float(np.sqrt(3 * np.pi * epsilon_0 * hbar * c**3 * self.natural_linewidth / w0**3))


def cesium_d2(wavelength=852e-9, linewidth_mhz=5.25, c3g_khz_um3=1.56, c3e_khz_um3=3.09) -> AtomSpec:
    """Cs D2 cycling transition 6S1/2 F=4 M=4 <-> 6P3/2 F'=5 M'=5."""
    return AtomSpec(
        bare_frequency=2 * np.pi * c / wavelength,
        natural_linewidth=2 * np.pi * linewidth_mhz * 1e6,
        c3_ground=c3g_khz_um3 * KHZ_UM3,
        c3_excited=c3e_khz_um3 * KHZ_UM3,
    )


@dataclass(frozen=True)
class AtomPosition:
    r: float
    phi: float = 0.0
    z: float = 0.0

    @classmethod
    def above_surface(cls, core_radius, distance, z=0.0, phi=0.0):
        return cls(core_radius + distance, phi, z)


def coupling_G(mode: GuidedModeSolution, cav, atom: AtomSpec, pos: AtomPosition) -> float:
    """Real coupling coefficient for the standing-wave cavity mode.

    `mode` must be solved at the cavity resonance frequency.
    """
    d = atom.dipole_moment
    prefactor = np.sqrt(mode.omega * d**2 / (epsilon_0 * hbar * cav.length))
    standing = np.cos(mode.beta * pos.z + cav.resonance_order * np.pi / 2)
    return float(prefactor * mode.e_minus1(pos.r) * standing)


def vdw_shift(atom: AtomSpec, pos: AtomPosition, core_radius: float) -> float:
    distance = pos.r - core_radius
    if distance < SURFACE_CUTOFF:
        raise SurfaceCutoff(
            f"r - a = {distance:.3g} m is below the {SURFACE_CUTOFF:g} m surface cutoff"
        )
    return -(atom.c3_excited - atom.c3_ground) / distance**3


def detuning_atom(drive, atom: AtomSpec, pos: AtomPosition, core_radius: float) -> float:
    """Delta_a = omega_p - omega_a(r)."""
    return (drive.probe_frequency - atom.bare_frequency) - vdw_shift(atom, pos, core_radius)


def total_decay_rate(mode: GuidedModeSolution, atom: AtomSpec, r) -> float:
    # radiation-mode channel approximated by its free-space value
    return guided_decay_rate(mode, atom, r) + atom.natural_linewidth
