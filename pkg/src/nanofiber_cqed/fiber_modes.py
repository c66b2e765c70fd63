"""
Fundamental HE11 mode of a step-index nanofiber.

The mode is labelled by its propagation direction f and the rotation sense
l of its quasi-circular polarization.  Everything here is computed for the
reference mode (f=+, l=+); magnitudes of the other three follow by symmetry.

Profile components use the standard Bessel-function form with
h = sqrt(n1^2 k^2 - beta^2) inside the core and q = sqrt(beta^2 - n2^2 k^2)
outside.  The amplitude is fixed by

    int_0^{2pi} dphi int_0^inf n(r)^2 |e|^2 r dr = 1 .
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c, epsilon_0, hbar
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import jv, kv

from .errors import ConfigError, MultiMode, NoGuidedMode

# first zero of J0: cutoff of the TE01/TM01/HE21 modes
SINGLE_MODE_CUTOFF = 2.404825557695773

SCAN_POINTS = 2000
BETA_PRIME_REL_STEP = 1e-6
DECAY_LENGTHS = 20.0


@dataclass(frozen=True)
class FiberSpec:
    core_radius: float
    core_index: float = 1.45
    clad_index: float = 1.0

    def __post_init__(self):
        if not self.core_radius > 0:
            raise ConfigError(f"core radius must be positive, got {self.core_radius}")
        if not self.core_index > self.clad_index >= 1.0:
            raise ConfigError(
                f"need core_index > clad_index >= 1, got {self.core_index}, {self.clad_index}"
            )

    def v_parameter(self, omega):
        return omega / c * self.core_radius * np.sqrt(self.core_index**2 - self.clad_index**2)


def _jp(n, x):
    return 0.5 * (jv(n - 1, x) - jv(n + 1, x))


def _kp(n, x):
    return -0.5 * (kv(n - 1, x) + kv(n + 1, x))


def dispersion_residual(spec: FiberSpec, omega: float, beta):
    """Residual of the HE11 eigenvalue equation, in the dimensionless form

        J0(u)/(u J1(u)) = -(n1^2+n2^2)/(2 n1^2) K1'(w)/(w K1(w)) + 1/u^2
                          - sqrt[((n1^2-n2^2)/(2 n1^2))^2 (K1'(w)/(w K1(w)))^2
                                 + beta^2/(n1^2 k^2) (1/w^2 + 1/u^2)^2]

    with u = h a and w = q a.
    """
    n1, n2, a = spec.core_index, spec.clad_index, spec.core_radius
    k = omega / c
    beta = np.asarray(beta, dtype=float)
    u = a * np.sqrt(n1**2 * k**2 - beta**2)
    w = a * np.sqrt(beta**2 - n2**2 * k**2)
    kr = _kp(1, w) / (w * kv(1, w))
    lhs = jv(0, u) / (u * jv(1, u))
    root = np.sqrt(
        ((n1**2 - n2**2) / (2 * n1**2)) ** 2 * kr**2
        + beta**2 / (n1**2 * k**2) * (1 / w**2 + 1 / u**2) ** 2
    )
    rhs = -(n1**2 + n2**2) / (2 * n1**2) * kr + 1 / u**2 - root
    return lhs - rhs


def propagation_constant(spec: FiberSpec, omega: float) -> float:
    V = spec.v_parameter(omega)
    if V >= SINGLE_MODE_CUTOFF:
        raise MultiMode(f"V = {V:.4f} >= {SINGLE_MODE_CUTOFF:.4f}; fiber is not single-mode")
    k = omega / c
    lo, hi = spec.clad_index * k, spec.core_index * k
    grid = np.linspace(lo, hi, SCAN_POINTS + 2)[1:-1]
    with np.errstate(all="ignore"):
        vals = dispersion_residual(spec, omega, grid)
    ok = np.isfinite(vals)
    sign_change = np.flatnonzero(ok[:-1] & ok[1:] & (np.sign(vals[:-1]) != np.sign(vals[1:])))
    if sign_change.size == 0:
        raise NoGuidedMode(f"no HE11 root in ({lo:.6g}, {hi:.6g}) rad/m")
    i = sign_change[0]
    return brentq(
        lambda b: float(dispersion_residual(spec, omega, b)),
        grid[i], grid[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500,
    )


@dataclass(frozen=True)
class GuidedModeSolution:
    """Solved HE11 mode at one angular frequency.

    `amplitude` is the normalization constant multiplying the bare Bessel
    profile; `s` is the usual hybrid-mode parameter.
    """

    spec: FiberSpec
    omega: float
    beta: float
    beta_prime: float
    h: float
    q: float
    s: float
    amplitude: float

    @property
    def group_velocity(self) -> float:
        return 1.0 / self.beta_prime

    @property
    def wavenumber(self) -> float:
        return self.omega / c

    @property
    def effective_index(self) -> float:
        return self.beta / self.wavenumber

    def profile(self, r):
        """Return (|e_r|, |e_phi|, |e_z|) at radius r (scalar or array)."""
        return _bare_profile(self.spec, self.beta, self.h, self.q, self.s, r, self.amplitude)

    def e_minus1(self, r):
        er, ephi, _ = self.profile(r)
        return (er + ephi) / np.sqrt(2)

    def e_plus1(self, r):
        er, ephi, _ = self.profile(r)
        return (er - ephi) / np.sqrt(2)


def _bare_profile(spec, beta, h, q, s, r, amplitude=1.0):
    a = spec.core_radius
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    er = np.empty_like(r)
    ephi = np.empty_like(r)
    ez = np.empty_like(r)

    inside = r < a
    ri = r[inside]
    er[inside] = beta / (2 * h) * ((1 - s) * jv(0, h * ri) - (1 + s) * jv(2, h * ri))
    ephi[inside] = beta / (2 * h) * ((1 - s) * jv(0, h * ri) + (1 + s) * jv(2, h * ri))
    ez[inside] = jv(1, h * ri)

    ro = r[~inside]
    scale = jv(1, h * a) / kv(1, q * a)
    er[~inside] = scale * beta / (2 * q) * ((1 - s) * kv(0, q * ro) + (1 + s) * kv(2, q * ro))
    ephi[~inside] = scale * beta / (2 * q) * ((1 - s) * kv(0, q * ro) - (1 + s) * kv(2, q * ro))
    ez[~inside] = scale * kv(1, q * ro)

    out = tuple(amplitude * np.abs(x) for x in (er, ephi, ez))
    if scalar:
        return tuple(float(x[0]) for x in out)
    return out


def _hybrid_parameter(spec, omega, beta):
    a = spec.core_radius
    k = omega / c
    h = np.sqrt(spec.core_index**2 * k**2 - beta**2)
    q = np.sqrt(beta**2 - spec.clad_index**2 * k**2)
    u, w = h * a, q * a
    s = (1 / u**2 + 1 / w**2) / (_jp(1, u) / (u * jv(1, u)) + _kp(1, w) / (w * kv(1, w)))
    return h, q, s


def _norm_integral(spec, beta, h, q, s, amplitude=1.0):
    a = spec.core_radius

    def integrand(r, n):
        er, ephi, ez = _bare_profile(spec, beta, h, q, s, r, amplitude)
        return n**2 * (er**2 + ephi**2 + ez**2) * r

    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    core = quad(integrand, 0.0, a, args=(spec.core_index,), **opts)[0]
    clad = quad(integrand, a, a + DECAY_LENGTHS / q, args=(spec.clad_index,), **opts)[0]
    return 2 * np.pi * (core + clad)


def solve_dispersion(spec: FiberSpec, omega: float) -> GuidedModeSolution:
    beta = propagation_constant(spec, omega)
    dw = BETA_PRIME_REL_STEP * omega
    beta_prime = (propagation_constant(spec, omega + dw) - propagation_constant(spec, omega - dw)) / (2 * dw)
    h, q, s = _hybrid_parameter(spec, omega, beta)
    amplitude = 1.0 / np.sqrt(_norm_integral(spec, beta, h, q, s))
    return GuidedModeSolution(spec, omega, beta, beta_prime, h, q, s, amplitude)


def normalization_integral(sol: GuidedModeSolution) -> float:
    return _norm_integral(sol.spec, sol.beta, sol.h, sol.q, sol.s, sol.amplitude)


def mode_profile(sol: GuidedModeSolution, r):
    """(|e_r|, |e_phi|, |e_z|, |e_-1|) of the reference mode at radius r >= 0."""
    if np.any(np.asarray(r) < 0):
        raise ValueError("radial coordinate must be non-negative")
    er, ephi, ez = sol.profile(r)
    return er, ephi, ez, (er + ephi) / np.sqrt(2)


def guided_decay_rate(sol: GuidedModeSolution, atom, r) -> float:
    """Spontaneous emission rate into the guided modes for a sigma+ dipole.

    The sum over f and l reduces to 2(|e_-1|^2 + |e_+1|^2) = 2(|e_r|^2 + |e_phi|^2):
    the l=+ modes contribute through |e_-1|, the l=- modes through |e_+1|.
    """
    d2 = atom.dipole_moment**2
    em1 = sol.e_minus1(r)
    ep1 = sol.e_plus1(r)
    total = 2.0 * (em1**2 + ep1**2)
    return sol.omega * d2 / (2 * epsilon_0 * hbar * sol.group_velocity) * total
