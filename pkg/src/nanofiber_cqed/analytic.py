"""
Closed-form weak-drive steady state, the low-order moment equations, and
the vacuum-Rabi peak estimate.

Nothing here calls the master-equation solver; exact-vs-approximate
comparisons depend on the two paths staying independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator
from .liouvillian import SystemParams, n_max_of, operators


@dataclass(frozen=True)
class WeakDriveSolution:
    mean_field: complex
    coherence: complex
    N_cav: float
    P_e: float
    cross_sym: float  # <a^dag sigma + a sigma^dag>
    cross_asym: complex  # <a^dag sigma - a sigma^dag>, purely imaginary
    denominator: complex


def denominator(p: SystemParams) -> complex:
    return (
        p.G**2 + p.kappa * p.gamma / 4 - p.delta_c * p.delta_a
        - 0.5j * (p.delta_c * p.gamma + p.delta_a * p.kappa)
    )


def photon_number(p: SystemParams) -> float:
    den = (p.G**2 + p.kappa * p.gamma / 4 - p.delta_c * p.delta_a) ** 2 + (
        p.delta_c * p.gamma + p.delta_a * p.kappa
    ) ** 2 / 4
    return p.eta**2 * (p.delta_a**2 + p.gamma**2 / 4) / den


def excited_population(p: SystemParams) -> float:
    den = (p.G**2 + p.kappa * p.gamma / 4 - p.delta_c * p.delta_a) ** 2 + (
        p.delta_c * p.gamma + p.delta_a * p.kappa
    ) ** 2 / 4
    return p.eta**2 * p.G**2 / den


def weak_drive_solution(p: SystemParams) -> WeakDriveSolution:
    D = denominator(p)
    if abs(D) < 1e-30:
        raise DegenerateDenominator(f"|D| = {abs(D):.3g}")
    scale = p.eta**2 / abs(D) ** 2
    return WeakDriveSolution(
        mean_field=-(p.eta / D) * (1j * p.delta_a - p.gamma / 2),
        coherence=-(p.eta / D) * p.G,
        N_cav=photon_number(p),
        P_e=excited_population(p),
        cross_sym=-scale * p.G * p.gamma,
        cross_asym=-2j * scale * p.G * p.delta_a,
        denominator=D,
    )


def moment_derivatives(p: SystemParams, m: dict) -> dict:
    """Right-hand sides of the equations of motion for the low-order moments.

    `m` maps names to expectation values: a, sigma, a_sz (<a sigma_z>),
    n (<a^dag a>), ee (<sigma^dag sigma>), n_sz (<a^dag a sigma_z>),
    sym (<a^dag sigma + a sigma^dag>), asym (<a^dag sigma - a sigma^dag>).
    """
    G, eta, k, g = p.G, p.eta, p.kappa, p.gamma
    delta = p.cavity_atom_detuning
    a, s = m["a"], m["sigma"]
    return {
        "a": 1j * p.delta_c * a + G * s - k / 2 * a + eta,
        "sigma": 1j * p.delta_a * s + G * m["a_sz"] - g / 2 * s,
        "n": G * m["sym"] - k * m["n"] + eta * (np.conj(a) + a),
        "ee": -G * m["sym"] - g * m["ee"],
        "sym": 1j * delta * m["asym"] + 2 * G * (m["n_sz"] + m["ee"])
        - (k + g) / 2 * m["sym"] + eta * (s + np.conj(s)),
        "asym": 1j * delta * m["sym"] - (k + g) / 2 * m["asym"] + eta * (s - np.conj(s)),
    }


def linearized_moments(sol: WeakDriveSolution) -> dict:
    """Moments of the weak-drive solution with <a sz> = -<a>, <n sz> = -<n>."""
    return {
        "a": sol.mean_field,
        "sigma": sol.coherence,
        "a_sz": -sol.mean_field,
        "n": sol.N_cav,
        "ee": sol.P_e,
        "n_sz": -sol.N_cav,
        "sym": sol.cross_sym,
        "asym": sol.cross_asym,
    }


def moments_from(rho: np.ndarray) -> dict:
    ops = operators(n_max_of(rho))
    a, ad, s, sd, sz = ops.a, ops.adag, ops.sigma, ops.sigma_dag, ops.sigma_z

    def ex(op):
        return complex(np.trace(op @ rho))

    return {
        "a": ex(a),
        "sigma": ex(s),
        "a_sz": ex(a @ sz),
        "n": ex(ad @ a),
        "ee": ex(sd @ s),
        "n_sz": ex(ad @ a @ sz),
        "sym": ex(ad @ s + a @ sd),
        "asym": ex(ad @ s - a @ sd),
    }


def rabi_peak_positions(G, kappa, gamma, delta_vdw):
    half = np.sqrt(G**2 + kappa * gamma / 4 + delta_vdw**2 / 4)
    return delta_vdw / 2 - half, delta_vdw / 2 + half


def linearization_check(rho: np.ndarray):
    """(|<a sz> + <a>|, |<a^dag a sz> + <a^dag a>|) for an exact steady state."""
    m = moments_from(rho)
    return abs(m["a_sz"] + m["a"]), abs(m["n_sz"] + m["n"])
