"""Quick invariant checks behind `nanofiber-cqed selftest`."""

from __future__ import annotations

import numpy as np

from .analytic import moment_derivatives, moments_from
from .cavity import empty_cavity_photon_number, CavityParams
from .liouvillian import SystemParams, apply_rhs, build_matrix
from .steady_state import propagate, scaled_residual, solve_steady


def _random_state(rng, n_max, support=None):
    dim = 2 * (n_max + 1)
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    if support is not None:
        keep = np.array([(i % (n_max + 1)) <= support for i in range(dim)])
        X[~keep, :] = 0
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


def _random_params(rng):
    return SystemParams(
        G=rng.uniform(0, 3), gamma=rng.uniform(0.5, 2), kappa=rng.uniform(0.5, 3),
        eta=rng.uniform(0, 0.5), delta_a=rng.uniform(-2, 2), delta_c=rng.uniform(-2, 2),
    )


def check_matrix_vs_rhs(rng):
    worst = 0.0
    for _ in range(10):
        p, rho = _random_params(rng), _random_state(rng, 5)
        lhs = (build_matrix(p, 5) @ rho.reshape(-1)).reshape(rho.shape)
        worst = max(worst, np.max(np.abs(lhs - apply_rhs(p, rho))))
    return worst < 1e-12, f"max |M vec(rho) - rhs| = {worst:.2e}"


def check_trace_hermiticity(rng):
    worst_tr = worst_h = 0.0
    for _ in range(10):
        p, rho = _random_params(rng), _random_state(rng, 5)
        d = apply_rhs(p, rho)
        worst_tr = max(worst_tr, abs(np.trace(d)))
        worst_h = max(worst_h, np.max(np.abs(d - d.conj().T)))
    return worst_tr < 1e-12 and worst_h < 1e-12, f"|Tr| = {worst_tr:.2e}, |d - d^dag| = {worst_h:.2e}"


def check_moments(rng):
    worst = 0.0
    for _ in range(10):
        p, rho = _random_params(rng), _random_state(rng, 6, support=4)
        d = apply_rhs(p, rho)
        direct = moments_from(d)
        eqs = moment_derivatives(p, moments_from(rho))
        worst = max(worst, max(abs(direct[k] - eqs[k]) for k in eqs))
    return worst < 1e-10, f"max moment mismatch = {worst:.2e}"


def check_steady_state(rng):
    p = _random_params(rng)
    rho, obs, n = solve_steady(p)
    res = scaled_residual(build_matrix(p, n), rho)
    eig = np.linalg.eigvalsh(rho).min()
    return res < 1e-10 and eig > -1e-8, f"residual = {res:.2e}, min eigenvalue = {eig:.2e}, n_max = {n}"


def check_node(rng):
    p = SystemParams(G=0.0, gamma=1.0, kappa=2.0, eta=0.3, delta_a=0.4, delta_c=0.7)
    _, obs, _ = solve_steady(p)
    ref = empty_cavity_photon_number(CavityParams(p.kappa, p.eta, 0.0, p.delta_c))
    err = abs(obs.N_cav - ref) / ref
    return err < 1e-10, f"node N_cav relative error = {err:.2e}"


def check_propagation(rng):
    p = _random_params(rng)
    rho_ss, _, n = solve_steady(p, n_max=6)
    rho0 = np.zeros_like(rho_ss)
    rho0[0, 0] = 1.0
    rho_t = propagate(p, rho0, 40.0 / min(p.kappa, p.gamma))
    err = np.max(np.abs(rho_t - rho_ss))
    return err < 1e-6, f"|rho(t) - rho_ss| = {err:.2e}"


CHECKS = (
    ("matrix-vs-rhs", check_matrix_vs_rhs),
    ("trace-hermiticity", check_trace_hermiticity),
    ("moment-equations", check_moments),
    ("steady-state", check_steady_state),
    ("node-empty-cavity", check_node),
    ("propagation", check_propagation),
)


def run_all(seed=1234):
    rng = np.random.default_rng(seed)
    for name, fn in CHECKS:
        passed, detail = fn(rng)
        yield name, bool(passed), detail
