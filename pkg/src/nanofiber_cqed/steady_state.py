"""Stationary density matrix, observables, and a time-propagation cross-check."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import G2Undefined, SingularSystem, StepTooLarge, TruncationNotConverged
from .liouvillian import SystemParams, build_matrix, n_max_of, operators

G2_FLOOR = 1e-12
CONVERGENCE_RTOL = 1e-6
N_MAX_CAP = 24
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Observables:
    N_cav: float
    g2: float  # nan when N_cav < G2_FLOOR
    P_e: float
    P_out: float  # nan unless kappa and probe frequency are supplied
    mean_field: complex
    coherence: complex


def observables_from(rho, kappa=None, probe_frequency=None, require_g2=False) -> Observables:
    ops = operators(n_max_of(rho))
    a, ad, s, sd = ops.a, ops.adag, ops.sigma, ops.sigma_dag

    def expect(op):
        return np.trace(op @ rho)

    n_cav = float(expect(ad @ a).real)
    pair = float(expect(ad @ ad @ a @ a).real)
    if n_cav < G2_FLOOR:
        if require_g2:
            raise G2Undefined(f"N_cav = {n_cav:.3g} is below the g2 floor {G2_FLOOR:g}")
        g2 = math.nan
    else:
        g2 = pair / n_cav**2
    if kappa is not None and probe_frequency is not None:
        from .cavity import transmitted_power

        p_out = float(transmitted_power(kappa, probe_frequency, n_cav))
    else:
        p_out = math.nan
    return Observables(
        N_cav=n_cav,
        g2=g2,
        P_e=float(expect(sd @ s).real),
        P_out=p_out,
        mean_field=complex(expect(a)),
        coherence=complex(expect(s)),
    )


def initial_truncation(params: SystemParams) -> int:
    n_empty = params.eta**2 / (params.kappa**2 / 4 + params.delta_c**2)
    return int(math.ceil(10 * n_empty)) + 4


def _solve_fixed(params: SystemParams, n_max: int) -> np.ndarray:
    if not params.kappa > 0:
        raise SingularSystem("kappa must be positive for a unique steady state")
    M = build_matrix(params, n_max)
    dim = 2 * (n_max + 1)
    # replace the |g,0><g,0| equation by Tr rho = 1
    trace_row = sp.csr_matrix(
        (np.ones(dim, dtype=complex), (np.zeros(dim, dtype=int), np.arange(dim) * (dim + 1))),
        shape=(1, dim * dim),
    )
    A = sp.vstack([trace_row, M[1:]], format="csc")
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            x = spla.spsolve(A, b)
    except (RuntimeError, spla.MatrixRankWarning) as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("non-finite steady-state solution")
    rho = x.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    res = scaled_residual(M, rho)
    if res > RESIDUAL_TOL:
        raise SingularSystem(f"steady-state residual {res:.3g} too large")
    return rho


def scaled_residual(M: np.ndarray, rho: np.ndarray) -> float:
    """max_i |(M vec rho)_i| / sum_j |M_ij|, rows with no entries skipped."""
    r = np.abs(M @ rho.reshape(-1))
    row_norm = np.asarray(abs(M).sum(axis=1)).ravel()
    mask = row_norm > 0
    return float(np.max(r[mask] / row_norm[mask])) if mask.any() else 0.0


def _converged(o1: Observables, o2: Observables) -> bool:
    def close(x, y):
        if math.isnan(x) and math.isnan(y):
            return True
        return abs(x - y) <= CONVERGENCE_RTOL * max(abs(x), abs(y), 1e-300) or abs(x - y) < 1e-15

    return close(o1.N_cav, o2.N_cav) and close(o1.P_e, o2.P_e) and close(o1.g2, o2.g2)


def solve_steady(params: SystemParams, n_max=None, probe_frequency=None):
    """Return (rho, observables, n_max_used).

    With n_max=None the truncation is grown in steps of two from
    `initial_truncation` until N_cav, g2 and P_e move by less than
    CONVERGENCE_RTOL between n_max and n_max + 2.
    """
    if n_max is not None:
        rho = _solve_fixed(params, n_max)
        return rho, observables_from(rho, params.kappa, probe_frequency), n_max

    n = max(1, initial_truncation(params))
    if n + 2 > N_MAX_CAP:
        raise TruncationNotConverged(
            f"drive too strong for the weak-drive truncation: start n_max = {n} exceeds cap {N_MAX_CAP}"
        )
    rho = _solve_fixed(params, n)
    obs = observables_from(rho, params.kappa, probe_frequency)
    while n + 2 <= N_MAX_CAP:
        rho_next = _solve_fixed(params, n + 2)
        obs_next = observables_from(rho_next, params.kappa, probe_frequency)
        if _converged(obs, obs_next):
            return rho, obs, n
        n, rho, obs = n + 2, rho_next, obs_next
    raise TruncationNotConverged(f"observables still changing at n_max = {n}")


def default_time_step(params: SystemParams) -> float:
    return 0.01 / params.max_rate()


def default_final_time(params: SystemParams) -> float:
    return 20.0 / min(params.kappa, params.gamma)


def propagate(params: SystemParams, rho0: np.ndarray, t_final: float, dt=None) -> np.ndarray:
    """Classic RK4 integration of d rho/dt from rho0 up to t_final.

    The generator is linear and time independent, so one RK4 step is the
    fixed matrix 1 + hM + (hM)^2/2 + (hM)^3/6 + (hM)^4/24; the steps are
    applied by repeated squaring.
    """
    n_max = n_max_of(rho0)
    if dt is None:
        dt = default_time_step(params)
    M = build_matrix(params, n_max).toarray()
    radius_bound = min(np.linalg.norm(M, 1), np.linalg.norm(M, np.inf))
    if dt * radius_bound > 1.0:
        raise StepTooLarge(f"dt * |M| = {dt * radius_bound:.3g} > 1")
    if t_final <= 0:
        return rho0.copy()
    steps = max(1, int(math.ceil(t_final / dt)))
    h = t_final / steps
    hM = h * M
    step = np.eye(M.shape[0], dtype=complex)
    term = np.eye(M.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ hM / k
        step = step + term
    v = np.linalg.matrix_power(step, steps) @ rho0.reshape(-1)
    return v.reshape(rho0.shape)
