"""
Master-equation generator on the truncated product basis |alpha, n>.

Basis ordering: index = alpha * (n_max + 1) + n with alpha = 0 for |g> and
alpha = 1 for |e>.  Operators act in the rotating frame of the probe, with

    H/hbar = -(Delta_a/2) sigma_z - Delta_c a^dag a - i G (a sigma^dag - a^dag sigma)
             - i eta (a - a^dag)

and Lindblad channels sqrt(gamma) sigma, sqrt(kappa) a.  The field operators
are cut at n_max, so a^dag |n_max> = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, TruncationTooSmall


@dataclass(frozen=True)
class SystemParams:
    G: float
    gamma: float
    kappa: float
    eta: float
    delta_a: float
    delta_c: float

    def __post_init__(self):
        for name in ("G", "gamma", "kappa", "eta", "delta_a", "delta_c"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.gamma < 0 or self.kappa < 0:
            raise ConfigError("decay rates must be non-negative")

    @property
    def cavity_atom_detuning(self):
        """Delta = omega_c - omega_a = Delta_a - Delta_c."""
        return self.delta_a - self.delta_c

    def max_rate(self):
        return max(self.kappa, self.gamma, abs(self.delta_a), abs(self.delta_c), abs(self.G), abs(self.eta))


@dataclass(frozen=True)
class Operators:
    n_max: int
    a: np.ndarray
    sigma: np.ndarray
    sigma_z: np.ndarray
    identity: np.ndarray

    @property
    def dim(self):
        return 2 * (self.n_max + 1)

    @property
    def adag(self):
        return self.a.conj().T

    @property
    def sigma_dag(self):
        return self.sigma.conj().T

    @property
    def number(self):
        return self.adag @ self.a


@lru_cache(maxsize=64)
def operators(n_max: int) -> Operators:
    if n_max < 1:
        raise TruncationTooSmall(f"n_max must be >= 1, got {n_max}")
    nf = n_max + 1
    a_field = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e|
    sz = np.diag([-1.0, 1.0])
    ops = Operators(
        n_max=n_max,
        a=np.kron(np.eye(2), a_field).astype(complex),
        sigma=np.kron(lower, np.eye(nf)).astype(complex),
        sigma_z=np.kron(sz, np.eye(nf)).astype(complex),
        identity=np.eye(2 * nf, dtype=complex),
    )
    for arr in (ops.a, ops.sigma, ops.sigma_z, ops.identity):
        arr.flags.writeable = False
    return ops


def n_max_of(rho: np.ndarray) -> int:
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape[1] != dim or dim % 2:
        raise ValueError(f"density matrix must be square with even dimension, got {rho.shape}")
    n_max = dim // 2 - 1
    if n_max < 1:
        raise TruncationTooSmall(f"n_max must be >= 1, got {n_max}")
    return n_max


def hamiltonian(params: SystemParams, n_max: int) -> np.ndarray:
    ops = operators(n_max)
    a, ad, s, sd = ops.a, ops.adag, ops.sigma, ops.sigma_dag
    return (
        -0.5 * params.delta_a * ops.sigma_z
        - params.delta_c * ops.number
        - 1j * params.G * (a @ sd - ad @ s)
        - 1j * params.eta * (a - ad)
    )


def apply_rhs(params: SystemParams, rho: np.ndarray) -> np.ndarray:
    """d rho/dt from the commutator and Lindblad terms."""
    n_max = n_max_of(rho)
    ops = operators(n_max)
    H = hamiltonian(params, n_max)
    a, ad, s, sd = ops.a, ops.adag, ops.sigma, ops.sigma_dag
    ee = sd @ s
    nn = ad @ a
    drho = -1j * (H @ rho - rho @ H)
    drho += params.gamma * (s @ rho @ sd - 0.5 * (ee @ rho + rho @ ee))
    drho += params.kappa * (a @ rho @ ad - 0.5 * (nn @ rho + rho @ nn))
    return drho


def _left(A, I):
    # vec(A rho) for row-major vec
    return sp.kron(A, I, format="csr")


def _right(B, I):
    # vec(rho B) for row-major vec
    return sp.kron(I, B.T, format="csr")


@lru_cache(maxsize=64)
def _generators(n_max: int):
    """Parameter-free superoperator pieces; M is their linear combination."""
    ops = operators(n_max)
    I = sp.identity(ops.dim, dtype=complex, format="csr")
    a, s = sp.csr_matrix(ops.a), sp.csr_matrix(ops.sigma)
    ad, sd = a.conj().T.tocsr(), s.conj().T.tocsr()
    sz = sp.csr_matrix(ops.sigma_z)
    ee = sd @ s
    nn = ad @ a

    def commutator(H):
        return -1j * (_left(H, I) - _right(H, I))

    def dissipator(c, cd, cdc):
        return sp.kron(c, cd.T) - 0.5 * (_left(cdc, I) + _right(cdc, I))

    return {
        "delta_a": commutator(-0.5 * sz),
        "delta_c": commutator(-nn),
        "G": commutator(-1j * (a @ sd - ad @ s)),
        "eta": commutator(-1j * (a - ad)),
        "gamma": dissipator(s, sd, ee),
        "kappa": dissipator(a, ad, nn),
    }


def build_matrix(params: SystemParams, n_max: int) -> sp.csr_matrix:
    """Sparse matrix M with vec(d rho/dt) = M vec(rho), vec = row-major flatten."""
    gens = _generators(n_max)
    M = sum(getattr(params, name) * gen for name, gen in gens.items())
    return M.tocsr()


def vec(rho: np.ndarray) -> np.ndarray:
    return rho.reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, dim)


def basis_index(n_max: int, excited: bool, n: int) -> int:
    return (1 if excited else 0) * (n_max + 1) + n


def projector(n_max: int, excited: bool, n: int) -> np.ndarray:
    dim = 2 * (n_max + 1)
    rho = np.zeros((dim, dim), dtype=complex)
    i = basis_index(n_max, excited, n)
    rho[i, i] = 1.0
    return rho
