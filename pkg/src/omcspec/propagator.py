"""Exact no-jump evolution through an eigendecomposition of the generator.

Amplitudes evolve as ``psi(t) = V exp(-i lam t) V^-1 psi(0)``, so every
component is a finite exponential sum ``sum_k c_k exp(-i lam_k t)``.  That
representation gives exact values at arbitrary times and closed-form time
integrals of exponentially weighted amplitudes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .hamiltonian import OperatorKind, OperatorMatrix
from .model import BasisIndex, PureState, SystemParams, flat_index

RECONSTRUCTION_TOL = 1e-9
CONDITION_LIMIT = 1e7  # cond * eps stays near RECONSTRUCTION_TOL
DEGENERATE_Z = 1e-10


class NonDiagonalizableError(np.linalg.LinAlgError):
    """The generator is (numerically) defective; use the quadrature backend."""


@dataclass(frozen=True)
class PropagatorCache:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    inverse_vectors: np.ndarray
    source: OperatorMatrix
    condition_estimate: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def modal(self, psi0: PureState) -> np.ndarray:
        """Coefficient matrix ``C[i, k]`` with ``amps_i(t) = sum_k C[i,k] exp(-i lam_k t)``."""
        if psi0.amps.size != self.dim:
            raise ValueError(f"state dimension {psi0.amps.size} != generator dimension {self.dim}")
        return self.right_vectors * (self.inverse_vectors @ psi0.amps)[None, :]


def decompose(h: OperatorMatrix) -> PropagatorCache:
    if h.kind is OperatorKind.JUMP:
        raise ValueError("cannot build a propagator from a jump operator")
    m = h.entries
    if h.kind is OperatorKind.HERMITIAN:
        lam, v = np.linalg.eigh(m)
        lam = lam.astype(complex)
        v_inv = v.conj().T
        cond = 1.0
    else:
        lam, v = np.linalg.eig(m)
        cond = float(np.linalg.cond(v))
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise NonDiagonalizableError(
                f"eigenvector matrix is singular (cond = {cond:.3g}); use the quadrature backend"
            )
        v_inv = np.linalg.inv(v)
    scale = max(np.linalg.norm(m), 1.0)
    residual = np.linalg.norm((v * lam[None, :]) @ v_inv - m) / scale
    if residual > RECONSTRUCTION_TOL:
        raise NonDiagonalizableError(
            f"eigendecomposition residual {residual:.3g} exceeds {RECONSTRUCTION_TOL}; use the quadrature backend"
        )
    for arr in (lam, v, v_inv):
        arr.setflags(write=False)
    return PropagatorCache(lam, v, v_inv, h, cond)


def propagate(cache: PropagatorCache, psi0: PureState, t: float) -> PureState:
    if t < 0:
        raise ValueError("propagation time must be non-negative")
    amps = cache.modal(psi0) @ np.exp(-1j * cache.eigenvalues * t)
    return PureState(amps, psi0.time + t)


def amplitude_series(cache: PropagatorCache, psi0: PureState, t_grid) -> np.ndarray:
    """Amplitudes at each grid time, shape ``(len(t_grid), dim)``."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be non-negative and strictly increasing")
    phases = np.exp(-1j * np.outer(t, cache.eigenvalues))
    return phases @ cache.modal(psi0).T


def expint(z, T):
    """``(exp(z T) - 1) / z`` with the removable singularity at ``z = 0``.

    Below ``|z| = 1e-10`` the second-order series ``T + z T^2 / 2`` is used.
    """
    z = np.asarray(z, dtype=complex)
    T = np.asarray(T, dtype=float)
    z, T = np.broadcast_arrays(z, T)
    small = np.abs(z) < DEGENERATE_Z
    safe = np.where(small, 1.0, z)
    out = np.where(small, T + z * T * T / 2, np.expm1(safe * T) / safe)
    return out[()] if out.ndim == 0 else out


def weighted_time_integral(cache: PropagatorCache, psi0: PureState, component: BasisIndex, alpha: complex, T: float):
    """``int_0^T exp(alpha s) amps_component(s) ds`` in closed form."""
    if T < 0:
        raise ValueError("T must be non-negative")
    m_max = cache.dim // 2 - 1
    i = flat_index(component, m_max)
    c = cache.modal(psi0)[i]
    return complex(np.sum(c * expint(alpha - 1j * cache.eigenvalues, T)))


@dataclass(frozen=True)
class FluxLedger:
    """Where the excitation went, as cumulative probabilities on a time grid."""

    times: np.ndarray
    norm2: np.ndarray
    detected: np.ndarray
    spontaneous: np.ndarray
    phonon_loss: np.ndarray
    truncation_leak: float

    @property
    def balance(self) -> np.ndarray:
        return self.norm2 + self.detected + self.spontaneous + self.phonon_loss

    @property
    def residual(self) -> float:
        """``|norm^2(T) + sum of channels(T) - 1|``."""
        return float(abs(self.balance[-1] - 1.0))

    def summary(self) -> dict:
        return {
            "T": float(self.times[-1]),
            "norm2": float(self.norm2[-1]),
            "detected": float(self.detected[-1]),
            "spontaneous": float(self.spontaneous[-1]),
            "phonon_loss": float(self.phonon_loss[-1]),
            "truncation_leak": float(self.truncation_leak),
            "residual": self.residual,
        }


def flux_ledger(cache: PropagatorCache, psi0: PureState, params: SystemParams, T: float, n_steps: int = 4000) -> FluxLedger:
    """Channel bookkeeping from the exact amplitude series (Simpson in time).

    The phonon-loss channel uses the zero-temperature rate ``gamma_m * m``.
    The truncation leak is ``g_m sqrt(m_max+1)`` times the time-integrated
    population of ``|g,1,m_max>``.
    """
    if n_steps < 2:
        raise ValueError("n_steps must be >= 2")
    if T <= 0:
        raise ValueError("T must be positive")
    t = np.linspace(0.0, T, n_steps + 1)
    amps = amplitude_series(cache, psi0, t)
    n = params.n_phonon
    pa = np.abs(amps[:, :n]) ** 2
    pb = np.abs(amps[:, n:]) ** 2
    m = np.arange(n)

    def cumulative(rate):
        return np.concatenate([[0.0], cumulative_simpson(rate, x=t)])

    detected = cumulative(params.kappa * pb.sum(axis=1))
    spontaneous = cumulative(params.gamma_a * pa.sum(axis=1))
    phonon_loss = cumulative(params.gamma_m * ((pa + pb) @ m))
    top = cumulative(pb[:, -1])[-1]
    leak = params.g_m * np.sqrt(params.m_max + 1) * top
    return FluxLedger(t, pa.sum(axis=1) + pb.sum(axis=1), detected, spontaneous, phonon_loss, float(leak))
