"""Dense operators on the single-excitation sector."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import SystemParams, check


class OperatorKind(enum.Enum):
    HERMITIAN = "hermitian"
    NON_HERMITIAN = "non_hermitian"
    JUMP = "jump"


class JumpChannel(enum.Enum):
    OPTICAL = "optical"
    ATOMIC = "atomic"
    MECHANICAL = "mechanical"


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    kind: OperatorKind

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape


def build_h_sys(params: SystemParams) -> OperatorMatrix:
    """Hermitian Hamiltonian in the frame rotating at the cavity frequency.

    Diagonal: ``delta_a + m`` on ``|e,0,m>``, ``m`` on ``|g,1,m>``.  The atom
    couples ``|e,0,m> <-> |g,1,m>`` with ``g_a``; radiation pressure couples
    ``|g,1,m> <-> |g,1,m+1>`` with ``-g_m sqrt(m+1)``.
    """
    check(params)
    n = params.n_phonon
    m = np.arange(n, dtype=float)
    h = np.zeros((2 * n, 2 * n), dtype=complex)
    h[np.arange(n), np.arange(n)] = params.delta_a + m
    h[n + np.arange(n), n + np.arange(n)] = m
    h[np.arange(n), n + np.arange(n)] = params.g_a
    h[n + np.arange(n), np.arange(n)] = params.g_a
    if n > 1:
        off = -params.g_m * np.sqrt(m[1:])
        lo = n + np.arange(n - 1)
        h[lo, lo + 1] = off
        h[lo + 1, lo] = off
    return OperatorMatrix(h, OperatorKind.HERMITIAN)


def jump_operator(which: JumpChannel, params: SystemParams) -> OperatorMatrix:
    """Jump operator as a map out of the tracked sector.

    Optical and atomic jumps leave the single-excitation sector: their
    matrices have shape ``(m_max+1, 2(m_max+1))`` with rows labelling the
    ground states ``|g,0,m>``.  The mechanical jump stays in the sector and is
    square.
    """
    check(params)
    n = params.n_phonon
    if which is JumpChannel.OPTICAL:
        j = np.zeros((n, 2 * n), dtype=complex)
        j[np.arange(n), n + np.arange(n)] = np.sqrt(params.kappa)
    elif which is JumpChannel.ATOMIC:
        j = np.zeros((n, 2 * n), dtype=complex)
        j[np.arange(n), np.arange(n)] = np.sqrt(params.gamma_a)
    elif which is JumpChannel.MECHANICAL:
        j = np.zeros((2 * n, 2 * n), dtype=complex)
        lower = np.sqrt(params.gamma_m * np.arange(1, n))
        for offset in (0, n):
            idx = offset + np.arange(n - 1)
            j[idx, idx + 1] = lower
    else:
        raise ValueError(f"unknown jump channel {which!r}")
    return OperatorMatrix(j, OperatorKind.JUMP)


def _loss_diagonal(params: SystemParams, thermal: bool) -> np.ndarray:
    n = params.n_phonon
    m = np.arange(n, dtype=float)
    mech = params.gamma_m * m
    if thermal and params.include_mbar_terms:
        mech = (params.mbar + 1) * params.gamma_m * m + params.mbar * params.gamma_m * (m + 1)
    atom = params.gamma_a + mech
    photon = params.kappa + mech
    return np.concatenate([atom, photon])


def build_h_nh(params: SystemParams) -> OperatorMatrix:
    """Zero-temperature no-jump generator ``H_sys - (i/2) sum J^dag J``."""
    h = build_h_sys(params).entries.copy()
    h[np.diag_indices_from(h)] -= 0.5j * _loss_diagonal(params, thermal=False)
    return OperatorMatrix(h, OperatorKind.NON_HERMITIAN)


def build_h_dnh(params: SystemParams) -> OperatorMatrix:
    """Finite-temperature no-jump generator.

    With ``include_mbar_terms`` the mechanical part reads
    ``(mbar+1) gamma_m N + mbar gamma_m (N+1)``; otherwise the mbar terms are
    dropped (weak-damping limit) and this equals :func:`build_h_nh`.
    The ``N+1`` factor is evaluated analytically, also on the top phonon level.
    """
    h = build_h_sys(params).entries.copy()
    h[np.diag_indices_from(h)] -= 0.5j * _loss_diagonal(params, thermal=True)
    return OperatorMatrix(h, OperatorKind.NON_HERMITIAN)


def generator(params: SystemParams) -> OperatorMatrix:
    """No-jump generator used by the spectrum and ledger routines."""
    return build_h_dnh(params)
