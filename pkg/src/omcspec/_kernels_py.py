"""Pure numpy implementation of the frequency-sweep kernels.

Both kernels return, for every detuning, ``sum_j w_j F(t_j)`` where ``F`` is
the branch-summed modulus squared of the filter amplitudes ``A_m(t_j)``; the
caller supplies Simpson weights already multiplied by ``exp(-Gamma t_j)``.
Signatures match the compiled module ``omcspec._kernels``.
"""
from __future__ import annotations

import numpy as np

from .propagator import expint

# below this |z| the factored form (P E - 1)/z loses accuracy; use expm1
SMALL_Z = 1e-6
CHUNK = 16


def _branch_sum(A, coherent):
    if coherent:
        return np.abs(A.sum(axis=1)) ** 2
    return (A.real**2 + A.imag**2).sum(axis=1)


def closed_counts(deltas, alpha0, lam, coef, tgrid, wout, coherent, num_threads=0):
    """Filter counts with inner integrals in closed form.

    ``A_m(t) = sum_k coef[m,k] (exp(z_mk t) - 1) / z_mk`` with
    ``z_mk = i delta + alpha0[m] - i lam[k]``.
    """
    deltas = np.ascontiguousarray(deltas, dtype=float)
    alpha0 = np.asarray(alpha0, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    coef = np.asarray(coef, dtype=complex)
    t = np.asarray(tgrid, dtype=float)
    w = np.asarray(wout, dtype=float)
    E = np.exp(-1j * np.outer(lam, t))  # (K, nt)
    G = np.exp(np.outer(alpha0, t))  # (nm, nt)
    out = np.empty(deltas.size)
    for s in range(0, deltas.size, CHUNK):
        d = deltas[s : s + CHUNK]
        z = 1j * d[:, None, None] + alpha0[None, :, None] - 1j * lam[None, None, :]
        small = np.abs(z) < SMALL_Z
        dk = np.where(small, 0.0, coef[None] / np.where(small, 1.0, z))
        P = np.exp(1j * np.outer(d, t))[:, None, :] * G[None]
        A = P * (dk @ E) - dk.sum(axis=-1)[..., None]
        for c, m, k in zip(*np.nonzero(small)):
            A[c, m] += coef[m, k] * expint(z[c, m, k], t)
        out[s : s + CHUNK] = _branch_sum(A, coherent) @ w
    return out


def quad_counts(deltas, qT, tfine, r, wout, coherent, num_threads=0):
    """Filter counts with inner integrals by cumulative composite Simpson.

    ``qT[i, m] = exp(alpha0[m] t_i) b_m(t_i)`` on the uniform fine grid
    ``tfine``; outer point ``j`` sits at fine index ``j * r`` (``r`` even).
    """
    deltas = np.ascontiguousarray(deltas, dtype=float)
    q = np.asarray(qT, dtype=complex).T  # (nm, nf)
    t = np.asarray(tfine, dtype=float)
    w = np.asarray(wout, dtype=float)
    r = int(r)
    if r < 2 or r % 2:
        raise ValueError("refinement r must be a positive even integer")
    if (t.size - 1) % r:
        raise ValueError("fine grid length incompatible with refinement")
    h = t[1] - t[0]
    half = r // 2
    out = np.empty(deltas.size)
    for s in range(0, deltas.size, CHUNK):
        d = deltas[s : s + CHUNK]
        f = np.exp(1j * np.outer(d, t))[:, None, :] * q[None]
        panels = (h / 3.0) * (f[..., 0:-1:2] + 4.0 * f[..., 1::2] + f[..., 2::2])
        cum = np.cumsum(panels, axis=-1)[..., half - 1 :: half]
        A = np.concatenate([np.zeros(cum.shape[:2] + (1,), dtype=complex), cum], axis=-1)
        out[s : s + CHUNK] = _branch_sum(A, coherent) @ w
    return out
