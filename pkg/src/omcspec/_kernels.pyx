# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled frequency-sweep kernels.

Same contracts as ``omcspec._kernels_py``; detunings are independent work
items distributed with OpenMP when available.  The closed-form sweep calls
BLAS ``zgemm`` through scipy's Cython bindings.
"""
import numpy as np

from cython.parallel cimport prange, parallel
from libc.math cimport exp, expm1, cos, sin, sqrt
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_blas cimport zgemm

cdef double SMALL_Z = 1e-6
cdef double DEGENERATE_Z = 1e-10


cdef inline double complex _expint(double complex z, double t) noexcept nogil:
    # (exp(z t) - 1) / z without cancellation
    cdef double complex zt
    cdef double x, y, s
    if sqrt(z.real * z.real + z.imag * z.imag) < DEGENERATE_Z:
        return t + z * t * t / 2.0
    zt = z * t
    x = zt.real
    y = zt.imag
    s = sin(0.5 * y)
    return (expm1(x) * cos(y) - 2.0 * s * s + 1j * (exp(x) * sin(y))) / z


cdef double _closed_one(double delta, const double complex[::1] alpha0, const double complex[::1] lam,
                        const double complex[:, ::1] coef, const double[::1] tgrid, const double[::1] wout,
                        const double complex[:, ::1] E, const double complex[:, ::1] GT, bint coherent,
                        double complex* dk, double complex* acc, double complex* zv, char* small,
                        double complex* dsum) noexcept nogil:
    # acc[j, m] = sum_k E[j, k] dk[m, k] as one zgemm; dk and E are row-major,
    # i.e. column-major transposes, hence ("T", "N") with leading dimension K
    cdef int nm = coef.shape[0], K = coef.shape[1], nt = tgrid.shape[0]
    cdef Py_ssize_t m, k, j
    cdef double complex z, q, a, ph, tot
    cdef double complex one = 1.0, zero = 0.0
    cdef double total = 0.0, F, t
    cdef bint any_small = False
    cdef char tr = b"T", nt_ = b"N"
    for m in range(nm):
        dsum[m] = 0
        for k in range(K):
            z = 1j * delta + alpha0[m] - 1j * lam[k]
            zv[m * K + k] = z
            if sqrt(z.real * z.real + z.imag * z.imag) < SMALL_Z:
                small[m * K + k] = 1
                q = 0
                any_small = True
            else:
                small[m * K + k] = 0
                q = coef[m, k] / z
            dk[m * K + k] = q
            dsum[m] = dsum[m] + q
    zgemm(&tr, &nt_, &nm, &nt, &K, &one, dk, &K, <double complex*> &E[0, 0], &K, &zero, acc, &nm)
    for j in range(nt):
        t = tgrid[j]
        ph = cos(delta * t) + 1j * sin(delta * t)
        F = 0.0
        tot = 0
        for m in range(nm):
            a = GT[j, m] * ph * acc[j * nm + m] - dsum[m]
            if any_small:
                for k in range(K):
                    if small[m * K + k]:
                        a = a + coef[m, k] * _expint(zv[m * K + k], t)
            if coherent:
                tot = tot + a
            else:
                F = F + a.real * a.real + a.imag * a.imag
        if coherent:
            F = tot.real * tot.real + tot.imag * tot.imag
        total = total + wout[j] * F
    return total


def closed_counts(deltas, alpha0, lam, coef, tgrid, wout, bint coherent, int num_threads=0):
    cdef const double[::1] d = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef const double complex[::1] a0 = np.ascontiguousarray(alpha0, dtype=np.complex128)
    cdef const double complex[::1] lm = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef const double complex[:, ::1] c = np.ascontiguousarray(coef, dtype=np.complex128)
    cdef const double[::1] t = np.ascontiguousarray(tgrid, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(wout, dtype=np.float64)
    cdef const double complex[:, ::1] E = np.ascontiguousarray(np.exp(-1j * np.outer(t, lm)))
    cdef const double complex[:, ::1] GT = np.ascontiguousarray(np.exp(np.outer(t, a0)))
    cdef Py_ssize_t nD = d.shape[0], nm = c.shape[0], K = c.shape[1], nt = t.shape[0], i
    out = np.empty(nD)
    cdef double[::1] o = out
    cdef double complex* dk
    cdef double complex* acc
    cdef double complex* zv
    cdef double complex* dsum
    cdef char* small
    if num_threads <= 0:
        num_threads = _default_threads()
    with nogil, parallel(num_threads=num_threads):
        dk = <double complex*> malloc(nm * K * sizeof(double complex))
        acc = <double complex*> malloc(nt * nm * sizeof(double complex))
        zv = <double complex*> malloc(nm * K * sizeof(double complex))
        dsum = <double complex*> malloc(nm * sizeof(double complex))
        small = <char*> malloc(nm * K * sizeof(char))
        for i in prange(nD, schedule="dynamic"):
            o[i] = _closed_one(d[i], a0, lm, c, t, w, E, GT, coherent, dk, acc, zv, small, dsum)
        free(dk)
        free(acc)
        free(zv)
        free(dsum)
        free(small)
    return out


cdef double _quad_one(double delta, const double complex[:, ::1] qT, const double[::1] tfine, Py_ssize_t r,
                      const double[::1] wout, bint coherent, double complex* A, double complex* fprev) noexcept nogil:
    cdef Py_ssize_t nf = qT.shape[0], nm = qT.shape[1], nt = wout.shape[0]
    cdef Py_ssize_t j, p, m, i0
    cdef double h = tfine[1] - tfine[0], total = 0.0, F, t1, t2
    cdef double complex ph1, ph2, f1, f2, acc
    for m in range(nm):
        A[m] = 0
        fprev[m] = qT[0, m]
    for j in range(1, nt):
        for p in range(r // 2):
            i0 = (j - 1) * r + 2 * p
            t1 = tfine[i0 + 1]
            t2 = tfine[i0 + 2]
            ph1 = cos(delta * t1) + 1j * sin(delta * t1)
            ph2 = cos(delta * t2) + 1j * sin(delta * t2)
            for m in range(nm):
                f1 = ph1 * qT[i0 + 1, m]
                f2 = ph2 * qT[i0 + 2, m]
                A[m] = A[m] + (h / 3.0) * (fprev[m] + 4.0 * f1 + f2)
                fprev[m] = f2
        if coherent:
            acc = 0
            for m in range(nm):
                acc = acc + A[m]
            F = acc.real * acc.real + acc.imag * acc.imag
        else:
            F = 0.0
            for m in range(nm):
                F = F + A[m].real * A[m].real + A[m].imag * A[m].imag
        total = total + wout[j] * F
    return total


def quad_counts(deltas, qT, tfine, r, wout, bint coherent, int num_threads=0):
    cdef const double[::1] d = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef const double complex[:, ::1] q = np.ascontiguousarray(qT, dtype=np.complex128)
    cdef const double[::1] t = np.ascontiguousarray(tfine, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(wout, dtype=np.float64)
    cdef Py_ssize_t rr = int(r)
    if rr < 2 or rr % 2:
        raise ValueError("refinement r must be a positive even integer")
    if (t.shape[0] - 1) != rr * (w.shape[0] - 1):
        raise ValueError("fine grid length incompatible with refinement")
    cdef Py_ssize_t nD = d.shape[0], nm = q.shape[1], i
    out = np.empty(nD)
    cdef double[::1] o = out
    cdef double complex* A
    cdef double complex* fprev
    if num_threads <= 0:
        num_threads = _default_threads()
    with nogil, parallel(num_threads=num_threads):
        A = <double complex*> malloc(nm * sizeof(double complex))
        fprev = <double complex*> malloc(nm * sizeof(double complex))
        for i in prange(nD, schedule="dynamic"):
            o[i] = _quad_one(d[i], q, t, rr, w, coherent, A, fprev)
        free(A)
        free(fprev)
    return out


def _default_threads():
    import os
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
