"""Time-dependent filtered emission spectrum.

The counted quantity behind a Lorentzian filter of bandwidth ``Gamma`` tuned
to detuning ``Delta`` from the cavity is

    N(t; Delta) = kappa Gamma^2 int_0^t exp(-Gamma t') F(t') dt'
    A_m(t')     = int_0^t' exp((i Delta + Gamma/2 + i m + m gamma_m/2) s) b_m(s) ds

with ``F = sum_m |A_m|^2`` (incoherent, final phonon states orthogonal) or
``F = |sum_m A_m|^2`` (coherent, the branch sum inside the modulus).
Two backends evaluate ``A_m``: closed form from the exponential-sum
representation of ``b_m``, and cumulative Simpson over a dense amplitude
series built by repeated application of the exact one-step propagator.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.signal import find_peaks as _scipy_find_peaks

from . import kernels
from .hamiltonian import generator
from .model import Branch, PureState, SystemParams, check, make_initial_state
from .propagator import PropagatorCache, decompose

DEFAULT_N_STEPS = 4000
DEFAULT_QUAD_STEP = 0.005
STATIONARY_TIME = 20.0
FIGURE_TIMES = (1.0, 2.0, 4.0, 7.0, 10.0, 20.0)


class Mode(enum.Enum):
    INCOHERENT = "incoherent"
    COHERENT_AS_PRINTED = "coherent"


class Backend(enum.Enum):
    CLOSED_FORM = "closed"
    QUADRATURE = "quadrature"


def default_delta_grid() -> np.ndarray:
    return np.linspace(-8.0, 8.0, 801)


@dataclass(frozen=True)
class FilterSpec:
    gamma: float = 0.1
    delta_grid: np.ndarray = field(default_factory=default_delta_grid)

    def __post_init__(self):
        grid = np.array(self.delta_grid, dtype=float).ravel()
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError("filter bandwidth must be positive and finite")
        if grid.size == 0 or not np.all(np.isfinite(grid)):
            raise ValueError("detuning grid must be non-empty and finite")
        if np.any(np.diff(grid) < 0):
            raise ValueError("detuning grid must be sorted")
        grid.setflags(write=False)
        object.__setattr__(self, "delta_grid", grid)


@dataclass(frozen=True)
class SpectrumResult:
    times: np.ndarray
    delta_grid: np.ndarray
    values: np.ndarray  # shape (len(times), len(delta_grid))
    mode: Mode
    backend: Backend
    params: SystemParams
    filter_gamma: float
    thermal: bool = False

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[i], t):
            raise KeyError(f"no spectrum stored at t = {t}")
        return self.values[i]


@dataclass(frozen=True)
class Peak:
    location: float
    height: float
    prominence: float


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple
    threshold: float

    def __len__(self):
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    @property
    def locations(self) -> np.ndarray:
        return np.array([p.location for p in self.peaks])

    @property
    def heights(self) -> np.ndarray:
        return np.array([p.height for p in self.peaks])


def correlation_kernel(params: SystemParams, psi_series, t1: float, t2: float) -> complex:
    """Field correlation ``kappa <a^dag(t1) a(t2)>`` in the no-jump sector.

    ``psi_series`` maps a time to the amplitude vector (for instance
    ``lambda t: propagate(cache, psi0, t).amps``).  After emission at the
    earlier time the ground state ``|g,0,m>`` evolves freely with energy ``m``
    and amplitude damping ``m gamma_m / 2``.
    """
    if t1 < 0 or t2 < 0:
        raise ValueError("times must be non-negative")
    if t1 < t2:
        return complex(np.conj(correlation_kernel(params, psi_series, t2, t1)))
    n = params.n_phonon
    b1 = np.asarray(psi_series(t1))[n:]
    b2 = np.asarray(psi_series(t2))[n:]
    m = np.arange(n)
    tau = t1 - t2
    free = np.exp(-1j * m * tau - 0.5 * m * params.gamma_m * tau)
    return complex(params.kappa * np.sum(np.conj(b1) * b2 * free))


def _outer_grid(t: float, n_steps: int):
    """Uniform grid and composite-Simpson weights on ``[0, t]``."""
    n = max(2, int(n_steps) + (int(n_steps) % 2))
    grid = np.linspace(0.0, t, n + 1)
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return grid, w * (t / n) / 3.0


def _branch_alpha(params: SystemParams, gamma: float) -> np.ndarray:
    m = np.arange(params.n_phonon)
    return gamma / 2 + 1j * m + 0.5 * m * params.gamma_m


def _as_mode(mode) -> Mode:
    return mode if isinstance(mode, Mode) else Mode(mode)


def _as_backend(backend) -> Backend:
    return backend if isinstance(backend, Backend) else Backend(backend)


def ew_counts_closed(params: SystemParams, psi0: PureState, filt: FilterSpec, t: float,
                     mode=Mode.INCOHERENT, n_steps: int = DEFAULT_N_STEPS,
                     cache: PropagatorCache | None = None, num_threads: int = 0) -> np.ndarray:
    """N(t; Delta) over ``filt.delta_grid`` with closed-form inner integrals.

    Raises :class:`~omcspec.propagator.NonDiagonalizableError` for defective
    generators; use :func:`ew_counts_quadrature` then.
    """
    check(params)
    mode = _as_mode(mode)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.zeros(filt.delta_grid.size)
    if cache is None:
        cache = decompose(generator(params))
    n = params.n_phonon
    coef = cache.modal(psi0)[n:]
    grid, w = _outer_grid(t, n_steps)
    wout = w * np.exp(-filt.gamma * grid)
    raw = kernels.closed_counts(filt.delta_grid, _branch_alpha(params, filt.gamma), cache.eigenvalues,
                                coef, grid, wout, mode is Mode.COHERENT_AS_PRINTED, num_threads)
    return params.kappa * filt.gamma**2 * np.asarray(raw)


def _refinement(outer_step: float, max_step: float) -> int:
    r = max(2, math.ceil(outer_step / max_step - 1e-12))
    return r + (r % 2)


def stepped_series(h: np.ndarray, psi0: np.ndarray, step: float, n_points: int) -> np.ndarray:
    """Amplitudes on a uniform grid by repeated application of ``expm(-i h step)``.

    Works for any generator, defective or not.  Returns ``(n_points, dim)``.
    """
    u = expm(-1j * np.asarray(h) * step)
    out = np.empty((n_points, psi0.size), dtype=complex)
    out[0] = psi0
    for i in range(1, n_points):
        out[i] = u @ out[i - 1]
    return out


def ew_counts_quadrature(params: SystemParams, psi0: PureState, filt: FilterSpec, t: float,
                         mode=Mode.INCOHERENT, n_steps: int = DEFAULT_N_STEPS,
                         max_step: float = DEFAULT_QUAD_STEP, num_threads: int = 0) -> np.ndarray:
    """N(t; Delta) with inner integrals by cumulative composite Simpson.

    The outer grid is the one used by :func:`ew_counts_closed`; the inner
    grid refines each outer step by an even factor so that the inner step
    does not exceed ``max_step``.
    """
    check(params)
    mode = _as_mode(mode)
    if not (max_step > 0 and math.isfinite(max_step)):
        raise ValueError("max_step must be positive and finite")
    if int(n_steps) < 2:
        raise ValueError("n_steps must be >= 2")
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.zeros(filt.delta_grid.size)
    grid, w = _outer_grid(t, n_steps)
    r = _refinement(grid[1] - grid[0], max_step)
    nf = (grid.size - 1) * r + 1
    tfine = np.linspace(0.0, t, nf)
    series = stepped_series(generator(params).entries, psi0.amps, tfine[1], nf)
    n = params.n_phonon
    qT = series[:, n:] * np.exp(np.outer(tfine, _branch_alpha(params, filt.gamma)))
    wout = w * np.exp(-filt.gamma * grid)
    raw = kernels.quad_counts(filt.delta_grid, qT, tfine, r, wout, mode is Mode.COHERENT_AS_PRINTED, num_threads)
    return params.kappa * filt.gamma**2 * np.asarray(raw)


def thermal_weights(mbar: float, m_max: int):
    """Thermal phonon populations ``p_m = mbar^m / (1+mbar)^(m+1)`` and the tail mass."""
    if not mbar >= 0:
        raise ValueError("mbar must be non-negative")
    m = np.arange(m_max + 1)
    if mbar == 0:
        p = (m == 0).astype(float)
    else:
        p = np.exp(m * math.log(mbar) - (m + 1) * math.log1p(mbar))
    return p, float(1.0 - p.sum())


def _counts(params, psi0, filt, t, mode, backend, cache, num_threads):
    if backend is Backend.CLOSED_FORM:
        return ew_counts_closed(params, psi0, filt, t, mode, cache=cache, num_threads=num_threads)
    return ew_counts_quadrature(params, psi0, filt, t, mode, num_threads=num_threads)


def spectrum(params: SystemParams, filt: FilterSpec, times, psi0: PureState | None = None,
             mode=Mode.INCOHERENT, backend=Backend.CLOSED_FORM, num_threads: int = 0) -> SpectrumResult:
    """Spectra at several times for one initial state (default ``|e,0,0>``)."""
    check(params)
    mode, backend = _as_mode(mode), _as_backend(backend)
    times = np.asarray(times, dtype=float).ravel()
    if psi0 is None:
        psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, params)
    cache = decompose(generator(params)) if backend is Backend.CLOSED_FORM else None
    values = np.array([_counts(params, psi0, filt, t, mode, backend, cache, num_threads) for t in times])
    return SpectrumResult(times, filt.delta_grid, values.reshape(times.size, -1), mode, backend, params, filt.gamma)


def thermal_spectrum(params: SystemParams, filt: FilterSpec, t_list, mode=Mode.INCOHERENT,
                     backend=Backend.CLOSED_FORM, num_threads: int = 0) -> SpectrumResult:
    """Average of ``|e,0,m0>`` spectra over the thermal distribution of ``m0``."""
    check(params)
    mode, backend = _as_mode(mode), _as_backend(backend)
    times = np.asarray(t_list, dtype=float).ravel()
    p, tail = thermal_weights(params.mbar, params.m_max)
    if tail >= 1e-3:
        warnings.warn(f"thermal tail mass {tail:.3g} beyond m_max = {params.m_max}", RuntimeWarning, stacklevel=2)
    cache = decompose(generator(params)) if backend is Backend.CLOSED_FORM else None
    values = np.zeros((times.size, filt.delta_grid.size))
    for m0, weight in enumerate(p):
        if weight == 0.0:
            continue
        psi0 = make_initial_state(Branch.ATOM_EXCITED, m0, params)
        for i, t in enumerate(times):
            values[i] += weight * _counts(params, psi0, filt, t, mode, backend, cache, num_threads)
    return SpectrumResult(times, filt.delta_grid, values, mode, backend, params, filt.gamma, thermal=True)


def _vertex(x, y):
    """Abscissa and ordinate of the parabola through three points."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    d0, d2 = x0 - x1, x2 - x1
    s0, s2 = (y0 - y1) / d0, (y2 - y1) / d2
    curv = (s2 - s0) / (d2 - d0)
    if curv >= 0:
        return x1, y1
    slope = s0 - curv * d0
    xv = -slope / (2 * curv)
    return x1 + xv, y1 + slope * xv + curv * xv * xv


def find_peaks(values, delta_grid, prominence_fraction: float) -> PeakSet:
    """Local maxima whose prominence is at least ``prominence_fraction`` of the global maximum.

    Locations and heights are refined by a parabola through the sample and
    its two neighbours.
    """
    y = np.asarray(values, dtype=float)
    x = np.asarray(delta_grid, dtype=float)
    if y.size < 3 or x.size != y.size:
        raise ValueError("need at least three samples on a matching grid")
    if not 0 < prominence_fraction < 1:
        raise ValueError("prominence_fraction must lie in (0, 1)")
    threshold = prominence_fraction * float(y.max())
    if threshold <= 0:
        return PeakSet((), threshold)
    idx, props = _scipy_find_peaks(y, prominence=threshold)
    peaks = []
    for i, prom in zip(idx, props["prominences"]):
        loc, height = _vertex(x[i - 1 : i + 2], y[i - 1 : i + 2])
        peaks.append(Peak(float(loc), float(height), float(prom)))
    return PeakSet(tuple(peaks), threshold)
