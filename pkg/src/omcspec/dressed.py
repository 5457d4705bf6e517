"""Dressed states of the lossless Hamiltonian and the transitions they predict.

A photon leaving the cavity from dressed level ``E_k`` with the mirror left
in ``|g,0,m>`` appears at detuning ``E_k - m`` from the cavity frequency.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .hamiltonian import build_h_sys
from .model import PureState, SystemParams, check

SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
# level-diagram names: E_{-+}=E1, E_{--}=E2, E_{+-}=E3, E_{++}=E4
DIAGRAM_NAMES = {(-1, 1): "E1", (-1, -1): "E2", (1, -1): "E3", (1, 1): "E4"}


class UnsupportedRegimeError(ValueError):
    """Closed forms exist only on atom-cavity resonance."""


@dataclass(frozen=True)
class DressedSystem:
    levels: np.ndarray  # ascending, includes omega_g
    vectors: np.ndarray  # columns over the single-excitation basis
    ground_levels: np.ndarray  # omega_g + m
    omega_g: float = 0.0

    @property
    def m_max(self) -> int:
        return self.ground_levels.size - 1


def _radicals(params: SystemParams):
    g, gm = params.g_a, params.g_m
    root = np.sqrt(4 * g**2 * gm**2 + gm**4 + 4 * g**2)

    def outer(s2):
        return np.sqrt(4 * g**2 + 2 * gm**2 + 1 + 2 * s2 * root)

    return root, outer


def _require_resonance(params: SystemParams):
    check(params)
    if params.delta_a != 0:
        raise UnsupportedRegimeError("closed-form dressed levels require delta_a = 0")


@dataclass(frozen=True)
class ClosedFormLevels:
    excited: dict  # (s1, s2) -> E_{s1 s2}
    ground: tuple

    def sorted_excited(self) -> np.ndarray:
        return np.sort(np.array(list(self.excited.values())))


def closed_form_levels(params: SystemParams, omega_g: float = 0.0) -> ClosedFormLevels:
    """Single-phonon dressed energies ``E_{s1 s2} = (1 + s1 sqrt(4g_a^2 + 2g_m^2 + 1 + 2 s2 R)) / 2``.

    ``R = sqrt(4 g_a^2 g_m^2 + g_m^4 + 4 g_a^2)``; ground levels are
    ``omega_g`` and ``omega_g + 1``.
    """
    _require_resonance(params)
    _, outer = _radicals(params)
    excited = {(s1, s2): omega_g + 0.5 * (1 + s1 * outer(s2)) for s1, s2 in SIGNS}
    return ClosedFormLevels(excited, (omega_g, omega_g + 1.0))


@dataclass(frozen=True)
class ClosedFormVectors:
    """Single-phonon eigenvector coefficients, keyed by the level label ``(s1, s2)``.

    With the ``|e,0,1>`` component fixed to 1 the eigenvector is
    ``c |e,0,0> + |e,0,1> + a |g,1,0> + b |g,1,1>``.  ``vectors`` holds the
    normalised versions in flat-index order ``[e00, e01, g10, g11]``.
    ``printed_a`` / ``printed_c`` are the literal published expressions,
    kept for reference; they do not reproduce eigenvector ratios.
    """

    a: dict
    b: dict
    c: dict
    vectors: dict
    printed_a: dict
    printed_c: dict
    diagnostics: tuple


def _printed_coefficients(params: SystemParams):
    g, gm, w = params.g_a, params.g_m, 1.0
    root, outer = _radicals(params)
    printed_a, printed_c = {}, {}
    if g * gm == 0:
        return printed_a, printed_c
    for sa, sb, sc in itertools.product((1, -1), repeat=3):
        printed_a[(sa, sb, sc)] = (-gm**2 + w**2 + sa * root + sb * w * outer(sc)) / (2 * g * gm)
    # (s1, s2) selects the level in the first factor, (s3, s4) in the second
    for (s1, s2), (s3, s4) in itertools.product(SIGNS, SIGNS):
        num = -2 * (g**3 - (g * w / 2 + s1 * g / 2 * outer(s2)))
        den = -g * gm * w / 2 + s1 * g * gm * outer(s2)
        printed_c[((s1, s2), (s3, s4))] = num / den * (w + s3 * 0.5 * (-w + s3 * outer(s4)))
    return printed_a, printed_c


def closed_form_vectors(params: SystemParams) -> ClosedFormVectors:
    """Closed-form single-phonon eigenvectors (resonant case).

    ``b = (E - 1) / g_a`` is the published coefficient.  The published
    ``a`` only matches the eigenvector after flipping the sign of its
    ``omega_M^2`` term, with the inner sign pairing ``a_{s1 s2} =
    (-g_m^2 - 1 - s2 R + s1 S_{s2}) / (2 g_a g_m)``; ``c`` follows from the
    ``|g,1,0>`` row, ``c = (E a + g_m b) / g_a``.  When ``g_a g_m = 0``
    numerical eigenvectors are returned instead.
    """
    _require_resonance(params)
    g, gm = params.g_a, params.g_m
    root, outer = _radicals(params)
    levels = closed_form_levels(params).excited
    single = replace(params, m_max=1)
    diagnostics = []
    a, b, c, vectors = {}, {}, {}, {}
    if g * gm == 0:
        diagnostics.append("g_a * g_m = 0: closed-form coefficients undefined, using numerical eigenvectors")
        dressed = diagonalize_truncated(single, 1)
        for label, energy in levels.items():
            k = int(np.argmin(np.abs(dressed.levels - energy)))
            vectors[label] = dressed.vectors[:, k].astype(complex)
    else:
        for (s1, s2), energy in levels.items():
            a[(s1, s2)] = (-gm**2 - 1 - s2 * root + s1 * outer(s2)) / (2 * g * gm)
            b[(s1, s2)] = (-1 + s1 * outer(s2)) / (2 * g)
            c[(s1, s2)] = (energy * a[(s1, s2)] + gm * b[(s1, s2)]) / g
            v = np.array([c[(s1, s2)], 1.0, a[(s1, s2)], b[(s1, s2)]], dtype=complex)
            vectors[(s1, s2)] = v / np.linalg.norm(v)
    printed_a, printed_c = _printed_coefficients(params)
    return ClosedFormVectors(a, b, c, vectors, printed_a, printed_c, tuple(diagnostics))


def diagonalize_truncated(params: SystemParams, m_max: int | None = None, omega_g: float = 0.0) -> DressedSystem:
    """Hermitian diagonalisation of the lossless single-excitation block."""
    if m_max is not None:
        params = replace(params, m_max=m_max)
    lossless = replace(params, kappa=0.0, gamma_a=0.0, gamma_m=0.0, mbar=0.0)
    h = build_h_sys(lossless).entries
    levels, vectors = np.linalg.eigh(h)
    return DressedSystem(levels + omega_g, vectors, omega_g + np.arange(params.m_max + 1, dtype=float), omega_g)


@dataclass(frozen=True)
class Transition:
    upper: int  # index into DressedSystem.levels
    lower: int  # ground phonon number m
    frequency: float
    weight: float
    bare_weight: float
    linewidth: float


@dataclass(frozen=True)
class TransitionTable:
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([r.frequency for r in self.rows])

    @property
    def weights(self) -> np.ndarray:
        return np.array([r.weight for r in self.rows])

    def significant(self, min_weight: float = 0.01) -> "TransitionTable":
        return TransitionTable(tuple(r for r in self.rows if r.weight >= min_weight))

    def nearest(self, delta: float, min_weight: float = 0.0) -> Transition:
        rows = [r for r in self.rows if r.weight >= min_weight]
        return min(rows, key=lambda r: abs(r.frequency - delta))


def transition_table(dressed: DressedSystem, psi0: PureState, params: SystemParams | None = None,
                     filter_gamma: float | None = None) -> TransitionTable:
    """All (excited level, ground phonon number) transitions with relative strengths.

    The bare weight is ``|<k|psi0>|^2 |<g,0,m| a |k>|^2``.  When ``params``
    is given, each level also gets a first-order linewidth
    ``gamma_k = <k| kappa P_photon + gamma_a P_atom + gamma_m N |k>`` and the
    weight becomes the expected Lorentzian peak height through the filter,
    ``bare / (gamma_k (gamma_k + Gamma))``.  Weights are normalised to max 1.
    """
    dim = dressed.vectors.shape[0]
    if psi0.amps.size != dim:
        raise ValueError(f"state dimension {psi0.amps.size} does not match dressed basis {dim}")
    n = dim // 2
    overlap = np.abs(dressed.vectors.conj().T @ psi0.amps) ** 2
    photon = np.abs(dressed.vectors[n:, :]) ** 2  # (m, k)
    linewidth = np.zeros(dim)
    if params is not None:
        m = np.arange(n)
        loss = np.concatenate([params.gamma_a + params.gamma_m * m, params.kappa + params.gamma_m * m])
        linewidth = (np.abs(dressed.vectors) ** 2).T @ loss
    gamma_f = 0.0 if filter_gamma is None else float(filter_gamma)
    rows = []
    for k in range(dim):
        for mm in range(n):
            bare = float(overlap[k] * photon[mm, k])
            if params is None:
                strength = bare
            else:
                width = linewidth[k] * (linewidth[k] + gamma_f)
                strength = bare / width if width > 0 else 0.0
            freq = float(dressed.levels[k] - dressed.ground_levels[mm])
            rows.append([k, mm, freq, strength, bare, float(linewidth[k])])
    top = max((r[3] for r in rows), default=0.0)
    top_bare = max((r[4] for r in rows), default=0.0)
    out = []
    for k, mm, freq, strength, bare, width in rows:
        out.append(Transition(k, mm, freq, strength / top if top > 0 else 0.0,
                              bare / top_bare if top_bare > 0 else 0.0, width))
    return TransitionTable(tuple(out))


def convergence_report(params: SystemParams, m_max_values=(1, 2, 4, 6, 8, 10, 12), n_levels: int = 4) -> list[dict]:
    """Lowest dressed levels as a function of the phonon cutoff."""
    report = []
    for mm in m_max_values:
        dressed = diagonalize_truncated(params, mm)
        report.append({"m_max": int(mm), "levels": [float(x) for x in dressed.levels[:n_levels]]})
    return report

