"""Parameters, single-excitation basis and conditional state.

All frequencies are in units of the mechanical frequency and times in units
of its inverse; hbar = 1.  The tracked sector is spanned by ``|e,0,m>``
(atom excited, amplitude ``a_m``) and ``|g,1,m>`` (one cavity photon,
amplitude ``b_m``) for ``m = 0..m_max`` phonons.
"""
from __future__ import annotations

import enum
import numbers
import math
from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np


class ParameterError(ValueError):
    """Raised when a parameter set fails validation."""


class Branch(enum.Enum):
    ATOM_EXCITED = "atom_excited"
    PHOTON_IN_CAVITY = "photon_in_cavity"


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the atom + optomechanical cavity system.

    Defaults reproduce the lossless strong-strong coupling set
    (g_a = 4, g_m = 1.2, kappa = 0.5, ten phonons).
    """

    delta_a: float = 0.0
    g_a: float = 4.0
    g_m: float = 1.2
    kappa: float = 0.5
    gamma_a: float = 0.0
    gamma_m: float = 0.0
    mbar: float = 0.0
    m_max: int = 10
    include_mbar_terms: bool = False

    @property
    def n_phonon(self) -> int:
        return self.m_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.m_max + 1)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
        return cls(**data)


class BasisIndex(NamedTuple):
    branch: Branch
    phonons: int


def flat_index(b: BasisIndex, m_max: int) -> int:
    """Position of ``b`` in the amplitude vector.

    ``|e,0,m>`` sits at ``m`` and ``|g,1,m>`` at ``m_max + 1 + m``.
    """
    branch, m = b
    if not 0 <= m <= m_max:
        raise IndexError(f"phonon number {m} outside [0, {m_max}]")
    if branch is Branch.ATOM_EXCITED:
        return m
    return m_max + 1 + m


def basis_index(i: int, m_max: int) -> BasisIndex:
    """Inverse of :func:`flat_index`."""
    n = m_max + 1
    if not 0 <= i < 2 * n:
        raise IndexError(f"flat index {i} outside [0, {2 * n})")
    if i < n:
        return BasisIndex(Branch.ATOM_EXCITED, i)
    return BasisIndex(Branch.PHOTON_IN_CAVITY, i - n)


@dataclass(frozen=True)
class PureState:
    """Unnormalised no-jump state at a given time."""

    amps: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size % 2:
            raise ValueError("amplitude vector must be 1-D with even length")
        if self.time < 0:
            raise ValueError("time must be non-negative")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def m_max(self) -> int:
        return self.amps.size // 2 - 1

    @property
    def atom(self) -> np.ndarray:
        """Amplitudes ``a_m``."""
        return self.amps[: self.m_max + 1]

    @property
    def photon(self) -> np.ndarray:
        """Amplitudes ``b_m``."""
        return self.amps[self.m_max + 1 :]

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)


def make_initial_state(branch: Branch, m0: int, params: SystemParams) -> PureState:
    amps = np.zeros(params.dim, dtype=complex)
    amps[flat_index(BasisIndex(branch, m0), params.m_max)] = 1.0
    return PureState(amps, 0.0)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" | "warning"
    code: str
    message: str


_RATES = ("g_a", "g_m", "kappa", "gamma_a", "gamma_m", "mbar")


def validate(params: SystemParams) -> list[Diagnostic]:
    """Collect errors and regime warnings for ``params``; never raises."""
    out = []
    for name in ("delta_a",) + _RATES:
        value = getattr(params, name)
        if not isinstance(value, numbers.Real) or not math.isfinite(value):
            out.append(Diagnostic("error", "non_finite", f"{name} must be a finite number"))
        elif name != "delta_a" and value < 0:
            out.append(Diagnostic("error", "negative", f"{name} must be non-negative, got {value}"))
    if not isinstance(params.m_max, numbers.Integral) or isinstance(params.m_max, bool) or params.m_max < 0:
        out.append(Diagnostic("error", "m_max", "m_max must be a non-negative integer"))
    elif params.m_max == 0 and params.g_m > 0:
        out.append(Diagnostic("error", "m_max", "m_max >= 1 is required when g_m > 0"))
    if out:
        return out

    if params.kappa >= 1.0:
        out.append(
            Diagnostic("warning", "good_cavity", f"kappa = {params.kappa} >= omega_M: sidebands will not be resolved")
        )
    thermal = params.gamma_m * params.mbar
    if thermal > 0 and thermal >= params.kappa:
        out.append(
            Diagnostic("warning", "weak_damping", f"gamma_m * mbar = {thermal} >= kappa: weak-damping limit violated")
        )
    return out


def check(params: SystemParams) -> SystemParams:
    """Raise :class:`ParameterError` on any error-level diagnostic."""
    errors = [d.message for d in validate(params) if d.level == "error"]
    if errors:
        raise ParameterError("; ".join(errors))
    return params
