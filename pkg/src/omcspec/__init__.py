"""Conditional dynamics and time-dependent filtered emission spectrum of a
two-level atom in an optomechanical cavity (single-excitation sector)."""

__version__ = "0.1.0"

from .model import (Branch, BasisIndex, Diagnostic, ParameterError, PureState, SystemParams, basis_index,
                    check, flat_index, make_initial_state, validate)
from .hamiltonian import (JumpChannel, OperatorKind, OperatorMatrix, build_h_dnh, build_h_nh, build_h_sys,
                          generator, jump_operator)
from .propagator import (FluxLedger, NonDiagonalizableError, PropagatorCache, amplitude_series, decompose,
                         flux_ledger, propagate, weighted_time_integral)
from .spectrum import (Backend, FilterSpec, Mode, Peak, PeakSet, SpectrumResult, correlation_kernel,
                       ew_counts_closed, ew_counts_quadrature, find_peaks, spectrum, thermal_spectrum,
                       thermal_weights)
from .dressed import (DressedSystem, Transition, TransitionTable, UnsupportedRegimeError, closed_form_levels,
                      closed_form_vectors, convergence_report, diagonalize_truncated, transition_table)

__all__ = [name for name in dir() if not name.startswith("_")]
