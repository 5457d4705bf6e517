import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from omcspec import (BasisIndex, Branch, NonDiagonalizableError, OperatorKind, PureState, SystemParams,
                     amplitude_series, build_h_sys, decompose, flux_ledger, generator, make_initial_state,
                     propagate, weighted_time_integral)
from omcspec.hamiltonian import OperatorMatrix
from omcspec.propagator import expint

FROZEN = json.loads((Path(__file__).parent / "data" / "frozen.json").read_text())


def series_expm(h, t, terms=80):
    out = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ (-1j * h * t) / k
        out = out + term
    return out


def random_generator(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    herm = (a + a.conj().T) / 2
    loss = np.diag(rng.uniform(0.05, 1.0, dim))
    return OperatorMatrix(herm - 0.5j * loss, OperatorKind.NON_HERMITIAN)


def test_two_level_matches_series_exponential():
    p = SystemParams(g_a=0.7, g_m=0.0, kappa=0.3, gamma_a=0.1, m_max=0)
    h = generator(p)
    cache = decompose(h)
    psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, p)
    for t in (0.0, 0.5, 1.7, 3.0):
        np.testing.assert_allclose(propagate(cache, psi0, t).amps, series_expm(h.entries, t) @ psi0.amps, atol=1e-12)


def test_hermitian_path_uses_unitary_inverse():
    cache = decompose(build_h_sys(SystemParams(m_max=3)))
    np.testing.assert_allclose(cache.inverse_vectors, cache.right_vectors.conj().T)
    assert cache.condition_estimate == 1.0


@given(st.floats(0.0, 2.0), st.floats(0.0, 1.5), st.floats(0.0, 20.0))
def test_lossless_evolution_preserves_norm(ga, gm, t):
    p = SystemParams(g_a=ga, g_m=gm, kappa=0.0, m_max=4)
    cache = decompose(generator(p))
    assert propagate(cache, make_initial_state(Branch.ATOM_EXCITED, 1, p), t).norm2 == pytest.approx(1.0, abs=1e-10)


@given(st.floats(0.05, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 0.5), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_lossy_norm_non_increasing(kappa, gamma_a, gamma_m, t, dt):
    p = SystemParams(g_a=1.3, g_m=0.6, kappa=kappa, gamma_a=gamma_a, gamma_m=gamma_m, m_max=3)
    cache = decompose(generator(p))
    psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, p)
    assert propagate(cache, psi0, t + dt).norm2 <= propagate(cache, psi0, t).norm2 + 1e-12


def test_amplitude_series_rows_match_propagate():
    p = SystemParams(kappa=0.5, gamma_m=0.1, m_max=3)
    cache = decompose(generator(p))
    psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, p)
    grid = np.array([0.0, 0.3, 2.0, 7.5])
    rows = amplitude_series(cache, psi0, grid)
    for t, row in zip(grid, rows):
        np.testing.assert_allclose(row, propagate(cache, psi0, t).amps, atol=1e-13)
    with pytest.raises(ValueError):
        amplitude_series(cache, psi0, [0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        amplitude_series(cache, psi0, [-1.0, 1.0])
    with pytest.raises(ValueError):
        propagate(cache, psi0, -0.1)


def test_state_dimension_checked():
    cache = decompose(generator(SystemParams(m_max=2)))
    with pytest.raises(ValueError):
        propagate(cache, PureState(np.ones(4)), 1.0)


def test_expint_continuous_at_zero():
    T = 3.0
    for z in (1e-9, 1e-7j, -2e-11 + 1e-11j, 1e-12j, 0.0):
        zt = z * T
        series = T * (1 + zt / 2 + zt**2 / 6 + zt**3 / 24)
        assert expint(z, T) == pytest.approx(series, rel=1e-15, abs=1e-15)
    assert expint(2.0, 1.5) == pytest.approx(np.expm1(3.0) / 2.0, rel=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_weighted_integral_matches_adaptive_quadrature(seed):
    rng = np.random.default_rng(seed)
    h = random_generator(rng, 4)
    cache = decompose(h)
    psi0 = PureState(rng.normal(size=4) + 1j * rng.normal(size=4))
    alpha = complex(rng.uniform(0.0, 0.3), rng.uniform(-3, 3))
    T = rng.uniform(0.5, 4.0)
    comp = BasisIndex(Branch.PHOTON_IN_CAVITY, 1)  # flat index 3 when m_max = 1

    def f(s, part):
        v = np.exp(alpha * s) * (series_expm(h.entries, s, 120) @ psi0.amps)[3]
        return v.real if part == 0 else v.imag

    ref = complex(quad(f, 0, T, args=(0,), epsabs=1e-13, epsrel=1e-12, limit=200)[0],
                  quad(f, 0, T, args=(1,), epsabs=1e-13, epsrel=1e-12, limit=200)[0])
    got = weighted_time_integral(cache, psi0, comp, alpha, T)
    assert abs(got - ref) <= 1e-8 * abs(ref)


def test_exceptional_point_is_rejected():
    # g_a = kappa / 4 makes the two-level generator defective
    p = SystemParams(g_a=0.125, g_m=0.0, kappa=0.5, m_max=0)
    with pytest.raises(NonDiagonalizableError):
        decompose(generator(p))


def test_jump_operator_cannot_be_decomposed():
    from omcspec import JumpChannel, jump_operator
    with pytest.raises(ValueError):
        decompose(jump_operator(JumpChannel.MECHANICAL, SystemParams(m_max=2)))


def test_ledger_matches_ode_oracle():
    ref = FROZEN["detected"][0]
    p = SystemParams(**ref["params"])
    led = flux_ledger(decompose(generator(p)), make_initial_state(Branch.ATOM_EXCITED, 0, p), p, ref["T"])
    assert led.detected[-1] == pytest.approx(ref["detected"], abs=1e-6)
    assert led.norm2[-1] == pytest.approx(ref["norm2"], abs=1e-12)
    assert led.truncation_leak > 0
    s = led.summary()
    assert set(s) >= {"norm2", "detected", "spontaneous", "phonon_loss", "truncation_leak", "residual"}


@given(st.floats(0.1, 1.0), st.floats(0.0, 0.8), st.floats(0.0, 0.3))
def test_ledger_balance_with_all_channels(kappa, gamma_a, gamma_m):
    p = SystemParams(g_a=2.0, g_m=0.7, kappa=kappa, gamma_a=gamma_a, gamma_m=gamma_m, m_max=4)
    led = flux_ledger(decompose(generator(p)), make_initial_state(Branch.ATOM_EXCITED, 1, p), p, 15.0, n_steps=2000)
    assert led.residual < 1e-6
    assert np.all(np.diff(led.detected) >= -1e-15)


def test_ledger_rejects_bad_grid():
    p = SystemParams(m_max=1)
    cache = decompose(generator(p))
    psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, p)
    with pytest.raises(ValueError):
        flux_ledger(cache, psi0, p, 10.0, n_steps=1)
    with pytest.raises(ValueError):
        flux_ledger(cache, psi0, p, 0.0)
