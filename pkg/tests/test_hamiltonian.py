import numpy as np
import pytest
from hypothesis import given, strategies as st

from omcspec import (JumpChannel, OperatorKind, SystemParams, build_h_dnh, build_h_nh, build_h_sys, generator,
                     jump_operator)

rates = st.floats(0.0, 3.0)
params_st = st.builds(SystemParams, delta_a=st.floats(-3, 3), g_a=rates, g_m=rates, kappa=rates, gamma_a=rates,
                      gamma_m=rates, mbar=st.floats(0, 2), m_max=st.integers(1, 6),
                      include_mbar_terms=st.booleans())


def test_structure_small_case():
    p = SystemParams(delta_a=0.3, g_a=2.0, g_m=0.5, m_max=2)
    h = build_h_sys(p).entries
    expected = np.array([
        [0.3, 0, 0, 2, 0, 0],
        [0, 1.3, 0, 0, 2, 0],
        [0, 0, 2.3, 0, 0, 2],
        [2, 0, 0, 0, -0.5, 0],
        [0, 2, 0, -0.5, 1, -0.5 * np.sqrt(2)],
        [0, 0, 2, 0, -0.5 * np.sqrt(2), 2],
    ])
    np.testing.assert_allclose(h, expected, atol=0)
    assert build_h_sys(p).kind is OperatorKind.HERMITIAN


@given(params_st)
def test_h_sys_hermitian_and_within_gershgorin(p):
    h = build_h_sys(p).entries
    np.testing.assert_array_equal(h, h.conj().T)
    ev = np.linalg.eigvalsh(h)
    radius = np.sum(np.abs(h), axis=1) - np.abs(np.diag(h))
    centre = np.diag(h).real
    for e in ev:
        assert np.any(np.abs(e - centre) <= radius + 1e-9)


@given(params_st)
def test_no_jump_generator_equals_jump_sum(p):
    # H_nh = H_sys - (i/2) sum_k J_k^dag J_k
    total = sum(j.entries.conj().T @ j.entries
                for j in (jump_operator(c, p) for c in JumpChannel))
    np.testing.assert_allclose(build_h_nh(p).entries, build_h_sys(p).entries - 0.5j * total, atol=1e-12)


@given(params_st)
def test_generator_is_dissipative(p):
    h = generator(p).entries
    anti = (h - h.conj().T) / 2j
    assert np.all(np.linalg.eigvalsh(anti) <= 1e-12)
    assert np.all(np.linalg.eigvals(h).imag <= 1e-9)


def test_jc_limit_levels():
    p = SystemParams(g_m=0.0, m_max=3)
    ev = np.sort(np.linalg.eigvalsh(build_h_sys(p).entries))
    expected = np.sort([m + s * 4.0 for m in range(4) for s in (1, -1)])
    np.testing.assert_allclose(ev, expected, atol=1e-12)


def test_thermal_terms():
    p = SystemParams(gamma_m=0.2, mbar=0.5, m_max=3, include_mbar_terms=True)
    diff = build_h_dnh(p).entries - build_h_sys(p).entries
    m = np.arange(4)
    mech = 1.5 * 0.2 * m + 0.5 * 0.2 * (m + 1)
    np.testing.assert_allclose(np.diag(diff), -0.5j * np.concatenate([mech, 0.5 + mech]), atol=1e-15)
    off = build_h_dnh(SystemParams(gamma_m=0.2, mbar=0.5, m_max=3)).entries
    np.testing.assert_array_equal(off, build_h_nh(SystemParams(gamma_m=0.2, mbar=0.5, m_max=3)).entries)


def test_jump_shapes_and_amplitudes():
    p = SystemParams(kappa=0.64, gamma_a=0.25, gamma_m=0.09, m_max=2)
    opt = jump_operator(JumpChannel.OPTICAL, p).entries
    assert opt.shape == (3, 6) and opt[1, 4] == pytest.approx(0.8)
    atom = jump_operator(JumpChannel.ATOMIC, p).entries
    assert atom.shape == (3, 6) and atom[2, 2] == pytest.approx(0.5)
    mech = jump_operator(JumpChannel.MECHANICAL, p).entries
    assert mech.shape == (6, 6)
    assert mech[1, 2] == pytest.approx(np.sqrt(0.09 * 2)) and mech[4, 5] == pytest.approx(np.sqrt(0.09 * 2))
    assert jump_operator(JumpChannel.OPTICAL, p).kind is OperatorKind.JUMP


def test_operators_read_only():
    h = build_h_sys(SystemParams(m_max=1)).entries
    with pytest.raises(ValueError):
        h[0, 0] = 1.0
