"""Truncated Fock-space oracle: operators, densities, Q values, identities."""

import numpy as np
import pytest

from gnp import fockoracle as fo
from gnp.errors import TruncationError
from gnp.matcore import structured

LN2 = np.log(2.0)


# ---------------------------------------------------------------------------
# operators

def test_annihilator_matrix_elements():
    a = fo.annihilator(1, 1, 5).matrix
    expected = np.diag(np.sqrt([1.0, 2.0, 3.0, 4.0]), 1)
    np.testing.assert_allclose(a, expected)


def test_annihilator_two_modes_commute():
    a1 = fo.annihilator(2, 1, 4).matrix
    a2 = fo.annihilator(2, 2, 4).matrix
    np.testing.assert_allclose(a1 @ a2, a2 @ a1, atol=1e-14)


def test_quad_operator_number_form():
    # M = E gives a^+ a + 1/2 away from the truncation edge
    D = 12
    op = fo.quad_operator(structured("E", 1), D).matrix
    diag = np.diag(op).real
    np.testing.assert_allclose(diag[:-1], np.arange(D - 1) + 0.5, atol=1e-13)


def test_quad_operator_zero_and_squeeze_forms():
    D = 8
    zero = fo.quad_operator(np.zeros((2, 2)), D).matrix
    assert np.abs(zero).max() == 0.0
    a = fo.annihilator(1, 1, D).matrix
    sq = fo.quad_operator(np.eye(2), D).matrix
    np.testing.assert_allclose(sq, 0.5 * (a @ a + a.conj().T @ a.conj().T),
                               atol=1e-13)


# ---------------------------------------------------------------------------
# densities

def test_thermal_density_bose_einstein_diagonal():
    D = 30
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), D).matrix
    k = np.arange(D)
    # the retained block is renormalized, so compare against the truncated
    # geometric distribution; the 2^-30 normalization floor sits just above
    # the raw Bose-Einstein weights
    expected = np.exp(-LN2 * k) / np.exp(-LN2 * k).sum()
    np.testing.assert_allclose(np.diag(rho).real[:D - 5], expected[:D - 5],
                               atol=1e-10)
    assert abs(rho[0, 0].real - 0.5) < 1e-9


def test_thermal_mean_occupation():
    D = 40
    n_op = fo.annihilator(1, 1, D).matrix
    n_op = n_op.conj().T @ n_op
    rho1 = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), D).matrix
    assert abs(np.trace(rho1 @ n_op).real - 1.0) < 1e-10
    rho3 = fo.gaussian_density(fo.PhysicalSpec("thermal", [3.0]), D).matrix
    assert abs(np.trace(rho3 @ n_op).real - 1.0 / (np.e ** 3 - 1)) < 1e-10


def test_squeezed_thermal_density_valid():
    rho = fo.gaussian_density(
        fo.PhysicalSpec("squeezed-thermal", [LN2], [0.5]), 40)
    assert abs(rho.trace().real - 1.0) < 1e-12
    w = np.linalg.eigvalsh(rho.matrix)
    assert w.min() > -1e-12


# ---------------------------------------------------------------------------
# coherent states and Q values

def test_coherent_vector_cases():
    v0 = fo.coherent_vector(0.0, 10)
    np.testing.assert_allclose(v0, np.eye(10)[0], atol=1e-15)
    v1 = fo.coherent_vector(1.0, 30)
    assert abs(np.linalg.norm(v1) - 1.0) < 1e-12
    with pytest.raises(TruncationError):
        fo.coherent_vector(4.0, 10)


def test_q_of_rho_thermal_profile():
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), 40)
    for z in (0.0, 0.8, 0.5 + 0.5j):
        q = fo.q_of_rho(rho, z)
        assert abs(q - 0.5 * np.exp(-abs(z) ** 2 / 2)) < 1e-9


def test_r_from_q_hessian_thermal():
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), 40)
    R = fo.r_from_q_hessian(rho)
    np.testing.assert_allclose(R.real, 0.5 * structured("E", 1), atol=1e-6)
    assert np.abs(R.imag).max() < 1e-6


def test_r_from_q_hessian_vacuum_limit():
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [20.0]), 40)
    R = fo.r_from_q_hessian(rho)
    np.testing.assert_allclose(R.real, structured("E", 1), atol=1e-5)


# ---------------------------------------------------------------------------
# Liouville evolution

def test_liouville_thermal_stationary():
    D = 30
    rho0 = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), D)
    rho_t = fo.liouville_step(rho0, LN2 * structured("E", 1), 0.7)
    np.testing.assert_allclose(rho_t.matrix, rho0.matrix, atol=1e-12)


def test_liouville_squeezing_excites_vacuum():
    # near-vacuum under the squeeze generator: <n>(t) = sinh^2 t
    D = 40
    rho0 = fo.gaussian_density(fo.PhysicalSpec("thermal", [20.0]), D)
    rho_t = fo.liouville_step(rho0, np.eye(2), 0.5)
    a = fo.annihilator(1, 1, D).matrix
    n_mean = np.trace(rho_t.matrix @ (a.conj().T @ a)).real
    assert abs(n_mean - np.sinh(0.5) ** 2) < 1e-6


def test_liouville_preserves_purity():
    D = 30
    rho0 = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), D)
    rho_t = fo.liouville_step(rho0, np.array([[0.5, 1.0], [1.0, 0.5]]), 0.4)
    p0 = np.trace(rho0.matrix @ rho0.matrix).real
    pt = np.trace(rho_t.matrix @ rho_t.matrix).real
    assert abs(p0 - pt) < 1e-10


# ---------------------------------------------------------------------------
# derivative identities

def test_derivative_identities_thermal():
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), 40)
    rep = fo.derivative_identity_check(rho, 0.3 + 0.1j)
    assert not rep.truncation_flagged
    assert rep.residual_rho_a <= 1e-6
    assert rep.residual_at_rho <= 1e-6


def test_derivative_identities_at_origin():
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), 40)
    rep = fo.derivative_identity_check(rho, 0.0)
    assert rep.residual_rho_a <= 1e-8
    assert rep.residual_at_rho <= 1e-8


def test_derivative_identities_flag_truncation():
    rho = fo.gaussian_density(fo.PhysicalSpec("thermal", [LN2]), 15)
    rep = fo.derivative_identity_check(rho, 3.0)
    assert rep.truncation_flagged
