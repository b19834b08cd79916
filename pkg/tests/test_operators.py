import numpy as np
import pytest
import scipy.sparse as sp

from mechqed.operators import (
    PSD_TOL,
    create,
    dense,
    destroy,
    embed,
    expectation,
    identity,
    is_hermitian,
    min_eigenvalue,
    number,
    thermal_state,
    total_dim,
)


def test_destroy_qubit():
    np.testing.assert_allclose(destroy(2), [[0, 1], [0, 0]])


def test_destroy_sqrt_ladder():
    a = destroy(3)
    expected = np.zeros((3, 3))
    expected[0, 1] = 1.0
    expected[1, 2] = np.sqrt(2.0)
    np.testing.assert_allclose(a, expected)


@pytest.mark.parametrize("n", [2, 3, 5, 12])
def test_number_operator_identity(n):
    a = destroy(n)
    np.testing.assert_allclose(a.conj().T @ a, number(n), atol=1e-14)


def test_destroy_rejects_small_truncation():
    with pytest.raises(ValueError):
        destroy(1)


@pytest.mark.parametrize("n", [2, 4, 9])
def test_commutator_identity_up_to_truncation(n):
    a = destroy(n)
    comm = a @ a.conj().T - a.conj().T @ a
    # only the last diagonal entry is corrupted by the truncation
    np.testing.assert_allclose(np.diag(comm)[: n - 1], np.ones(n - 1), atol=1e-14)
    assert np.isclose(comm[n - 1, n - 1], -(n - 1))


def test_embed_identity_is_identity():
    dims = (2, 3, 4)
    for k, n in enumerate(dims):
        out = dense(embed(np.eye(n), k, dims))
        np.testing.assert_allclose(out, np.eye(total_dim(dims)), atol=1e-15)


def test_embed_is_kron_for_first_mode():
    out = embed(destroy(2), 0, (2, 2))
    np.testing.assert_allclose(out, np.kron(destroy(2), np.eye(2)), atol=1e-15)


def test_embedded_operators_on_distinct_modes_commute():
    dims = (3, 4)
    a = embed(destroy(3), 0, dims)
    c = embed(destroy(4), 1, dims)
    np.testing.assert_allclose(a @ c - c @ a, np.zeros((12, 12)), atol=1e-14)


def test_embed_dimension_mismatch():
    with pytest.raises(ValueError):
        embed(destroy(3), 0, (2, 2))


def test_embed_goes_sparse_above_threshold():
    small = embed(destroy(4), 0, (4, 4))           # dim 16: dense
    large = embed(destroy(4), 0, (4, 4, 5))        # dim 80: sparse
    assert isinstance(small, np.ndarray)
    assert sp.issparse(large)
    assert sp.issparse(identity((4, 4, 5)))


def test_embed_preserves_spectral_norm():
    rng = np.random.default_rng(7)
    op = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    for dims in [(2, 3), (3, 4), (4, 3, 7)]:
        k = dims.index(3)
        embedded = dense(embed(op, k, dims))
        assert np.isclose(
            np.linalg.norm(embedded, 2), np.linalg.norm(op, 2), rtol=1e-12
        )


def test_expectation_vacuum_number_is_zero():
    vac = np.zeros((5, 5), dtype=complex)
    vac[0, 0] = 1.0
    assert expectation(vac, number(5)) == 0


def test_expectation_thermal_mean_occupation():
    n_bar = 0.8
    rho = thermal_state(n_bar, 60)
    # the truncated tail is negligible at this size
    assert np.isclose(expectation(rho, number(60)).real, n_bar, rtol=1e-12)


def test_expectation_real_for_hermitian_operator():
    rng = np.random.default_rng(3)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    rho = thermal_state(0.5, 4)
    assert abs(expectation(rho, h).imag) < 1e-14


def test_expectation_adjoint_conjugates():
    rng = np.random.default_rng(11)
    op = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    # random valid density matrix
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    assert np.isclose(
        expectation(rho, op.conj().T), np.conj(expectation(rho, op)), rtol=1e-12
    )


def test_expectation_warns_on_bad_trace():
    rho = np.eye(3, dtype=complex)  # trace 3
    with pytest.warns(UserWarning, match="trace"):
        expectation(rho, number(3))


def test_expectation_dimension_mismatch():
    with pytest.raises(ValueError):
        expectation(thermal_state(0.1, 3), number(4))


def test_expectation_matches_for_sparse_operator():
    rho = thermal_state(0.7, 6)
    op = number(6)
    dense_val = expectation(rho, op)
    sparse_val = expectation(rho, sp.csr_matrix(op))
    assert np.isclose(dense_val, sparse_val)


def test_hermiticity_and_psd_helpers():
    rho = thermal_state(0.4, 5)
    assert is_hermitian(rho)
    assert min_eigenvalue(rho) >= -PSD_TOL
    assert not is_hermitian(destroy(4))
