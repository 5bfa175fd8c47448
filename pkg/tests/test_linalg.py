import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmecert import linalg


def kron_loop(a, b):
    # element-by-element oracle
    ra, rb = a.shape[0], b.shape[0]
    out = np.zeros((ra * rb, ra * rb), dtype=complex)
    for i, j, k, l in itertools.product(range(ra), range(ra), range(rb), range(rb)):
        out[i * rb + k, j * rb + l] = a[i, j] * b[k, l]
    return out


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_paulis_are_read_only():
    with pytest.raises(ValueError):
        linalg.SIGMA_X[0, 0] = 5


def test_pauli_algebra():
    x, y, z = linalg.PAULIS
    assert np.allclose(x @ y, 1j * z)
    assert np.allclose(y @ z, 1j * x)
    for s in linalg.PAULIS:
        assert np.allclose(s @ s, linalg.I2)


@pytest.mark.parametrize("da,db", [(2, 2), (2, 4), (4, 2)])
def test_kron_matches_loop(da, db):
    rng = np.random.default_rng(da * 10 + db)
    a = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
    b = rng.normal(size=(db, db)) + 1j * rng.normal(size=(db, db))
    assert np.allclose(linalg.kron(a, b), kron_loop(a, b), atol=1e-14)


def test_kron_all_three_factors():
    x, y, z = linalg.PAULIS
    assert np.allclose(linalg.kron_all(x, y, z), np.kron(np.kron(x, y), z))


def test_kron_rejects_non_square():
    with pytest.raises(ValueError):
        linalg.kron(np.zeros((2, 3)), np.eye(2))


@pytest.mark.parametrize("d", [2, 4, 8])
def test_jacobi_matches_eigvalsh(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        h = random_hermitian(rng, d)
        vals, vecs = linalg.jacobi_eigh(h)
        assert np.allclose(vals, np.linalg.eigvalsh(h), atol=1e-10)
        assert np.allclose(h @ vecs, vecs * vals, atol=1e-9)
        assert np.allclose(vecs.conj().T @ vecs, np.eye(d), atol=1e-10)


def test_jacobi_degenerate_and_diagonal():
    assert np.allclose(linalg.eigen_hermitian(np.eye(8)), np.ones(8))
    assert np.allclose(linalg.eigen_hermitian(np.diag([3.0, -1.0])), [-1.0, 3.0])
    assert np.allclose(linalg.eigen_hermitian(linalg.SIGMA_Y), [-1.0, 1.0])


def test_non_hermitian_raises():
    with pytest.raises(linalg.NotHermitianError):
        linalg.is_psd(np.array([[0, 1], [0, 0]]))


def test_is_psd():
    assert linalg.is_psd(np.eye(4) / 4)
    assert not linalg.is_psd(linalg.SIGMA_Z)
    assert linalg.is_psd(np.diag([1.0, -1e-12]))


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    a, b, c = (random_density(rng, 2) for _ in range(3))
    rho = linalg.kron_all(a, b, c)
    assert np.allclose(linalg.partial_trace(rho, [0]), a)
    assert np.allclose(linalg.partial_trace(rho, [1]), b)
    assert np.allclose(linalg.partial_trace(rho, [0, 2]), np.kron(a, c))
    assert np.allclose(linalg.partial_trace(rho, [1, 2]), np.kron(b, c))


def test_permute_subsystems():
    rng = np.random.default_rng(1)
    a, b, c = (random_density(rng, 2) for _ in range(3))
    rho = linalg.kron_all(a, b, c)
    assert np.allclose(linalg.permute_subsystems(rho, (2, 0, 1)), linalg.kron_all(c, a, b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_and_spectrum_of_random_states(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 8)
    vals = linalg.eigen_hermitian(rho)
    assert abs(sum(vals) - 1) < 1e-10
    assert min(vals) > -1e-10
    assert abs(linalg.trace(linalg.partial_trace(rho, [1])) - 1) < 1e-12
