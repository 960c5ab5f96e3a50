"""Gram, eigensolver and row-energy kernels against independent oracles."""

import numpy as np
import pytest

from beamsel.errors import NonHermitianInput
from beamsel.linalg import EigenSystem, gram, hermitian_eig, row_energies


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def gram_bruteforce(h):
    """Triple-loop reference: result[i][j] = sum_n conj(h[n,i]) h[n,j]."""
    n, k = h.shape
    out = np.zeros((k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            for r in range(n):
                out[i, j] += np.conj(h[r, i]) * h[r, j]
    return out


class TestGram:
    def test_identity(self):
        assert np.allclose(gram(np.eye(2)), np.eye(2))

    def test_diagonal_columns(self):
        h = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
        assert np.allclose(gram(h), np.diag([1.0, 4.0]))

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(42)
        h = crandn(rng, 5, 3)
        assert np.allclose(gram(h), gram_bruteforce(h), atol=1e-12)

    def test_exactly_hermitian(self):
        rng = np.random.default_rng(1)
        g = gram(crandn(rng, 7, 4))
        assert np.array_equal(g, g.conj().T)


class TestHermitianEig:
    def test_diagonal(self):
        sys = hermitian_eig(np.diag([1.0, 3.0]).astype(complex))
        assert np.allclose(sys.values, [3.0, 1.0])

    def test_quadratic_characteristic_polynomial(self):
        # [[a, b], [b, c]] has eigenvalues (a+c)/2 +- sqrt(((a-c)/2)^2 + b^2)
        a, b, c = 2.0, -1.0, 0.0
        mean = (a + c) / 2
        disc = np.sqrt(((a - c) / 2) ** 2 + b * b)
        sys = hermitian_eig(np.array([[a, b], [b, c]], dtype=complex))
        assert np.allclose(sys.values, [mean + disc, mean - disc], atol=1e-12)
        assert np.allclose(sys.values, [1 + np.sqrt(2), 1 - np.sqrt(2)], atol=1e-12)

    def test_identity(self):
        sys = hermitian_eig(np.eye(4, dtype=complex))
        assert np.allclose(sys.values, np.ones(4))
        assert np.allclose(sys.vectors.conj().T @ sys.vectors, np.eye(4), atol=1e-12)

    def test_charpoly_roots_k3(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            g = gram(crandn(rng, 4, 3))
            # coefficients of det(G - x I) for a 3x3 Hermitian matrix
            c2 = -np.trace(g).real
            c1 = 0.5 * (np.trace(g).real ** 2 - np.trace(g @ g).real)
            c0 = -np.linalg.det(g).real
            roots = np.sort(np.roots([1.0, c2, c1, c0]).real)[::-1]
            assert np.allclose(hermitian_eig(g).values, roots, atol=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianInput):
            hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex))

    def test_reconstruction_round_trip(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            g = gram(crandn(rng, 12, 6))
            sys = hermitian_eig(g)
            rebuilt = (sys.vectors * sys.values) @ sys.vectors.conj().T
            assert np.linalg.norm(rebuilt - g) <= 1e-8 * np.linalg.norm(g)
            off = sys.vectors.conj().T @ sys.vectors - np.eye(6)
            assert np.linalg.norm(off) <= 1e-10

    def test_gram_spectrum_nonnegative(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(2, 20))
            k = int(rng.integers(1, 10))
            sys = hermitian_eig(gram(crandn(rng, n, k)))
            assert np.all(sys.values >= -1e-10 * sys.values[0])


class TestRowEnergies:
    def test_identity(self):
        assert np.allclose(row_energies(np.eye(2)), [1.0, 1.0])

    def test_zero_row(self):
        assert np.allclose(row_energies(np.array([[1.0, 1.0], [0.0, 0.0]])), [2.0, 0.0])

    def test_sum_equals_gram_trace(self):
        rng = np.random.default_rng(3)
        h = crandn(rng, 6, 2)
        assert abs(row_energies(h).sum() - np.trace(gram(h)).real) <= 1e-12


def test_trace_identity_random_sizes():
    """Sum of Gram eigenvalues equals the squared Frobenius norm."""
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(1, 33))
        k = int(rng.integers(1, 17))
        h = crandn(rng, n, k)
        total = np.sum(np.abs(h) ** 2)
        eig_sum = hermitian_eig(gram(h)).values.sum()
        assert abs(eig_sum - total) <= 1e-10 * total


def test_eigensystem_helpers():
    sys = EigenSystem(np.array([2.0, 1.0]), np.eye(2, dtype=complex))
    dup = sys.copy()
    dup.values[0] = 7.0
    assert sys.values[0] == 2.0 and sys.dim == 2
