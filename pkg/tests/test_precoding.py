"""Precoders, SINR and the two rate metrics."""

import numpy as np
import pytest

from beamsel.errors import RankDeficient
from beamsel.linalg import gram, hermitian_eig
from beamsel.precoding import (
    Precoder,
    sinr,
    sumrate_parallel,
    sumrate_sinr,
    svd_precoder,
    zf_precoder,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestZfPrecoder:
    def test_identity_channel(self):
        k = 3
        p = zf_precoder(np.eye(k, dtype=complex), rho=float(k))
        assert np.allclose(p.matrix, np.eye(k), atol=1e-12)
        assert abs(sinr(np.eye(k, dtype=complex), p, 0, 1.0) - 1.0) <= 1e-12

    def test_diagonal_closed_form(self):
        hs = np.diag([1.0, 2.0]).astype(complex)
        p = zf_precoder(hs, rho=1.0)
        c = 2.0 / np.sqrt(5.0)
        assert np.allclose(p.matrix, c * np.diag([1.0, 0.5]), atol=1e-12)

    def test_interference_free(self):
        rng = np.random.default_rng(10)
        hs = crandn(rng, 6, 3)
        p = zf_precoder(hs, rho=2.0)
        cross = hs.conj().T @ p.matrix
        off = cross - np.diag(np.diag(cross))
        assert np.max(np.abs(off)) <= 1e-10

    def test_power_budget(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            hs = crandn(rng, 5, 3)
            p = zf_precoder(hs, rho=1.7)
            power = np.trace(p.matrix.conj().T @ p.matrix).real
            assert abs(power - 1.7) <= 1e-10 * 1.7

    def test_rank_deficient(self):
        hs = np.ones((4, 2), dtype=complex)  # identical columns
        with pytest.raises(RankDeficient):
            zf_precoder(hs, rho=1.0)

    def test_interference_negligible_relative_to_signal(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            hs = crandn(rng, 8, 4)
            p = zf_precoder(hs, rho=1.0)
            for k in range(4):
                gains = np.abs(hs[:, k].conj() @ p.matrix) ** 2
                assert gains.sum() - gains[k] <= 1e-18 * gains[k]


class TestSvdPrecoder:
    def test_identity_channel(self):
        k = 3
        p = svd_precoder(np.eye(k, dtype=complex), rho=float(k))
        assert np.allclose(np.abs(p.matrix), np.eye(k), atol=1e-10)

    def test_orthogonal_columns_order(self):
        hs = np.zeros((4, 2), dtype=complex)
        hs[0, 1] = 2.0  # second user has the stronger column
        hs[1, 0] = 1.0
        p = svd_precoder(hs, rho=2.0)
        # leading precoder column aligns with the norm-2 channel column
        assert abs(np.abs(p.matrix[0, 0]) - 1.0) <= 1e-12
        assert abs(np.abs(p.matrix[1, 1]) - 1.0) <= 1e-12

    def test_power_budget(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            hs = crandn(rng, 6, 4)
            p = svd_precoder(hs, rho=3.0)
            power = np.trace(p.matrix.conj().T @ p.matrix).real
            assert abs(power - 3.0) <= 1e-12 * 3.0


class TestSinr:
    def test_single_user(self):
        hs = np.array([[1.0], [0.0]], dtype=complex)
        p = Precoder(np.array([[1.0], [0.0]], dtype=complex), 1.0)
        assert abs(sinr(hs, p, 0, 1.0) - 1.0) <= 1e-12

    def test_zf_kills_interference(self):
        hs = np.eye(2, dtype=complex)
        p = zf_precoder(hs, rho=2.0)
        for k in (0, 1):
            gains = np.abs(hs[:, k].conj() @ p.matrix) ** 2
            assert gains.sum() - gains[k] <= 1e-18 * gains[k]

    def test_double_loop_oracle(self):
        rng = np.random.default_rng(13)
        hs = crandn(rng, 5, 3)
        p = Precoder(crandn(rng, 5, 3), 1.0)
        n0 = 0.3
        for k in range(3):
            desired = abs(np.vdot(hs[:, k], p.matrix[:, k])) ** 2
            interference = sum(
                abs(np.vdot(hs[:, k], p.matrix[:, i])) ** 2 for i in range(3) if i != k
            )
            assert abs(sinr(hs, p, k, n0) - desired / (interference + n0)) <= 1e-12


class TestSumrates:
    def test_unit_sinr_per_user(self):
        hs = np.eye(3, dtype=complex)
        p = zf_precoder(hs, rho=3.0)
        report = sumrate_sinr(hs, p, n0=1.0)
        assert abs(report.sum_rate - 3.0) <= 1e-10
        assert report.metric == "zf"

    def test_single_user_rate(self):
        hs = np.array([[1.0]], dtype=complex)
        p = Precoder(np.array([[np.sqrt(3.0)]], dtype=complex), 3.0)
        report = sumrate_sinr(hs, p, n0=1.0)
        assert abs(report.sum_rate - 2.0) <= 1e-12

    def test_recompute_oracle(self):
        rng = np.random.default_rng(14)
        hs = crandn(rng, 6, 3)
        p = zf_precoder(hs, rho=1.0)
        report = sumrate_sinr(hs, p, n0=0.1)
        manual = sum(np.log2(1.0 + sinr(hs, p, k, 0.1)) for k in range(3))
        assert abs(report.sum_rate - manual) <= 1e-12
        assert abs(report.sum_rate - report.per_user_rates.sum()) <= 1e-12

    def test_parallel_simple(self):
        report = sumrate_parallel(np.array([1.0, 1.0]), rho=2.0, k=2, n0=1.0)
        assert abs(report.sum_rate - 2.0) <= 1e-12
        report = sumrate_parallel(np.zeros(4), rho=1.0, k=4, n0=1.0)
        assert report.sum_rate == 0.0

    def test_parallel_identity_channel(self):
        k = 5
        eigs = hermitian_eig(gram(np.eye(k, dtype=complex))).values
        report = sumrate_parallel(eigs, rho=float(k), k=k, n0=1.0)
        assert abs(report.sum_rate - k) <= 1e-12


def stream_rates_via_receiver(hs, rho, n0):
    """Explicit pipeline: precode with the left singular basis, apply the
    right singular basis at the receive side, read per-stream SNRs."""
    k = hs.shape[1]
    sys = hermitian_eig(gram(hs))
    p = svd_precoder(hs, rho)
    effective = sys.vectors.conj().T @ (hs.conj().T @ p.matrix)
    rates = [np.log2(1.0 + abs(effective[i, i]) ** 2 / n0) for i in range(k)]
    return float(np.sum(rates)), effective


def test_parallel_channel_equivalence():
    rng = np.random.default_rng(15)
    for _ in range(30):
        hs = crandn(rng, 6, 3)
        eigs = hermitian_eig(gram(hs)).values
        direct = sumrate_parallel(eigs, rho=1.0, k=3, n0=0.05).sum_rate
        explicit, effective = stream_rates_via_receiver(hs, 1.0, 0.05)
        assert abs(direct - explicit) <= 1e-10
        off = effective - np.diag(np.diag(effective))
        assert np.max(np.abs(off)) <= 1e-8
