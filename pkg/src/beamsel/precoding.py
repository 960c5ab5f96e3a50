"""Precoder construction and sum-rate evaluation.

Two rate metrics coexist: the SINR metric evaluates an explicit precoder
against per-user interference, while the parallel metric scores the
selected channel's singular-value profile as independent streams under
uniform power split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient
from .linalg import gram, hermitian_eig
from .opcount import OpCounter

COND_LIMIT = 1e12


@dataclass
class Precoder:
    """Transmit precoding matrix with its power budget.

    trace(matrix^H matrix) equals the budget for every constructor here.
    """

    matrix: np.ndarray
    power: float


@dataclass
class RateReport:
    """Per-user rates in bits/s/Hz plus their sum; metric names the model."""

    per_user_rates: np.ndarray
    sum_rate: float
    metric: str


def zf_precoder(hs: np.ndarray, rho: float, ops: OpCounter | None = None) -> Precoder:
    """Zero-forcing precoder on the selected channel, scaled to the budget.

    P = c Hs (Hs^H Hs)^{-1} with c set so trace(P^H P) = rho; the product
    Hs^H P is then c I, which nulls all inter-user interference. Raises
    RankDeficient when the channel Gram is too ill-conditioned to invert.
    """
    hs = np.asarray(hs, dtype=np.complex128)
    g = gram(hs, ops)
    eigs = hermitian_eig(g, ops).values
    if eigs[-1] <= 0 or eigs[0] / eigs[-1] > COND_LIMIT:
        raise RankDeficient("selected channel Gram is numerically singular")
    raw = hs @ np.linalg.inv(g)
    c = np.sqrt(rho / np.einsum("ij,ij->", raw, raw.conj()).real)
    return Precoder(c * raw, rho)


def svd_precoder(hs: np.ndarray, rho: float, ops: OpCounter | None = None) -> Precoder:
    """Precoder from the leading left singular vectors of the channel.

    Columns are the K left singular vectors ordered by descending
    singular value, each carrying power rho / K. The left vectors come
    from the channel Gram eigensystem (one eigensolver path for the whole
    package): u_k = Hs v_k / sigma_k.
    """
    hs = np.asarray(hs, dtype=np.complex128)
    k = hs.shape[1]
    sys = hermitian_eig(gram(hs, ops), ops)
    sigma = np.sqrt(np.maximum(sys.values, 0.0))
    if np.any(sigma <= 0):
        raise RankDeficient("zero singular value; left vectors undefined")
    u = (hs @ sys.vectors) / sigma
    return Precoder(np.sqrt(rho / k) * u, rho)


def sinr(hs: np.ndarray, p: Precoder, k: int, n0: float) -> float:
    """Post-precoding SINR of user k: desired power over interference
    from all other users' precoding vectors plus noise n0."""
    hk = np.asarray(hs)[:, k]
    gains = np.abs(hk.conj() @ p.matrix) ** 2
    desired = gains[k]
    interference = gains.sum() - desired
    return float(desired / (interference + n0))


def sumrate_sinr(hs: np.ndarray, p: Precoder, n0: float) -> RateReport:
    """Sum of log2(1 + SINR_k) over all users for an explicit precoder."""
    k_users = np.asarray(hs).shape[1]
    rates = np.array([np.log2(1.0 + sinr(hs, p, k, n0)) for k in range(k_users)])
    return RateReport(rates, float(rates.sum()), "zf")


def sumrate_parallel(eigs: np.ndarray, rho: float, k: int, n0: float) -> RateReport:
    """Parallel-stream sum rate from the channel Gram eigenvalues.

    Stream k carries log2(1 + rho d_k / (k_users n0)): the rate of the
    interference-free equivalent channel under uniform power split.
    """
    eigs = np.maximum(np.asarray(eigs, dtype=np.float64), 0.0)
    rates = np.log2(1.0 + (rho / (k * n0)) * eigs)
    return RateReport(rates, float(rates.sum()), "parallel")
