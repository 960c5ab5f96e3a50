"""Dense complex matrix kernels: Gram matrices, Hermitian eigensolver, row energies.

The eigensolver here is the reference path. It bootstraps the greedy
selection algorithms and validates the fast rank-one update path; accuracy
is the contract, LAPACK supplies the method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonHermitianInput
from .opcount import OpCounter, add_ops

# Nominal multiply-add cost of a dense K x K Hermitian eigendecomposition
# with vectors (tridiagonalization + QR + backtransform).
EIG_COST_FACTOR = 9

HERMITIAN_TOL = 1e-12
EIGENVALUE_CLAMP_REL = 1e-10


@dataclass
class EigenSystem:
    """Eigendecomposition of a K x K Hermitian Gram matrix.

    values are real and sorted descending; vectors holds the matching
    orthonormal eigenvector columns.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def copy(self) -> "EigenSystem":
        return EigenSystem(self.values.copy(), self.vectors.copy())


def gram(h: np.ndarray, ops: OpCounter | None = None) -> np.ndarray:
    """Return H^H H with exact conjugate symmetry.

    Rows of h are beams, columns are users; the result is K x K Hermitian
    positive semidefinite.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2:
        raise ValueError("gram expects a 2-D matrix")
    n, k = h.shape
    g = h.conj().T @ h
    add_ops(ops, n * k * k)
    # Symmetrize so g[i, j] == conj(g[j, i]) holds bitwise.
    return 0.5 * (g + g.conj().T)


def hermitian_eig(g: np.ndarray, ops: OpCounter | None = None) -> EigenSystem:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Round-off-level negative eigenvalues of PSD inputs are clamped to zero
    so downstream log-rate computations never see spurious negatives.
    Raises NonHermitianInput when the asymmetry exceeds tolerance.
    """
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("hermitian_eig expects a square matrix")
    asym = np.linalg.norm(g - g.conj().T)
    if asym > HERMITIAN_TOL * max(1.0, np.linalg.norm(g)):
        raise NonHermitianInput(f"asymmetry {asym:.3e} exceeds tolerance")
    k = g.shape[0]
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
    add_ops(ops, EIG_COST_FACTOR * k**3)
    # Descending order; stable so ties keep the solver's ordering.
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    if w.size and w[0] > 0:
        tiny = w >= -EIGENVALUE_CLAMP_REL * w[0]
        w[tiny & (w < 0)] = 0.0
    return EigenSystem(w, v)


def row_energies(h: np.ndarray, ops: OpCounter | None = None) -> np.ndarray:
    """Per-row squared 2-norms; their total equals the squared Frobenius norm."""
    h = np.asarray(h)
    energies = np.einsum("ij,ij->i", h, h.conj()).real
    add_ops(ops, h.shape[0] * h.shape[1])
    return energies
