"""Rank-one eigensystem updates for Hermitian Gram matrices.

Removing a row h from (or appending it to) a matrix whose Gram
eigensystem V D V^H is known turns the new Gram into
V (D -+ z z^H) V^H with z = V^H h.  The perturbed eigenvalues are the
roots of a rational secular function of the old ones, one root per
interlacing bracket between consecutive old eigenvalues, and each
eigenvector follows from a diagonal solve.  A full update therefore
costs O(K^2) instead of a fresh O(K^3) eigendecomposition.

Near-equal eigenvalue clusters and negligible perturbation components
are deflated first: cluster weight is pushed onto one representative by
plane rotations, so deflated eigenpairs pass through unchanged and the
remaining secular problem has strictly separated poles and significant
weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketFailure, PsdViolation, SingularShift
from .linalg import EigenSystem
from .opcount import OpCounter, add_ops

WEIGHT_DEFLATION_REL = 1e-12   # |z_i| below this fraction of ||z|| is dropped
POLE_DEFLATION_REL = 1e-12     # pole gap below this times max(|d_1|, 1) merges
BRACKET_SHRINK = 1e-13         # relative inset of bisection brackets
BISECT_MAX_ITER = 200
PSD_CLAMP_REL = 1e-8           # downdated eigenvalues above -rel*d_1 clamp to 0
SINGULAR_SHIFT_REL = 1e-14
ORTHONORMALITY_TOL = 1e-10

DOWNDATE = "downdate"
UPDATE = "update"


@dataclass
class SecularProblem:
    """Root-finding problem for a diagonal matrix under a rank-one perturbation.

    poles are the current eigenvalues in descending order, weights the
    squared magnitudes of the perturbation expressed in the eigenbasis,
    direction selects subtraction (row removal) or addition (row append).
    Zero-weight components are untouched by the perturbation and their
    poles pass through as roots.
    """

    poles: np.ndarray
    weights: np.ndarray
    direction: str

    def __post_init__(self) -> None:
        self.poles = np.asarray(self.poles, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.direction not in (DOWNDATE, UPDATE):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.poles.shape != self.weights.shape or self.poles.ndim != 1:
            raise ValueError("poles and weights must be 1-D of equal length")
        if np.any(np.diff(self.poles) > 0):
            raise ValueError("poles must be non-increasing")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        active = self.weights > 0
        if np.any(np.diff(self.poles[active]) >= 0):
            raise ValueError("poles with positive weight must be strictly descending")


@dataclass
class UpdateResult:
    """Eigensystem after a rank-one update.

    deflated_indices are positions of the input eigenpairs that passed
    through unchanged (up to the deflation plane rotations).
    """

    new_values: np.ndarray
    new_vectors: np.ndarray
    deflated_indices: np.ndarray


def _bisect_brackets(poles, weights, direction, ops):
    """Bisect every interlacing bracket of a batch of secular problems.

    poles: (G,) strictly descending, shared across the batch.
    weights: (G, C) strictly positive, one column per problem.
    Returns roots of shape (G, C), bracket k holding the k-th largest root.
    """
    g_count, c_count = weights.shape
    total = weights.sum(axis=0)
    # Bracket ends at poles are shrunk inward to keep the secular function
    # finite; the outer end of the extreme bracket (the norm-shift bound)
    # is not a pole and stays exact, because the extreme root can sit
    # exactly on it (single active pole).
    if direction == DOWNDATE:
        hi = np.broadcast_to(poles[:, None], (g_count, c_count)).copy()
        lo = np.empty_like(hi)
        lo[:-1, :] = poles[1:, None]
        lo[-1, :] = poles[-1] - total
        width = hi - lo
        # inset never collapses onto the pole: at least one representable step
        hi = np.minimum(hi - BRACKET_SHRINK * width, np.nextafter(hi, lo))
        lo[:-1, :] = np.maximum(
            lo[:-1, :] + BRACKET_SHRINK * width[:-1, :],
            np.nextafter(lo[:-1, :], hi[:-1, :]),
        )
        extreme_row = g_count - 1
    else:
        lo = np.broadcast_to(poles[:, None], (g_count, c_count)).copy()
        hi = np.empty_like(lo)
        hi[1:, :] = poles[:-1, None]
        hi[0, :] = poles[0] + total
        width = hi - lo
        lo = np.maximum(lo + BRACKET_SHRINK * width, np.nextafter(lo, hi))
        hi[1:, :] = np.minimum(
            hi[1:, :] - BRACKET_SHRINK * width[1:, :],
            np.nextafter(hi[1:, :], lo[1:, :]),
        )
        extreme_row = 0
    lo = lo.ravel()
    hi = hi.ravel()
    outer = lo if direction == DOWNDATE else hi
    is_extreme = np.zeros((g_count, c_count), dtype=bool)
    is_extreme[extreme_row, :] = True
    is_extreme = is_extreme.ravel()

    roots = np.empty(g_count * c_count)
    done = np.zeros(g_count * c_count, dtype=bool)
    # bracket narrower than one representable step: the root is the bracket
    # itself to working precision
    degenerate = lo >= hi
    roots[degenerate] = 0.5 * (lo[degenerate] + hi[degenerate])
    done |= degenerate

    # secular value: 1 - s for removal (decreasing), 1 + s for append
    # (increasing), with s(x) = sum_i w_i / (d_i - x).
    sgn = -1.0 if direction == DOWNDATE else 1.0
    cand = np.broadcast_to(np.arange(c_count)[None, :], (g_count, c_count)).ravel()

    def secular(points, which):
        denom = poles[None, :] - points[:, None]
        add_ops(ops, points.size * g_count)
        return 1.0 + sgn * (weights[:, which].T / denom).sum(axis=1)

    live = np.flatnonzero(~done)
    f_lo = np.zeros(g_count * c_count)
    f_hi = np.zeros(g_count * c_count)
    f_lo[live] = secular(lo[live], cand[live])
    f_hi[live] = secular(hi[live], cand[live])

    exact_lo = ~done & (f_lo == 0.0)
    exact_hi = ~done & (f_hi == 0.0)
    roots[exact_lo] = lo[exact_lo]
    roots[exact_hi & ~exact_lo] = hi[exact_hi & ~exact_lo]
    done |= exact_lo | exact_hi
    bad = ~done & (np.sign(f_lo) == np.sign(f_hi))
    if np.any(bad):
        # A missing sign change on the extreme bracket means the root is
        # within round-off of the exact outer bound; accept the bound.
        at_bound = bad & is_extreme
        roots[at_bound] = outer[at_bound]
        done |= at_bound
        bad &= ~at_bound
        if np.any(bad):
            raise BracketFailure(
                f"secular function does not change sign over {int(bad.sum())} "
                f"{direction} bracket(s)"
            )
    side = np.sign(f_lo)

    for _ in range(BISECT_MAX_ITER):
        idx = np.flatnonzero(~done)
        if idx.size == 0:
            break
        mid = 0.5 * (lo[idx] + hi[idx])
        hit_end = (mid == lo[idx]) | (mid == hi[idx])
        f_mid = secular(mid, cand[idx])
        same_side = np.sign(f_mid) == side[idx]
        lo[idx[same_side]] = mid[same_side]
        hi[idx[~same_side]] = mid[~same_side]
        finished = hit_end | (f_mid == 0.0)
        roots[idx[finished]] = mid[finished]
        done[idx[finished]] = True
    else:
        idx = np.flatnonzero(~done)
        roots[idx] = 0.5 * (lo[idx] + hi[idx])

    return roots.reshape(g_count, c_count)


def _grouped_values(values, z2, direction, ops, pole_tol, weight_tol2):
    """Perturbed eigenvalues of diag(values) -+ zz^H, values only.

    z2 holds squared component magnitudes, shape (K, C) for a batch of C
    perturbations sharing the pole set. Near-equal pole clusters merge
    their weight onto the last (smallest) member; components below the
    weight threshold pass their pole through. Returns (K, C) descending.
    """
    k, c_count = z2.shape
    gaps = -np.diff(values)
    starts = np.flatnonzero(np.concatenate(([True], gaps > pole_tol)))
    reps = np.concatenate((starts[1:], [k])) - 1  # last member of each group
    merged = np.add.reduceat(z2, starts, axis=0)
    add_ops(ops, k * c_count)

    out = np.empty((k, c_count))
    passthrough = np.ones(k, dtype=bool)
    passthrough[reps] = False
    n_pass = int(passthrough.sum())
    out[:n_pass, :] = values[passthrough, None]

    active = merged > weight_tol2  # (G, C)
    if np.all(active):
        roots = _bisect_brackets(values[reps], merged, direction, ops)
    else:
        # Mixed activity changes the bracket structure per column; solve
        # each affected column on its own active subsequence.
        roots = np.empty_like(merged)
        full = np.flatnonzero(active.all(axis=0))
        if full.size:
            roots[:, full] = _bisect_brackets(values[reps], merged[:, full], direction, ops)
        for col in np.flatnonzero(~active.all(axis=0)):
            act = active[:, col]
            roots[~act, col] = values[reps[~act]]
            if act.any():
                roots[act, col] = _bisect_brackets(
                    values[reps[act]], merged[act, col][:, None], direction, ops
                )[:, 0]
    out[n_pass:, :] = roots
    out.sort(axis=0)
    return out[::-1, :]


def secular_roots(problem: SecularProblem, ops: OpCounter | None = None) -> np.ndarray:
    """All K roots of the secular problem, sorted descending.

    Each root is confined to its interlacing bracket and bisected to
    floating-point exhaustion; zero-weight components return their pole.
    Raises BracketFailure when a bracket shows no sign change, which
    signals weights inconsistent with the bracketing preconditions.
    """
    poles = problem.poles
    weights = problem.weights
    active = weights > 0
    if not active.any():
        return poles.copy()
    roots_active = _bisect_brackets(
        poles[active], weights[active][:, None], problem.direction, ops
    )[:, 0]
    merged = np.concatenate((poles[~active], roots_active))
    merged[::-1].sort()
    return merged


def eigvec_from_root(
    poles: np.ndarray,
    z: np.ndarray,
    root: float,
    ops: OpCounter | None = None,
) -> np.ndarray:
    """Unit eigenvector of diag(poles) -+ zz^H for one secular root.

    Uses the diagonal-solve formula q = (D - root I)^{-1} z normalized;
    valid only for non-deflated roots, hence the SingularShift guard when
    the root collides with a pole.
    """
    poles = np.asarray(poles, dtype=np.float64)
    z = np.asarray(z, dtype=np.complex128)
    gap = poles - root
    if np.any(np.abs(gap) <= SINGULAR_SHIFT_REL * np.abs(poles)):
        raise SingularShift("root coincides with a pole of the secular function")
    q = z / gap
    add_ops(ops, 2 * poles.size)
    return q / np.linalg.norm(q)


def _deflate_rotations(values, z, vwork, pole_tol, ops):
    """Push weight of near-equal pole pairs onto the lower member.

    Applies complex plane rotations to z and the eigenvector columns so
    the upper member of each near-degenerate pair ends with exactly zero
    weight. Exact for coincident poles; otherwise perturbs the
    off-diagonal by at most the deflation tolerance.
    """
    k = values.size
    for i in range(k - 1):
        if values[i] - values[i + 1] > pole_tol or z[i] == 0.0:
            continue
        a, b = z[i], z[i + 1]
        r = np.hypot(abs(a), abs(b))
        if r == 0.0:
            continue
        z[i] = 0.0
        z[i + 1] = r
        col_i = vwork[:, i].copy()
        col_j = vwork[:, i + 1]
        vwork[:, i] = (col_i * np.conj(b) - col_j * np.conj(a)) / r
        vwork[:, i + 1] = (col_i * a + col_j * b) / r
        add_ops(ops, 4 * k)


def _orthonormalize(q):
    """Modified Gram-Schmidt pass over the columns of q, in place."""
    for j in range(q.shape[1]):
        for prev in range(j):
            q[:, j] -= (q[:, prev].conj() @ q[:, j]) * q[:, prev]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


def _rank_one_eigs(sys: EigenSystem, h, direction, ops) -> UpdateResult:
    k = sys.dim
    h = np.asarray(h, dtype=np.complex128).reshape(k)
    # Removing or appending row h changes the Gram by the outer product of
    # the conjugated row; project that onto the eigenbasis.
    z = sys.vectors.conj().T @ h.conj()
    add_ops(ops, k * k)
    if not np.any(z):
        return UpdateResult(sys.values.copy(), sys.vectors.copy(), np.arange(k))

    values = np.asarray(sys.values, dtype=np.float64).copy()
    vwork = sys.vectors.copy()
    scale = max(abs(values[0]), 1.0)
    pole_tol = POLE_DEFLATION_REL * scale
    _deflate_rotations(values, z, vwork, pole_tol, ops)

    znorm = np.linalg.norm(z)
    z[np.abs(z) <= WEIGHT_DEFLATION_REL * znorm] = 0.0
    active = np.flatnonzero(z)
    deflated = np.flatnonzero(z == 0.0)
    if active.size == 0:
        return UpdateResult(values, vwork, deflated)

    da = values[active]
    za = z[active]
    roots = _bisect_brackets(da, np.abs(za)[:, None] ** 2, direction, ops)[:, 0]

    clamped = roots.copy()
    if direction == DOWNDATE:
        floor = -PSD_CLAMP_REL * max(values[0], 0.0)
        if np.any(roots < floor):
            raise PsdViolation(
                "downdate drove an eigenvalue below the round-off floor; "
                "the removed row does not belong to the represented matrix"
            )
        clamped[clamped < 0.0] = 0.0

    # Eigenvectors in the (rotated) eigenbasis: diagonal solve per root,
    # confined to the active components.
    denom = da[:, None] - roots[None, :]
    if np.any(denom == 0.0):
        raise SingularShift("secular root collided with a pole")
    q_active = za[:, None] / denom
    q_active /= np.linalg.norm(q_active, axis=0)
    add_ops(ops, 2 * active.size * active.size)
    off = np.linalg.norm(q_active.conj().T @ q_active - np.eye(active.size))
    if off > ORTHONORMALITY_TOL:
        q_active = _orthonormalize(q_active)
        add_ops(ops, 2 * active.size**2 * active.size)

    new_cols = vwork[:, active] @ q_active
    add_ops(ops, k * active.size * active.size)

    merged_vals = np.concatenate((values[deflated], clamped))
    merged_cols = np.concatenate((vwork[:, deflated], new_cols), axis=1)
    order = np.argsort(-merged_vals, kind="stable")
    return UpdateResult(merged_vals[order], merged_cols[:, order], deflated)


def downdate_eigs(sys: EigenSystem, h, ops: OpCounter | None = None) -> UpdateResult:
    """Eigensystem of the Gram matrix after removing row h from its source."""
    return _rank_one_eigs(sys, h, DOWNDATE, ops)


def update_eigs(sys: EigenSystem, h, ops: OpCounter | None = None) -> UpdateResult:
    """Eigensystem of the Gram matrix after appending row h to its source."""
    return _rank_one_eigs(sys, h, UPDATE, ops)


def _batch_values(sys: EigenSystem, rows, direction, ops) -> np.ndarray:
    """Perturbed eigenvalues for a batch of candidate rows, values only.

    rows has shape (C, K); the result (K, C) holds each candidate's
    spectrum in descending order. Shares poles across candidates, which
    is what makes greedy candidate scans cheap.
    """
    k = sys.dim
    rows = np.asarray(rows, dtype=np.complex128).reshape(-1, k)
    c_count = rows.shape[0]
    z = sys.vectors.conj().T @ rows.conj().T
    add_ops(ops, k * k * c_count)
    z2 = np.abs(z) ** 2
    values = np.asarray(sys.values, dtype=np.float64)
    scale = max(abs(values[0]) if k else 0.0, 1.0)
    znorm2 = z2.sum(axis=0)

    out = np.empty((k, c_count))
    zero = znorm2 == 0.0
    if zero.any():
        out[:, zero] = values[:, None]
    live = np.flatnonzero(~zero)
    if live.size:
        out[:, live] = _grouped_values(
            values,
            z2[:, live],
            direction,
            ops,
            POLE_DEFLATION_REL * scale,
            (WEIGHT_DEFLATION_REL**2) * znorm2[live],
        )
    if direction == DOWNDATE:
        floor = -PSD_CLAMP_REL * max(values[0], 0.0)
        if np.any(out < floor):
            raise PsdViolation("candidate downdate produced a negative spectrum")
        out[out < 0.0] = 0.0
    return out


def batch_downdate_values(sys: EigenSystem, rows, ops: OpCounter | None = None) -> np.ndarray:
    """Spectra after removing each candidate row, one column per candidate."""
    return _batch_values(sys, rows, DOWNDATE, ops)


def batch_update_values(sys: EigenSystem, rows, ops: OpCounter | None = None) -> np.ndarray:
    """Spectra after appending each candidate row, one column per candidate."""
    return _batch_values(sys, rows, UPDATE, ops)
