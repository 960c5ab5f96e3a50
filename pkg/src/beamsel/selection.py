"""Beam selection algorithms.

The greedy pair works in opposite directions: dsvd_select starts from all
candidate beams and removes the one whose loss in parallel-stream sum
rate is smallest, isvd_select starts empty and appends the beam whose
gain is largest. Both evaluate every candidate through the spectrum of
the corresponding Gram matrix, either from scratch (naive mode) or by
rank-one secular updates of the retained eigensystem (fast mode).
mm_select and ia_select are the magnitude and interference-aware
baselines; exhaustive_select enumerates every subset as an oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import BeamspaceChannel
from .errors import BudgetTooLarge, InvalidBudget
from .linalg import EigenSystem, gram, hermitian_eig, row_energies
from .opcount import OpCounter, add_ops
from .precoding import Precoder, sumrate_sinr
from .rankone import batch_downdate_values, batch_update_values, downdate_eigs, update_eigs

POWER_RULES = ("uniform", "round", "unit")


@dataclass
class ReducedChannel:
    """Beamspace channel restricted to the highest-energy beams.

    Rows keep their original relative order; beam_ids maps each row back
    to its 1-based beam index in the full channel.
    """

    matrix: np.ndarray
    beam_ids: np.ndarray


@dataclass
class SelectionResult:
    selected_ids: list[int]
    criterion_trace: list[float] = field(default_factory=list)
    op_count: int = 0


def reduce_beams(h_hat: BeamspaceChannel, n: int) -> ReducedChannel:
    """Keep the n highest-energy beams, original order, ties to lower index."""
    m = h_hat.matrix.shape[0]
    if not (1 <= n <= m):
        raise InvalidBudget(f"reduction size {n} outside 1..{m}")
    energies = row_energies(h_hat.matrix)
    keep = np.sort(np.argsort(-energies, kind="stable")[:n])
    return ReducedChannel(h_hat.matrix[keep], h_hat.beam_ids[keep])


def criterion_sumrate(
    eigs: np.ndarray, power_scale: float, n0: float, ops: OpCounter | None = None
) -> float:
    """Parallel-stream sum rate over a Gram spectrum under a fixed power
    scale; zero eigenvalues contribute nothing."""
    eigs = np.maximum(np.asarray(eigs, dtype=np.float64), 0.0)
    add_ops(ops, eigs.size)
    return float(np.log2(1.0 + (power_scale / n0) * eigs).sum())


def _power_scale(rule: str, rho: float, k_users: int, per_round: int) -> float:
    if rule == "uniform":
        return rho / k_users
    if rule == "round":
        return rho / per_round
    if rule == "unit":
        return 1.0
    raise ValueError(f"power rule must be one of {POWER_RULES}, got {rule!r}")


def ssvd_select(h: ReducedChannel, n_rf: int) -> SelectionResult:
    """Pick the n_rf highest-energy beams with a single scan of the matrix."""
    n = h.matrix.shape[0]
    if not (1 <= n_rf <= n):
        raise InvalidBudget(f"budget {n_rf} outside 1..{n}")
    ops = OpCounter()
    energies = row_energies(h.matrix, ops)
    order = np.argsort(-energies, kind="stable")[:n_rf]
    return SelectionResult([int(i) for i in h.beam_ids[order]], [], ops.count)


def dsvd_select(
    h: ReducedChannel,
    n_rf: int,
    rho: float,
    n0: float,
    mode: str = "fast",
    power_rule: str = "uniform",
) -> SelectionResult:
    """Greedy removal: drop the beam whose absence costs the least sum rate.

    Runs n - n_rf rounds. Every remaining beam is scored by the rate of
    the matrix without it; the highest-scoring removal proceeds. Fast
    mode downdates the retained eigensystem per candidate instead of
    re-decomposing, so each candidate costs O(K^2).
    """
    _check_mode(mode)
    matrix = h.matrix
    n, k_users = matrix.shape
    if not (1 <= n_rf <= n):
        raise InvalidBudget(f"budget {n_rf} outside 1..{n}")
    ops = OpCounter()
    keep = list(range(n))
    trace: list[float] = []
    sys: EigenSystem | None = None
    if mode == "fast" and n_rf < n:
        sys = hermitian_eig(gram(matrix, ops), ops)
    for i in range(n - n_rf):
        rows = matrix[keep]
        scale = _power_scale(power_rule, rho, k_users, i + 1)
        if mode == "fast":
            spectra = batch_downdate_values(sys, rows, ops)
            add_ops(ops, spectra.size)
            crit = np.log2(1.0 + (scale / n0) * spectra).sum(axis=0)
        else:
            crit = np.empty(len(keep))
            for j in range(len(keep)):
                sub = np.delete(rows, j, axis=0)
                eigs = hermitian_eig(gram(sub, ops), ops).values
                crit[j] = criterion_sumrate(eigs, scale, n0, ops)
        best = int(np.argmax(crit))
        trace.append(float(crit[best]))
        if mode == "fast":
            upd = downdate_eigs(sys, rows[best], ops)
            sys = EigenSystem(upd.new_values, upd.new_vectors)
        del keep[best]
    return SelectionResult([int(i) for i in h.beam_ids[keep]], trace, ops.count)


def isvd_select(
    h: ReducedChannel,
    n_rf: int,
    rho: float,
    n0: float,
    mode: str = "fast",
    power_rule: str = "uniform",
) -> SelectionResult:
    """Greedy append: add the beam contributing the most sum rate.

    Runs n_rf rounds starting from an empty set. Fast mode keeps the
    eigensystem of the selected set's Gram (zero-padded below full rank)
    and scores each candidate by a rank-one append update.
    """
    _check_mode(mode)
    matrix = h.matrix
    n, k_users = matrix.shape
    if not (1 <= n_rf <= n):
        raise InvalidBudget(f"budget {n_rf} outside 1..{n}")
    ops = OpCounter()
    remaining = list(range(n))
    chosen: list[int] = []
    trace: list[float] = []
    sys = EigenSystem(np.zeros(k_users), np.eye(k_users, dtype=np.complex128))
    for i in range(n_rf):
        rows = matrix[remaining]
        scale = _power_scale(power_rule, rho, k_users, n - i)
        if mode == "fast":
            spectra = batch_update_values(sys, rows, ops)
            add_ops(ops, spectra.size)
            crit = np.log2(1.0 + (scale / n0) * spectra).sum(axis=0)
        else:
            crit = np.empty(len(remaining))
            for j, cand in enumerate(remaining):
                sub = matrix[chosen + [cand]]
                eigs = hermitian_eig(gram(sub, ops), ops).values
                crit[j] = criterion_sumrate(eigs, scale, n0, ops)
        best = int(np.argmax(crit))
        trace.append(float(crit[best]))
        if mode == "fast":
            upd = update_eigs(sys, rows[best], ops)
            sys = EigenSystem(upd.new_values, upd.new_vectors)
        chosen.append(remaining.pop(best))
    return SelectionResult([int(i) for i in h.beam_ids[chosen]], trace, ops.count)


def mm_select(h_hat: BeamspaceChannel, k_users: int, n_rf: int) -> SelectionResult:
    """Per-user magnitude selection: each user marks its strongest beam;
    collisions leave budget, filled with the strongest unmarked beams."""
    matrix = h_hat.matrix
    m = matrix.shape[0]
    if n_rf < k_users:
        raise InvalidBudget(f"budget {n_rf} below user count {k_users}")
    if n_rf > m:
        raise InvalidBudget(f"budget {n_rf} exceeds beam count {m}")
    ops = OpCounter()
    best_rows = np.argmax(np.abs(matrix[:, :k_users]), axis=0)
    add_ops(ops, m * k_users)
    picked: list[int] = []
    for row in best_rows:
        if int(row) not in picked:
            picked.append(int(row))
    if len(picked) < n_rf:
        energies = row_energies(matrix, ops)
        for row in np.argsort(-energies, kind="stable"):
            if len(picked) == n_rf:
                break
            if int(row) not in picked:
                picked.append(int(row))
    return SelectionResult([int(i) for i in h_hat.beam_ids[picked]], [], ops.count)


def _zf_rate_any_rank(sub: np.ndarray, rho: float, n0: float) -> float:
    """Zero-forcing sum rate of a tentative beam set; falls back to a
    least-squares precoder while the set is still smaller than the user
    count, where exact interference nulling is impossible."""
    p = np.linalg.pinv(sub.conj().T)
    power = np.einsum("ij,ij->", p, p.conj()).real
    if power <= 0:
        return 0.0
    p = p * np.sqrt(rho / power)
    return sumrate_sinr(sub, Precoder(p, rho), n0).sum_rate


def ia_select(
    h_hat: BeamspaceChannel, k_users: int, n_rf: int, rho: float, n0: float
) -> SelectionResult:
    """Interference-aware selection.

    Users whose strongest beams are unique keep them outright. The
    remaining budget is spent one beam at a time: each contested user
    nominates its strongest not-yet-selected beam, and the nominee that
    maximizes the zero-forcing sum rate of the tentative set wins. Any
    leftover budget goes to the strongest unselected beams.
    """
    matrix = h_hat.matrix
    m = matrix.shape[0]
    if n_rf < k_users:
        raise InvalidBudget(f"budget {n_rf} below user count {k_users}")
    if n_rf > m:
        raise InvalidBudget(f"budget {n_rf} exceeds beam count {m}")
    ops = OpCounter()
    mags = np.abs(matrix[:, :k_users])
    add_ops(ops, m * k_users)
    best_rows = np.argmax(mags, axis=0)
    counts = np.bincount(best_rows, minlength=m)
    contested_users = [u for u in range(k_users) if counts[best_rows[u]] > 1]
    selected: list[int] = []
    for u in range(k_users):
        row = int(best_rows[u])
        if counts[row] == 1 and row not in selected:
            selected.append(row)
    prefs = {u: np.argsort(-mags[:, u], kind="stable") for u in contested_users}
    while len(selected) < n_rf:
        nominees: list[int] = []
        for u in contested_users:
            for row in prefs[u]:
                if int(row) not in selected:
                    if int(row) not in nominees:
                        nominees.append(int(row))
                    break
        if not nominees:
            energies = row_energies(matrix, ops)
            for row in np.argsort(-energies, kind="stable"):
                if len(selected) == n_rf:
                    break
                if int(row) not in selected:
                    selected.append(int(row))
            break
        rates = [
            _zf_rate_any_rank(matrix[selected + [row]], rho, n0) for row in nominees
        ]
        add_ops(ops, len(nominees) * (len(selected) + 1) * k_users**2)
        selected.append(nominees[int(np.argmax(rates))])
    return SelectionResult([int(i) for i in h_hat.beam_ids[selected]], [], ops.count)


def exhaustive_select(
    h: ReducedChannel, n_rf: int, rho: float, n0: float
) -> SelectionResult:
    """Enumerate every beam subset and keep the best criterion.

    Ties resolve to the lexicographically smallest index set. Guarded by
    a subset-count cap; this is an oracle for small instances only.
    """
    matrix = h.matrix
    n, k_users = matrix.shape
    if not (1 <= n_rf <= n):
        raise InvalidBudget(f"budget {n_rf} outside 1..{n}")
    if math.comb(n, n_rf) > 10**6:
        raise BudgetTooLarge(f"C({n}, {n_rf}) exceeds the enumeration cap")
    ops = OpCounter()
    scale = rho / k_users
    best_crit = -np.inf
    best_subset: tuple[int, ...] | None = None
    for subset in itertools.combinations(range(n), n_rf):
        eigs = hermitian_eig(gram(matrix[list(subset)], ops), ops).values
        crit = criterion_sumrate(eigs, scale, n0, ops)
        if crit > best_crit:
            best_crit = crit
            best_subset = subset
    return SelectionResult(
        [int(i) for i in h.beam_ids[list(best_subset)]], [best_crit], ops.count
    )


def _check_mode(mode: str) -> None:
    if mode not in ("fast", "naive"):
        raise ValueError(f"mode must be 'fast' or 'naive', got {mode!r}")
