"""Clustered geometric mmWave channels and the DFT beamspace transform.

A lens antenna array acts as an M-point DFT across the aperture, so the
spatial channel of each user maps to a sparse beamspace vector whose
energy concentrates on a few beam directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, DimensionMismatch


@dataclass
class ChannelConfig:
    """Geometric channel parameters.

    m transmit antennas serve k single-antenna users; each user sees one
    line-of-sight path plus n_cl scattering clusters of n_ray subpaths.
    Gains are complex Gaussian with the given variances, spatial
    directions i.i.d. uniform on [angle_low, angle_high].
    """

    m: int = 256
    k: int = 24
    n_cl: int = 2
    n_ray: int = 5
    los_gain_var: float = 1.0
    nlos_gain_var: float = 0.1
    angle_low: float = -0.5
    angle_high: float = 0.5

    def validate(self) -> None:
        if not (self.m >= self.k >= 1):
            raise ConstraintError(f"need m >= k >= 1, got m={self.m}, k={self.k}")
        if self.n_cl < 0:
            raise ConstraintError(f"n_cl must be >= 0, got {self.n_cl}")
        if self.n_cl >= 1 and self.n_ray < 1:
            raise ConstraintError(f"n_ray must be >= 1 when n_cl >= 1, got {self.n_ray}")
        if not (self.angle_low < self.angle_high):
            raise ConstraintError("angle_low must be below angle_high")
        if not (-0.5 <= self.angle_low <= 0.5 and -0.5 <= self.angle_high <= 0.5):
            raise ConstraintError("angle range must lie within [-0.5, 0.5]")
        if self.los_gain_var < 0 or self.nlos_gain_var < 0:
            raise ConstraintError("gain variances must be nonnegative")


@dataclass
class BeamspaceChannel:
    """Beamspace channel matrix; rows are beams, columns are users.

    beam_ids carries the 1-based identity of every row so selections can
    report original beam indices after any reduction.
    """

    matrix: np.ndarray
    beam_ids: np.ndarray


def steering_vector(m: int, phi: float) -> np.ndarray:
    """Unit-norm array steering vector for spatial direction phi.

    Antenna indices are centered on the array: i runs over
    {0, ..., m-1} - (m-1)/2, and entry i is exp(-j 2 pi phi i) / sqrt(m).
    """
    idx = np.arange(m) - (m - 1) / 2.0
    return np.exp(-2j * np.pi * phi * idx) / np.sqrt(m)


def dft_codebook(m: int) -> np.ndarray:
    """Unitary M x M beamspace transform of the lens array.

    Row r is the conjugate transpose of the steering vector at grid
    direction (r+1 - (m+1)/2) / m, so the grid directions are spaced 1/m
    apart and the matrix is orthonormal.
    """
    grid = (np.arange(1, m + 1) - (m + 1) / 2.0) / m
    idx = np.arange(m) - (m - 1) / 2.0
    # row r = a(grid[r])^H
    return np.exp(2j * np.pi * np.outer(grid, idx)) / np.sqrt(m)


def synthesize_channel(
    m: int,
    los_gain: complex,
    los_dir: float,
    nlos_gains: np.ndarray,
    nlos_dirs: np.ndarray,
) -> np.ndarray:
    """Deterministic spatial channel from explicit path gains and directions.

    The line-of-sight term enters at full weight; the scattered double
    sum is normalized by sqrt(1 / (n_cl * n_ray)).
    """
    g = los_gain * steering_vector(m, los_dir)
    nlos_gains = np.asarray(nlos_gains, dtype=np.complex128)
    nlos_dirs = np.asarray(nlos_dirs, dtype=np.float64)
    if nlos_gains.shape != nlos_dirs.shape:
        raise DimensionMismatch("scattered gains and directions must have equal shape")
    if nlos_gains.size:
        scale = np.sqrt(1.0 / nlos_gains.size)
        steer = np.exp(
            -2j * np.pi
            * np.outer(nlos_dirs.ravel(), np.arange(m) - (m - 1) / 2.0)
        ) / np.sqrt(m)
        g = g + scale * (nlos_gains.ravel() @ steer)
    return g


def _complex_gaussian(rng: np.random.Generator, var: float, size) -> np.ndarray:
    # CN(0, var): two independent real normals scaled by sqrt(var / 2).
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def spatial_channel(cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw one user's spatial channel vector of length m.

    Draw order is fixed (LoS direction, LoS gain, scattered directions,
    scattered gains) so a given stream state always yields the same
    vector.
    """
    los_dir = rng.uniform(cfg.angle_low, cfg.angle_high)
    los_gain = complex(_complex_gaussian(rng, cfg.los_gain_var, ()))
    if cfg.n_cl >= 1:
        shape = (cfg.n_cl, cfg.n_ray)
        nlos_dirs = rng.uniform(cfg.angle_low, cfg.angle_high, size=shape)
        nlos_gains = _complex_gaussian(rng, cfg.nlos_gain_var, shape)
    else:
        nlos_dirs = np.zeros((0, 0))
        nlos_gains = np.zeros((0, 0), dtype=np.complex128)
    return synthesize_channel(cfg.m, los_gain, los_dir, nlos_gains, nlos_dirs)


def beamspace_transform(u: np.ndarray, g: np.ndarray) -> BeamspaceChannel:
    """Apply the beamspace transform column-wise: beam row b of the output
    is the projection of every user's channel on grid beam b."""
    u = np.asarray(u, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim == 1:
        g = g[:, None]
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[1] != g.shape[0]:
        raise DimensionMismatch(
            f"transform {u.shape} does not conform with channels {g.shape}"
        )
    return BeamspaceChannel(u @ g, np.arange(1, u.shape[0] + 1))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based stream for one Monte Carlo trial.

    Streams are keyed on (master_seed, trial_index), so any trial can be
    regenerated independently of execution order or parallelism.
    """
    return np.random.Generator(np.random.Philox(key=[master_seed, trial_index]))


def generate_beamspace_channel(
    cfg: ChannelConfig, rng: np.random.Generator
) -> BeamspaceChannel:
    """Draw the full M x K beamspace channel: one spatial channel per user,
    pushed through the DFT codebook."""
    cfg.validate()
    g = np.empty((cfg.m, cfg.k), dtype=np.complex128)
    for user in range(cfg.k):
        g[:, user] = spatial_channel(cfg, rng)
    return beamspace_transform(dft_codebook(cfg.m), g)
