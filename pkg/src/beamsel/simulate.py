"""Monte Carlo sweep harness: config parsing, trials, aggregation, CSV.

A sweep varies one axis (SNR, user count, antenna count, or RF budget),
runs a fixed number of seeded trials per point, and aggregates each
enabled algorithm's sum rate into one CSV row per (point, algorithm).
Trial t of any sweep draws from a counter-based stream keyed on
(master_seed, t), so results never depend on execution order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelConfig, generate_beamspace_channel, trial_rng
from .errors import ConstraintError, ParseError
from .linalg import gram, hermitian_eig
from .opcount import OpCounter
from .precoding import sumrate_parallel, sumrate_sinr, zf_precoder
from .selection import (
    dsvd_select,
    exhaustive_select,
    ia_select,
    isvd_select,
    mm_select,
    reduce_beams,
    ssvd_select,
)

SWEEP_KINDS = ("snr", "users", "antennas", "rf")
ALGORITHMS = ("ssvd", "dsvd", "isvd", "mm", "ia", "fdzf", "oracle")
METRICS = ("parallel", "zf")
MODES = ("fast", "naive")
SEED_ENV_VAR = "BEAMSEL_SEED"
DEFAULT_SEED = 0
CSV_HEADER = "sweep,value,algorithm,mean_sumrate,std,trials,seed,mean_ops"


@dataclass
class SimulationConfig:
    """Full description of one sweep.

    n_rf defaults to the user count and n to min(3 n_rf, m) when left
    unset; sweep_values default to snr_db_list for an SNR sweep.
    """

    channel: ChannelConfig = field(default_factory=ChannelConfig)
    n_rf: int | None = None
    n: int | None = None
    snr_db_list: tuple[float, ...] = (30.0,)
    sweep: str = "snr"
    sweep_values: tuple[float, ...] | None = None
    trials: int = 1000
    master_seed: int = DEFAULT_SEED
    algorithms: tuple[str, ...] = ("ssvd", "dsvd", "isvd", "mm", "ia", "fdzf")
    metric: str = "parallel"
    mode: str = "fast"

    def resolved_dims(self) -> tuple[int, int]:
        """(n_rf, n) with defaults applied against the channel dimensions."""
        n_rf = self.n_rf if self.n_rf is not None else self.channel.k
        n = self.n if self.n is not None else min(3 * n_rf, self.channel.m)
        return n_rf, n

    def validate(self) -> None:
        self.channel.validate()
        if self.trials < 1:
            raise ConstraintError(f"trials >= 1 violated (got {self.trials})")
        if not (0 <= self.master_seed < 2**64):
            raise ConstraintError("master_seed must be an unsigned 64-bit integer")
        if self.sweep not in SWEEP_KINDS:
            raise ConstraintError(f"sweep must be one of {SWEEP_KINDS}")
        if self.metric not in METRICS:
            raise ConstraintError(f"metric must be one of {METRICS}")
        if self.mode not in MODES:
            raise ConstraintError(f"mode must be one of {MODES}")
        if not self.algorithms:
            raise ConstraintError("algorithms must not be empty")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ConstraintError(f"unknown algorithm {alg!r}; choose from {ALGORITHMS}")
        if not self.snr_db_list:
            raise ConstraintError("snr_db_list must not be empty")
        n_rf, n = self.resolved_dims()
        if not (self.channel.k <= n_rf <= n <= self.channel.m):
            raise ConstraintError(
                f"K <= N_RF <= N <= M violated (K={self.channel.k}, "
                f"N_RF={n_rf}, N={n}, M={self.channel.m})"
            )
        if self.sweep_values is not None:
            if not self.sweep_values:
                raise ConstraintError("sweep_values must not be empty")
            if self.sweep in ("users", "antennas", "rf"):
                for v in self.sweep_values:
                    if v != int(v) or v < 1:
                        raise ConstraintError(
                            f"{self.sweep} sweep values must be positive integers"
                        )


@dataclass
class SweepRow:
    sweep: str
    value: float
    algorithm: str
    mean_sumrate: float
    std: float
    trials: int
    seed: int
    mean_ops: float


@dataclass
class TrialScore:
    sum_rate: float
    op_count: int


_KEY_PARSERS = {
    "M": ("channel.m", int),
    "K": ("channel.k", int),
    "N_cl": ("channel.n_cl", int),
    "N_ray": ("channel.n_ray", int),
    "los_gain_var": ("channel.los_gain_var", float),
    "nlos_gain_var": ("channel.nlos_gain_var", float),
    "angle_low": ("channel.angle_low", float),
    "angle_high": ("channel.angle_high", float),
    "N_RF": ("n_rf", int),
    "N": ("n", int),
    "snr_db_list": ("snr_db_list", "float_list"),
    "sweep": ("sweep", str),
    "sweep_values": ("sweep_values", "float_list"),
    "trials": ("trials", int),
    "master_seed": ("master_seed", int),
    "algorithms": ("algorithms", "str_list"),
    "metric": ("metric", str),
    "mode": ("mode", str),
}


def _convert(raw: str, kind):
    if kind == "float_list":
        return tuple(float(v) for v in raw.split(","))
    if kind == "str_list":
        return tuple(v.strip() for v in raw.split(","))
    return kind(raw)


def parse_config(text: str, overrides: dict | None = None) -> SimulationConfig:
    """Build a SimulationConfig from key=value lines plus overrides.

    Blank lines and '#' comments are skipped; unknown keys are rejected
    with the offending line number. Overrides (attribute name -> value)
    take precedence over the text; a BEAMSEL_SEED environment variable is
    the lowest-precedence seed source. Raises ParseError for malformed
    text and ConstraintError for invariant violations.
    """
    values: dict[str, object] = {}
    channel_values: dict[str, object] = {}
    seed_from_text = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEY_PARSERS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        target, kind = _KEY_PARSERS[key]
        try:
            value = _convert(raw, kind)
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse value {raw!r} for {key!r}")
        if target.startswith("channel."):
            channel_values[target.split(".", 1)[1]] = value
        else:
            values[target] = value
            if target == "master_seed":
                seed_from_text = True

    if overrides:
        for attr, value in overrides.items():
            if value is None:
                continue
            if attr.startswith("channel."):
                channel_values[attr.split(".", 1)[1]] = value
            else:
                values[attr] = value
                if attr == "master_seed":
                    seed_from_text = True

    if not seed_from_text and SEED_ENV_VAR in os.environ:
        raw_seed = os.environ[SEED_ENV_VAR]
        try:
            values["master_seed"] = int(raw_seed)
        except ValueError:
            raise ConstraintError(
                f"{SEED_ENV_VAR} must be an unsigned 64-bit integer, got {raw_seed!r}"
            )

    cfg = SimulationConfig(channel=ChannelConfig(**channel_values), **values)
    cfg.validate()
    return cfg


def preset_config(name: str) -> SimulationConfig:
    """Canonical sweep setups for the four headline experiments.

    fig1 sweeps SNR at M=256 with 24 users; fig2 sweeps the user count
    (the RF budget follows it); fig3 sweeps antennas at 16 users and 16
    RF chains; fig4 sweeps the RF budget at 16 users. All average 1000
    channel draws per point at 30 dB SNR unless the sweep is over SNR.
    """
    algorithms = ("fdzf", "mm", "ia", "ssvd", "isvd")
    if name == "fig1":
        return SimulationConfig(
            channel=ChannelConfig(m=256, k=24),
            n_rf=24,
            sweep="snr",
            sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
            algorithms=algorithms,
        )
    if name == "fig2":
        return SimulationConfig(
            channel=ChannelConfig(m=256, k=24),
            sweep="users",
            sweep_values=(4.0, 8.0, 12.0, 16.0, 20.0, 24.0),
            algorithms=algorithms,
        )
    if name == "fig3":
        return SimulationConfig(
            channel=ChannelConfig(m=256, k=16),
            n_rf=16,
            sweep="antennas",
            sweep_values=(20.0, 60.0, 100.0, 140.0, 180.0, 220.0, 256.0),
            algorithms=algorithms,
        )
    if name == "fig4":
        return SimulationConfig(
            channel=ChannelConfig(m=256, k=16),
            sweep="rf",
            sweep_values=(16.0, 20.0, 24.0, 28.0, 32.0),
            algorithms=algorithms,
        )
    raise ConstraintError(f"unknown preset {name!r}; choose fig1..fig4")


def point_config(cfg: SimulationConfig, value: float) -> SimulationConfig:
    """Specialize the config to one sweep point.

    The swept quantity is replaced; derived defaults (RF budget follows
    the user count, reduction size follows the budget) re-resolve against
    the new dimensions.
    """
    if cfg.sweep == "snr":
        return cfg
    v = int(value)
    if cfg.sweep == "users":
        point = replace(cfg, channel=replace(cfg.channel, k=v))
    elif cfg.sweep == "antennas":
        point = replace(cfg, channel=replace(cfg.channel, m=v))
    elif cfg.sweep == "rf":
        point = replace(cfg, n_rf=v)
    else:
        raise ConstraintError(f"sweep must be one of {SWEEP_KINDS}")
    if point.n is None:
        n_rf = point.n_rf if point.n_rf is not None else point.channel.k
        if n_rf > point.channel.m:
            raise ConstraintError(
                f"N_RF={n_rf} exceeds M={point.channel.m} at sweep value {v}"
            )
    point.validate()
    return point


def _selected_submatrix(h_hat, selected_ids):
    rows = np.asarray(selected_ids, dtype=int) - 1
    return h_hat.matrix[rows]


def run_trial(cfg: SimulationConfig, trial_index: int, snr_db: float) -> dict[str, TrialScore]:
    """One channel draw scored by every enabled algorithm.

    The stream is keyed on (master_seed, trial_index), so identical
    inputs reproduce identical outputs bit for bit.
    """
    n_rf, n = cfg.resolved_dims()
    rng = trial_rng(cfg.master_seed, trial_index)
    h_hat = generate_beamspace_channel(cfg.channel, rng)
    rho = 1.0
    n0 = 10.0 ** (-snr_db / 10.0)
    k_users = cfg.channel.k
    reduced = reduce_beams(h_hat, n)

    scores: dict[str, TrialScore] = {}
    for alg in cfg.algorithms:
        if alg == "fdzf":
            ops = OpCounter()
            precoder = zf_precoder(h_hat.matrix, rho, ops)
            rate = sumrate_sinr(h_hat.matrix, precoder, n0).sum_rate
            scores[alg] = TrialScore(rate, ops.count)
            continue
        if alg == "ssvd":
            sel = ssvd_select(reduced, n_rf)
        elif alg == "dsvd":
            sel = dsvd_select(reduced, n_rf, rho, n0, cfg.mode)
        elif alg == "isvd":
            sel = isvd_select(reduced, n_rf, rho, n0, cfg.mode)
        elif alg == "mm":
            sel = mm_select(h_hat, k_users, n_rf)
        elif alg == "ia":
            sel = ia_select(h_hat, k_users, n_rf, rho, n0)
        elif alg == "oracle":
            sel = exhaustive_select(reduced, n_rf, rho, n0)
        else:
            raise ConstraintError(f"unknown algorithm {alg!r}")
        hs = _selected_submatrix(h_hat, sel.selected_ids)
        if cfg.metric == "parallel":
            eigs = hermitian_eig(gram(hs)).values
            rate = sumrate_parallel(eigs, rho, k_users, n0).sum_rate
        else:
            precoder = zf_precoder(hs, rho)
            rate = sumrate_sinr(hs, precoder, n0).sum_rate
        scores[alg] = TrialScore(rate, sel.op_count)
    return scores


def run_sweep(cfg: SimulationConfig) -> list[SweepRow]:
    """Run every sweep point and aggregate per-algorithm rate statistics."""
    cfg.validate()
    if cfg.sweep_values is not None:
        sweep_values = cfg.sweep_values
    elif cfg.sweep == "snr":
        sweep_values = cfg.snr_db_list
    else:
        raise ConstraintError(f"sweep_values required for a {cfg.sweep} sweep")

    rows: list[SweepRow] = []
    for value in sweep_values:
        point = point_config(cfg, value)
        snr_db = float(value) if cfg.sweep == "snr" else cfg.snr_db_list[0]
        rates: dict[str, list[float]] = {alg: [] for alg in cfg.algorithms}
        op_counts: dict[str, list[int]] = {alg: [] for alg in cfg.algorithms}
        for t in range(cfg.trials):
            for alg, score in run_trial(point, t, snr_db).items():
                rates[alg].append(score.sum_rate)
                op_counts[alg].append(score.op_count)
        for alg in cfg.algorithms:
            arr = np.asarray(rates[alg])
            rows.append(
                SweepRow(
                    sweep=cfg.sweep,
                    value=float(value),
                    algorithm=alg,
                    mean_sumrate=float(arr.mean()),
                    std=float(arr.std()),
                    trials=cfg.trials,
                    seed=cfg.master_seed,
                    mean_ops=float(np.mean(op_counts[alg])),
                )
            )
    return rows


def _sig6(x: float) -> str:
    if isinstance(x, float) and (math.isnan(x) or math.isinf(x)):
        return str(x)
    return format(x, ".6g")


def csv_text(rows: list[SweepRow]) -> str:
    """Render sweep rows as CSV with 6-significant-digit numbers."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.sweep},{_sig6(r.value)},{r.algorithm},{_sig6(r.mean_sumrate)},"
            f"{_sig6(r.std)},{r.trials},{r.seed},{_sig6(r.mean_ops)}"
        )
    return "\n".join(lines) + "\n"


def emit_csv(rows: list[SweepRow], destination) -> None:
    """Write the CSV table to a path or text stream, byte-deterministic."""
    text = csv_text(rows)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
