"""HTTP service wrapping the simulation harness and selection algorithms.

Sweeps are long-running and fully seeded, so exposing them behind a
service lets several clients share one compute host while every response
stays reproducible from the request alone. Configuration problems map to
400, numerical failures to 500.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .channel import BeamspaceChannel
from .errors import ConfigError, NumericalError
from .schemas import (
    HealthResponse,
    SelectRequest,
    SelectResponse,
    SweepRequest,
    SweepResponse,
    SweepRowModel,
    TrialRequest,
    TrialResponse,
)
from .selection import (
    ReducedChannel,
    dsvd_select,
    exhaustive_select,
    ia_select,
    isvd_select,
    mm_select,
    reduce_beams,
    ssvd_select,
)
from .simulate import (
    SimulationConfig,
    csv_text,
    parse_config,
    preset_config,
    run_sweep,
    run_trial,
)

app = FastAPI(
    title="beamsel",
    version=__version__,
    description="Beamspace beam selection and Monte Carlo sweep service",
)


def _build_config(request) -> SimulationConfig:
    if request.preset is not None and request.config_text is not None:
        raise ConfigError("preset and config_text are mutually exclusive")
    overrides = {
        "sweep": getattr(request, "sweep", None),
        "sweep_values": tuple(request.values) if getattr(request, "values", None) else None,
        "trials": getattr(request, "trials", None),
        "master_seed": request.seed,
        "metric": request.metric,
        "mode": request.mode,
        "algorithms": tuple(request.algorithms) if request.algorithms else None,
    }
    if request.preset is not None:
        cfg = preset_config(request.preset)
        for attr, value in overrides.items():
            if value is not None:
                cfg = _replace_attr(cfg, attr, value)
        cfg.validate()
        return cfg
    return parse_config(request.config_text or "", overrides)


def _replace_attr(cfg: SimulationConfig, attr: str, value) -> SimulationConfig:
    from dataclasses import replace

    return replace(cfg, **{attr: value})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    try:
        cfg = _build_config(request)
        rows = run_sweep(cfg)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    return SweepResponse(
        rows=[SweepRowModel(**row.__dict__) for row in rows],
        csv=csv_text(rows),
    )


@app.post("/trial", response_model=TrialResponse)
def trial(request: TrialRequest) -> TrialResponse:
    try:
        cfg = _build_config(request)
        scores = run_trial(cfg, request.trial_index, request.snr_db)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    return TrialResponse(
        rates={alg: score.sum_rate for alg, score in scores.items()},
        op_counts={alg: score.op_count for alg, score in scores.items()},
    )


@app.post("/select", response_model=SelectResponse)
def select(request: SelectRequest) -> SelectResponse:
    try:
        matrix = request.matrix.to_numpy()
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    channel = BeamspaceChannel(matrix, np.arange(1, matrix.shape[0] + 1))
    k_users = matrix.shape[1]
    try:
        if request.reduce_to is not None:
            reduced = reduce_beams(channel, request.reduce_to)
        else:
            reduced = ReducedChannel(channel.matrix, channel.beam_ids)
        if request.algorithm == "ssvd":
            result = ssvd_select(reduced, request.n_rf)
        elif request.algorithm == "dsvd":
            result = dsvd_select(reduced, request.n_rf, request.rho, request.n0, request.mode)
        elif request.algorithm == "isvd":
            result = isvd_select(reduced, request.n_rf, request.rho, request.n0, request.mode)
        elif request.algorithm == "mm":
            result = mm_select(channel, k_users, request.n_rf)
        elif request.algorithm == "ia":
            result = ia_select(channel, k_users, request.n_rf, request.rho, request.n0)
        else:
            result = exhaustive_select(reduced, request.n_rf, request.rho, request.n0)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except NumericalError as exc:
        raise HTTPException(status_code=500, detail=str(exc))
    return SelectResponse(
        selected_ids=result.selected_ids,
        criterion_trace=result.criterion_trace,
        op_count=result.op_count,
    )
