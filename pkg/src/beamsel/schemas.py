"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class ComplexMatrixModel(BaseModel):
    """Complex matrix on the wire: separate real and imaginary grids."""

    re: list[list[float]]
    im: list[list[float]]

    @model_validator(mode="after")
    def _check_shape(self) -> "ComplexMatrixModel":
        if not self.re or not self.re[0]:
            raise ValueError("matrix must be non-empty")
        width = len(self.re[0])
        if any(len(row) != width for row in self.re):
            raise ValueError("re rows must have equal length")
        if len(self.im) != len(self.re) or any(len(row) != width for row in self.im):
            raise ValueError("im must match the shape of re")
        return self

    def to_numpy(self) -> np.ndarray:
        mat = np.asarray(self.re, dtype=np.float64) + 1j * np.asarray(
            self.im, dtype=np.float64
        )
        if not np.all(np.isfinite(mat.view(np.float64))):
            raise ValueError("matrix entries must be finite")
        return mat

    @classmethod
    def from_numpy(cls, mat: np.ndarray) -> "ComplexMatrixModel":
        mat = np.asarray(mat, dtype=np.complex128)
        return cls(re=mat.real.tolist(), im=mat.imag.tolist())


class SelectRequest(BaseModel):
    """Beam selection on a caller-supplied beamspace channel.

    Rows of the matrix are beams (1-based ids in row order), columns are
    users. reduce_to optionally keeps only that many highest-energy beams
    before selection.
    """

    matrix: ComplexMatrixModel
    algorithm: Literal["ssvd", "dsvd", "isvd", "mm", "ia", "exhaustive"]
    n_rf: int = Field(ge=1)
    rho: float = Field(default=1.0, gt=0)
    n0: float = Field(default=1.0, gt=0)
    mode: Literal["fast", "naive"] = "fast"
    reduce_to: Optional[int] = Field(default=None, ge=1)


class SelectResponse(BaseModel):
    selected_ids: list[int]
    criterion_trace: list[float]
    op_count: int


class SweepRequest(BaseModel):
    """One sweep run; mirrors the CLI surface.

    Exactly one of preset or config_text may seed the configuration
    (neither means library defaults); the remaining fields override it.
    """

    preset: Optional[Literal["fig1", "fig2", "fig3", "fig4"]] = None
    config_text: Optional[str] = None
    sweep: Optional[Literal["snr", "users", "antennas", "rf"]] = None
    values: Optional[list[float]] = None
    trials: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    metric: Optional[Literal["parallel", "zf"]] = None
    mode: Optional[Literal["fast", "naive"]] = None
    algorithms: Optional[list[str]] = None


class SweepRowModel(BaseModel):
    sweep: str
    value: float
    algorithm: str
    mean_sumrate: float
    std: float
    trials: int
    seed: int
    mean_ops: float


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    csv: str


class TrialRequest(BaseModel):
    """A single seeded trial at one SNR point."""

    preset: Optional[Literal["fig1", "fig2", "fig3", "fig4"]] = None
    config_text: Optional[str] = None
    trial_index: int = Field(default=0, ge=0)
    snr_db: float = 30.0
    seed: Optional[int] = Field(default=None, ge=0)
    metric: Optional[Literal["parallel", "zf"]] = None
    mode: Optional[Literal["fast", "naive"]] = None
    algorithms: Optional[list[str]] = None


class TrialResponse(BaseModel):
    rates: dict[str, float]
    op_counts: dict[str, int]


class HealthResponse(BaseModel):
    status: str
    version: str
