"""Request/response models for the reconstruction service.

Complex tensors travel as base64 of the same binary format the CLI writes to
disk, so a file handed to the thin client reaches the service byte-exact.
"""

from __future__ import annotations

import base64
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..sampling import SamplingMask
from ..tensorio import tensor_from_bytes, tensor_to_bytes


def encode_tensor(t: np.ndarray) -> str:
    return base64.b64encode(tensor_to_bytes(t)).decode("ascii")


def decode_tensor(data: str) -> np.ndarray:
    return tensor_from_bytes(base64.b64decode(data))


class MaskModel(BaseModel):
    """The mask wire/file format: sampled line indices, ascending."""

    n: int = Field(ge=1)
    sampled: list[int]
    seed: int = 0

    def to_mask(self) -> SamplingMask:
        sampled = np.zeros(self.n, dtype=bool)
        idx = np.asarray(self.sampled, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise ValueError("sampled indices out of range")
        sampled[idx] = True
        return SamplingMask(n=self.n, sampled=sampled, seed=self.seed)

    @classmethod
    def from_mask(cls, mask: SamplingMask) -> "MaskModel":
        return cls(n=mask.n, sampled=[int(i) for i in mask.indices()], seed=mask.seed)


class PhantomRequest(BaseModel):
    m: int = Field(default=64, ge=1)
    n: int = Field(default=64, ge=1)
    coils: int = Field(default=4, ge=1)
    support: int = Field(default=5, ge=1)
    shapes: int = Field(default=6, ge=1)
    seed: int = 0


class PhantomResponse(BaseModel):
    truth: str
    kspace: str


class MaskRequest(BaseModel):
    n: int = Field(ge=4)
    pattern: Literal["cartesian", "uniform", "pf"] = "cartesian"
    af: float = 4.0
    fraction: float = 0.75
    center_fraction: float = 0.08
    acs: int = Field(default=0, ge=0)
    seed: int = 0


class RowReportModel(BaseModel):
    row: int
    iterations: int
    final_change: float
    wall_time: float
    objective_trace: list[float] | None = None


class ReconRequest(BaseModel):
    kspace: str
    mask: MaskModel
    lambda1: float = Field(default=1e-3, ge=0)
    lambda2: float = Field(default=1e-3, ge=0)
    gamma: float | Literal["auto"] = "auto"
    iters: int = Field(default=50, ge=0)
    tol: float = Field(default=1e-6, ge=0)
    mode: Literal["full", "lr", "sp"] = "full"
    filter_len: int = Field(default=16, ge=1)
    levels: int = Field(default=3, ge=1)
    threads: int = Field(default=1, ge=1)
    normalize: bool = True
    hard_replace: bool = False
    include_traces: bool = False


class ReconResponse(BaseModel):
    image: str
    rows: list[RowReportModel]


class EvalRequest(BaseModel):
    ref: str
    test: str


class EvalResponse(BaseModel):
    # PSNR of identical images is +inf; keep the IEEE constants on the wire.
    model_config = ConfigDict(ser_json_inf_nan="constants")

    rlne: float
    psnr_db: float
    ssim: float
