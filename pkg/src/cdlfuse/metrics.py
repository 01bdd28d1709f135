"""Quantitative evaluation of fused outputs.

Only the standard deviation (on the 0-255 scale, matching how such scores
are conventionally reported for 8-bit imagery) plus generic reconstruction
diagnostics.  Perceptual metrics defined in external work are deliberately
not reimplemented here.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .decomposition import DecompositionResult


def image_std(img) -> float:
    """Population standard deviation of all pixels, reported on 0-255."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty image")
    return float(arr.std() * 255.0)


@dataclass
class MetricsReport:
    std: float  # 0-255 scale
    mean: float  # [0,1] scale, as are min/max
    min: float
    max: float
    residual_norm1: float
    residual_norm2: float
    pearson_cost: float
    runtime_seconds: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls(**json.loads(text))


def build_report(
    fused, decomp: DecompositionResult, runtime: float
) -> MetricsReport:
    arr = np.asarray(fused, dtype=np.float64)
    return MetricsReport(
        std=image_std(arr),
        mean=float(arr.mean()),
        min=float(arr.min()),
        max=float(arr.max()),
        residual_norm1=float(np.linalg.norm(decomp.residual1)),
        residual_norm2=float(np.linalg.norm(decomp.residual2)),
        pearson_cost=float(decomp.pearson),
        runtime_seconds=float(runtime),
    )
