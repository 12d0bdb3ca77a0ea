"""Evaluation record: cluster count, radii, objective, timings, bytes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .data import Clustering

__all__ = ["MetricsRecord", "evaluate"]


@dataclass
class MetricsRecord:
    k_star: int
    max_radius: float
    mean_radius: float
    objective: float
    radii: list
    sizes: list
    stage_seconds: dict = field(default_factory=dict)
    transport_bytes: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = asdict(self)
        for key in ("max_radius", "mean_radius", "objective"):
            if not math.isfinite(d[key]):
                raise ValueError(f"non-finite metric {key}")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsRecord":
        return cls(**json.loads(text))


def evaluate(clustering: Clustering, stage_seconds=None, transport_bytes=None,
             parameters=None) -> MetricsRecord:
    """Summarize a clustering: k* (non-empty clusters), per-cluster radii,
    their max and size-weighted mean, and the assignment objective."""
    sizes = clustering.sizes
    occupied = sizes > 0
    radii = clustering.radii[occupied]
    weights = sizes[occupied]
    mean_radius = float((radii * weights).sum() / weights.sum()) if weights.sum() else 0.0
    return MetricsRecord(
        k_star=clustering.k_star,
        max_radius=float(radii.max()) if radii.size else 0.0,
        mean_radius=mean_radius,
        objective=float(clustering.objective),
        radii=[float(r) for r in clustering.radii],
        sizes=[int(s) for s in sizes],
        stage_seconds=dict(stage_seconds or {}),
        transport_bytes=dict(transport_bytes or {}),
        parameters=dict(parameters or {}),
    )
