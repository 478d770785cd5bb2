"""Algorithm and dataset metrics derived from fitted item parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crm import ItemParameters

CONSISTENCY_SENTINEL = math.inf


@dataclass(frozen=True)
class AlgorithmMetrics:
    """Per-algorithm consistency, anomalousness and difficulty limit.

    Degenerate items carry the consistency sentinel (+inf), a NaN difficulty
    limit and a warning so they are never mistaken for extremely consistent
    algorithms.
    """

    names: tuple[str, ...]
    consistency: np.ndarray
    anomalous: np.ndarray
    difficulty_limit: np.ndarray
    warnings: tuple[str, ...]

    def rows(self) -> list[dict]:
        out = []
        for j, name in enumerate(self.names):
            out.append({
                "algorithm": name,
                "consistency": float(self.consistency[j]),
                "anomalous": bool(self.anomalous[j]),
                "difficulty_limit": float(self.difficulty_limit[j]),
                "warnings": self.warnings[j],
            })
        return out


@dataclass(frozen=True)
class DatasetDifficulty:
    """Per-instance difficulty, the negated latent trait."""

    delta: np.ndarray
    instance_ids: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.delta, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "delta", arr)


def algorithm_metrics(params: ItemParameters) -> AlgorithmMetrics:
    """Consistency 1/|alpha|, anomalous flag alpha < 0, limit -beta."""
    alpha = params.alpha
    fitted = params.fitted
    names = params.names or tuple(str(j) for j in range(params.n_items))

    consistency = np.where(fitted, 1.0 / np.abs(alpha), CONSISTENCY_SENTINEL)
    anomalous = np.where(fitted, alpha < 0, False)
    difficulty_limit = np.where(fitted, -params.beta, math.nan)
    warn = tuple(
        "" if ok else "degenerate item: metrics are sentinels" for ok in fitted
    )
    return AlgorithmMetrics(
        names=names,
        consistency=consistency,
        anomalous=anomalous.astype(bool),
        difficulty_limit=difficulty_limit,
        warnings=warn,
    )


def dataset_difficulty(theta, instance_ids=()) -> DatasetDifficulty:
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("latent trait must be finite")
    return DatasetDifficulty(delta=-theta, instance_ids=tuple(instance_ids))
