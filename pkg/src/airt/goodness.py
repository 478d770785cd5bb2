"""Model-fit diagnostics per algorithm.

Residuals compare observed unit-scale performance with the model's most
probable value. Their scaled absolute values feed an empirical CDF whose
area summarises fit quality, while effectiveness curves compare the
distribution of high performance results between observation and prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crm import CrmModel, predict
from .errors import ConfigurationError


@dataclass(frozen=True)
class ResidualSet:
    """Signed residuals and their globally rescaled absolute values."""

    e: np.ndarray  # N x n, NaN for items excluded from the fit
    rho: np.ndarray  # scaled |e|, max 1 over the whole portfolio
    c: float  # scaling constant, 1 when all residuals vanish
    algorithm_names: tuple[str, ...] = ()

    def __post_init__(self):
        for attr in ("e", "rho"):
            arr = np.asarray(getattr(self, attr), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)


@dataclass(frozen=True)
class EffectivenessCurve:
    """CDF of the tolerance to the best result, on a [0, 1] axis."""

    points: np.ndarray  # (levels, cumulative fraction) pairs
    kind: str  # "actual" or "predicted"
    area: float
    degenerate: bool = False  # all inputs equal, curve pinned at 1

    def __post_init__(self):
        arr = np.asarray(self.points, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)


@dataclass(frozen=True)
class GoodnessReport:
    names: tuple[str, ...]
    mse: np.ndarray
    aucdf: np.ndarray
    auaec: np.ndarray
    aupec: np.ndarray
    effectiveness_gap: np.ndarray  # |auaec - aupec|
    warnings: tuple[str, ...]

    def rows(self) -> list[dict]:
        out = []
        for j, name in enumerate(self.names):
            out.append({
                "algorithm": name,
                "mse": float(self.mse[j]),
                "aucdf": float(self.aucdf[j]),
                "auaec": float(self.auaec[j]),
                "aupec": float(self.aupec[j]),
                "auaec_aupec_gap": float(self.effectiveness_gap[j]),
                "warnings": self.warnings[j],
            })
        return out


def predicted_matrix(model: CrmModel) -> np.ndarray:
    """Most probable unit-scale performance for every cell; NaN columns for
    items excluded from the fit."""
    n = model.params.n_items
    out = np.full((model.theta.size, n), np.nan)
    for j in np.nonzero(model.params.fitted)[0]:
        out[:, j] = predict(model.theta, model.params.item(j), k=1.0)
    return out


def residuals(x, model: CrmModel, scaling: str = "global") -> ResidualSet:
    """Observed minus predicted performance, with scaled absolute values.

    ``scaling="global"`` uses one constant for the whole portfolio so that
    the largest absolute residual anywhere maps to 1; this keeps the
    per-algorithm CDF areas comparable. ``scaling="per_algorithm"`` rescales
    each column by its own maximum instead.
    """
    if scaling not in ("global", "per_algorithm"):
        raise ConfigurationError("scaling must be 'global' or 'per_algorithm'")
    x = np.asarray(x, dtype=float)
    x_hat = predicted_matrix(model)
    if x.shape != x_hat.shape:
        raise ConfigurationError("observed matrix shape disagrees with the model")
    e = x - x_hat
    abs_e = np.abs(e)
    if scaling == "global":
        top = np.nanmax(abs_e) if np.isfinite(abs_e).any() else 0.0
        c = 1.0 / top if top > 0 else 1.0
        rho = abs_e * c
    else:
        tops = np.zeros(abs_e.shape[1])
        for j in range(abs_e.shape[1]):
            col = abs_e[:, j]
            finite = col[np.isfinite(col)]
            tops[j] = finite.max() if finite.size else 0.0
        scales = np.where(tops > 0, tops, 1.0)
        rho = abs_e / scales
        c = float("nan")  # no single portfolio-wide constant in this mode
    return ResidualSet(e=e, rho=rho, c=float(c),
                       algorithm_names=model.params.names)


def aucdf(rho_j, grid_size: int = 1001) -> float:
    """Area under the empirical CDF of scaled absolute residuals.

    The CDF is evaluated on an even [0, 1] grid and integrated with the
    trapezoid rule; residual-free algorithms score 1.
    """
    rho_j = np.asarray(rho_j, dtype=float)
    rho_j = rho_j[np.isfinite(rho_j)]
    if rho_j.size == 0:
        return float("nan")
    if rho_j.min() < -1e-12 or rho_j.max() > 1 + 1e-12:
        raise ConfigurationError("scaled residuals must lie in [0, 1]")
    grid = np.linspace(0.0, 1.0, grid_size)
    sorted_rho = np.sort(rho_j)
    cdf = np.searchsorted(sorted_rho, grid, side="right") / rho_j.size
    return float(np.trapezoid(cdf, grid))


def effectiveness(x_j, kind: str = "actual") -> EffectivenessCurve:
    """Effectiveness curve of one algorithm's results and its area.

    The tolerance ``max(x) - x`` is rescaled to [0, 1] by its range and the
    curve is its CDF sampled at the observed values plus both endpoints. A
    constant input pins the curve at 1 and is flagged as degenerate.
    """
    if kind not in ("actual", "predicted"):
        raise ConfigurationError("kind must be 'actual' or 'predicted'")
    x_j = np.asarray(x_j, dtype=float)
    if x_j.size == 0 or not np.all(np.isfinite(x_j)):
        raise ConfigurationError("effectiveness needs finite inputs")
    t = x_j.max() - x_j
    spread = t.max()
    degenerate = spread <= 0
    t_scaled = np.zeros_like(t) if degenerate else t / spread
    t_sorted = np.sort(t_scaled)
    levels = np.unique(np.concatenate(([0.0, 1.0], t_sorted)))
    frac = np.searchsorted(t_sorted, levels, side="right") / t_sorted.size
    area = float(np.trapezoid(frac, levels))
    points = np.column_stack([levels, frac])
    return EffectivenessCurve(points=points, kind=kind, area=area,
                              degenerate=bool(degenerate))


def goodness_report(x, model: CrmModel, aucdf_grid: int = 1001) -> GoodnessReport:
    """Per-algorithm fit summary: MSE, residual-CDF area, effectiveness areas."""
    res = residuals(x, model)
    x = np.asarray(x, dtype=float)
    x_hat = predicted_matrix(model)
    n = x.shape[1]
    names = model.params.names or tuple(str(j) for j in range(n))

    mse = np.full(n, np.nan)
    auc = np.full(n, np.nan)
    auaec = np.full(n, np.nan)
    aupec = np.full(n, np.nan)
    warn = []
    for j in range(n):
        notes = []
        if not model.params.fitted[j]:
            warn.append("degenerate item: no predictions")
            continue
        mse[j] = float(np.mean(res.e[:, j] ** 2))
        auc[j] = aucdf(res.rho[:, j], grid_size=aucdf_grid)
        actual = effectiveness(x[:, j], kind="actual")
        predicted = effectiveness(x_hat[:, j], kind="predicted")
        auaec[j] = actual.area
        aupec[j] = predicted.area
        if actual.degenerate or predicted.degenerate:
            notes.append("constant performance: effectiveness pinned at 1")
        warn.append("; ".join(notes))
    gap = np.abs(auaec - aupec)
    return GoodnessReport(
        names=names, mse=mse, aucdf=auc, auaec=auaec, aupec=aupec,
        effectiveness_gap=gap, warnings=tuple(warn),
    )
