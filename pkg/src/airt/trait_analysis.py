"""Performance curves along the instance-difficulty spectrum.

Each algorithm's unit-scale performance is regressed on instance difficulty
with a cubic smoothing spline whose penalty weight is picked by generalised
cross-validation. The fitted curves are compared pointwise against the upper
and lower envelopes to locate strength and weakness regions, with latent
trait occupancy measuring the share of instances each strength region
covers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_smoothing_spline

from .errors import ConfigurationError, FitError
from .metrics import DatasetDifficulty

try:
    # The GCV-selected penalty is worth reporting, but scipy only computes it
    # internally. These imports mirror make_smoothing_spline's own setup; on
    # failure the curves are unchanged and the penalty is reported as NaN.
    from scipy.interpolate import BSpline
    from scipy.interpolate._bsplines import (
        _coeff_of_divided_diff,
        _compute_optimal_gcv_parameter,
    )
except ImportError:  # pragma: no cover
    _compute_optimal_gcv_parameter = None

_MIN_SPLINE_SITES = 5  # the GCV spline solver needs at least 5 distinct sites


@dataclass(frozen=True)
class TraitCurveSet:
    """Smoothed per-algorithm performance over a difficulty grid."""

    grid: np.ndarray  # M strictly increasing difficulty values
    curves: np.ndarray  # n x M curve evaluations
    lambdas: np.ndarray  # per-algorithm penalty (NaN if not recoverable)
    algorithm_names: tuple[str, ...]
    instance_delta: np.ndarray  # difficulty of every instance, for occupancy
    linear_fallback: tuple[bool, ...]  # True where a line replaced the spline

    def __post_init__(self):
        for attr in ("grid", "curves", "lambdas", "instance_delta"):
            arr = np.asarray(getattr(self, attr), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    @property
    def n_algorithms(self) -> int:
        return self.curves.shape[0]


@dataclass(frozen=True)
class StrengthReport:
    """Strength and weakness regions plus latent trait occupancy.

    ``strengths``/``weaknesses`` hold, per algorithm, disjoint difficulty
    intervals built from grid cells (half-open, the last cell closed).
    ``strong_mask``/``weak_mask`` give the same information pointwise on the
    grid. ``difficulty_limit`` is optional and only used to break occupancy
    ties when ranking.
    """

    epsilon: float
    algorithm_names: tuple[str, ...]
    strengths: tuple[tuple[tuple[float, float], ...], ...]
    weaknesses: tuple[tuple[tuple[float, float], ...], ...]
    lto: np.ndarray
    strong_mask: np.ndarray
    weak_mask: np.ndarray
    instance_count: int
    difficulty_limit: np.ndarray | None = None

    def __post_init__(self):
        arr = np.asarray(self.lto, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "lto", arr)


def _averaged_sites(delta: np.ndarray, y: np.ndarray):
    """Sort by difficulty and average responses at duplicate sites."""
    order = np.argsort(delta, kind="stable")
    d_sorted = delta[order]
    y_sorted = y[order]
    sites, start = np.unique(d_sorted, return_index=True)
    sums = np.add.reduceat(y_sorted, start, axis=0)
    counts = np.diff(np.append(start, d_sorted.size))
    return sites, sums / counts[:, None]


def _gcv_lambda(x: np.ndarray, y: np.ndarray) -> float:
    """Penalty weight minimising the generalised cross-validation score.

    Rebuilds the banded natural-spline design and penalty matrices the same
    way scipy's smoothing-spline constructor does, then asks its GCV
    optimiser for the weight.
    """
    if _compute_optimal_gcv_parameter is None:
        return float("nan")
    n = x.shape[0]
    w = np.ones(n)
    t = np.r_[[x[0]] * 3, x, [x[-1]] * 3]

    X_bspl = BSpline.design_matrix(x, t, 3)
    X = np.zeros((5, n))
    for i in range(1, 4):
        X[i, 2:-2] = X_bspl[i: i - 4, 3:-3][np.diag_indices(n - 4)]
    X[1, 1] = X_bspl[0, 0]
    X[2, :2] = ((x[2] + x[1] - 2 * x[0]) * X_bspl[0, 0],
                X_bspl[1, 1] + X_bspl[1, 2])
    X[3, :2] = ((x[2] - x[0]) * X_bspl[1, 1], X_bspl[2, 2])
    X[1, -2:] = (X_bspl[-3, -3], (x[-1] - x[-3]) * X_bspl[-2, -2])
    X[2, -2:] = (X_bspl[-2, -3] + X_bspl[-2, -2],
                 (2 * x[-1] - x[-2] - x[-3]) * X_bspl[-1, -1])
    X[3, -2] = X_bspl[-1, -1]

    wE = np.zeros((5, n))
    wE[2:, 0] = _coeff_of_divided_diff(x[:3]) / w[:3]
    wE[1:, 1] = _coeff_of_divided_diff(x[:4]) / w[:4]
    for j in range(2, n - 2):
        wE[:, j] = (x[j + 2] - x[j - 2]) * _coeff_of_divided_diff(x[j - 2:j + 3]) \
                   / w[j - 2:j + 3]
    wE[:-1, -2] = -_coeff_of_divided_diff(x[-4:]) / w[-4:]
    wE[:-2, -1] = _coeff_of_divided_diff(x[-3:]) / w[-3:]
    wE *= 6

    try:
        return float(_compute_optimal_gcv_parameter(X, wE, y, w))
    except Exception:  # keep the fit usable even if the optimiser gives up
        return float("nan")


def fit_curves(delta, x, algorithm_names=(), grid_size: int = 101) -> TraitCurveSet:
    """Fit one smoothing spline per algorithm over the difficulty spectrum.

    ``x`` is the higher-is-better unit-scale performance matrix. Duplicate
    difficulty values are averaged before fitting. With fewer than five
    distinct difficulty values a least-squares line is fitted instead and
    flagged in ``linear_fallback``.
    """
    if isinstance(delta, DatasetDifficulty):
        delta = delta.delta
    delta = np.asarray(delta, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != delta.size:
        raise ConfigurationError("x must be N x n with one row per difficulty value")
    if grid_size < 2:
        raise ConfigurationError("grid needs at least 2 points")
    n = x.shape[1]
    names = tuple(algorithm_names) or tuple(str(j) for j in range(n))

    sites, site_means = _averaged_sites(delta, x)
    if sites.size < 2:
        raise FitError("need at least 2 distinct difficulty values")
    grid = np.linspace(sites[0], sites[-1], grid_size)

    curves = np.empty((n, grid_size))
    lambdas = np.full(n, np.nan)
    fallback = [False] * n
    use_line = sites.size < _MIN_SPLINE_SITES
    for j in range(n):
        if use_line:
            coeffs = np.polyfit(sites, site_means[:, j], deg=1)
            curves[j] = np.polyval(coeffs, grid)
            fallback[j] = True
            continue
        lam = _gcv_lambda(sites, site_means[:, j])
        if np.isfinite(lam):
            spline = make_smoothing_spline(sites, site_means[:, j], lam=lam)
            lambdas[j] = lam
        else:
            spline = make_smoothing_spline(sites, site_means[:, j])
        curves[j] = spline(grid)
    return TraitCurveSet(
        grid=grid,
        curves=curves,
        lambdas=lambdas,
        algorithm_names=names,
        instance_delta=delta,
        linear_fallback=tuple(fallback),
    )


def _cell_edges(grid: np.ndarray) -> np.ndarray:
    inner = 0.5 * (grid[:-1] + grid[1:])
    return np.concatenate(([grid[0]], inner, [grid[-1]]))


def _mask_to_intervals(mask: np.ndarray, edges: np.ndarray):
    """Merge runs of marked grid cells into difficulty intervals."""
    intervals = []
    m = mask.size
    idx = 0
    while idx < m:
        if not mask[idx]:
            idx += 1
            continue
        start = idx
        while idx + 1 < m and mask[idx + 1]:
            idx += 1
        intervals.append((float(edges[start]), float(edges[idx + 1])))
        idx += 1
    return tuple(intervals)


def strengths_weaknesses(
    curves: TraitCurveSet, epsilon: float, difficulty_limit=None
) -> StrengthReport:
    """Regions within ``epsilon`` of the best (worst) curve, with occupancy.

    Occupancy counts the fraction of instances whose difficulty falls in an
    algorithm's strength region; grid cells are half-open so every instance
    lands in exactly one cell.
    """
    if epsilon < 0:
        raise ConfigurationError("epsilon must be non-negative")
    top = curves.curves.max(axis=0)
    bottom = curves.curves.min(axis=0)
    strong = curves.curves >= top[None, :] - epsilon
    weak = curves.curves <= bottom[None, :] + epsilon

    edges = _cell_edges(curves.grid)
    # instance -> grid cell; boundaries go right, so cells partition the span
    cells = np.searchsorted(edges[1:-1], curves.instance_delta, side="right")
    n_inst = curves.instance_delta.size

    strengths = []
    weaknesses = []
    lto = np.empty(curves.n_algorithms)
    for j in range(curves.n_algorithms):
        strengths.append(_mask_to_intervals(strong[j], edges))
        weaknesses.append(_mask_to_intervals(weak[j], edges))
        lto[j] = np.count_nonzero(strong[j][cells]) / n_inst if n_inst else 0.0

    limit = None
    if difficulty_limit is not None:
        limit = np.asarray(difficulty_limit, dtype=float)
        if limit.shape != (curves.n_algorithms,):
            raise ConfigurationError(
                "difficulty_limit must have one entry per algorithm"
            )
    return StrengthReport(
        epsilon=float(epsilon),
        algorithm_names=curves.algorithm_names,
        strengths=tuple(strengths),
        weaknesses=tuple(weaknesses),
        lto=lto,
        strong_mask=strong,
        weak_mask=weak,
        instance_count=n_inst,
        difficulty_limit=limit,
    )


def airt_portfolio(report: StrengthReport) -> list[str]:
    """Algorithms holding any strength, ranked by occupancy.

    Ties are broken by a higher difficulty limit when the report carries
    one, then by name. A size-n portfolio is the first n entries.
    """
    limits = report.difficulty_limit
    order = []
    for j, name in enumerate(report.algorithm_names):
        if not report.strengths[j]:
            continue
        limit = float("-inf")
        if limits is not None and np.isfinite(limits[j]):
            limit = float(limits[j])
        order.append((-report.lto[j], -limit, name))
    order.sort()
    return [name for _, _, name in order]
