"""Portfolio construction and cross-validated comparison.

Three ways of ranking algorithms are compared: marginal contribution in the
per-instance best-performance coalition game (Shapley), count of per-instance
wins (topset), and occupancy of strength regions on the difficulty spectrum
(airt). Portfolios of increasing size are scored by the gap between the best
result the portfolio achieves on a held-out instance and the best result of
the full algorithm set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import crm, trait_analysis
from .errors import ConfigurationError
from .ingest import PerformanceMatrix, TransformConfig, transform_performance
from .metrics import algorithm_metrics, dataset_difficulty


@dataclass(frozen=True)
class ShapleyValues:
    """Total marginal contribution of each algorithm across instances."""

    phi: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.phi, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "phi", arr)

    def ranking(self) -> list[str]:
        names = self.names or tuple(str(j) for j in range(self.phi.size))
        order = sorted(range(self.phi.size), key=lambda j: (-self.phi[j], names[j]))
        return [names[j] for j in order]


@dataclass(frozen=True)
class FoldResult:
    fold: int
    test_instances: tuple[str, ...]
    rankings: dict  # method -> ordered algorithm tuple
    size_limit: int
    gaps: dict  # (method, n) -> mean gap on the held-out instances


@dataclass(frozen=True)
class PortfolioComparison:
    """Mean performance gap per method and portfolio size across CV folds."""

    methods: tuple[str, ...]
    sizes: tuple[int, ...]
    mean_gap: dict  # (method, n) -> float
    stderr: dict  # (method, n) -> float (NaN when realised in < 2 folds)
    folds_realized: dict  # (method, n) -> int
    epsilon: float
    folds: int
    seed: int
    fold_results: tuple[FoldResult, ...]

    def rows(self) -> list[dict]:
        out = []
        for method in self.methods:
            for n in self.sizes:
                key = (method, n)
                if key not in self.mean_gap:
                    continue
                err = self.stderr[key]
                out.append({
                    "method": method,
                    "n": n,
                    "mean_gap": float(self.mean_gap[key]),
                    "stderr": None if not np.isfinite(err) else float(err),
                    "folds_realized": self.folds_realized[key],
                })
        return out


def shapley_values(x, names=()) -> ShapleyValues:
    """Shapley values of the game whose coalition value is the best result.

    With the per-instance coalition value ``v(S) = max_{j in S} x_ij`` the
    value has a closed form: sort one instance's results ascending and give
    the algorithm at rank r the sum of ``(x_(k) - x_(k-1)) / (n - k + 1)``
    for k up to r, with ``x_(0) = 0``. Summing over instances gives the
    portfolio-level value.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ConfigurationError("x must be an instances-by-algorithms matrix")
    if np.any(x < 0):
        raise ConfigurationError("coalition values need non-negative performance")
    N, n = x.shape
    order = np.argsort(x, axis=1, kind="stable")
    x_sorted = np.take_along_axis(x, order, axis=1)
    increments = np.diff(np.concatenate([np.zeros((N, 1)), x_sorted], axis=1), axis=1)
    shares = increments / (n - np.arange(n))[None, :]
    payoff_sorted = np.cumsum(shares, axis=1)
    phi = np.zeros(n)
    np.add.at(phi, order.ravel(), payoff_sorted.ravel())
    return ShapleyValues(phi=phi, names=tuple(names))


def win_counts(x) -> np.ndarray:
    """Number of instances on which each algorithm attains the row maximum."""
    x = np.asarray(x, dtype=float)
    best = x.max(axis=1, keepdims=True)
    return np.count_nonzero(x == best, axis=0)


def topset_ranking(x, names=()) -> list[str]:
    """Algorithms ordered by per-instance wins.

    Ties on an instance credit every algorithm achieving the maximum; ties
    in the win count fall back to higher mean performance, then name.
    """
    x = np.asarray(x, dtype=float)
    names = tuple(names) or tuple(str(j) for j in range(x.shape[1]))
    wins = win_counts(x)
    means = x.mean(axis=0)
    order = sorted(range(x.shape[1]), key=lambda j: (-wins[j], -means[j], names[j]))
    return [names[j] for j in order]


def _column_indices(m: PerformanceMatrix, portfolio) -> np.ndarray:
    lookup = {name: j for j, name in enumerate(m.descriptor.algorithm_names)}
    try:
        return np.array([lookup[name] for name in portfolio], dtype=int)
    except KeyError as exc:
        raise KeyError(f"algorithm {exc.args[0]!r} not in the matrix") from None


def _gap(values, maximize, best_full, cols) -> np.ndarray:
    sub = values[:, cols]
    if maximize:
        return np.asarray(best_full, dtype=float) - sub.max(axis=1)
    return sub.min(axis=1) - np.asarray(best_full, dtype=float)


def performance_gap(best_full, portfolio, m: PerformanceMatrix) -> np.ndarray:
    """Per-instance shortfall of a portfolio against the full-set best.

    ``best_full`` holds the best original-unit result per instance over all
    algorithms; the gap is non-negative by construction.
    """
    if not portfolio:
        raise ConfigurationError("portfolio must not be empty")
    cols = _column_indices(m, portfolio)
    return _gap(m.values, m.descriptor.maximize, best_full, cols)


def train_rankings(
    m: PerformanceMatrix,
    epsilon: float,
    transform: TransformConfig | None = None,
    prior: crm.PriorConfig | None = None,
    fit_cfg: crm.FitConfig | None = None,
    grid_size: int = 101,
) -> dict:
    """Fit the difficulty model on ``m`` and rank algorithms three ways.

    Returns the ordered lists under ``"airt"``, ``"shapley"`` and
    ``"topset"`` along with each method's own portfolio size limit: the
    number of strength-holding algorithms for airt, the number of algorithms
    with at least one win for topset, and the full set for Shapley.
    """
    responses = transform_performance(m, transform)
    model = crm.fit(responses, prior=prior, cfg=fit_cfg)
    delta = dataset_difficulty(model.theta, m.descriptor.instance_ids)
    curves = trait_analysis.fit_curves(
        delta, responses.x, m.descriptor.algorithm_names, grid_size=grid_size
    )
    limits = algorithm_metrics(model.params).difficulty_limit
    report = trait_analysis.strengths_weaknesses(curves, epsilon, limits)
    airt_list = trait_analysis.airt_portfolio(report)

    shap = shapley_values(responses.x, m.descriptor.algorithm_names)
    topset_list = topset_ranking(responses.x, m.descriptor.algorithm_names)
    wins = win_counts(responses.x)
    return {
        "airt": tuple(airt_list),
        "shapley": tuple(shap.ranking()),
        "topset": tuple(topset_list),
        "limits": {
            "airt": len(airt_list),
            "shapley": m.n_algorithms,
            "topset": int(np.count_nonzero(wins > 0)),
        },
        "model": model,
        "report": report,
    }


METHODS = ("airt", "shapley", "topset")


def cv_compare(
    m: PerformanceMatrix,
    epsilon: float,
    folds: int = 10,
    seed: int = 0,
    transform: TransformConfig | None = None,
    prior: crm.PriorConfig | None = None,
    fit_cfg: crm.FitConfig | None = None,
    grid_size: int = 101,
) -> PortfolioComparison:
    """Cross-validated mean performance gap for the three portfolio methods.

    Instances are split into seeded folds; rankings are computed on the
    training part only and evaluated on the held-out instances in original
    measurement units. Portfolio sizes run up to the smallest of the three
    methods' own limits for that fold. The standard error is reported for
    sizes realised in at least two folds.
    """
    N = m.n_instances
    if folds < 2 or folds > N:
        raise ConfigurationError(f"folds must lie in [2, {N}]")
    rng = np.random.default_rng(seed)
    assignment = np.array_split(rng.permutation(N), folds)

    maximize = m.descriptor.maximize
    best_full = m.values.max(axis=1) if maximize else m.values.min(axis=1)

    per_fold: list[FoldResult] = []
    collected: dict[tuple[str, int], list[float]] = {}
    for k, test_idx in enumerate(assignment):
        test_idx = np.sort(test_idx)
        train_idx = np.setdiff1d(np.arange(N), test_idx)
        train_m = m.select_instances(train_idx)
        ranked = train_rankings(
            train_m, epsilon, transform, prior, fit_cfg, grid_size
        )
        size_limit = min(ranked["limits"][method] for method in METHODS)
        gaps = {}
        for n in range(1, size_limit + 1):
            for method in METHODS:
                cols = _column_indices(m, ranked[method][:n])
                g = _gap(m.values[test_idx], maximize, best_full[test_idx], cols)
                mpg = float(g.mean())
                gaps[(method, n)] = mpg
                collected.setdefault((method, n), []).append(mpg)
        per_fold.append(FoldResult(
            fold=k,
            test_instances=tuple(m.descriptor.instance_ids[i] for i in test_idx),
            rankings={method: ranked[method] for method in METHODS},
            size_limit=size_limit,
            gaps=gaps,
        ))

    mean_gap = {}
    stderr = {}
    realized = {}
    for key, values in collected.items():
        arr = np.asarray(values)
        mean_gap[key] = float(arr.mean())
        realized[key] = arr.size
        stderr[key] = (
            float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size >= 2 else float("nan")
        )
    sizes = tuple(sorted({n for _, n in collected}))
    return PortfolioComparison(
        methods=METHODS,
        sizes=sizes,
        mean_gap=mean_gap,
        stderr=stderr,
        folds_realized=realized,
        epsilon=float(epsilon),
        folds=folds,
        seed=seed,
        fold_results=tuple(per_fold),
    )
