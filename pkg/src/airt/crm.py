"""Continuous response model fitted by marginal maximum likelihood EM.

The model treats each algorithm as a test item whose response to an instance
is the logit-transformed performance ``z``. Conditional on an instance trait
``theta``, the response density for item ``j`` is

    f(z | theta) = (alpha_j * gamma_j / sqrt(2*pi))
                   * exp(-(alpha_j**2 / 2) * (theta - beta_j - gamma_j*z)**2)

which is valid whenever ``alpha_j * gamma_j > 0``. Discrimination and scaling
therefore share a sign, and a negative pair marks an item whose responses run
against the rest of the portfolio. Fitting alternates a closed-form posterior
update for the traits with a closed-form per-item parameter update, tracking
the expected log-likelihood until its change falls below a tolerance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    AirtFitWarning,
    ConfigurationError,
    DegenerateItemError,
    FitError,
    NumericalError,
)
from .ingest import TransformedResponses, inverse_logit

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class Item(NamedTuple):
    """Parameters of a single algorithm: discrimination, difficulty, scaling."""

    alpha: float
    beta: float
    gamma: float


@dataclass(frozen=True)
class ItemParameters:
    """Per-algorithm parameter arrays; NaN rows mark excluded items."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        for attr in ("alpha", "beta", "gamma"):
            arr = np.atleast_1d(np.asarray(getattr(self, attr), dtype=float)).copy()
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        if not (self.alpha.shape == self.beta.shape == self.gamma.shape):
            raise ConfigurationError("parameter arrays must share a shape")
        if self.names and len(self.names) != self.alpha.size:
            raise ConfigurationError("names length disagrees with parameters")

    @property
    def n_items(self) -> int:
        return self.alpha.size

    @property
    def fitted(self) -> np.ndarray:
        """Mask of items that carry usable parameters."""
        return np.isfinite(self.alpha)

    def item(self, j: int) -> Item:
        return Item(float(self.alpha[j]), float(self.beta[j]), float(self.gamma[j]))

    def __getitem__(self, j: int) -> Item:
        return self.item(j)


@dataclass(frozen=True)
class PriorConfig:
    """Normal prior on the instance trait."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError("prior sigma must be positive")


@dataclass(frozen=True)
class TraitPosterior:
    """Gaussian trait posterior: per-instance means, shared variance."""

    mu: np.ndarray
    sigma2: float

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.mu, dtype=float)).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "mu", arr)
        if self.sigma2 <= 0:
            raise ConfigurationError("posterior variance must be positive")


@dataclass(frozen=True)
class FitConfig:
    max_cycles: int = 200
    loglik_tolerance: float = 1e-4
    radicand_floor: float = 1e-6

    def __post_init__(self):
        if self.max_cycles < 1:
            raise ConfigurationError("max_cycles must be at least 1")
        if self.loglik_tolerance <= 0 or self.radicand_floor <= 0:
            raise ConfigurationError("tolerances must be positive")


@dataclass(frozen=True)
class CrmModel:
    """A fitted model: item parameters, trait posterior and fit diagnostics."""

    params: ItemParameters
    posterior: TraitPosterior
    theta: np.ndarray
    loglik_trace: tuple[float, ...]
    converged: bool
    cycles_used: int
    prior: PriorConfig
    config: FitConfig
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.theta, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "theta", arr)

    @property
    def algorithm_names(self) -> tuple[str, ...]:
        return self.params.names

    @property
    def degenerate(self) -> tuple[str, ...]:
        mask = ~self.params.fitted
        if self.params.names:
            return tuple(n for n, bad in zip(self.params.names, mask) if bad)
        return tuple(str(j) for j in np.nonzero(mask)[0])

    def to_json(self) -> str:
        def listify(arr):
            return [None if not math.isfinite(v) else float(v) for v in arr]

        doc = {
            "algorithms": list(self.params.names),
            "alpha": listify(self.params.alpha),
            "beta": listify(self.params.beta),
            "gamma": listify(self.params.gamma),
            "posterior": {
                "mu": [float(v) for v in self.posterior.mu],
                "sigma2": float(self.posterior.sigma2),
            },
            "theta": [float(v) for v in self.theta],
            "loglik_trace": [float(v) for v in self.loglik_trace],
            "converged": bool(self.converged),
            "cycles_used": int(self.cycles_used),
            "prior": {"mu": self.prior.mu, "sigma": self.prior.sigma},
            "config": {
                "max_cycles": self.config.max_cycles,
                "loglik_tolerance": self.config.loglik_tolerance,
                "radicand_floor": self.config.radicand_floor,
            },
            "warnings": list(self.warnings),
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CrmModel":
        doc = json.loads(text)

        def arr(values):
            return np.array(
                [math.nan if v is None else float(v) for v in values], dtype=float
            )

        params = ItemParameters(
            alpha=arr(doc["alpha"]),
            beta=arr(doc["beta"]),
            gamma=arr(doc["gamma"]),
            names=tuple(doc["algorithms"]),
        )
        return cls(
            params=params,
            posterior=TraitPosterior(
                mu=np.asarray(doc["posterior"]["mu"], dtype=float),
                sigma2=float(doc["posterior"]["sigma2"]),
            ),
            theta=np.asarray(doc["theta"], dtype=float),
            loglik_trace=tuple(doc["loglik_trace"]),
            converged=doc["converged"],
            cycles_used=doc["cycles_used"],
            prior=PriorConfig(**doc["prior"]),
            config=FitConfig(**doc["config"]),
            warnings=tuple(doc["warnings"]),
        )


def _active_columns(params: ItemParameters) -> np.ndarray:
    active = params.fitted
    if not active.any():
        raise FitError("no usable items in the parameter set")
    return active


def e_step(
    z: TransformedResponses, params: ItemParameters, prior: PriorConfig
) -> TraitPosterior:
    """Posterior trait distribution given current item parameters.

    The Gaussian model makes the posterior exact: a shared variance
    ``1 / (sum_j alpha_j^2 + sigma^-2)`` and per-instance means that blend
    each item's location ``beta_j + gamma_j * z_ij`` with the prior mean,
    the prior entering with weight ``1 / sigma^2``.
    """
    active = _active_columns(params)
    a2 = params.alpha[active] ** 2
    sigma2 = 1.0 / (a2.sum() + prior.sigma**-2)
    locations = params.beta[active] + params.gamma[active] * z.z[:, active]
    mu = sigma2 * (locations @ a2 + prior.mu / prior.sigma**2)
    return TraitPosterior(mu=mu, sigma2=sigma2)


def _moments(z_cols: np.ndarray, mu: np.ndarray):
    """Population-convention means, variances and covariances."""
    m_z = z_cols.mean(axis=0)
    m_mu = mu.mean()
    v_z = (z_cols**2).mean(axis=0) - m_z**2
    v_mu = (mu**2).mean() - m_mu**2
    c = (z_cols * mu[:, None]).mean(axis=0) - m_z * m_mu
    return m_z, m_mu, v_z, v_mu, c


def m_step(
    z: TransformedResponses,
    posterior: TraitPosterior,
    radicand_floor: float = 1e-6,
) -> ItemParameters:
    """Closed-form per-item parameter update.

    Scaling comes first as the ratio of total trait variance to the
    item-trait covariance; difficulty centres the item; discrimination is
    the inverse square root of the residual spread and inherits the sign of
    the scaling so their product stays positive. A non-positive radicand
    under that square root is floored and reported as a fit warning.
    """
    names = z.algorithm_names
    m_z, m_mu, v_z, v_mu, c = _moments(z.z, posterior.mu)

    flat = z.z.max(axis=0) == z.z.min(axis=0)
    if flat.any():
        bad = [names[j] if names else str(j) for j in np.nonzero(flat)[0]]
        raise DegenerateItemError(
            f"zero-variance item(s): {', '.join(bad)}", algorithms=bad
        )
    zero_cov = c == 0.0
    if zero_cov.any():
        bad = [names[j] if names else str(j) for j in np.nonzero(zero_cov)[0]]
        raise DegenerateItemError(
            f"item(s) with zero trait covariance: {', '.join(bad)}", algorithms=bad
        )

    gamma = (v_mu + posterior.sigma2) / c
    beta = m_mu - gamma * m_z
    radicand = gamma**2 * v_z - v_mu - posterior.sigma2
    floored = radicand < radicand_floor
    if floored.any():
        bad = [names[j] if names else str(j) for j in np.nonzero(floored)[0]]
        warnings.warn(
            f"discrimination radicand floored at {radicand_floor:g} for: "
            f"{', '.join(bad)}",
            AirtFitWarning,
            stacklevel=2,
        )
        radicand = np.maximum(radicand, radicand_floor)
    alpha = np.sign(gamma) * radicand**-0.5
    return ItemParameters(alpha=alpha, beta=beta, gamma=gamma, names=names)


def log_likelihood(
    z: TransformedResponses, params: ItemParameters, posterior: TraitPosterior
) -> float:
    """Expected log-likelihood under the trait posterior, constants dropped."""
    active = _active_columns(params)
    alpha = params.alpha[active]
    N = z.n_instances
    resid = (
        params.beta[active][None, :]
        + params.gamma[active][None, :] * z.z[:, active]
        - posterior.mu[:, None]
    )
    penalty = np.sum(alpha**2 * (resid**2 + posterior.sigma2))
    gain = N * np.sum(np.log(np.abs(alpha)) + np.log(np.abs(params.gamma[active])))
    return float(gain - 0.5 * penalty)


def _restrict(z: TransformedResponses, active: np.ndarray) -> TransformedResponses:
    names = tuple(n for n, keep in zip(z.algorithm_names, active) if keep)
    return TransformedResponses(
        x=z.x[:, active],
        z=z.z[:, active],
        transform=z.transform,
        algorithm_names=names,
        instance_ids=z.instance_ids,
        scale=z.scale,
    )


def fit(
    z: TransformedResponses,
    prior: PriorConfig | None = None,
    cfg: FitConfig | None = None,
    initial_mu: np.ndarray | None = None,
) -> CrmModel:
    """Fit the model by EM.

    Args:
        z: logit-transformed responses.
        prior: trait prior; standard normal by default.
        cfg: cycle limit, convergence tolerance and radicand floor.
        initial_mu: optional override of the initial posterior means
            (defaults to the standardised per-instance mean response).

    Returns:
        The fitted model. Constant-response algorithms are excluded from
        the optimisation, reported in ``warnings`` and carried as NaN
        parameter rows.

    Raises:
        FitError: fewer than two algorithms have varying responses.
        NumericalError: the log-likelihood became non-finite.
    """
    prior = prior or PriorConfig()
    cfg = cfg or FitConfig()
    if z.n_instances < 2 or z.n_algorithms < 2:
        raise FitError("need at least 2 instances and 2 algorithms")

    names = z.algorithm_names or tuple(str(j) for j in range(z.n_algorithms))
    spread = z.z.max(axis=0) - z.z.min(axis=0)
    active = spread > 0.0
    fit_warnings = [
        f"degenerate item excluded from fit: {names[j]}"
        for j in np.nonzero(~active)[0]
    ]
    if active.sum() < 2:
        raise FitError("fewer than two algorithms with varying performance")
    z_act = _restrict(z, active)

    if initial_mu is None:
        mu = z_act.z.mean(axis=1)
        std = mu.std()
        mu = (mu - mu.mean()) / std if std > 0 else np.zeros_like(mu)
    else:
        mu = np.asarray(initial_mu, dtype=float)
        if mu.shape != (z.n_instances,):
            raise ConfigurationError("initial_mu must have one entry per instance")
    posterior = TraitPosterior(mu=mu, sigma2=prior.sigma**2)

    trace: list[float] = []
    params_act = None
    converged = False
    cycles = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AirtFitWarning)
        for cycle in range(1, cfg.max_cycles + 1):
            cycles = cycle
            params_act = m_step(z_act, posterior, cfg.radicand_floor)
            ll = log_likelihood(z_act, params_act, posterior)
            if not math.isfinite(ll):
                raise NumericalError("log-likelihood is not finite", cycle=cycle)
            trace.append(ll)
            if len(trace) >= 2 and abs(trace[-1] - trace[-2]) < cfg.loglik_tolerance:
                converged = True
                break
            posterior = e_step(z_act, params_act, prior)
    fit_warnings.extend(str(w.message) for w in caught)

    full = {"alpha": np.full(z.n_algorithms, np.nan),
            "beta": np.full(z.n_algorithms, np.nan),
            "gamma": np.full(z.n_algorithms, np.nan)}
    full["alpha"][active] = params_act.alpha
    full["beta"][active] = params_act.beta
    full["gamma"][active] = params_act.gamma
    params = ItemParameters(names=names, **full)

    posterior = e_step(z, params, prior)
    theta = latent_trait(z, params)
    return CrmModel(
        params=params,
        posterior=posterior,
        theta=theta,
        loglik_trace=tuple(trace),
        converged=converged,
        cycles_used=cycles,
        prior=prior,
        config=cfg,
        warnings=tuple(fit_warnings),
    )


def latent_trait(z: TransformedResponses, params: ItemParameters) -> np.ndarray:
    """Per-instance trait: discrimination-weighted mean of item locations."""
    active = _active_columns(params)
    a2 = params.alpha[active] ** 2
    total = a2.sum()
    if total <= 0:
        raise FitError("latent trait needs a nonzero discrimination somewhere")
    locations = params.beta[active] + params.gamma[active] * z.z[:, active]
    return (locations @ a2) / total


def density(z_val, theta, item: Item):
    """Response density at ``z_val`` for an instance of trait ``theta``."""
    alpha, beta, gamma = item
    z_val = np.asarray(z_val, dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = (alpha * gamma / _SQRT_2PI) * np.exp(
        -0.5 * alpha**2 * (theta - beta - gamma * z_val) ** 2
    )
    return out if out.ndim else float(out)


def heatmap_grid(item: Item, z_grid, theta_grid) -> np.ndarray:
    """Density surface over a response grid (rows) and trait grid (columns)."""
    z_grid = np.asarray(z_grid, dtype=float)
    theta_grid = np.asarray(theta_grid, dtype=float)
    for grid, label in ((z_grid, "z_grid"), (theta_grid, "theta_grid")):
        if grid.size == 0:
            raise ConfigurationError(f"{label} is empty")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ConfigurationError(f"{label} must be strictly increasing")
    return density(z_grid[:, None], theta_grid[None, :], item)


def predict(theta_i, item: Item, k: float = 1.0):
    """Most probable performance on the original (0, k) scale.

    The density peaks at ``z* = (theta - beta) / gamma``; mapping that back
    through the logistic gives the predicted score.
    """
    if k <= 0:
        raise ConfigurationError("k must be positive")
    z_star = (np.asarray(theta_i, dtype=float) - item.beta) / item.gamma
    out = k * inverse_logit(z_star)
    return out if np.ndim(out) else float(out)
