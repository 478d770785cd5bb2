import numpy as np
import pytest

from airt import (
    PerformanceMatrix,
    ScenarioDescriptor,
    TransformConfig,
    TransformedResponses,
)


def model_data(N, n, alpha, beta, gamma, seed=0, prior_sigma=1.0):
    """Sample a performance matrix from the response model itself.

    Given item parameters and standard-normal traits, responses are drawn
    as z ~ Normal((theta - beta)/gamma, 1/(alpha*gamma)^2) and mapped to the
    unit scale through the logistic.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    rng = np.random.default_rng(seed)
    theta = rng.normal(0.0, prior_sigma, N)
    noise = rng.normal(0.0, 1.0, (N, n)) / np.abs(alpha * gamma)
    z = (theta[:, None] - beta[None, :]) / gamma[None, :] + noise
    x = 1.0 / (1.0 + np.exp(-z))
    return {"theta": theta, "z": z, "x": x,
            "alpha": alpha, "beta": beta, "gamma": gamma}


def responses_from_z(z, names=()):
    z = np.asarray(z, dtype=float)
    x = 1.0 / (1.0 + np.exp(-z))
    names = tuple(names) or tuple(f"a{j}" for j in range(z.shape[1]))
    return TransformedResponses(
        x=x, z=z, transform=TransformConfig(),
        algorithm_names=names,
        instance_ids=tuple(f"i{i}" for i in range(z.shape[0])),
    )


def matrix_from_values(values, maximize=True, measurement="accuracy", name="fixture"):
    values = np.asarray(values, dtype=float)
    desc = ScenarioDescriptor(
        name=name,
        measurement=measurement,
        maximize=maximize,
        algorithm_names=tuple(f"algo_{j}" for j in range(values.shape[1])),
        instance_ids=tuple(f"inst_{i}" for i in range(values.shape[0])),
    )
    return PerformanceMatrix(values=values, descriptor=desc)


def structured_matrix(N=80, n=5, seed=3, maximize=True):
    """A matrix with genuine difficulty structure, on an accuracy-like scale."""
    data = model_data(
        N, n,
        alpha=np.linspace(0.8, 1.6, n),
        beta=np.linspace(-0.8, 1.0, n),
        gamma=np.linspace(1.0, 2.0, n),
        seed=seed,
    )
    values = data["x"] if maximize else 1.0 + 10.0 * (1.0 - data["x"])
    return matrix_from_values(
        values, maximize=maximize,
        measurement="accuracy" if maximize else "runtime",
    )


def write_scenario(tmp_path, values, maximize=False, measurement="runtime",
                   repetitions=1, runstatus=None, name="TEST-SCENARIO"):
    """Write an ASlib-style scenario directory for the given matrix."""
    values = np.asarray(values, dtype=float)
    N, n = values.shape
    instances = [f"inst_{i}" for i in range(N)]
    algorithms = [f"algo_{j}" for j in range(n)]
    root = tmp_path / name
    root.mkdir(parents=True, exist_ok=True)
    lines = [
        f"scenario_id: {name}",
        "performance_measures:",
        f"  - {measurement}",
        "maximize:",
        f"  - {str(maximize).lower()}",
        "performance_type:",
        f"  - {measurement}",
        "metainfo_algorithms:",
    ]
    for algo in algorithms:
        lines += [f"  {algo}:", "    deterministic: true"]
    (root / "description.txt").write_text("\n".join(lines) + "\n")

    rows = []
    for i, inst in enumerate(instances):
        for j, algo in enumerate(algorithms):
            status = "ok"
            if runstatus is not None and runstatus.get((i, j)):
                status = runstatus[(i, j)]
            for rep in range(1, repetitions + 1):
                value = values[i, j]
                cell = "?" if not np.isfinite(value) else repr(float(value))
                rows.append(f"{inst},{rep},{algo},{cell},{status}")
    arff = [
        "@relation ALGORITHM_RUNS",
        "@attribute instance_id string",
        "@attribute repetition numeric",
        "@attribute algorithm string",
        f"@attribute {measurement} numeric",
        "@attribute runstatus {ok,timeout,memout,crash,other}",
        "@data",
    ] + rows
    (root / "algorithm_runs.arff").write_text("\n".join(arff) + "\n")
    return root


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
