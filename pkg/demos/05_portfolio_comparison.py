"""Compare airt, Shapley and topset portfolios under cross-validation.

Each method ranks algorithms on the training folds only; portfolios of
growing size are then scored on the held-out instances by their mean
performance gap: how much worse the portfolio's best result is than the
best result of the full algorithm set, in original measurement units.
"""

import numpy as np

import airt

rng = np.random.default_rng(29)

# Runtime-flavoured scenario: specialists cover different difficulty bands,
# so a diverse portfolio pays off.
N, n = 240, 7
theta = rng.normal(0, 1, N)
centres = np.linspace(-1.6, 1.6, n)
quality = np.exp(-((theta[:, None] - centres[None, :]) ** 2) / 0.8)
runtimes = 10 ** (2.0 - 1.6 * quality + rng.normal(0, 0.15, (N, n)))

matrix = airt.PerformanceMatrix(
    values=runtimes,
    descriptor=airt.ScenarioDescriptor(
        name="cv-demo", measurement="runtime", maximize=False,
        algorithm_names=tuple(f"band_{j}" for j in range(n)),
        instance_ids=tuple(f"inst_{i}" for i in range(N)),
    ),
)

comparison = airt.cv_compare(matrix, epsilon=0.01, folds=10, seed=42)

print(f"methods: {', '.join(comparison.methods)}  "
      f"(10-fold CV, seed {comparison.seed})")
print()
print(f"{'n':>3} {'airt':>10} {'shapley':>10} {'topset':>10}")
for size in comparison.sizes:
    cells = []
    for method in comparison.methods:
        value = comparison.mean_gap.get((method, size))
        cells.append(f"{value:10.2f}" if value is not None else " " * 10)
    print(f"{size:>3} {cells[0]} {cells[1]} {cells[2]}")

print()
first_fold = comparison.fold_results[0]
print("fold 0 rankings:")
for method, ranking in first_fold.rankings.items():
    print(f"  {method:>8}: {', '.join(ranking[:5])} ...")
print()
print("gaps shrink as portfolios grow because every method ranks from its")
print("own full ordering; the airt ranking spreads picks across difficulty")
print("bands instead of stacking near-duplicates")
