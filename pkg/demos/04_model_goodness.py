"""Check how well the difficulty model explains each algorithm.

Residuals compare observed performance with the model's most probable
value. The area under the CDF of scaled absolute residuals (AUCDF) is a
per-algorithm fit score: closer to 1 is better. Effectiveness curves
compare the distribution of near-best results between observation (AUAEC)
and prediction (AUPEC); a large difference flags an algorithm the model
misreads.
"""

import numpy as np

import airt

rng = np.random.default_rng(17)

N, n = 250, 4
names = ("faithful_a", "faithful_b", "faithful_c", "misfit")
alpha = np.array([1.4, 1.0, 1.8, 1.1])
beta = np.array([0.1, -0.4, 0.7, 0.0])
gamma = np.array([1.5, 1.1, 2.0, 1.3])
theta = rng.normal(0, 1, N)
z = (theta[:, None] - beta) / gamma + rng.normal(0, 1, (N, n)) / np.abs(alpha * gamma)
x = 1 / (1 + np.exp(-z))
# The last algorithm ignores the latent structure half the time.
mask = rng.random(N) < 0.5
x[mask, 3] = rng.uniform(0.05, 0.95, mask.sum())

matrix = airt.PerformanceMatrix(
    values=x,
    descriptor=airt.ScenarioDescriptor(
        name="goodness-demo", measurement="accuracy", maximize=True,
        algorithm_names=names,
        instance_ids=tuple(f"inst_{i}" for i in range(N)),
    ),
)
responses = airt.transform_performance(matrix)
model = airt.fit(responses)
report = airt.goodness_report(responses.x, model)

print(f"{'algorithm':>12} {'MSE':>7} {'AUCDF':>7} {'AUAEC':>7} {'AUPEC':>7} {'|diff|':>7}")
for row in report.rows():
    print(f"{row['algorithm']:>12} {row['mse']:7.3f} {row['aucdf']:7.3f} "
          f"{row['auaec']:7.3f} {row['aupec']:7.3f} "
          f"{row['auaec_aupec_gap']:7.3f}")

worst = report.names[int(np.nanargmin(report.aucdf))]
print()
print(f"lowest AUCDF (worst fitted): {worst}")
print("the corrupted algorithm shows both a higher MSE and a lower AUCDF,")
print("so portfolio conclusions about it deserve less trust")

curve = airt.effectiveness(responses.x[:, 0], "actual")
print()
print(f"effectiveness curve of {names[0]}: {curve.points.shape[0]} points, "
      f"area {curve.area:.3f}")
