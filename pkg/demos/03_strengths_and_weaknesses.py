"""Map strengths and weaknesses along the difficulty spectrum.

Smoothing splines regress each algorithm's performance on instance
difficulty. Where a curve stays within epsilon of the upper envelope the
algorithm is strong; near the lower envelope it is weak. Latent trait
occupancy (LTO) measures how many instances each strength region covers,
and the airt portfolio collects every strength holder.

The instance-difficulty direction is identified by the portfolio majority:
algorithms that improve where most others degrade come out with a negative
discrimination (anomalous) and typically hold their strengths on the hard
end of the spectrum.
"""

import numpy as np

import airt
from airt.svg import render_strength_bars, render_trait_curves

rng = np.random.default_rng(3)

# Hand-shaped curves over a hidden hardness scale: a solid generalist, an
# easy-instance expert, a contrarian that improves with hardness, and a
# uniformly poor straggler.
N = 500
hardness = np.sort(rng.normal(0, 1, N))
profiles = {
    "generalist": 0.72 - 0.20 * hardness,
    "easy_expert": 0.88 - 0.34 * hardness - 0.06 * hardness**2,
    "contrarian": 0.30 + 0.10 * hardness,
    "straggler": 0.22 - 0.12 * hardness,
}
names = tuple(profiles)
x = np.column_stack([np.clip(v + rng.normal(0, 0.06, N), 0.01, 0.99)
                     for v in profiles.values()])

matrix = airt.PerformanceMatrix(
    values=x,
    descriptor=airt.ScenarioDescriptor(
        name="strengths-demo", measurement="accuracy", maximize=True,
        algorithm_names=names,
        instance_ids=tuple(f"inst_{i}" for i in range(N)),
    ),
)
responses = airt.transform_performance(matrix)
model = airt.fit(responses)
delta = airt.dataset_difficulty(model.theta)
print("fitted difficulty tracks the hidden hardness: corr =",
      f"{np.corrcoef(delta.delta, hardness)[0, 1]:.3f}")
print("anomalous flags:",
      dict(zip(names, airt.algorithm_metrics(model.params).anomalous)))
print()

curves = airt.fit_curves(delta, responses.x, names)
limits = airt.algorithm_metrics(model.params).difficulty_limit
for eps in (0.0, 0.05):
    report = airt.strengths_weaknesses(curves, eps, limits)
    print(f"epsilon = {eps}")
    for j, name in enumerate(names):
        spans = ", ".join(f"[{lo:.2f}, {hi:.2f}]"
                          for lo, hi in report.strengths[j]) or "none"
        print(f"  {name:>12}: LTO {report.lto[j]:.3f}  strengths {spans}")
    print(f"  airt portfolio: {airt.airt_portfolio(report)}")
    print()

report = airt.strengths_weaknesses(curves, 0.05, limits)
with open("demo03_strengths.svg", "w") as handle:
    handle.write(render_strength_bars(report))
with open("demo03_curves.svg", "w") as handle:
    handle.write(render_trait_curves(curves))
print("wrote demo03_strengths.svg and demo03_curves.svg")
