"""Statistics toolbox on a simulated training log.

A decreasing metric series stands in for a training run. The demo looks at
the latter 30% of it: bootstrap CI of the tail mean, normality of the tail,
early-vs-late Mann-Whitney, and where the final value sits on the tail ECDF.
"""

import numpy as np

from synthval import (ContingencyTable2x2, MetricSeries, bootstrap_mean_ci,
                      chi_square_2x2, ecdf_percentile, ema_update,
                      mann_whitney_u, r1_penalty, shapiro_wilk, tail_fraction)

rng = np.random.default_rng(42)
steps = np.arange(600)
values = 100.0 * np.exp(-steps / 150.0) + 17.0 + rng.normal(0, 0.4, 600)
series = MetricSeries(points=list(zip(steps.tolist(), values.tolist())))

tail = tail_fraction(series, 0.3).values()
boot = bootstrap_mean_ci(tail, resamples=2000, level=0.95, seed=0)
print(f"tail mean {boot.mean:.2f}, 95% CI [{boot.ci_low:.2f}, {boot.ci_high:.2f}]")

sw = shapiro_wilk(tail)
print(f"tail normality: W = {sw.statistic:.4f}, p = {sw.p_value:.3f}")

half = len(values) // 2
mwu = mann_whitney_u(values[:half], values[half:])
print(f"early vs late: U = {mwu.statistic:.1f}, p = {mwu.p_value:.2e}")

final = float(values[-1])
print(f"final value {final:.2f} sits at tail percentile "
      f"{ecdf_percentile(tail, final):.3f}")

# independence test on a 2x2 table of grader outcomes
table = ContingencyTable2x2(counts=((90, 10), (12, 88)))
chi = chi_square_2x2(table)
print(f"\nchi-square on ((90,10),(12,88)): {chi.statistic:.2f}, "
      f"p = {chi.p_value:.2e}")

# smoothing and regularization helpers
ema = values[0]
for v in values[1:]:
    ema = ema_update(ema, float(v), beta=0.998)
print(f"\nEMA(beta=0.998) of the series ends at {ema:.2f}")

penalty = r1_penalty(lambda x: float(x @ x) / 2,
                     [rng.normal(size=4) for _ in range(64)], gamma=8.0)
print(f"R1 penalty of f(x)=|x|^2/2 on N(0,I) samples: {penalty:.2f} "
      f"(population value 16)")
