"""How the accepted step size scales with the batch size.

Doubling the batch halves the gradient-noise power; for a preconditioned
direction the theoretically optimal step then grows by about sqrt(2). The
smoothed Armijo search discovers this scaling on its own: the experiment
below reports the mean mid-training step size per batch size and the
consecutive-doubling ratios.
"""

import numpy as np

from salsa_opt import batch_scaling_experiment, make_logreg, make_quadratic

problem = make_logreg(n=20000, dim=4, seed=0, label_noise=0.0)
print(f"problem: {problem.name} (separable: batches stay signal-aligned)\n")

report = batch_scaling_experiment(problem, batch_sizes=(4, 8, 16, 32),
                                  seeds=(0, 1, 2, 3, 4), epochs=1)
print(f"{'batch':>6} {'mean mid eta':>14} {'ratio vs prev':>14}")
prev = None
for bs in report.batch_sizes:
    eta = report.mean_mid_eta[bs]
    ratio = "" if prev is None else f"{eta / prev:14.3f}"
    print(f"{bs:6d} {eta:14.4f} {ratio:>14}")
    prev = eta
print(f"\ntheoretical optimum per doubling: sqrt(2) ~ {np.sqrt(2):.3f}")

# control: a deterministic full-batch problem has no noise to scale away,
# so every "batch size" sees the identical objective and the ratio is 1
quad = make_quadratic(dim=3, cond=5, seed=2)
flat = batch_scaling_experiment(quad, batch_sizes=(4, 8, 16, 32),
                                seeds=(0, 1), epochs=60)
print("\ndeterministic control (dataset of one):",
      " ".join(f"{r:.1f}" for _, _, r in flat.ratios), "(exactly 1.0)")
