"""
Sweeping the threshold
======================

One full CHSH experiment per threshold. As the threshold leaves the
midpoint the success probability falls, the kept sample gets more and more
aligned with the analyzers, and S climbs along the closed-form dilution
curve - while its error bar grows on the shrinking sample.
"""

import numpy as np

from macrobell import RunConfig, calibrate_source, default_threshold_grid, threshold_sweep
from macrobell import theory

src = calibrate_source(0.536, 0.602)
cfg = RunConfig(source=src, trials_per_setting=20_000, seed=6)
grid = default_threshold_grid(points=13, p_min=0.08)
result = threshold_sweep(cfg, grid)

print("threshold   P_s     S (MC)   sigma   S (oracle)")
oracle = []
for row in result.rows:
    s_oracle = theory.predicted_bell_parameter(
        src, window=theory.acceptance_window(row.threshold)
    )
    oracle.append(s_oracle)
    marker = " *" if row.s > 2.0 else ""
    print(
        f"{row.threshold:9.4f}  {row.success_probability:.3f}  "
        f"{row.s:7.3f}  {row.sigma_s:.3f}  {s_oracle:9.3f}{marker}"
    )
print("* above the local bound 2")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ps = [r.success_probability for r in result.rows]
    fig, ax1 = plt.subplots(figsize=(6, 4))
    ax1.errorbar(
        [r.threshold for r in result.rows],
        [r.s for r in result.rows],
        yerr=[3 * r.sigma_s for r in result.rows],
        fmt="o",
        label="S (MC, 3 sigma)",
    )
    ax1.plot([r.threshold for r in result.rows], oracle, "-", label="dilution oracle")
    ax1.axhline(2.0, color="k", lw=0.8)
    ax1.set_xlabel("threshold (normalized intensity)")
    ax1.set_ylabel("Bell parameter S")
    ax2 = ax1.twinx()
    ax2.plot([r.threshold for r in result.rows], ps, "r--", label="success probability")
    ax2.set_ylabel("success probability")
    ax1.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig("demos_sweep.png", dpi=120)
    print("wrote demos_sweep.png")
except ImportError:
    pass
