"""Two-mode squeezing of the damped, pumped cavity as the pump is raised.

Below threshold V falls towards the threshold value 1/2 + chi/(4|D|); above
threshold it rises again to 3/4 + chi/(4|D|).  V stays below 1 (inseparable)
for any pump when chi < |D|.  The product V+ V- never drops below 1/4, so
the strong EPR criterion is not met.

Run:  python demos/variance_vs_pump.py [--plot out.png]
"""

import argparse
import math

import numpy as np

from nopo import entanglement
from nopo.figures import reproduce_figure
from nopo.params import SystemParams

ap = argparse.ArgumentParser()
ap.add_argument("--plot", help="save a figure here (needs matplotlib)")
args = ap.parse_args()

for chi, delta in ((0.1, 10.0), (0.5, 3.0), (0.5, 1.0)):
    base = SystemParams.symmetric(gamma=1.0, delta=delta, chi=chi)
    print(f"chi = {chi}, D = {delta}")
    for ratio in (0.5, 0.9, 1.0, 1.5, 3.0, 100.0):
        r = entanglement.variance(base.with_eps_ratio(ratio))
        flag = "" if r.reliable else "  (near threshold: linearization marginal)"
        print(f"   eps/eps_th = {ratio:6.1f}   V = {r.V:.4f}   R = {r.R:+.4f}{flag}")
    print(f"   threshold value 1/2 + chi/4|D| = {0.5 + chi / (4 * delta):.4f}, "
          f"far above 3/4 + chi/4|D| = {0.75 + chi / (4 * delta):.4f}")

p = SystemParams.symmetric(gamma=1.0, delta=1.0, chi=0.5).with_eps_ratio(1.0)
r = entanglement.v_above(p, delta_theta=math.pi)
print(f"\nV+ V- at threshold (chi = 0.5, D = 1, delta_theta = pi): {r.product:.4f} >= 1/4")
print(entanglement.SUFFICIENT_ONLY)

if args.plot:
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))
    for ax, name, ylabel in zip(axes, ("fig4", "fig5", "fig6"), ("V", "V+, V-", "V+ V-")):
        rows = reproduce_figure(name, n_points=400)
        for curve in sorted({row["curve"] for row in rows}):
            pts = np.array([(row["x"], row["y"]) for row in rows if row["curve"] == curve])
            ax.plot(pts[:, 0], pts[:, 1], label=f"curve {curve}")
        ax.set_xlabel("eps / eps_th")
        ax.set_ylabel(ylabel)
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.plot, dpi=120)
    print(f"wrote {args.plot}")
