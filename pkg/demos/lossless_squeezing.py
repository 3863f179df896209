"""Squeezing from a short pump pulse, before the cavity losses matter.

Both modes start in vacuum.  For eps < chi the two-mode variance oscillates,
for eps > chi it dips once and then grows.  Either way the deepest point is
V = chi / (eps + chi), so a strong pump (eps = 3 chi) reaches V = 1/4.

Run:  python demos/lossless_squeezing.py [--plot out.png]
"""

import argparse

import numpy as np

from nopo import unitary

ap = argparse.ArgumentParser()
ap.add_argument("--plot", help="save a figure here (needs matplotlib)")
args = ap.parse_args()

chi = 1.0
print(" eps/chi   regime     eps*t_min          V_min    period (eps*t / pi)")
for ratio in (0.2, 0.4, 0.7, 1.0, 1.1, 2.0, 3.0):
    eps = ratio * chi
    times = unitary.t_min(eps, chi, count=2)
    per = unitary.period(eps, chi)
    per_txt = f"{eps * per / np.pi:.4f}" if per else "-"
    print(f"  {ratio:4.1f}   {unitary.regime(eps, chi):8s}  "
          f"{', '.join(f'{eps * t:.4f}' for t in times):17s}  {unitary.v_min(eps, chi):.4f}   {per_txt}")

# the minimum is a real minimum of the sampled curve, not just a formula
c = unitary.unitary_curve(3.0, chi, n_points=20001, t_end=1.0)
print(f"\nsampled min of V(t) at eps = 3 chi: {c.V.min():.6f} (expected 0.25)")
print(c.note)

if args.plot:
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, ratios, x_max in ((axes[0], (0.2, 0.4, 0.7), 7.0), (axes[1], (1.1, 2.0, 3.0), 2.0)):
        x = np.linspace(0, x_max, 600)
        for ratio in ratios:
            ax.plot(x, unitary.v_of_t(ratio, chi, 0.0, x / ratio), label=f"eps/chi = {ratio}")
        ax.set_xlabel("eps t")
        ax.set_ylabel("V")
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.plot, dpi=120)
    print(f"wrote {args.plot}")
