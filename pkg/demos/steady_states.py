"""Classical operating points: threshold, locked phases, stability and flux.

Above threshold the linear coupling chi locks the mode phases: they differ
by pi for D > 0 and by 0 for D < 0, instead of diffusing freely as in an
ordinary two-mode oscillator.
"""

import numpy as np

from nopo import semiclassical
from nopo.params import SystemParams, threshold_epsilon

for delta in (3.0, -3.0):
    base = SystemParams.symmetric(gamma=1.0, delta=delta, chi=0.5, lam=0.01)
    print(f"D = {delta:+.0f}, eps_th = {threshold_epsilon(base):.4f}")
    for ratio in (0.5, 1.5, 3.0):
        p = base.with_eps_ratio(ratio)
        s = semiclassical.steady_state(p)
        rep = semiclassical.stability(p, s)
        print(f"   eps/eps_th = {ratio}: n0 = {s.n0:9.3f}  phi2 - phi1 = {s.phase_diff:+.4f}  "
              f"phi1 + phi2 = {s.phase_sum:+.4f}  stable = {rep.stable}  "
              f"slowest rate = {rep.min_real:.4f}  residual = {semiclassical.residual(p, s):.1e}")

# unequal modes: the general solver and its two critical pumps
p = SystemParams(gamma1=1.0, gamma2=1.3, delta1=2.0, delta2=2.5, chi=1.2, k=0.3)
cp = semiclassical.critical_pumps(p)
print(f"\nunequal modes: eps_cr = {cp.eps_cr_plus:.4f}, {cp.eps_cr_minus:.4f}")
q = p.with_epsilon(2 * cp.eps_cr_plus)
s = semiclassical.steady_state(q)
flux = semiclassical.io_flux(q, s)
print(f"   n1 = {s.n1:.4f}, n2 = {s.n2:.4f}, stable = {s.stable}")
print(f"   pump in {flux.n3_in:.4f}, signal out {flux.n1_out:.4f} + {flux.n2_out:.4f} photons per unit time")
print(f"   eigenvalues: {np.round(semiclassical.stability(q, s).eigenvalues, 4)}")
