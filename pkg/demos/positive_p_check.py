"""Check the linearized covariances against a positive-P stochastic ensemble.

Below threshold the amplitudes are Gaussian to a very good approximation, so
ensemble moments of the stochastic amplitudes must reproduce the Lyapunov
solution within their batch standard errors.  This small run takes about 10 s.
"""

from nopo import stochastic
from nopo.linearized import build_below, covariance_below, moments_below
from nopo.params import SystemParams

p = SystemParams.symmetric(gamma=1.0, delta=2.0, chi=0.3, lam=1e-6).with_eps_ratio(0.6)
ref = moments_below(covariance_below(build_below(p)))
stats = stochastic.integrate(p, dt=1e-3, t_end=5.0, n_traj=20_000, seed=2024)

rows = (("n = <a1+ a1>", (1, 0, 1, 0), ref["n"]),
        ("<a1 a2>", (0, 0, 1, 1), ref["a1a2"]),
        ("<a1^2>", (0, 0, 2, 0), ref["a1sq"]),
        ("<a1+ a2>", (1, 0, 0, 1), ref["a1dag_a2"]),
        ("<a1> (zero)", (0, 0, 1, 0), 0.0))
print(f"{stats.n_trajectories} trajectories, dt = {stats.dt}, diverged = {stats.diverged_count}")
for name, spec, expected in rows:
    mean, se = stochastic.moment_estimate(stats, spec)
    print(f"{name:14s} MC {mean.real:+.4f}{mean.imag:+.4f}i  (se {se.real:.4f})   "
          f"linearized {complex(expected).real:+.4f}{complex(expected).imag:+.4f}i")
