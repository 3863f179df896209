"""Positive-P Monte Carlo: Euler-Maruyama ensembles of the Langevin equations.

Each trajectory owns a Philox stream keyed by ``(seed, trajectory index)``, so
results do not depend on how trajectories are spread over worker threads.
Normal-ordered moments <a1+^k a2+^m a1^l a2^n> are ensemble means of
beta1^k beta2^m alpha1^l alpha2^n; standard errors come from a fixed number of
batches formed by trajectory index.

The Python reference step lives in ``langevin.euler_step``; the compiled
kernels below repeat the same arithmetic and draw the four unit normals of a
step in the same order.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import MonteCarloError, ParameterError
from .langevin import ADIABATIC, FULL, drift_adiabatic, drift_full, noise_sample, state_size  # noqa: F401
from .params import SystemParams
from .semiclassical import SteadyState

DIVERGENCE_BOUND = 1e6
DIVERGENCE_CEILING = 0.01
DT_GUARD = 0.1
MIN_TRAJECTORIES = 1000
N_BATCHES = 20


def _pack(p: SystemParams) -> np.ndarray:
    return np.array([p.gamma1, p.gamma2, p.delta1, p.delta2, p.chi, p.epsilon, p.lam,
                     p.k, p.E, p.gamma3])


@numba.njit(nogil=True, cache=True)
def _run_adiabatic(y0, prm, dt, n_steps, record, gen, out):
    g1 = prm[0] + 1j * prm[2]
    g2 = prm[1] + 1j * prm[3]
    g1c = prm[0] - 1j * prm[2]
    g2c = prm[1] - 1j * prm[3]
    chi, eps, lam = prm[4], prm[5], prm[6]
    a1, a2, b1, b2 = y0[0], y0[1], y0[2], y0[3]
    bound2 = 1e12
    r = 0
    for step in range(n_steps + 1):
        while r < record.shape[0] and record[r] == step:
            out[r, 0] = a1
            out[r, 1] = a2
            out[r, 2] = b1
            out[r, 3] = b2
            r += 1
        if step == n_steps:
            break
        c = eps - lam * a1 * a2
        cp = eps - lam * b1 * b2
        x1 = gen.standard_normal()
        x2 = gen.standard_normal()
        x3 = gen.standard_normal()
        x4 = gen.standard_normal()
        s = cmath.sqrt(0.5 * c * dt)
        sp = cmath.sqrt(0.5 * cp * dt)
        da1 = (-g1 * a1 + c * b2 - 1j * chi * a2) * dt + s * (x1 + 1j * x2)
        da2 = (-g2 * a2 + c * b1 - 1j * chi * a1) * dt + s * (x1 - 1j * x2)
        db1 = (-g1c * b1 + cp * a2 + 1j * chi * b2) * dt + sp * (x3 + 1j * x4)
        db2 = (-g2c * b2 + cp * a1 + 1j * chi * b1) * dt + sp * (x3 - 1j * x4)
        a1 += da1
        a2 += da2
        b1 += db1
        b2 += db2
        m = max(a1.real ** 2 + a1.imag ** 2, a2.real ** 2 + a2.imag ** 2,
                b1.real ** 2 + b1.imag ** 2, b2.real ** 2 + b2.imag ** 2)
        if not m < bound2:
            return True
    return False


@numba.njit(nogil=True, cache=True)
def _run_full(y0, prm, dt, n_steps, record, gen, out):
    g1 = prm[0] + 1j * prm[2]
    g2 = prm[1] + 1j * prm[3]
    g1c = prm[0] - 1j * prm[2]
    g2c = prm[1] - 1j * prm[3]
    chi, k, e, g3 = prm[4], prm[7], prm[8], prm[9]
    a1, a2, a3, b1, b2, b3 = y0[0], y0[1], y0[2], y0[3], y0[4], y0[5]
    bound2 = 1e12
    r = 0
    for step in range(n_steps + 1):
        while r < record.shape[0] and record[r] == step:
            out[r, 0] = a1
            out[r, 1] = a2
            out[r, 2] = a3
            out[r, 3] = b1
            out[r, 4] = b2
            out[r, 5] = b3
            r += 1
        if step == n_steps:
            break
        c = k * a3
        cp = k * b3
        x1 = gen.standard_normal()
        x2 = gen.standard_normal()
        x3 = gen.standard_normal()
        x4 = gen.standard_normal()
        s = cmath.sqrt(0.5 * c * dt)
        sp = cmath.sqrt(0.5 * cp * dt)
        da1 = (-g1 * a1 + k * a3 * b2 - 1j * chi * a2) * dt + s * (x1 + 1j * x2)
        da2 = (-g2 * a2 + k * a3 * b1 - 1j * chi * a1) * dt + s * (x1 - 1j * x2)
        da3 = (-g3 * a3 + e - k * a1 * a2) * dt
        db1 = (-g1c * b1 + k * b3 * a2 + 1j * chi * b2) * dt + sp * (x3 + 1j * x4)
        db2 = (-g2c * b2 + k * b3 * a1 + 1j * chi * b1) * dt + sp * (x3 - 1j * x4)
        db3 = (-g3 * b3 + e - k * b1 * b2) * dt
        a1 += da1
        a2 += da2
        a3 += da3
        b1 += db1
        b2 += db2
        b3 += db3
        m = max(a1.real ** 2 + a1.imag ** 2, a2.real ** 2 + a2.imag ** 2,
                b1.real ** 2 + b1.imag ** 2, b2.real ** 2 + b2.imag ** 2,
                a3.real ** 2 + a3.imag ** 2, b3.real ** 2 + b3.imag ** 2)
        if not m < bound2:
            return True
    return False


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream of trajectory ``index`` under master ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def step_guard(p: SystemParams, dt: float, model: str = ADIABATIC) -> float:
    """dt times the fastest rate of the model; must stay below ``DT_GUARD``."""
    rates = [p.gamma1, p.gamma2, abs(p.delta1), abs(p.delta2), p.chi, p.epsilon]
    if model == FULL:
        rates.append(p.gamma3)
    return dt * max(rates)


@dataclass
class EnsembleStats:
    """Recorded states of every kept trajectory at the sample times.

    ``samples`` has shape (kept trajectories, sample times, state size);
    ``index`` holds the original trajectory indices of the kept rows and
    defines the batches.
    """

    samples: np.ndarray
    index: np.ndarray
    times: np.ndarray
    n_trajectories: int
    dt: float
    seed: int
    diverged_count: int
    model: str
    params: SystemParams = field(repr=False)
    n_batches: int = N_BATCHES

    @property
    def valid(self) -> bool:
        return self.diverged_count <= DIVERGENCE_CEILING * self.n_trajectories

    def component(self, name: str, t_index: int = -1) -> np.ndarray:
        """Per-trajectory values of ``a1, a2, b1, b2`` (and ``a3, b3`` in the full model)."""
        names = ("a1", "a2", "b1", "b2") if self.model == ADIABATIC else ("a1", "a2", "a3", "b1", "b2", "b3")
        return self.samples[:, t_index, names.index(name)]

    def estimate(self, values) -> tuple[complex, complex]:
        """Ensemble mean of per-trajectory ``values`` and its batch standard error.

        The error is returned as ``se_re + 1j * se_im``.
        """
        values = np.asarray(values, dtype=complex)
        batch = self.index * self.n_batches // self.n_trajectories
        counts = np.bincount(batch, minlength=self.n_batches)
        if np.any(counts == 0):
            raise MonteCarloError("empty batch; too many discarded trajectories")
        sums_re = np.bincount(batch, weights=values.real, minlength=self.n_batches)
        sums_im = np.bincount(batch, weights=values.imag, minlength=self.n_batches)
        means = (sums_re + 1j * sums_im) / counts
        mean = complex(values.mean())
        se_re = means.real.std(ddof=1) / math.sqrt(self.n_batches)
        se_im = means.imag.std(ddof=1) / math.sqrt(self.n_batches)
        return mean, complex(se_re, se_im)


def moment_estimate(stats: EnsembleStats, spec, t_index: int = -1) -> tuple[complex, complex]:
    """<a1+^k a2+^m a1^l a2^n> from ``spec = (k, m, l, n)`` at sample ``t_index``."""
    k, m, l, n = spec
    if min(spec) < 0:
        raise ParameterError("moment exponents must be >= 0")
    a1 = stats.component("a1", t_index)
    a2 = stats.component("a2", t_index)
    b1 = stats.component("b1", t_index)
    b2 = stats.component("b2", t_index)
    return stats.estimate(b1 ** k * b2 ** m * a1 ** l * a2 ** n)


def _initial_state(p, model, init, seed_noise, gen):
    size = state_size(model)
    if isinstance(init, SteadyState):
        y = np.zeros(size, dtype=complex)
        amp = init.amplitudes
        if model == ADIABATIC:
            y[:] = amp
        else:
            y[[0, 1, 3, 4]] = amp
            a3 = (p.E - p.k * amp[0] * amp[1]) / p.gamma3
            y[2] = a3
            y[5] = np.conj(a3)
    elif isinstance(init, str) and init == "vacuum":
        y = np.zeros(size, dtype=complex)
        if model == FULL:
            y[2] = y[5] = p.E / p.gamma3
    else:
        y = np.array(init, dtype=complex)
        if y.shape != (size,):
            raise ParameterError(f"initial state must have {size} components")
    if seed_noise > 0:
        z = seed_noise * (gen.standard_normal(2) + 1j * gen.standard_normal(2)) / math.sqrt(2)
        if model == ADIABATIC:
            y[[0, 1]] += z
            y[[2, 3]] += np.conj(z)
        else:
            y[[0, 1]] += z
            y[[3, 4]] += np.conj(z)
    return y


def integrate(p: SystemParams, dt: float, t_end: float, n_traj: int, seed: int = 0,
              model: str = ADIABATIC, init="vacuum", seed_noise: float = 0.0,
              sample_times=None, workers: int = 1, n_batches: int = N_BATCHES,
              scheme: str = "euler", min_traj: int = MIN_TRAJECTORIES) -> EnsembleStats:
    """Run ``n_traj`` Ito Euler-Maruyama trajectories from ``init`` up to ``t_end``.

    ``init`` is ``"vacuum"``, a ``SteadyState`` or an explicit state vector;
    ``seed_noise`` adds a small complex Gaussian kick (drawn from each
    trajectory's own stream) to the subharmonic amplitudes.  States are
    recorded at ``sample_times`` (default: only ``t_end``), which are rounded
    to the time grid.
    """
    if scheme != "euler":
        raise ParameterError(f"unknown scheme {scheme!r}; only 'euler' is implemented")
    state_size(model)
    if dt <= 0 or t_end <= 0:
        raise ParameterError("dt and t_end must be positive")
    guard = step_guard(p, dt, model)
    if guard >= DT_GUARD:
        raise MonteCarloError(f"step-size guard violated: dt * max rate = {guard:.3g} >= {DT_GUARD}")
    if n_traj < min_traj:
        raise MonteCarloError(f"need at least {min_traj} trajectories, got {n_traj}")
    if n_batches < 2 or n_traj < n_batches:
        raise ParameterError("need at least two batches and one trajectory per batch")
    n_steps = int(round(t_end / dt))
    if sample_times is None:
        sample_times = [n_steps * dt]
    times = np.asarray(sample_times, dtype=float)
    record = np.rint(times / dt).astype(np.int64)
    if np.any(record < 0) or np.any(record > n_steps) or np.any(np.diff(record) < 0):
        raise ParameterError("sample_times must be sorted and lie in [0, t_end]")
    prm = _pack(p)
    kernel = _run_adiabatic if model == ADIABATIC else _run_full
    size = state_size(model)
    out = np.full((n_traj, len(record), size), np.nan + 0j)
    diverged = np.zeros(n_traj, dtype=bool)

    def work(lo, hi):
        for i in range(lo, hi):
            gen = trajectory_rng(seed, i)
            y0 = _initial_state(p, model, init, seed_noise, gen)
            diverged[i] = kernel(y0, prm, dt, n_steps, record, gen, out[i])

    if workers <= 1:
        work(0, n_traj)
    else:
        edges = np.linspace(0, n_traj, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(work, edges[:-1], edges[1:]))

    n_div = int(diverged.sum())
    if n_div > DIVERGENCE_CEILING * n_traj:
        raise MonteCarloError(f"{n_div} of {n_traj} trajectories diverged (ceiling {DIVERGENCE_CEILING:.0%})")
    keep = ~diverged
    return EnsembleStats(out[keep], np.flatnonzero(keep), record * dt, n_traj, dt, seed,
                         n_div, model, p, n_batches)
