"""Semiclassical steady states, critical pumps, stability and photon fluxes.

Everything here works with the noise-free adiabatic equations in the
phase-cancelled frame.  Mean amplitudes of a phase-locked state are
``alpha_j = sqrt(n_j) exp(i phi_j)`` and ``beta_j = conj(alpha_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, ParameterError
from .langevin import drift_adiabatic, drift_matrix, drift_matrix_at_zero, number_phase_matrices
from .params import SystemParams, threshold_epsilon

RESIDUAL_TOL = 1e-8
STABILITY_TOL = 1e-10


@dataclass(frozen=True)
class CriticalPumps:
    eps_cr_plus: float | None
    eps_cr_minus: float | None
    exists: bool


@dataclass(frozen=True)
class SteadyState:
    """Mean photon numbers and locked phases of a fixed point.

    ``branch`` is ``"+"`` or ``"-"`` for the critical-pump branch the solution
    grows from, ``"0"`` for the trivial solution.
    """

    n1: float
    n2: float
    phi1: float
    phi2: float
    branch: str
    stable: bool | None = None
    epsilon: float = 0.0

    @property
    def amplitudes(self) -> np.ndarray:
        """``(alpha1, alpha2, beta1, beta2)``."""
        a1 = math.sqrt(self.n1) * np.exp(1j * self.phi1)
        a2 = math.sqrt(self.n2) * np.exp(1j * self.phi2)
        return np.array([a1, a2, np.conj(a1), np.conj(a2)])

    @property
    def n0(self) -> float:
        return 0.5 * (self.n1 + self.n2)

    @property
    def phase_sum(self) -> float:
        return self.phi1 + self.phi2

    @property
    def phase_diff(self) -> float:
        return self.phi2 - self.phi1

    def shifted(self) -> "SteadyState":
        """Partner state under the two-fold symmetry phi_j -> phi_j + pi."""
        return SteadyState(self.n1, self.n2, self.phi1 + math.pi, self.phi2 + math.pi,
                           self.branch, self.stable, self.epsilon)


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    stable: bool
    min_real: float
    matrices: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Flux:
    n3_in: float
    n1_out: float
    n2_out: float
    n3_in_threshold: float | None


def existence_condition(p: SystemParams) -> bool:
    """True when 4 chi^2 D1 D2 > (g1 D2 - g2 D1)^2, the locked solution exists."""
    lhs = 4 * p.chi ** 2 * p.delta1 * p.delta2
    rhs = (p.gamma1 * p.delta2 - p.gamma2 * p.delta1) ** 2
    return lhs > rhs


def critical_pumps(p: SystemParams) -> CriticalPumps:
    disc = 4 * p.chi ** 2 * p.delta1 * p.delta2 - (p.gamma1 * p.delta2 - p.gamma2 * p.delta1) ** 2
    if disc < 0:
        return CriticalPumps(None, None, False)
    base = p.gamma1 * p.gamma2 + p.delta1 * p.delta2 + p.chi ** 2
    root = math.sqrt(disc)
    # base - root >= g1 g2 + (chi - sqrt(D1 D2))^2 > 0 whenever disc >= 0
    return CriticalPumps(math.sqrt(base - root), math.sqrt(base + root), True)


def residual(p: SystemParams, state: SteadyState) -> float:
    """Largest |component| of the noise-free drift evaluated at ``state``."""
    return float(np.max(np.abs(drift_adiabatic(state.amplitudes, p))))


def _residual_scale(p: SystemParams, state: SteadyState) -> float:
    amp = math.sqrt(max(state.n1, state.n2, 1.0))
    rate = max(p.gamma1, p.gamma2, abs(p.delta1), abs(p.delta2), p.chi, p.epsilon, 1.0)
    return amp * rate


def is_fixed_point(p: SystemParams, state: SteadyState, tol: float = RESIDUAL_TOL) -> bool:
    return residual(p, state) <= tol * _residual_scale(p, state)


def _zero_state(p: SystemParams) -> SteadyState:
    s = SteadyState(0.0, 0.0, 0.0, 0.0, "0", None, p.epsilon)
    return _with_stability(p, s)


def _with_stability(p: SystemParams, s: SteadyState) -> SteadyState:
    rep = stability(p, s)
    return SteadyState(s.n1, s.n2, s.phi1, s.phi2, s.branch, rep.stable, s.epsilon)


def steady_state_symmetric(p: SystemParams, k: int = 0) -> SteadyState:
    """Stable phase-locked state of the mode-symmetric system.

    Below threshold the trivial solution is returned.  Above threshold
    n0 = (sqrt(eps^2 - (chi - |D|)^2) - gamma) / lam, the mode phases differ by
    pi (D > 0) or 0 (D < 0), and the phase sum satisfies
    eps sin(phi1 + phi2) = sign(D) (chi - |D|).  ``k`` adds k*pi to both phases.
    """
    if not p.is_symmetric:
        raise ParameterError("steady_state_symmetric needs gamma1 == gamma2 and delta1 == delta2")
    eps, eth = p.epsilon, threshold_epsilon(p)
    if eps < eth:
        return _zero_state(p)
    delta, chi = p.delta, p.chi
    if delta == 0 and chi > 0:
        raise DomainError("no phase-locked above-threshold solution computed for zero detuning")
    n0 = max(math.sqrt(max(eps ** 2 - (chi - abs(delta)) ** 2, 0.0)) - p.gamma, 0.0) / p.lam
    sgn = math.copysign(1.0, delta) if delta != 0 else 1.0
    diff = math.pi if delta > 0 else 0.0
    ssum = -sgn * math.asin(max(-1.0, min(1.0, (abs(delta) - chi) / eps)))
    phi1 = 0.5 * (ssum - diff) + k * math.pi
    phi2 = 0.5 * (ssum + diff) + k * math.pi
    return _with_stability(p, SteadyState(n0, n0, phi1, phi2, "+", None, eps))


def steady_state_general(p: SystemParams, branch: str = "+", k: int = 0) -> SteadyState:
    """Phase-locked state for unequal decay rates and detunings of the same sign.

    The photon numbers follow from the detuning-weighted decay rate
    gamma~ = (g1 sqrt(D2/D1) + g2 sqrt(D1/D2)) / 2; of the four phase pairs
    compatible with sin(phi2 - phi1) and cos(phi1 + phi2) the one with the
    smallest drift residual is kept.  Below the branch's critical pump the
    trivial solution is returned.
    """
    if branch not in ("+", "-"):
        raise ParameterError(f"branch must be '+' or '-', got {branch!r}")
    d1, d2 = p.delta1, p.delta2
    if d1 * d2 < 0:
        raise ParameterError("detunings of opposite sign: sqrt(delta2/delta1) is not real")
    if d1 == 0 or d2 == 0:
        raise DomainError("no phase-locked above-threshold solution computed for zero detuning")
    cp = critical_pumps(p)
    if not cp.exists:
        raise DomainError("existence condition 4 chi^2 D1 D2 >= (g1 D2 - g2 D1)^2 violated")
    eps_cr = cp.eps_cr_plus if branch == "+" else cp.eps_cr_minus
    eps = p.epsilon
    if eps <= eps_cr:
        return _zero_state(p)

    g1, g2, chi, lam = p.gamma1, p.gamma2, p.chi, p.lam
    r = math.sqrt(d2 / d1)
    gt = 0.5 * (g1 * r + g2 / r)
    root = math.sqrt(eps ** 2 - eps_cr ** 2 + gt ** 2)
    base = (root - gt) / lam
    n1, n2 = base * r, base / r
    s_diff = (g1 * r - g2 / r) / (2 * chi) if chi > 0 else 0.0
    c_sum = root / eps
    s_diff = max(-1.0, min(1.0, s_diff))
    c_sum = max(-1.0, min(1.0, c_sum))
    best = None
    for diff in (math.asin(s_diff), math.pi - math.asin(s_diff)):
        for ssum in (math.acos(c_sum), -math.acos(c_sum)):
            cand = SteadyState(n1, n2, 0.5 * (ssum - diff) + k * math.pi,
                               0.5 * (ssum + diff) + k * math.pi, branch, None, eps)
            res = residual(p, cand)
            if best is None or res < best[0]:
                best = (res, cand)
    res, state = best
    state = _polish(p, state)
    res = residual(p, state)
    if res > RESIDUAL_TOL * _residual_scale(p, state):
        raise DomainError(f"no phase pair reproduces a fixed point (residual {res:.3g})")
    return _with_stability(p, state)


def _polish(p: SystemParams, state: SteadyState) -> SteadyState:
    """Refine the phases at fixed photon numbers; acos/asin lose digits near +-1."""
    def f(x):
        s = SteadyState(state.n1, state.n2, x[0], x[1], state.branch)
        d = drift_adiabatic(s.amplitudes, p)[:2]
        return [d[0].real, d[0].imag, d[1].real, d[1].imag]

    sol = least_squares(f, [state.phi1, state.phi2], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    cand = SteadyState(state.n1, state.n2, sol.x[0], sol.x[1], state.branch, None, state.epsilon)
    if residual(p, cand) < residual(p, state):
        return cand
    return state


def steady_state(p: SystemParams, branch: str = "+", k: int = 0) -> SteadyState:
    """Symmetric solver when the modes are equivalent, general solver otherwise."""
    if p.is_symmetric:
        return steady_state_symmetric(p, k)
    return steady_state_general(p, branch, k)


def stability(p: SystemParams, state: SteadyState, tol: float = STABILITY_TOL) -> StabilityReport:
    """Linear stability from drift-matrix eigenvalues (d/dt x = -F x; stable iff Re > 0).

    The trivial state uses the 4x4 matrix at zero amplitude.  A symmetric
    locked state uses the decoupled 2x2 number/phase matrices; other locked
    states use the 4x4 Jacobian at the mean amplitudes.
    """
    if not is_fixed_point(p, state):
        raise DomainError(f"state is not a fixed point (residual {residual(p, state):.3g})")
    if state.n1 == 0 and state.n2 == 0:
        f = drift_matrix_at_zero(p)
        eig = np.linalg.eigvals(f)
        mats = {"F": f}
    elif p.is_symmetric:
        fp, _, fm, _ = number_phase_matrices(p, state.n0, state.phase_sum, state.phase_diff)
        eig = np.concatenate([np.linalg.eigvals(fp), np.linalg.eigvals(fm)])
        mats = {"F_plus": fp, "F_minus": fm}
    else:
        f = drift_matrix(state.amplitudes, p)
        eig = np.linalg.eigvals(f)
        mats = {"F": f}
    min_real = float(np.min(eig.real))
    return StabilityReport(eig, min_real > tol, min_real, mats)


def io_flux(p: SystemParams, state: SteadyState) -> Flux:
    """Input pump flux E^2/(2 gamma3) and output fluxes 2 gamma_i n_i (photons per unit time)."""
    n3_th = None
    if p.is_symmetric:
        e_th = p.gamma3 / p.k * threshold_epsilon(p)
        n3_th = e_th ** 2 / (2 * p.gamma3)
    return Flux(p.E ** 2 / (2 * p.gamma3), 2 * p.gamma1 * state.n1, 2 * p.gamma2 * state.n2, n3_th)
