"""Two-mode squeezing variances and the inseparability / EPR criteria.

With quadratures X_j, Y_j at local-oscillator angles theta_j and the angle
combinations delta_theta = theta2 - theta1 and sigma_theta = theta1 + theta2
(phase-cancelled frame),

    V  = 1 + 2n - 2 Re(<a1 a2> e^{i sigma_theta})
    R  = 2 Re(<a1^2> e^{i sigma_theta}) - 2 Re<a1+ a2>
    V+ = V + R cos(delta_theta),   V- = V - R cos(delta_theta)

so that V = (V+ + V-)/2 and V+ V- = V^2 - R^2 cos^2(delta_theta).  V < 1 is
sufficient for inseparability; V+ V- < 1/4 signals strong EPR correlations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError
from .linearized import THRESHOLD_BAND
from .params import SystemParams, threshold_epsilon
from .semiclassical import SteadyState, steady_state_symmetric

SUFFICIENT_ONLY = "V < 1 is sufficient, not necessary, for inseparability; the state need not be Gaussian"


@dataclass(frozen=True)
class VarianceReport:
    V: float
    R: float
    v_plus: float
    v_minus: float
    product: float
    inseparable: bool
    epr_strong: bool
    delta_theta: float
    sigma_theta: float | None
    phi_arg: float | None
    reliable: bool = True
    note: str = SUFFICIENT_ONLY


@dataclass(frozen=True)
class Verdicts:
    inseparable: bool
    epr_strong: bool
    note: str = SUFFICIENT_ONLY


def _report(v, r, delta_theta, sigma_theta=None, phi_arg=None, reliable=True) -> VarianceReport:
    c = math.cos(delta_theta)
    vp, vm = v + r * c, v - r * c
    prod = v * v - (r * c) ** 2
    return VarianceReport(float(v), float(r), float(vp), float(vm), float(prod),
                          bool(v < 1), bool(prod < 0.25), float(delta_theta),
                          sigma_theta, phi_arg, reliable)


def variance_from_moments(n: float, a1a2: complex, a1sq: complex = 0.0, a1dag_a2: complex = 0.0,
                          delta_theta: float = math.pi / 2, sigma_theta: float | None = None,
                          reliable: bool = True) -> VarianceReport:
    """V, R and V+- from normal-ordered second moments.

    ``sigma_theta=None`` picks the V-minimizing value -arg<a1 a2>.
    """
    a1a2 = complex(a1a2)
    phi_arg = cmath.phase(a1a2) if a1a2 != 0 else 0.0
    if sigma_theta is None:
        sigma_theta = -phi_arg
    rot = cmath.exp(1j * sigma_theta)
    v = 1 + 2 * n - 2 * (a1a2 * rot).real
    r = 2 * (complex(a1sq) * rot).real - 2 * complex(a1dag_a2).real
    return _report(v, r, delta_theta, float(sigma_theta), float(phi_arg), reliable)


def _band_ok(p: SystemParams, band: float) -> bool:
    return abs(p.epsilon / threshold_epsilon(p) - 1.0) >= band


def v_below_parts(p: SystemParams) -> tuple[float, float]:
    """Minimal V and the matching R below threshold (symmetric system).

    Written so that no 0/0 appears at eps = eps_th; at threshold V equals
    1/2 + chi/(4|D|), continuous with the above-threshold branch.
    """
    g, d, chi, eps = p.gamma, p.delta, p.chi, p.epsilon
    s2 = g * g + chi * chi + d * d - eps * eps
    q_root = math.sqrt(g * g * s2 * s2 + d * d * (s2 - 2 * chi * chi) ** 2)
    if eps == 0:
        return 1.0, 0.0
    v = 1 - eps * (g * g + d * d - eps * eps) / (eps * s2 + q_root)
    p1 = g * g + (d - chi) ** 2
    p2 = g * g + (d + chi) ** 2
    q = (chi ** 4 - 2 * chi ** 2 * d ** 2 + 2 * chi ** 2 * eps ** 2 + 2 * chi ** 2 * g ** 2
         + d ** 4 - 2 * d ** 2 * eps ** 2 + 2 * d ** 2 * g ** 2 + eps ** 4
         - 2 * eps ** 2 * g ** 2 + g ** 4)
    r = eps * chi * d * q / (q_root * ((eps ** 4 - p1 * p2) - 2 * eps * q_root))
    return v, r


def v_below(p: SystemParams, delta_theta: float = math.pi / 2,
            band: float = THRESHOLD_BAND) -> VarianceReport:
    if not p.is_symmetric:
        raise DomainError("closed-form variances need gamma1 == gamma2 and delta1 == delta2")
    if p.epsilon > threshold_epsilon(p):
        raise DomainError("v_below needs eps <= eps_th")
    v, r = v_below_parts(p)
    return _report(v, r, delta_theta, reliable=_band_ok(p, band))


def _above_root(p: SystemParams) -> float:
    eth = threshold_epsilon(p)
    return math.sqrt(1 + (p.epsilon ** 2 - eth ** 2) / p.gamma ** 2)


def v_above_parts(p: SystemParams) -> tuple[float, float]:
    """Minimal V and the matching R of the stable locked state."""
    d = abs(p.delta)
    if d == 0:
        raise DomainError("no phase-locked above-threshold solution computed for zero detuning")
    s = _above_root(p)
    v = 0.75 - 0.25 / s + p.chi / (4 * d)
    r = math.copysign(0.25, p.delta) * ((d - p.chi) / d - 1 / s)
    return v, r


def v_above(p: SystemParams, state: SteadyState | None = None, delta_theta: float = math.pi / 2,
            band: float = THRESHOLD_BAND) -> VarianceReport:
    if not p.is_symmetric:
        raise DomainError("closed-form variances need gamma1 == gamma2 and delta1 == delta2")
    if p.epsilon < threshold_epsilon(p):
        raise DomainError("v_above needs eps >= eps_th")
    if state is None:
        state = steady_state_symmetric(p)
    if not state.stable and state.n0 > 0:
        raise DomainError("v_above needs a stable locked state")
    v, r = v_above_parts(p)
    return _report(v, r, delta_theta, reliable=_band_ok(p, band))


def product_at_pi(p: SystemParams) -> float:
    """V+ V- at delta_theta = 0 or pi above threshold: (|D| + chi)/(4|D|) (2 - 1/s)."""
    d = abs(p.delta)
    return (d + p.chi) / (4 * d) * (2 - 1 / _above_root(p))


def variance(p: SystemParams, delta_theta: float = math.pi / 2,
             band: float = THRESHOLD_BAND) -> VarianceReport:
    """Closed-form V, R, V+- in whichever regime ``p`` lies."""
    if p.epsilon < threshold_epsilon(p):
        return v_below(p, delta_theta, band)
    return v_above(p, delta_theta=delta_theta, band=band)


def criteria(report: VarianceReport) -> Verdicts:
    return Verdicts(bool(report.V < 1), bool(report.product < 0.25))
