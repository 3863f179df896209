"""Lossless (short pulsed pump) evolution of the two-mode variance V(t).

Both modes start in vacuum and evolve under the parametric coupling eps and the
linear coupling chi only.  For eps < chi the variance oscillates with
mu = sqrt(chi^2 - eps^2); for eps > chi it grows eventually as exp(2 eta t)
with eta = sqrt(eps^2 - chi^2).  At every minimum V = chi / (eps + chi).

The formulas hold when the couplings dominate the cavity losses, i.e. for
interaction times short compared with 1/gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

CRITICAL_BAND = 1e-6
VALIDITY_NOTE = "lossless limit: requires 1/eps, 1/chi <~ t << 1/gamma"

BELOW = "below"
CRITICAL = "critical"
ABOVE = "above"


@dataclass(frozen=True)
class UnitaryCurve:
    t: np.ndarray
    V: np.ndarray
    regime: str
    rate: float
    t_min: list
    v_min: float
    note: str = field(default=VALIDITY_NOTE)


def _check(eps, chi):
    if eps < 0 or chi < 0:
        raise ParameterError("eps and chi must be >= 0")


def regime(eps: float, chi: float) -> str:
    _check(eps, chi)
    if chi > 0 and abs(eps - chi) < CRITICAL_BAND * chi:
        return CRITICAL
    return BELOW if eps < chi else ABOVE


def v_of_t(eps: float, chi: float, sigma_theta: float, t):
    """V(t) for vacuum input; ``t`` may be a scalar or an array (t >= 0)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("t must be >= 0")
    c = math.cos(sigma_theta)
    reg = regime(eps, chi)
    if eps == 0:
        out = np.ones_like(t)
    elif reg == CRITICAL or rate(eps, chi) == 0:
        out = 1 + 2 * eps ** 2 * t ** 2 - 2 * eps * t * c
    elif reg == BELOW:
        mu = math.sqrt(chi ** 2 - eps ** 2)
        # 1 - (eps/mu)^2 (cos 2mu t - 1) written without cancellation
        out = 1 + 2 * (eps / mu) ** 2 * np.sin(mu * t) ** 2 - eps / mu * np.sin(2 * mu * t) * c
    else:
        eta = math.sqrt(eps ** 2 - chi ** 2)
        x = eta * t
        a = eps / eta
        early = 1 + 2 * a ** 2 * np.sinh(x) ** 2 - a * np.sinh(2 * x) * c
        # for large eta t the sinh terms cancel (V ~ exp(-2 eps t) when chi = 0); split
        # into exp(+-2x) parts with eps - c eta = chi^2/(eps + eta) + (1 - c) eta
        one_minus_c = 2 * math.sin(sigma_theta / 2) ** 2
        lead = a * (chi ** 2 / (eps + eta) + one_minus_c * eta) / eta
        tail = a * (a + c)
        with np.errstate(over="ignore"):
            late = -(chi / eta) ** 2 + 0.5 * lead * np.exp(2 * x) + 0.5 * tail * np.exp(-2 * x)
        out = np.where(x > 1.0, late, early)
    return float(out) if out.ndim == 0 else out


def rate(eps: float, chi: float) -> float:
    """mu (eps < chi) or eta (eps > chi); 0 at eps = chi."""
    return math.sqrt(abs(chi ** 2 - eps ** 2))


def period(eps: float, chi: float) -> float | None:
    """Spacing pi/mu of successive minima for eps < chi, None otherwise."""
    if regime(eps, chi) != BELOW or eps == 0:
        return None
    return math.pi / rate(eps, chi)


def t_min(eps: float, chi: float, count: int = 3) -> list[float]:
    """Times of the minima of V(t) at cos(sigma_theta) = 1.

    eps < chi: the first ``count`` roots of cot(2 mu t) = eps/mu that are minima.
    eps > chi: the single root of coth(2 eta t) = eps/eta.  No minimum exists
    for eps = 0 (V = 1) or chi = 0 (V decreases for all t).
    """
    reg = regime(eps, chi)
    if eps == 0 or chi == 0:
        return []
    if reg == CRITICAL:
        return [1 / (2 * eps)]
    if reg == ABOVE:
        eta = rate(eps, chi)
        return [math.atanh(eta / eps) / (2 * eta)]
    mu = rate(eps, chi)
    out = []
    m = 0
    while len(out) < count:
        root = (math.atan(mu / eps) + m * math.pi) / (2 * mu)
        h = 1e-4 / mu
        v0 = v_of_t(eps, chi, 0.0, root)
        if v_of_t(eps, chi, 0.0, root + h) > v0 and v_of_t(eps, chi, 0.0, max(root - h, 0.0)) > v0:
            out.append(root)
        m += 1
    return out


def v_min(eps: float, chi: float) -> float:
    """chi / (eps + chi); 1 when both couplings vanish."""
    _check(eps, chi)
    if eps == 0 and chi == 0:
        return 1.0
    return chi / (eps + chi)


def unitary_curve(eps: float, chi: float, sigma_theta: float = 0.0, t_end: float | None = None,
                  n_points: int = 401, count: int = 3) -> UnitaryCurve:
    """Sampled V(t) on [0, t_end]; default window is 5/eps (or 5/chi if eps = 0)."""
    if t_end is None:
        scale = eps if eps > 0 else chi
        if scale == 0:
            raise ParameterError("eps and chi are both zero; give t_end")
        t_end = 5.0 / scale
    t = np.linspace(0.0, t_end, n_points)
    return UnitaryCurve(t, v_of_t(eps, chi, sigma_theta, t), regime(eps, chi), rate(eps, chi),
                        t_min(eps, chi, count), v_min(eps, chi))
