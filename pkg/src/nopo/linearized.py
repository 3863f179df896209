"""Linearized quantum fluctuations around the semiclassical steady states.

Convention: fluctuations obey d/dt x = -F x + noise with <noise noise^T> = D dt,
so for stable F (all Re eig > 0) the equal-time covariance solves
F C + C F^T = D.  For the matrices below F D^T commutes appropriately and the
solution reduces to C = F^{-1} D / 2.  Two-time correlators decay as
<x(t + tau) x(t)^T> = exp(-F tau) C.

Below threshold the variables are x = (da1, da2, db1, db2).  Above threshold
the symmetric system splits into the independent pairs (dn+, dphi+) and
(dn-, dphi-), with dn+- = dn2 +- dn1 and dphi+- = dphi2 +- dphi1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, ParameterError, ThresholdProximityError
from .langevin import drift_matrix_at_zero, number_phase_matrices
from .params import SystemParams, threshold_epsilon
from .semiclassical import SteadyState, steady_state_symmetric

COND_LIMIT = 1e12
EIG_COND_LIMIT = 1e8
THRESHOLD_BAND = 0.02
N0_FLOOR = 1e-12

BELOW = "below"
ABOVE_PLUS = "above+"
ABOVE_MINUS = "above-"


@dataclass(frozen=True)
class DriftDiffusion:
    F: np.ndarray
    D: np.ndarray
    regime: str
    params: SystemParams = field(repr=False)
    state: SteadyState | None = field(default=None, repr=False)


@dataclass(frozen=True)
class CovarianceReport:
    """Equal-time fluctuation covariances from the matrix pipeline and the closed forms.

    Below threshold ``equal_time`` holds ``"full"`` (4x4), ``"aa"`` = <da da^T>
    and ``"ab"`` = <da db^T>.  Above threshold it holds ``"plus"`` and
    ``"minus"``, the 2x2 covariances of (dn+, dphi+) and (dn-, dphi-).
    ``n`` is the fluctuation photon number per mode below threshold and the
    semiclassical n0 above.  ``reliable`` is False inside the threshold band.
    """

    regime: str
    equal_time: dict
    closed_form: dict
    n: float
    reliable: bool
    eps_ratio: float


def _near_threshold(p: SystemParams, band: float) -> tuple[float, bool]:
    ratio = p.epsilon / threshold_epsilon(p)
    return ratio, abs(ratio - 1.0) >= band


def _stable_or_raise(f: np.ndarray, what: str):
    eig = np.linalg.eigvals(f)
    if np.min(eig.real) <= 0:
        raise DomainError(f"{what}: drift matrix is not stable (min Re eig = {np.min(eig.real):.3g})")


def _half_solve(f: np.ndarray, d: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(f)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ThresholdProximityError(f"drift matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    if f.shape == (2, 2):
        # explicit adjugate: each entry is a two-term sum, so structural zeros stay exact
        adj = np.array([[f[1, 1], -f[0, 1]], [-f[1, 0], f[0, 0]]])
        return adj @ d / (2 * (f[0, 0] * f[1, 1] - f[0, 1] * f[1, 0]))
    return 0.5 * np.linalg.solve(f, d)


def propagator(f: np.ndarray, tau: float) -> np.ndarray:
    """exp(-F tau) by eigendecomposition, falling back to scaling-and-squaring."""
    if tau < 0:
        raise ParameterError("tau must be >= 0")
    w, v = np.linalg.eig(f)
    if np.linalg.cond(v) > EIG_COND_LIMIT:
        return scipy.linalg.expm(-f * tau)
    out = (v * np.exp(-w * tau)) @ np.linalg.inv(v)
    if np.isrealobj(f):
        out = out.real
    return out


# ---------------------------------------------------------------- below threshold

def build_below(p: SystemParams) -> DriftDiffusion:
    """F and D of the fluctuations around the zero-amplitude state (symmetric system)."""
    if not p.is_symmetric:
        raise ParameterError("build_below needs gamma1 == gamma2 and delta1 == delta2")
    if p.epsilon >= threshold_epsilon(p):
        raise DomainError("build_below needs eps < eps_th")
    f = drift_matrix_at_zero(p)
    x = p.epsilon * np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.zeros((2, 2))
    d = np.block([[x, z], [z, x]]).astype(complex)
    return DriftDiffusion(f, d, BELOW, p)


def s_squared(p: SystemParams) -> float:
    return p.gamma ** 2 + p.chi ** 2 + p.delta ** 2 - p.epsilon ** 2


def closed_form_below(p: SystemParams) -> dict:
    """Analytic <da da^T>, <da db^T> and n below threshold.

    With S^2 = gamma^2 + chi^2 + D^2 - eps^2 and den = S^4 - 4 D^2 chi^2.
    """
    g, d, chi, eps = p.gamma, p.delta, p.chi, p.epsilon
    s2 = s_squared(p)
    den = s2 ** 2 - 4 * d ** 2 * chi ** 2
    re = g * np.array([[-2 * chi * d, s2], [s2, -2 * chi * d]])
    im = np.array([[chi * (s2 - 2 * d ** 2), d * (s2 - 2 * chi ** 2)],
                   [d * (s2 - 2 * chi ** 2), chi * (s2 - 2 * d ** 2)]])
    aa = eps / (2 * den) * (re - 1j * im)
    ab = eps ** 2 / (2 * den) * np.array([[s2, -2 * chi * d], [-2 * chi * d, s2]])
    return {"aa": aa, "ab": ab, "n": eps ** 2 * s2 / (2 * den)}


def covariance_below(dd: DriftDiffusion, band: float = THRESHOLD_BAND) -> CovarianceReport:
    if dd.regime != BELOW:
        raise ParameterError("covariance_below needs a below-threshold DriftDiffusion")
    _stable_or_raise(dd.F, "covariance_below")
    c = _half_solve(dd.F, dd.D)
    ratio, ok = _near_threshold(dd.params, band)
    return CovarianceReport(
        regime=BELOW,
        equal_time={"full": c, "aa": c[:2, :2], "ab": c[:2, 2:]},
        closed_form=closed_form_below(dd.params),
        n=float(c[0, 2].real),
        reliable=ok,
        eps_ratio=ratio,
    )


def two_time_below(dd: DriftDiffusion, tau: float) -> np.ndarray:
    """<x(t + tau) x(t)^T> in the stationary state, x = (da1, da2, db1, db2)."""
    c = covariance_below(dd).equal_time["full"]
    return propagator(dd.F, tau) @ c


def moments_below(cov: CovarianceReport) -> dict:
    """Normal-ordered moments n, <a1 a2>, <a1^2>, <a1+ a2> from the below-threshold covariance."""
    c = cov.equal_time["full"]
    return {"n": float(c[0, 2].real), "a1a2": complex(c[0, 1]),
            "a1sq": complex(c[0, 0]), "a1dag_a2": complex(c[1, 2])}


# ---------------------------------------------------------------- above threshold

def build_above(p: SystemParams, state: SteadyState | None = None) -> tuple[DriftDiffusion, DriftDiffusion]:
    """Drift/diffusion pairs for (dn+, dphi+) and (dn-, dphi-) around a stable locked state."""
    if not p.is_symmetric:
        raise ParameterError("build_above needs gamma1 == gamma2 and delta1 == delta2")
    if p.epsilon <= threshold_epsilon(p):
        raise DomainError("build_above needs eps > eps_th")
    if state is None:
        state = steady_state_symmetric(p)
    if state.n0 <= N0_FLOOR:
        raise ThresholdProximityError(f"n0 = {state.n0:.3g} is below the floor {N0_FLOOR:g}")
    if not state.stable:
        raise DomainError("build_above needs a stable steady state")
    fp, dp, fm, dm = number_phase_matrices(p, state.n0, state.phase_sum, state.phase_diff)
    return (DriftDiffusion(fp, dp, ABOVE_PLUS, p, state),
            DriftDiffusion(fm, dm, ABOVE_MINUS, p, state))


def closed_form_above(p: SystemParams, n0: float) -> dict:
    """Analytic (dn+, dphi+) and (dn-, dphi-) covariances of the stable locked state."""
    g, chi, lam = p.gamma, p.chi, p.lam
    ad = abs(p.delta)
    sgn = math.copysign(1.0, p.delta)
    off_p = -2 * lam * n0 * (chi - ad) * sgn
    plus = np.array([[4 * n0 * (g * (g + lam * n0) + (chi - ad) ** 2), off_p],
                     [off_p, -lam * g]]) / (4 * lam * n0 * (g + lam * n0))
    minus = np.array([[4 * n0 * chi * (chi - ad), 2 * chi * g * sgn],
                      [2 * chi * g * sgn, (g ** 2 - ad * (chi - ad)) / n0]]) / (4 * ad * chi)
    return {"plus": plus, "minus": minus}


def covariance_above(dds, band: float = THRESHOLD_BAND) -> CovarianceReport:
    dp, dm = dds
    _stable_or_raise(dp.F, "covariance_above (+)")
    _stable_or_raise(dm.F, "covariance_above (-)")
    ratio, ok = _near_threshold(dp.params, band)
    n0 = dp.state.n0
    return CovarianceReport(
        regime="above",
        equal_time={"plus": _half_solve(dp.F, dp.D), "minus": _half_solve(dm.F, dm.D)},
        closed_form=closed_form_above(dp.params, n0),
        n=n0,
        reliable=ok,
        eps_ratio=ratio,
    )


def two_time_above(dds, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """<y(t + tau) y(t)^T> for y = (dn+, dphi+) and y = (dn-, dphi-)."""
    cov = covariance_above(dds)
    dp, dm = dds
    return (propagator(dp.F, tau) @ cov.equal_time["plus"],
            propagator(dm.F, tau) @ cov.equal_time["minus"])


def number_phase_to_amplitudes(state: SteadyState) -> np.ndarray:
    """Matrix T with (da1, da2, db1, db2) = T (dn+, dphi+, dn-, dphi-) to first order.

    From a_j = sqrt(n_j) e^{i phi_j}: da_j = e^{i phi_j} (dn_j / (2 sqrt n0) + i sqrt(n0) dphi_j).
    """
    n0 = state.n0
    rn = math.sqrt(n0)
    # (dn1, dn2, dphi1, dphi2) in terms of (dn+, dphi+, dn-, dphi-)
    m = 0.5 * np.array([[1, 0, -1, 0],
                        [1, 0, 1, 0],
                        [0, 1, 0, -1],
                        [0, 1, 0, 1]], dtype=float)
    t = np.zeros((4, 4), dtype=complex)
    for j, phi in enumerate((state.phi1, state.phi2)):
        e = np.exp(1j * phi)
        t[j] = e * (m[j] / (2 * rn) + 1j * rn * m[2 + j])
        t[2 + j] = np.conj(e) * (m[j] / (2 * rn) - 1j * rn * m[2 + j])
    return t


def moments_above(cov: CovarianceReport, state: SteadyState) -> dict:
    """Fluctuation moments n, <a1 a2>, <a1^2>, <a1+ a2> of the locked state to first order.

    The (dn+-, dphi+-) covariances are mapped to amplitude fluctuations with
    ``number_phase_to_amplitudes``; the means drop out of the quadrature
    variances, so only fluctuation moments are returned.
    """
    y = scipy.linalg.block_diag(cov.equal_time["plus"], cov.equal_time["minus"])
    t = number_phase_to_amplitudes(state)
    x = t @ y @ t.T
    return {"n": float(x[0, 2].real), "a1a2": complex(x[0, 1]),
            "a1sq": complex(x[0, 0]), "a1dag_a2": complex(x[1, 2])}
