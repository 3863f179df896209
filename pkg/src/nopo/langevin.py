"""Positive-P Langevin equations of the phase-locked NOPO (phase-cancelled frame).

State vectors are complex arrays whose last axis holds

* adiabatic model: ``(alpha1, alpha2, beta1, beta2)``
* full model: ``(alpha1, alpha2, alpha3, beta1, beta2, beta3)``

Leading axes are free, so an ensemble of trajectories is just a 2-D array.
Drifts are the deterministic parts of the Ito equations; noise increments
have the nonzero correlations

    <dR1 dR2>   = c  dt,   c  = eps - lam alpha1 alpha2   (adiabatic)
    <dR1+ dR2+> = c+ dt,   c+ = eps - lam beta1 beta2

and every self-correlation vanishes.  In the full model ``c = k alpha3``.
"""

import math

import numpy as np

from .params import SystemParams

ADIABATIC = "adiabatic"
FULL = "full"
MODELS = (ADIABATIC, FULL)


def state_size(model: str) -> int:
    if model == ADIABATIC:
        return 4
    if model == FULL:
        return 6
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def drift_adiabatic(state, p: SystemParams):
    """Noise-free right-hand side with the pump mode adiabatically eliminated."""
    state = np.asarray(state, dtype=complex)
    a1, a2, b1, b2 = np.moveaxis(state, -1, 0)
    eps, lam, chi = p.epsilon, p.lam, p.chi
    g1 = p.gamma1 + 1j * p.delta1
    g2 = p.gamma2 + 1j * p.delta2
    c = eps - lam * a1 * a2
    cp = eps - lam * b1 * b2
    return np.stack([
        -g1 * a1 + c * b2 - 1j * chi * a2,
        -g2 * a2 + c * b1 - 1j * chi * a1,
        -np.conj(g1) * b1 + cp * a2 + 1j * chi * b2,
        -np.conj(g2) * b2 + cp * a1 + 1j * chi * b1,
    ], axis=-1)


def drift_full(state, p: SystemParams):
    """Noise-free right-hand side of the three-mode equations, pump mode included."""
    state = np.asarray(state, dtype=complex)
    a1, a2, a3, b1, b2, b3 = np.moveaxis(state, -1, 0)
    k, chi = p.k, p.chi
    g1 = p.gamma1 + 1j * p.delta1
    g2 = p.gamma2 + 1j * p.delta2
    return np.stack([
        -g1 * a1 + k * a3 * b2 - 1j * chi * a2,
        -g2 * a2 + k * a3 * b1 - 1j * chi * a1,
        -p.gamma3 * a3 + p.E - k * a1 * a2,
        -np.conj(g1) * b1 + k * b3 * a2 + 1j * chi * b2,
        -np.conj(g2) * b2 + k * b3 * a1 + 1j * chi * b1,
        -p.gamma3 * b3 + p.E - k * b1 * b2,
    ], axis=-1)


def noise_strengths(state, p: SystemParams, model: str = ADIABATIC):
    """Return ``(c, c_plus)``, the R1R2 and R1+R2+ correlation strengths."""
    state = np.asarray(state, dtype=complex)
    if model == ADIABATIC:
        a1, a2, b1, b2 = np.moveaxis(state, -1, 0)
        return p.epsilon - p.lam * a1 * a2, p.epsilon - p.lam * b1 * b2
    if model == FULL:
        return p.k * state[..., 2], p.k * state[..., 5]
    raise ValueError(f"unknown model {model!r}")


def noise_from_normals(c, c_plus, dt, xi):
    """Build ``(dR1, dR2, dR1+, dR2+)`` from four unit normals along the last axis of ``xi``.

    dR1 = sqrt(c dt / 2) (xi1 + i xi2), dR2 = sqrt(c dt / 2) (xi1 - i xi2), and the
    same with an independent pair for the conjugate sector.  The complex square
    root is taken on the principal branch.
    """
    xi = np.asarray(xi, dtype=float)
    s = np.sqrt(0.5 * np.asarray(c, dtype=complex) * dt)
    sp = np.sqrt(0.5 * np.asarray(c_plus, dtype=complex) * dt)
    x1, x2, x3, x4 = np.moveaxis(xi, -1, 0)
    return np.stack([s * (x1 + 1j * x2), s * (x1 - 1j * x2),
                     sp * (x3 + 1j * x4), sp * (x3 - 1j * x4)], axis=-1)


def noise_sample(state, p: SystemParams, dt: float, rng: np.random.Generator,
                 model: str = ADIABATIC):
    """Draw one set of noise increments ``(dR1, dR2, dR1+, dR2+)`` per state."""
    c, cp = noise_strengths(state, p, model)
    shape = np.shape(c) + (4,)
    return noise_from_normals(c, cp, dt, rng.standard_normal(shape))


def euler_step(state, p: SystemParams, dt: float, xi, model: str = ADIABATIC):
    """One Euler-Maruyama step driven by the unit normals ``xi`` (last axis of length 4)."""
    state = np.asarray(state, dtype=complex)
    c, cp = noise_strengths(state, p, model)
    dr = noise_from_normals(c, cp, dt, xi)
    if model == ADIABATIC:
        return state + drift_adiabatic(state, p) * dt + dr
    new = state + drift_full(state, p) * dt
    new[..., [0, 1, 3, 4]] += dr
    return new


def drift_matrix_at_zero(p: SystemParams) -> np.ndarray:
    """Linear drift matrix F (d/dt x = -F x) of the adiabatic equations at zero amplitude."""
    a = np.array([[p.gamma1 + 1j * p.delta1, 1j * p.chi],
                  [1j * p.chi, p.gamma2 + 1j * p.delta2]])
    b = -p.epsilon * np.array([[0.0, 1.0], [1.0, 0.0]])
    return np.block([[a, b], [b, a.conj()]])


def drift_matrix(state, p: SystemParams) -> np.ndarray:
    """Analytic -Jacobian of ``drift_adiabatic`` at ``state`` (adiabatic model).

    The variables are treated as independent complex coordinates, as in the
    positive-P phase space.
    """
    a1, a2, b1, b2 = np.asarray(state, dtype=complex)
    eps, lam, chi = p.epsilon, p.lam, p.chi
    g1 = p.gamma1 + 1j * p.delta1
    g2 = p.gamma2 + 1j * p.delta2
    c = eps - lam * a1 * a2
    cp = eps - lam * b1 * b2
    jac = np.array([
        [-g1 - lam * a2 * b2, -1j * chi - lam * a1 * b2, 0, c],
        [-1j * chi - lam * a2 * b1, -g2 - lam * a1 * b1, c, 0],
        [0, cp, -np.conj(g1) - lam * b2 * a2, 1j * chi - lam * b1 * a2],
        [cp, 0, 1j * chi - lam * b2 * a1, -np.conj(g2) - lam * b1 * a1],
    ], dtype=complex)
    return -jac


def number_phase_matrices(p: SystemParams, n0: float, phase_sum: float, phase_diff: float):
    """Drift and diffusion of the decoupled (dn+, dphi+) and (dn-, dphi-) fluctuations.

    Linearization of the symmetric adiabatic equations around a phase-locked
    state with photon number ``n0`` per mode, ``phase_sum = phi1 + phi2`` and
    ``phase_diff = phi2 - phi1``.  Returns ``(F_plus, D_plus, F_minus, D_minus)``
    for d/dt x = -F x + noise, <noise noise^T> = D dt.
    """
    g, eps, lam, chi = p.gamma, p.epsilon, p.lam, p.chi
    s = math.sin(phase_sum)
    f_plus = np.array([[2 * lam * n0, 4 * n0 * eps * s],
                       [0.0, 2 * (g + lam * n0)]])
    # cos(phase_diff) is -sign(delta) on the stable branch
    f_minus = np.array([[2 * g, 4 * chi * n0 * math.cos(phase_diff)],
                        [p.delta / n0, 0.0]])
    d_plus = np.array([[4 * n0 * g, -2 * eps * s],
                       [-2 * eps * s, -g / n0]])
    return f_plus, d_plus, f_minus, -d_plus
