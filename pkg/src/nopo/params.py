"""Physical parameters of the self-phase-locked NOPO and quantities derived from them.

Rates are in units of inverse time; with the default convention gamma1 = gamma2 = 1
every rate is measured in units of the subharmonic cavity decay rate.

All calculations elsewhere in the package work in the phase-cancelled frame,
where the couplings are real.  The interaction phases only come back when
quadrature angles are turned into the combinations entering V+ and V-.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import ParameterError

SYMMETRY_RTOL = 1e-12
ADIABATIC_RATIO = 10.0


class AdiabaticityWarning(UserWarning):
    """gamma3 is not large enough compared to gamma1, gamma2."""


def _close(a: float, b: float, rtol: float = SYMMETRY_RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300) or a == b


@dataclass(frozen=True)
class SystemParams:
    """Rates, detunings, couplings, pump amplitude and interaction phases.

    ``k`` is the down-conversion coupling, ``E`` the pump drive amplitude,
    ``chi`` the polarization-mixing strength.  ``phi_l``, ``phi_k`` and
    ``phi_chi`` are the phases of the drive, of the down-conversion and of the
    linear coupling.
    """

    gamma1: float = 1.0
    gamma2: float = 1.0
    gamma3: float = 100.0
    delta1: float = 0.0
    delta2: float = 0.0
    chi: float = 0.0
    k: float = 1.0
    E: float = 0.0
    phi_l: float = 0.0
    phi_k: float = 0.0
    phi_chi: float = 0.0
    adiabatic_ratio: float = field(default=ADIABATIC_RATIO, compare=False)

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3", "delta1", "delta2", "chi", "k", "E",
                     "phi_l", "phi_k", "phi_chi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        for name in ("gamma1", "gamma2", "gamma3", "k"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.E < 0:
            raise ParameterError(f"pump amplitude E must be >= 0, got {self.E!r}")
        if self.chi < 0:
            raise ParameterError(f"chi must be >= 0, got {self.chi!r}")
        if not self.adiabatic_ok:
            warnings.warn(
                f"gamma3/max(gamma1, gamma2) = {self.gamma3 / max(self.gamma1, self.gamma2):.3g} "
                f"is below {self.adiabatic_ratio:g}; adiabatic elimination is questionable",
                AdiabaticityWarning, stacklevel=3)

    @classmethod
    def symmetric(cls, gamma=1.0, delta=0.0, chi=0.0, epsilon=0.0, lam=1.0, gamma3=100.0,
                  phi_l=0.0, phi_k=0.0, phi_chi=0.0) -> "SystemParams":
        """Build a mode-symmetric parameter set from the scaled pump and nonlinearity.

        ``epsilon = k E / gamma3`` and ``lam = k**2 / gamma3`` fix ``k`` and ``E``.
        """
        if lam <= 0 or gamma3 <= 0:
            raise ParameterError("lam and gamma3 must be positive")
        if epsilon < 0:
            raise ParameterError(f"epsilon must be >= 0, got {epsilon!r}")
        k = math.sqrt(lam * gamma3)
        return cls(gamma1=gamma, gamma2=gamma, gamma3=gamma3, delta1=delta, delta2=delta,
                   chi=chi, k=k, E=epsilon * gamma3 / k,
                   phi_l=phi_l, phi_k=phi_k, phi_chi=phi_chi)

    @property
    def epsilon(self) -> float:
        return self.k * self.E / self.gamma3

    @property
    def lam(self) -> float:
        return self.k ** 2 / self.gamma3

    @property
    def adiabatic_ok(self) -> bool:
        return self.gamma3 / max(self.gamma1, self.gamma2) >= self.adiabatic_ratio

    @property
    def is_symmetric(self) -> bool:
        return _close(self.gamma1, self.gamma2) and _close(self.delta1, self.delta2)

    @property
    def gamma(self) -> float:
        self._require_symmetric()
        return self.gamma1

    @property
    def delta(self) -> float:
        self._require_symmetric()
        return self.delta1

    def _require_symmetric(self):
        if not self.is_symmetric:
            raise ParameterError("operation requires gamma1 == gamma2 and delta1 == delta2")

    def with_epsilon(self, epsilon: float) -> "SystemParams":
        """Same system, different scaled pump ``epsilon``."""
        if epsilon < 0:
            raise ParameterError(f"epsilon must be >= 0, got {epsilon!r}")
        return replace(self, E=epsilon * self.gamma3 / self.k)

    def with_eps_ratio(self, ratio: float) -> "SystemParams":
        """Same system pumped at ``ratio`` times the (symmetric) threshold."""
        return self.with_epsilon(ratio * threshold_epsilon(self))

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("adiabatic_ratio")
        return d


@dataclass(frozen=True)
class DerivedParams:
    epsilon: float
    lam: float
    gamma_tilde: float | None
    epsilon_th: float | None
    E_th: float | None
    symmetric: bool
    adiabatic_ok: bool


@dataclass(frozen=True)
class PhaseFrame:
    phi1: float
    phi2: float
    phi3: float


def gamma_tilde(p: SystemParams) -> float | None:
    """Detuning-weighted decay rate; None unless delta1*delta2 > 0."""
    if p.delta1 * p.delta2 <= 0:
        return None
    r = math.sqrt(p.delta2 / p.delta1)
    return 0.5 * p.gamma1 * r + 0.5 * p.gamma2 / r


def threshold_epsilon(p: SystemParams) -> float:
    """Oscillation threshold sqrt((chi - |delta|)^2 + gamma^2) of the symmetric system."""
    return math.hypot(p.chi - abs(p.delta), p.gamma)


def derive(p: SystemParams) -> DerivedParams:
    sym = p.is_symmetric
    eps_th = threshold_epsilon(p) if sym else None
    return DerivedParams(
        epsilon=p.epsilon,
        lam=p.lam,
        gamma_tilde=gamma_tilde(p),
        epsilon_th=eps_th,
        E_th=p.gamma3 / p.k * eps_th if sym else None,
        symmetric=sym,
        adiabatic_ok=p.adiabatic_ok,
    )


def phase_frame(p: SystemParams) -> PhaseFrame:
    """Mode phase shifts that make every coupling constant real."""
    return PhaseFrame(
        phi1=0.5 * (p.phi_l + p.phi_k + p.phi_chi),
        phi2=0.5 * (p.phi_l + p.phi_k - p.phi_chi),
        phi3=p.phi_l,
    )


def quadrature_angles(theta1: float, theta2: float, p: SystemParams) -> tuple[float, float]:
    """Local-oscillator angles -> (delta_theta, sigma_theta) in the phase-cancelled frame."""
    return theta2 - theta1 - p.phi_chi, theta1 + theta2 + p.phi_l + p.phi_k


def optimal_theta_sum(phi_arg: float, p: SystemParams) -> float:
    """Lab-frame theta1 + theta2 minimizing V for a given arg<a1 a2>."""
    return -phi_arg - p.phi_l - p.phi_k


# config-file keys -> SystemParams fields
_CONFIG_KEYS = {
    "gamma1": "gamma1", "gamma2": "gamma2", "gamma3": "gamma3",
    "delta1": "delta1", "delta2": "delta2", "chi": "chi", "k": "k", "E": "E",
    "phiL": "phi_l", "phiK": "phi_k", "phiChi": "phi_chi",
}
_EXTRA_KEYS = {"epsilon", "lambda", "theta1", "theta2", "adiabatic_ratio"}


def params_from_mapping(cfg: dict) -> tuple[SystemParams, dict]:
    """Parse the documented key-value schema.

    Returns the parameters and a dict with the remaining recognized keys
    (``theta1``, ``theta2``).  ``epsilon`` may replace ``E``; ``lambda`` may
    replace ``k``.  Unknown keys are an error.
    """
    unknown = set(cfg) - set(_CONFIG_KEYS) - _EXTRA_KEYS
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    if "E" in cfg and "epsilon" in cfg:
        raise ParameterError("give either E or epsilon, not both")
    if "k" in cfg and "lambda" in cfg:
        raise ParameterError("give either k or lambda, not both")
    kw = {}
    for key, name in _CONFIG_KEYS.items():
        if key in cfg:
            try:
                kw[name] = float(cfg[key])
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"config key {key!r} is not a number: {cfg[key]!r}") from exc
    if "adiabatic_ratio" in cfg:
        kw["adiabatic_ratio"] = float(cfg["adiabatic_ratio"])
    gamma3 = kw.get("gamma3", SystemParams.gamma3)
    if "lambda" in cfg:
        lam = float(cfg["lambda"])
        if lam <= 0:
            raise ParameterError("lambda must be positive")
        kw["k"] = math.sqrt(lam * gamma3)
    if "epsilon" in cfg:
        kw["E"] = float(cfg["epsilon"]) * gamma3 / kw.get("k", SystemParams.k)
    extras = {key: float(cfg[key]) for key in ("theta1", "theta2") if key in cfg}
    return SystemParams(**kw), extras


def load_config(path: str | Path) -> tuple[SystemParams, dict]:
    """Read a JSON config file with the documented keys."""
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParameterError("config must be a JSON object")
    return params_from_mapping(cfg)
