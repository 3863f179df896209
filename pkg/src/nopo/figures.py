"""Figure datasets and parameter sweeps built on the closed-form modules.

Every dataset is a list of row dicts so the CLI can write it as CSV and the
demos can plot it directly.  Presets hold the parameter sets of the five
standard variance plots (fig2 ... fig6).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import entanglement, unitary
from .errors import DomainError, ParameterError
from .params import SystemParams, threshold_epsilon

# (eps/chi) per curve for the lossless plots, (chi/gamma, delta/gamma) for the others
FIGURES = {
    "fig2": {"kind": "unitary", "curves": (0.2, 0.4, 0.7), "x_max": 7.0},
    "fig3": {"kind": "unitary", "curves": (1.1, 2.0, 3.0), "x_max": 2.0},
    "fig4": {"kind": "V", "curves": ((0.1, 10.0), (0.5, 3.0), (0.5, 1.0)), "x_range": (0.0, 3.0)},
    "fig5": {"kind": "Vpm", "curves": ((0.5, 3.0),), "x_range": (0.0, 3.0), "delta_theta": 0.0},
    "fig6": {"kind": "product", "curves": ((0.1, 10.0), (0.5, 1.0)), "x_range": (1.0, 10.0)},
}

SWEEP_VARIABLES = ("eps_ratio", "epsilon", "chi", "delta", "gamma")


def _ratio_grid(lo, hi, n):
    # skip eps = 0 where V = 1 trivially but keep the grid regular
    x = np.linspace(lo, hi, n)
    return x[x > 0]


def reproduce_figure(name: str, n_points: int = 301) -> list[dict]:
    """Rows ``{curve, x, y, ...}`` for one of fig2 ... fig6.

    fig2/fig3: x = eps t, y = V(t) at cos(sigma_theta) = 1, chi = 1.
    fig4: x = eps/eps_th, y = minimal V.  fig5: V+ (curve 1) and V- (curve 2)
    at delta_theta = 0.  fig6: V+ V- at delta_theta = pi.
    """
    if name not in FIGURES:
        raise ParameterError(f"unknown figure {name!r}; expected one of {sorted(FIGURES)}")
    fig = FIGURES[name]
    rows = []
    if fig["kind"] == "unitary":
        for i, ratio in enumerate(fig["curves"], 1):
            x = np.linspace(0.0, fig["x_max"], n_points)
            v = unitary.v_of_t(ratio, 1.0, 0.0, x / ratio)
            rows += [{"curve": i, "x": float(a), "y": float(b), "eps_over_chi": ratio}
                     for a, b in zip(x, v)]
        return rows
    lo, hi = fig["x_range"]
    for i, (chi, delta) in enumerate(fig["curves"], 1):
        base = SystemParams.symmetric(gamma=1.0, delta=delta, chi=chi, epsilon=0.0, lam=1.0)
        for r in _ratio_grid(lo, hi, n_points):
            p = base.with_eps_ratio(float(r))
            if fig["kind"] == "Vpm":
                rep = entanglement.variance(p, delta_theta=fig["delta_theta"])
                rows.append({"curve": 1, "x": float(r), "y": rep.v_plus, "chi": chi, "delta": delta})
                rows.append({"curve": 2, "x": float(r), "y": rep.v_minus, "chi": chi, "delta": delta})
            elif fig["kind"] == "product":
                rep = entanglement.variance(p, delta_theta=math.pi)
                rows.append({"curve": i, "x": float(r), "y": rep.product, "chi": chi, "delta": delta})
            else:
                rep = entanglement.variance(p)
                rows.append({"curve": i, "x": float(r), "y": rep.V, "chi": chi, "delta": delta})
    if fig["kind"] == "Vpm":
        rows.sort(key=lambda row: (row["curve"], row["x"]))
    return rows


def _apply(base: SystemParams, variable: str, value: float) -> SystemParams:
    if variable == "eps_ratio":
        return base.with_eps_ratio(value)
    if variable == "epsilon":
        return base.with_epsilon(value)
    if variable == "chi":
        return replace(base, chi=value)
    if variable == "delta":
        return replace(base, delta1=value, delta2=value)
    if variable == "gamma":
        return replace(base, gamma1=value, gamma2=value)
    raise ParameterError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")


def _point(args) -> dict:
    base, variable, value, delta_theta, hold_ratio = args
    p = _apply(base, variable, value)
    if hold_ratio is not None:
        p = p.with_eps_ratio(hold_ratio)
    row = {variable: float(value), "eps_ratio": p.epsilon / threshold_epsilon(p)}
    try:
        rep = entanglement.variance(p, delta_theta=delta_theta)
    except DomainError as exc:
        row.update(V=math.nan, R=math.nan, V_plus=math.nan, V_minus=math.nan, product=math.nan,
                   inseparable=False, epr_strong=False, reliable=False, error=str(exc))
        return row
    row.update(V=rep.V, R=rep.R, V_plus=rep.v_plus, V_minus=rep.v_minus, product=rep.product,
               inseparable=rep.inseparable, epr_strong=rep.epr_strong, reliable=rep.reliable,
               error="")
    row["adiabatic_ok"] = p.adiabatic_ok
    return row


def sweep(base: SystemParams, variable: str, values, delta_theta: float = math.pi / 2,
          hold_ratio: float | None = None, workers: int = 1) -> list[dict]:
    """Closed-form V, R, V+-, product on a grid of one parameter.

    ``hold_ratio`` re-pumps every point at that multiple of its own threshold
    (useful when sweeping chi or delta).  Rows come back in grid order.
    """
    if variable not in SWEEP_VARIABLES:
        raise ParameterError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")
    values = [float(v) for v in values]
    if not values:
        raise ParameterError("sweep range is empty")
    if not base.is_symmetric:
        raise ParameterError("variance sweeps need gamma1 == gamma2 and delta1 == delta2")
    jobs = [(base, variable, v, delta_theta, hold_ratio) for v in values]
    if workers <= 1:
        rows = [_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_point, jobs))
    for row in rows:
        row.setdefault("adiabatic_ok", base.adiabatic_ok)
    return rows
