"""Command-line entry point: ``nopo <subcommand> [options]``.

Output is CSV with a ``#``-prefixed metadata block (tool version, hash of the
resolved configuration, seed) and one header line.  Every row repeats the
resolved parameter set.  Exit codes: 0 ok, 2 configuration error, 3 numerical
validity error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, figures, linearized, semiclassical, stochastic, unitary
from .errors import DomainError, MonteCarloError, ParameterError, ThresholdProximityError
from .params import SystemParams, params_from_mapping, threshold_epsilon

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

PARAM_COLUMNS = ("gamma1", "gamma2", "gamma3", "delta1", "delta2", "chi", "k", "E",
                 "phi_l", "phi_k", "phi_chi")


class ConfigError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:num`` (inclusive linspace)."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(lo), float(hi), n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}; use a,b,c or start:stop:num") from exc


def parse_moments(text: str) -> list[tuple[int, int, int, int]]:
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.split(",")
        if len(parts) != 4:
            raise ConfigError(f"moment spec {chunk!r} needs four integers k,m,l,n")
        try:
            spec = tuple(int(x) for x in parts)
        except ValueError as exc:
            raise ConfigError(f"moment spec {chunk!r} needs four integers k,m,l,n") from exc
        if min(spec) < 0:
            raise ConfigError(f"moment exponents must be >= 0 in {chunk!r}")
        out.append(spec)
    if not out:
        raise ConfigError("no moments requested")
    return out


def resolve_params(args) -> tuple[SystemParams, dict]:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        cfg[key.strip()] = value.strip()
        if key.strip() == "E":
            cfg.pop("epsilon", None)
        if key.strip() == "epsilon":
            cfg.pop("E", None)
    return params_from_mapping(cfg)


def config_hash(params: SystemParams, options: dict) -> str:
    blob = json.dumps({"params": params.as_dict(), "options": options}, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(x):
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(rows: list[dict], params: SystemParams, command: str, options: dict,
              seed: int | None, out) -> None:
    buf = io.StringIO()
    buf.write(f"# tool: nopo {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config_hash: {config_hash(params, options)}\n")
    buf.write(f"# seed: {'' if seed is None else seed}\n")
    for key in sorted(options):
        buf.write(f"# option {key}: {options[key]}\n")
    echo = params.as_dict()
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    columns += [c for c in PARAM_COLUMNS if c not in columns]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        full = {**echo, **row}
        w.writerow([_fmt(full.get(c)) for c in columns])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {out}: {exc}") from exc


# ---------------------------------------------------------------- subcommands

def _eps_list(args, p) -> list[SystemParams]:
    if args.eps_ratio:
        return [p.with_eps_ratio(r) for r in parse_grid(args.eps_ratio)]
    return [p]


def cmd_steady_state(args, p, extras):
    rows = []
    for q in _eps_list(args, p):
        if q.is_symmetric:
            s = semiclassical.steady_state_symmetric(q, args.k)
            eth = threshold_epsilon(q)
        else:
            s = semiclassical.steady_state_general(q, args.branch, args.k)
            cp = semiclassical.critical_pumps(q)
            eth = cp.eps_cr_plus if args.branch == "+" else cp.eps_cr_minus
        if args.shifted:
            s = s.shifted()
        rows.append({"eps": q.epsilon, "eps_over_eps_th": q.epsilon / eth, "n0": s.n0,
                     "phi1": s.phi1, "phi2": s.phi2, "stable": s.stable, "branch": s.branch,
                     "n1": s.n1, "n2": s.n2,
                     "residual": semiclassical.residual(q, s), **q.as_dict()})
    return rows


_VARS = ("a1", "a2", "b1", "b2")


def cmd_covariance(args, p, extras):
    rows = []
    for q in _eps_list(args, p):
        ratio = q.epsilon / threshold_epsilon(q)
        if q.epsilon < threshold_epsilon(q):
            cov = linearized.covariance_below(linearized.build_below(q))
            row = {"regime": "below", "eps_ratio": ratio, "reliable": cov.reliable, "n": cov.n}
            c = cov.equal_time["full"]
            for i, u in enumerate(_VARS):
                for j, v in enumerate(_VARS):
                    row[f"{u}_{v}_re"] = float(c[i, j].real)
                    row[f"{u}_{v}_im"] = float(c[i, j].imag)
        else:
            cov = linearized.covariance_above(linearized.build_above(q))
            row = {"regime": "above", "eps_ratio": ratio, "reliable": cov.reliable, "n": cov.n}
            for tag in ("plus", "minus"):
                m = cov.equal_time[tag]
                for i, u in enumerate(("n", "phi")):
                    for j, v in enumerate(("n", "phi")):
                        row[f"{tag}_d{u}_d{v}"] = float(m[i, j])
        rows.append({**row, **q.as_dict()})
    return rows


def cmd_variance_sweep(args, p, extras):
    values = parse_grid(args.eps_ratio or "0.05:3:60")
    rows = figures.sweep(p, "eps_ratio", values, delta_theta=args.delta_theta, workers=args.workers)
    keys = ("eps_ratio", "V", "R", "V_plus", "V_minus", "product", "inseparable", "epr_strong", "reliable")
    return [{**{k: r[k] for k in keys}, **p.with_eps_ratio(v).as_dict()} for r, v in zip(rows, values)]


def cmd_unitary(args, p, extras):
    rows = []
    chi = args.chi
    for ratio in parse_grid(args.ratios):
        eps = ratio * chi
        scale = eps if eps > 0 else chi
        et = np.linspace(0.0, args.t_end, args.points)
        v = unitary.v_of_t(eps, chi, args.sigma_theta, et / scale)
        echo = replace(p, chi=chi).with_epsilon(eps).as_dict()
        rows += [{"eps_over_chi": ratio, "eps_t": float(a), "V": float(b), **echo} for a, b in zip(et, v)]
    return rows


def cmd_montecarlo(args, p, extras):
    init = "vacuum"
    if args.init == "steady":
        init = semiclassical.steady_state(p)
    stats = stochastic.integrate(p, args.dt, args.t_end, args.traj, seed=args.seed or 0,
                                 model=args.model, init=init, seed_noise=args.seed_noise,
                                 scheme=args.scheme, workers=args.workers)
    rows = []
    for spec in parse_moments(args.moments):
        value, se = stochastic.moment_estimate(stats, spec)
        rows.append({"k": spec[0], "m": spec[1], "l": spec[2], "n": spec[3],
                     "re": value.real, "im": value.imag, "se_re": se.real, "se_im": se.imag,
                     "t": float(stats.times[-1]), "n_traj": stats.n_trajectories,
                     "diverged": stats.diverged_count, "dt": stats.dt, "model": stats.model})
    return rows


def cmd_figure(args, p, extras):
    # figures fix their own parameters; echo those rather than the config
    rows = figures.reproduce_figure(args.name, n_points=args.points)
    out = []
    for row in rows:
        if "eps_over_chi" in row:
            q = replace(p, chi=1.0).with_epsilon(row["eps_over_chi"])
        else:
            q = SystemParams.symmetric(gamma=1.0, delta=row["delta"], chi=row["chi"],
                                       lam=p.lam, gamma3=p.gamma3).with_eps_ratio(row["x"])
        out.append({**row, **q.as_dict()})
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON parameter file")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output CSV path (default stdout)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master RNG seed")
    common.add_argument("--set", action="append", default=argparse.SUPPRESS, metavar="KEY=VALUE",
                        help="override a config key (repeatable)")

    ap = argparse.ArgumentParser(prog="nopo", parents=[common],
                                 description="Quantum noise of the self-phase-locked NOPO")
    ap.add_argument("--version", action="version", version=f"nopo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("steady-state", parents=[common], help="semiclassical fixed points")
    s.add_argument("--eps-ratio", help="grid of eps/eps_th (a,b,c or start:stop:num)")
    s.add_argument("--branch", choices=("+", "-"), default="+")
    s.add_argument("--k", type=int, default=0, help="phase family index (adds k*pi)")
    s.add_argument("--shifted", action="store_true", help="report the pi-shifted partner state")
    s.set_defaults(func=cmd_steady_state)

    s = sub.add_parser("covariance", parents=[common], help="linearized equal-time covariances")
    s.add_argument("--eps-ratio", help="grid of eps/eps_th")
    s.set_defaults(func=cmd_covariance)

    s = sub.add_parser("variance-sweep", parents=[common], help="V, R, V+-, V+V- versus eps/eps_th")
    s.add_argument("--eps-ratio", help="grid of eps/eps_th (default 0.05:3:60)")
    s.add_argument("--delta-theta", type=float, default=math.pi / 2)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_variance_sweep)

    s = sub.add_parser("unitary", parents=[common], help="lossless V(t)")
    s.add_argument("--ratios", default="0.2,0.4,0.7", help="eps/chi values")
    s.add_argument("--chi", type=float, default=1.0)
    s.add_argument("--t-end", type=float, default=7.0, help="end of the eps*t axis")
    s.add_argument("--points", type=int, default=201)
    s.add_argument("--sigma-theta", type=float, default=0.0)
    s.set_defaults(func=cmd_unitary)

    s = sub.add_parser("montecarlo", parents=[common], help="positive-P ensemble moments")
    s.add_argument("--traj", type=int, default=10000)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--t-end", type=float, default=5.0)
    s.add_argument("--scheme", default="euler", choices=("euler",))
    s.add_argument("--model", default="adiabatic", choices=("adiabatic", "full"))
    s.add_argument("--moments", default="1,0,1,0;0,0,1,1;0,0,1,0")
    s.add_argument("--init", default="vacuum", choices=("vacuum", "steady"))
    s.add_argument("--seed-noise", type=float, default=0.0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_montecarlo)

    s = sub.add_parser("figure", parents=[common], help="data behind one of the variance figures")
    s.add_argument("name", choices=sorted(figures.FIGURES))
    s.add_argument("--points", type=int, default=301)
    s.set_defaults(func=cmd_figure)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    for name, default in (("config", None), ("out", None), ("seed", None), ("set", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    options = {k: v for k, v in vars(args).items()
               if k not in ("func", "config", "out", "set") and v is not None}
    try:
        p, extras = resolve_params(args)
        rows = args.func(args, p, extras)
        write_csv(rows, p, args.command, options, args.seed, args.out)
    except (ConfigError, ParameterError) as exc:
        print(f"nopo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ThresholdProximityError, MonteCarloError, FloatingPointError) as exc:
        print(f"nopo: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
