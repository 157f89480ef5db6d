"""Command-line front end: ``hyperscatter {green,heat,source,potential,modes,verify}``.

Parameters come from flags, from a JSON file given by ``--config``, or both; flags win.
Exit codes: 0 success, 2 config error, 3 tolerance failure, 4 conditioning failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__, calculus, kernels, modes, potential_scatter, source_scatter, verification
from .errors import AccuracyError, ConditioningError, HyperscatterError
from .geometry import sphere_grid
from .io import write_csv, write_json

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_CONDITIONING = 0, 2, 3, 4

DEFAULTS = {
    "common": {"n": 3, "mu": 1.0, "branch": "outgoing", "out": None},
    "green": {"rho": "0.1:10:100", "check": None, "tol": 1e-10},
    "heat": {"t": [0.25, 1.0], "rho": "0.1:5:50", "tol": 1e-6},
    "source": {"R0": 0.8, "center": None, "amplitude": 1.0, "n_rho": 12, "degree": 12,
               "field_rho": "0.5:4:8", "far_degree": 8, "ladder": [8.0, 10.0, 12.0]},
    "potential": {"potential": None, "R0": 1.0, "amplitude": 0.5, "imag": 0.2, "profile": "bump",
                  "n_rho": 8, "degree": 9, "xi": None, "far_degree": 8,
                  "ladder": [4.0, 6.0, 8.0], "born": [0.01, 0.02, 0.04], "homogeneous": False},
    "modes": {"l_max": 2, "rho": "0.5:5:10", "c_grid": [0, 1, -1, "1j", "-1j"], "rho_window": [10.0, 30.0]},
    "verify": {"suite": "default"},
}


class ConfigError(ValueError):
    pass


def parse_range(spec) -> np.ndarray:
    """'start:stop:count' -> linspace; a list passes through."""
    if isinstance(spec, (list, tuple)):
        return np.asarray(spec, dtype=float)
    try:
        a, b, c = str(spec).split(":")
        a, b, c = float(a), float(b), int(c)
    except ValueError as exc:
        raise ConfigError(f"range must be start:stop:count, got {spec!r}") from exc
    if c < 1:
        raise ConfigError("range count must be positive")
    return np.linspace(a, b, c)


def _parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(str(v).replace(" ", ""))


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = {**DEFAULTS["common"], **DEFAULTS[command]}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for k, v in vars(args).items():
        if k in cfg and v is not None:
            cfg[k] = v
    cfg["command"] = command
    _validate(cfg)
    return cfg


def _validate(cfg):
    n, mu = cfg["n"], cfg["mu"]
    if not isinstance(n, int) or n < 2:
        raise ConfigError("n must be an integer >= 2")
    if not (isinstance(mu, (int, float)) and mu > 0):
        raise ConfigError("mu must be positive")
    if cfg["branch"] not in ("outgoing", "ingoing"):
        raise ConfigError("branch must be outgoing or ingoing")
    for k in ("tol",):
        if k in cfg and not cfg[k] > 0:
            raise ConfigError(f"{k} must be positive")
    cmd = cfg["command"]
    if cmd in ("green", "heat") and n < 3:
        raise ConfigError(f"{cmd} supports n >= 3")
    if cmd in ("source", "potential") and n != 3:
        raise ConfigError(f"{cmd} supports n = 3 only")
    if cmd == "verify" and cfg["suite"] not in ("default", "all", *verification.SUITES):
        raise ConfigError(f"unknown suite {cfg['suite']!r}")


def _stamped(cfg):
    # where the files go is not part of the run, so it stays out of the hash
    return {k: v for k, v in cfg.items() if k != "out"}


def _out(cfg, name):
    base = cfg["out"] or "."
    return os.path.join(base, name)


# ---------------------------------------------------------------------------
# commands

def cmd_green(cfg) -> int:
    n, mu, branch = cfg["n"], cfg["mu"], cfg["branch"]
    status = EXIT_OK
    if cfg["check"] == "closed-form":
        if n != 3:
            raise ConfigError("closed-form check is n = 3 only")
        rho = parse_range(cfg["rho"])
        G = kernels.helmholtz_green_values(rho, mu, branch, 3)
        z = kernels.spectral_param(mu, branch, 3).z
        ref = kernels.closed_form_green_3d(rho, z)
        dev = np.abs(G - ref) / np.abs(ref)
        ok = float(dev.max()) <= cfg["tol"]
        write_json(_out(cfg, "green_check.json"),
                   {"check": "closed-form", "max_rel_deviation": float(dev.max()), "passed": ok}, _stamped(cfg))
        write_csv(_out(cfg, "green_check.csv"), ["rho", "rel_dev"], zip(rho, dev), _stamped(cfg))
        return EXIT_OK if ok else EXIT_TOLERANCE
    if cfg["check"] == "ode-residual":
        steps = [1e-2, 5e-3, 2.5e-3]
        rows, orders = [], []
        for r0 in (1.0, 2.0, 4.0):
            errs = [abs(kernels.radial_ode_residual(r0, mu, branch, n, h)) for h in steps]
            order = calculus.fd_convergence_order(errs)
            orders.extend(order.tolist())
            rows.extend((r0, h, e) for h, e in zip(steps, errs))
        ok = all(abs(o - 2.0) <= 0.2 for o in orders)
        write_csv(_out(cfg, "green_ode_residual.csv"), ["rho", "h", "residual"], rows, _stamped(cfg))
        write_json(_out(cfg, "green_check.json"),
                   {"check": "ode-residual", "orders": orders, "passed": ok}, _stamped(cfg))
        return EXIT_OK if ok else EXIT_TOLERANCE
    if cfg["check"] is not None:
        raise ConfigError(f"unknown check {cfg['check']!r}")
    rho = parse_range(cfg["rho"])
    sp = kernels.spectral_param(mu, branch, n)
    evals = [kernels.green_kernel(float(r), sp) for r in rho]
    rows = [(e.rho, e.value.real, e.value.imag, e.error_estimate) for e in evals]
    write_csv(_out(cfg, "green.csv"), ["rho", "re", "im", "err"], rows, _stamped(cfg))
    return status


def cmd_heat(cfg) -> int:
    n = cfg["n"]
    if n % 2 == 0:
        raise ConfigError("heat kernel is implemented for odd n")
    rho = parse_range(cfg["rho"])
    rows = []
    for t in cfg["t"]:
        vals = kernels.heat_kernel(rho, float(t), n)
        rows.extend((float(t), r, v) for r, v in zip(rho, np.atleast_1d(vals)))
    write_csv(_out(cfg, "heat.csv"), ["t", "rho", "p"], rows, _stamped(cfg))
    checks = []
    for t in cfg["t"]:
        m, _ = kernels.heat_mass(float(t), n)
        checks.append({"name": f"mass_t{t}", "value": abs(m - 1.0), "tolerance": 1e-8})
    if n == 3:
        checks.append({"name": "semigroup", "tolerance": cfg["tol"],
                       "value": kernels.heat_semigroup_defect(0.25, 0.25, [0.3, 0.0, 0.0])})
    for nn, k in ((3, 1.0), (3, 2.0), (5, 1.5)):
        checks.append({"name": f"mellin_n{nn}_k{k}", "tolerance": cfg["tol"],
                       "value": kernels.heat_resolvent_check(1.0, k, nn)})
    for c in checks:
        c["passed"] = bool(c["value"] <= c["tolerance"])
    ok = all(c["passed"] for c in checks)
    write_json(_out(cfg, "heat_report.json"), {"checks": checks, "passed": ok}, _stamped(cfg))
    return EXIT_OK if ok else EXIT_TOLERANCE


def _directions(degree):
    return sphere_grid(3, degree)


def cmd_source(cfg) -> int:
    mu, branch = cfg["mu"], cfg["branch"]
    center = np.zeros(3) if cfg["center"] is None else np.asarray(cfg["center"], dtype=float)
    amp = _parse_complex(cfg["amplitude"])
    bump = calculus.BumpFunction(center, float(cfg["R0"]), amplitude=1.0)
    crho = float(2.0 * np.arctanh(np.linalg.norm(center)))
    sph = sphere_grid(3, cfg["degree"])
    f = source_scatter.CompactField.from_function(bump, crho + float(cfg["R0"]), cfg["n_rho"], sph) * amp
    sol = source_scatter.SourceSolution(f, mu, branch)

    dirs = _directions(cfg["far_degree"]).nodes
    rho = parse_range(cfg["field_rho"])
    rr = np.repeat(rho, len(dirs))
    dd = np.tile(dirs, (len(rho), 1))
    u = sol.polar(rr, dd)
    pts = np.tanh(0.5 * rr)[:, None] * dd
    write_csv(_out(cfg, "source_field.csv"), ["x1", "x2", "x3", "re", "im"],
              [(*p, v.real, v.imag) for p, v in zip(pts, u)], _stamped(cfg))

    ff = source_scatter.far_field(f, mu, dirs, branch)
    write_csv(_out(cfg, "source_far_field.csv"), ["d1", "d2", "d3", "re", "im"],
              [(*d, a.real, a.imag) for d, a in zip(dirs, ff.amplitudes)], _stamped(cfg))

    ladder = []
    for R in cfg["ladder"]:
        uu = sol.polar(np.full(len(dirs), float(R)), dirs)
        rem = np.abs(uu - source_scatter.far_field_prefactor(R, mu, 3, branch) * ff.amplitudes)
        ladder.append({"rho": float(R), "max_remainder": float(rem.max()),
                       "scaled_remainder": float(rem.max()) * math.sinh(R) ** 2})
    manifest = {"mu": mu, "n": 3, "branch": branch,
                "grid": {"n_rho": cfg["n_rho"], "degree": cfg["degree"], "far_degree": cfg["far_degree"]},
                "matching_ladder": ladder, "source_integral": f.integrate()}
    write_json(_out(cfg, "source_manifest.json"), manifest, _stamped(cfg))
    return EXIT_OK


def _potential_from_cfg(cfg, **over):
    if cfg["potential"] is not None:
        d = cfg["potential"]
        if isinstance(d, str):
            return potential_scatter.Potential.from_json(d, **over)
        return potential_scatter.Potential.from_descriptor(d, **over)
    kw = dict(R0=cfg["R0"], amplitude=_parse_complex(cfg["amplitude"]), imag=cfg["imag"],
              profile=cfg["profile"], n_rho=cfg["n_rho"], degree=cfg["degree"])
    kw.update(over)
    return potential_scatter.Potential(**kw)


def cmd_potential(cfg) -> int:
    mu, branch = cfg["mu"], cfg["branch"]
    pot = _potential_from_cfg(cfg)
    system = potential_scatter.assemble(pot, mu, branch, xi=cfg["xi"])
    if cfg["homogeneous"]:
        # zero incident data: the only solution of (I - K) u = 0 is u = 0
        system = dataclasses.replace(system, rhs=np.zeros_like(system.rhs),
                                     incident=np.zeros_like(system.incident))
    sol = potential_scatter.solve(system)
    report = {"homogeneous": bool(cfg["homogeneous"]), "potential": pot.descriptor(), "mu": mu,
              "branch": branch, "sigma_min": sol.sigma_min, "nodes": len(system.rhs), "scattered_norm": float(np.max(np.abs(sol.us)))}

    fine = potential_scatter.assemble(
        _potential_from_cfg(cfg, n_rho=cfg["n_rho"] + 4, degree=cfg["degree"] + 4), mu, branch, xi=cfg["xi"])
    report["sigma_min_refined"] = fine.sigma_min() if not pot.is_trivial else 1.0

    dirs = _directions(cfg["far_degree"])
    if not pot.is_trivial:
        report["flux_ladder"] = [{"rho": float(R), "flux": float(f)}
                                 for R, f in zip(cfg["ladder"], potential_scatter.rellich_flux(sol, cfg["ladder"], dirs))]
        born = []
        for c in ([] if cfg["homogeneous"] else cfg["born"]):
            s = potential_scatter.assemble(pot.scaled(c / abs(pot.scale)), mu, branch, xi=cfg["xi"])
            us = potential_scatter.solve(s).us
            born.append(math.sqrt(float(np.sum(s.grid.weights * np.abs(us - s.rhs) ** 2))))
        if born:
            report["born_sweep"] = {"contrasts": cfg["born"], "errors": born,
                                    "ratios": [b / a for a, b in zip(born, born[1:])]}
    ff = sol.far_field(dirs)
    write_csv(_out(cfg, "potential_far_field.csv"), ["d1", "d2", "d3", "re", "im"],
              [(*d, a.real, a.imag) for d, a in zip(ff.directions, ff.amplitudes)], _stamped(cfg))
    pts = system.grid.points
    write_csv(_out(cfg, "potential_field.csv"), ["x1", "x2", "x3", "re", "im"],
              [(*p, v.real, v.imag) for p, v in zip(pts, sol.us)], _stamped(cfg))
    write_json(_out(cfg, "potential_report.json"), report, _stamped(cfg))
    return EXIT_OK


def cmd_modes(cfg) -> int:
    """Radial factor a_l of the mode a_l(rho) Y_lm, started from Psi^{+-mu} data far out."""
    n, mu = cfg["n"], cfg["mu"]
    rho = parse_range(cfg["rho"])
    if rho.min() <= 0:
        raise ConfigError("mode radii must be positive")
    sign = 1 if cfg["branch"] == "outgoing" else -1
    r_far = float(rho.max()) + 10.0
    h = 1e-4
    p = modes.helmholtz_psi(n, mu, np.array([r_far - h, r_far, r_far + h]), sign)
    init = (p[1], (p[2] - p[0]) / (2 * h))
    rows = []
    for l in range(cfg["l_max"] + 1):
        a = modes.radial_solution(n, mu, l, (r_far, float(rho.min())), init)(rho)
        for m in range(-l, l + 1):
            rows.extend((l, m, r, v.real, v.imag) for r, v in zip(rho, a))
    write_csv(_out(cfg, "modes.csv"), ["l", "m", "rho", "re", "im"], rows, _stamped(cfg))
    grid = []
    cs = [_parse_complex(c) for c in cfg["c_grid"]]
    for c1 in cs:
        for c2 in cs:
            res = modes.rellich_dichotomy(n, mu, c1, c2, tuple(cfg["rho_window"]))
            grid.append({"c1": c1, "c2": c2, "verdict": res.verdict,
                         "window_max": float(np.max(res.window_max)), "threshold": float(res.threshold)})
    write_json(_out(cfg, "modes_dichotomy.json"), {"dichotomy": grid}, _stamped(cfg))
    return EXIT_OK


def cmd_verify(cfg) -> int:
    report = verification.run_suites(cfg["suite"])
    write_json(_out(cfg, "verify_report.json"), report, _stamped(cfg))
    for name, checks in report["suites"].items():
        for c in checks:
            print(f"{'PASS' if c['passed'] else 'FAIL'} {name}.{c['name']} value={c['value']:.3e}")
    return EXIT_OK if report["passed"] else EXIT_TOLERANCE


COMMANDS = {"green": cmd_green, "heat": cmd_heat, "source": cmd_source,
            "potential": cmd_potential, "modes": cmd_modes, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperscatter", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hyperscatter {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config")
        sp.add_argument("--n", type=int)
        sp.add_argument("--mu", type=float)
        sp.add_argument("--branch", choices=["outgoing", "ingoing"])
        sp.add_argument("--out", help="output directory")
        return sp

    g = common(sub.add_parser("green", help="tabulate the Green kernel"))
    g.add_argument("--rho", help="start:stop:count")
    g.add_argument("--check", choices=["closed-form", "ode-residual"])
    g.add_argument("--tol", type=float)

    h = common(sub.add_parser("heat", help="heat kernel table and checks"))
    h.add_argument("--t", type=float, nargs="+")
    h.add_argument("--rho")
    h.add_argument("--tol", type=float)

    s = common(sub.add_parser("source", help="solve with a bump source"))
    s.add_argument("--R0", type=float)
    s.add_argument("--center", type=float, nargs=3)
    s.add_argument("--amplitude")
    s.add_argument("--n-rho", dest="n_rho", type=int)
    s.add_argument("--degree", type=int)
    s.add_argument("--field-rho", dest="field_rho")
    s.add_argument("--far-degree", dest="far_degree", type=int)
    s.add_argument("--ladder", type=float, nargs="+")

    q = common(sub.add_parser("potential", help="Nystrom potential scattering"))
    q.add_argument("--potential", help="JSON descriptor file")
    q.add_argument("--R0", type=float)
    q.add_argument("--amplitude")
    q.add_argument("--imag", type=float)
    q.add_argument("--profile", choices=sorted(potential_scatter.PROFILES))
    q.add_argument("--n-rho", dest="n_rho", type=int)
    q.add_argument("--degree", type=int)
    q.add_argument("--xi", type=float, nargs=3)
    q.add_argument("--far-degree", dest="far_degree", type=int)
    q.add_argument("--ladder", type=float, nargs="+")
    q.add_argument("--born", type=float, nargs="+")
    q.add_argument("--homogeneous", action="store_const", const=True, help="zero incident data")

    m = common(sub.add_parser("modes", help="radial mode table and dichotomy grid"))
    m.add_argument("--l-max", dest="l_max", type=int)
    m.add_argument("--rho")

    v = common(sub.add_parser("verify", help="run invariant suites"))
    v.add_argument("--suite")
    return p


def _error(kind, message, code, **extra):
    print(json.dumps({"error": kind, "message": str(message), "exit_code": code, **extra}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else _error("usage", "invalid arguments", EXIT_CONFIG)
    try:
        cfg = resolve_config(args.command, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        return _error("config", exc, EXIT_CONFIG)
    except ConditioningError as exc:
        return _error("conditioning", exc, EXIT_CONDITIONING, sigma_min=exc.sigma_min)
    except AccuracyError as exc:
        return _error("tolerance", exc, EXIT_TOLERANCE)
    except (HyperscatterError, ValueError) as exc:
        return _error("config", exc, EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
