"""Invariant suites behind ``hyperscatter verify``; each check returns a small dict."""
from __future__ import annotations

import math

import numpy as np

from . import calculus, kernels, modes, potential_scatter, source_scatter
from .geometry import sphere_grid

__all__ = ["SUITES", "run_suites"]


def _check(name, value, tol, passed=None):
    value = float(value)
    return {"name": name, "value": value, "tolerance": tol,
            "passed": bool(value <= tol if passed is None else passed)}


def suite_kernels(n=3, mu=1.0):
    out = []
    rho = np.linspace(0.1, 10.0, 40)
    G = kernels.helmholtz_green_values(rho, mu, "outgoing", 3)
    ref = kernels.closed_form_green_3d(rho, -1j * mu)
    out.append(_check("closed_form_n3", np.max(np.abs(G - ref) / np.abs(ref)), 1e-9))
    errs = [abs(kernels.radial_ode_residual(2.0, mu, "outgoing", n, h)) for h in (1e-2, 5e-3, 2.5e-3)]
    order = calculus.fd_convergence_order(errs)
    out.append(_check("ode_residual_order", float(np.max(np.abs(order - 2.0))), 0.2))
    scaled = [abs(kernels.radiation_residual(r, mu, "outgoing", n)) * math.sinh(r) ** ((n + 1) / 2) for r in (8, 12, 16)]
    out.append(_check("radiation_scaled_variation", max(scaled) / min(scaled), 3.0))
    y = np.zeros(n)
    y[1] = 0.3
    _, _, C = kernels.asymptotic_ladder(y, mu, n=n)
    out.append(_check("asymptotic_constant_finite", 0.0 if np.isfinite(C) else 1.0, 0.5))
    return out


def suite_heat():
    out = []
    for t in (0.25, 1.0):
        m, _ = kernels.heat_mass(t, 3)
        out.append(_check(f"heat_mass_t{t}", abs(m - 1.0), 1e-8))
    out.append(_check("heat_semigroup", kernels.heat_semigroup_defect(0.25, 0.25, [0.3, 0.0, 0.0]), 1e-6))
    for n, k in ((3, 1.0), (3, 2.0), (5, 1.5)):
        out.append(_check(f"mellin_n{n}_k{k}", kernels.heat_resolvent_check(1.0, k, n), 1e-6))
    return out


def suite_rellich(n=3, mu=1.0):
    out = []
    vals = [0, 1, -1, 1j, -1j]
    for c1 in vals:
        for c2 in vals:
            res = modes.rellich_dichotomy(n, mu, c1, c2)
            zero = c1 == 0 and c2 == 0
            ok = (res.is_zero and float(np.max(res.window_max)) == 0.0) if zero else not res.is_zero
            out.append(_check(f"dichotomy_{c1}_{c2}", 0.0 if ok else 1.0, 0.5))
    return out


def suite_calculus():
    out = []
    u = calculus.CoshPolynomial((1.0, 0.0, 1.0))
    v = calculus.CoshPolynomial((0.0, 1.0))
    w = calculus.RealPart(calculus.HelgasonWave(2.0, (1.0, 0.0, 0.0)))
    for R in (0.5, 1.0, 2.0):
        b = calculus.BumpFunction(np.zeros(3), 0.8 * R)
        d = max(calculus.green_identity_check(u, v, R) + calculus.green_identity_check(w, b, R, breaks=(0.8 * R,)))
        out.append(_check(f"green_identities_R{R}", d, 1e-6))
    phi = calculus.BumpFunction(np.zeros(3), 1.0)
    for branch in ("outgoing", "ingoing"):
        for x0 in ([0.0, 0.0, 0.0], [0.4, 0.0, 0.0]):
            d = calculus.fundamental_solution_test(1.0, branch, phi, x0, 3, 24, 24)
            out.append(_check(f"fundamental_{branch}_{x0[0]}", d, 1e-4))
    e = modes.eigen_check(2.0, (1.0, 0.0, 0.0), [[0.2, -0.1, 0.3]])
    out.append(_check("eigen_order", float(np.max(np.abs(np.array(e["orders"]) - 2.0))), 0.2))
    return out


def suite_source(mu=1.0):
    out = []
    sph = sphere_grid(3, 12)
    bm = calculus.BumpFunction(np.zeros(3), 0.05)
    m = bm.mass()
    f = source_scatter.CompactField.from_function(lambda x: bm(x) / m, 0.05, 12, sph)
    u = source_scatter.SourceSolution(f, mu).polar([3.0], [[1.0, 0.0, 0.0]])[0]
    ref = kernels.closed_form_green_3d(3.0, -1j * mu)
    out.append(_check("mollifier_to_kernel", abs(u / ref - 1.0), 0.01))
    b = calculus.BumpFunction(np.array([0.2, 0.1, 0.0]), 0.8)
    g = source_scatter.CompactField.from_function(b, 1.0, 12, sph)
    sol = source_scatter.SourceSolution(g, mu)
    ff = source_scatter.far_field(g, mu, sph.nodes[:4])
    rhos = np.array([8.0, 10.0, 12.0])
    diffs = []
    for R in rhos:
        uu = sol.polar(np.full(4, R), sph.nodes[:4])
        diffs.append(np.abs(uu - source_scatter.far_field_prefactor(R, mu, 3) * ff.amplitudes))
    diffs = np.array(diffs)
    slope = np.polyfit(np.log(np.sinh(rhos)), np.log(diffs), 1)[0]
    out.append(_check("far_field_slope", float(np.max(np.abs(slope + 2.0))), 0.3))
    return out


def suite_potential(mu=1.0):
    out = []
    P0 = potential_scatter.Potential(1.0, 0.0, n_rho=8, degree=9)
    s0 = potential_scatter.solve(potential_scatter.assemble(P0, mu))
    out.append(_check("trivial_potential_zero_field", float(np.max(np.abs(s0.us))), 0.0))
    errs = []
    for c in (0.01, 0.02, 0.04):
        S = potential_scatter.assemble(potential_scatter.Potential(1.0, c, n_rho=8, degree=9), mu)
        us = potential_scatter.solve(S).us
        errs.append(math.sqrt(float(np.sum(S.grid.weights * np.abs(us - S.rhs) ** 2))))
    ratios = [errs[1] / errs[0], errs[2] / errs[1]]
    out.append(_check("born_ratio", max(abs(r - 4.0) for r in ratios), 1.0))
    S = potential_scatter.assemble(potential_scatter.Potential(1.0, 0.5, imag=0.2, n_rho=8, degree=9), mu)
    out.append(_check("sigma_min", S.sigma_min(), np.inf, S.sigma_min() > 1e-6))
    return out


SUITES = {
    "kernels": suite_kernels,
    "heat": suite_heat,
    "rellich": suite_rellich,
    "calculus": suite_calculus,
    "source": suite_source,
    "potential": suite_potential,
}
DEFAULT = ("kernels", "heat", "rellich", "calculus")


def run_suites(names=DEFAULT):
    if isinstance(names, str):
        names = list(SUITES) if names == "all" else (DEFAULT if names == "default" else [names])
    report = {}
    for name in names:
        report[name] = SUITES[name]()
    passed = all(c["passed"] for checks in report.values() for c in checks)
    return {"passed": passed, "suites": report}
