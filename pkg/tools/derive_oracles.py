"""Reference values for the [DERIVED] tests, computed with mpmath at 30 digits.

Nothing here imports hyperscatter. Run ``python3 tools/derive_oracles.py`` and the
printed values are the ones frozen in tests/oracle_values.py.
"""
import mpmath as mp

mp.mp.dps = 30


def prefactor(n, z):
    return (2 * mp.pi) ** (-mp.mpf(n) / 2) * mp.gamma((n - 1) / mp.mpf(2) + z) / (
        2 ** (z + mp.mpf(1) / 2) * mp.gamma(z + mp.mpf(1) / 2))


def kernel_by_quadrature(n, z, rho):
    """A sinh^{-(n-2)} int_0^pi (cosh rho + cos t)^{(n-3)/2 - z} (sin t)^{2z} dt."""
    a = (n - 3) / mp.mpf(2) - z
    ch = mp.cosh(rho)
    f = lambda t: (ch + mp.cos(t)) ** a * mp.sin(t) ** (2 * z)
    # geometric refinement at both ends, where (sin t)^{2z} oscillates
    pts = [mp.mpf(0)] + [mp.mpf(10) ** (-k) for k in range(40, 0, -1)]
    pts = pts + [mp.pi / 2] + [mp.pi - p for p in reversed(pts)]
    I = mp.quad(f, pts)
    return prefactor(n, z) * I / mp.sinh(rho) ** (n - 2)


def kernel3(z, rho):
    return mp.exp(-z * rho) / (4 * mp.pi * mp.sinh(rho))


def kernel5(z, rho):
    # G_{n+2} = -(2 pi sinh rho)^{-1} d/drho G_n at fixed z
    return -mp.diff(lambda r: kernel3(z, r), rho) / (2 * mp.pi * mp.sinh(rho))


def heat3(rho, t):
    s = rho / mp.sinh(rho) if rho != 0 else mp.mpf(1)
    return (4 * mp.pi * t) ** mp.mpf(-1.5) * s * mp.exp(-t - rho**2 / (4 * t))


def heat5(rho, t):
    return -mp.exp(-3 * t) * mp.diff(lambda r: heat3(r, t), rho) / (2 * mp.pi * mp.sinh(rho))


def ball_integral3(z, d, R):
    """int_{B(0,R)} G3(rho(x,y)) dV(y), rho(x) = d > 0, via the law of cosines."""
    def inner(s):
        lo, hi = abs(d - s), d + s
        return mp.sinh(s) * (mp.exp(-z * lo) - mp.exp(-z * hi)) / (2 * z * mp.sinh(d))
    pts = [0, R] if d >= R else [0, d, R]
    return mp.quad(inner, pts)


def bump_profile(s, r):
    return (1 - (s / r) ** 2) ** 3


def far_field_centered_bump(z, r):
    """u_inf of the bump centred at 0, n = 3.

    C int cosh(s/2)^{-2z-2} q^{-z-1} phi dV with q = 1 - 2 xhat.y + |y|^2; the
    angular integral of q^p over S^2 is 2 pi ((1+t)^{2p+2} - (1-t)^{2p+2}) / ((p+1) 2t), t = |y|.
    """
    n = 3
    C = prefactor(n, z) * 2 ** (-z) * 2 ** (-(n - 1) / mp.mpf(2)) * mp.sqrt(mp.pi) * mp.gamma(z + 0.5) / mp.gamma(z + 1)
    p = -z - 1

    def f(s):
        t = mp.tanh(s / 2)
        ang = 2 * mp.pi * ((1 + t) ** (2 * p + 2) - (1 - t) ** (2 * p + 2)) / ((p + 1) * 2 * t)
        return mp.cosh(s / 2) ** (-2 * z - 2) * ang * bump_profile(s, r) * mp.sinh(s) ** 2

    return C * mp.quad(f, [0, r])


def jacobi_psi(a, b, lam, rho):
    il = 1j * lam
    x = -1 / mp.sinh(rho) ** 2
    return (2 * mp.sinh(rho)) ** (il - a - b - 1) * mp.hyp2f1((a + b + 1 - il) / 2, (b - a + 1 - il) / 2, 1 - il, x)


def main():
    out = {}
    out["abs_gamma_1_plus_i"] = abs(mp.gamma(1 + 1j))
    out["gamma_0.3_0.7i"] = mp.gamma(mp.mpc(0.3, 0.7))
    out["gamma_-2.5_0.4i"] = mp.gamma(mp.mpc(-2.5, 0.4))
    out["hyp2f1_generic"] = mp.hyp2f1(mp.mpc(0.5, 0.3), 1.2, mp.mpc(2.5, -0.1), 0.7)
    out["hyp2f1_binomial"] = (1 - mp.mpf(-0.4)) ** (-mp.mpc(0.3, 0.2))
    out["prefactor_n5_z1"] = prefactor(5, 1)
    out["prefactor_n4_z-i"] = prefactor(4, -1j)
    out["green_n4_mu1_rho0.5"] = kernel_by_quadrature(4, -1j, mp.mpf("0.5"))
    out["green_n4_mu1_rho2"] = kernel_by_quadrature(4, -1j, mp.mpf(2))
    out["green_n5_mu2_rho1.5"] = kernel5(-2j, mp.mpf("1.5"))
    out["green_n5_mu2_rho1.5_quad"] = kernel_by_quadrature(5, -2j, mp.mpf("1.5"))
    out["green_n6_mu1_rho1"] = kernel_by_quadrature(6, -1j, mp.mpf(1))
    out["resolvent_n4_k1_rho2"] = kernel_by_quadrature(4, 1, mp.mpf(2))
    out["heat_n5_rho1_t0.5"] = heat5(mp.mpf(1), mp.mpf("0.5"))
    out["heat_n5_rho0.45_t1"] = heat5(mp.mpf("0.45"), mp.mpf(1))
    out["heat_n5_rho0.55_t1"] = heat5(mp.mpf("0.55"), mp.mpf(1))
    out["heat_n3_rho2_t0.3"] = heat3(mp.mpf(2), mp.mpf("0.3"))
    out["ball_integral_mu1_d0.5_R1"] = ball_integral3(-1j, mp.mpf("0.5"), mp.mpf(1))
    out["ball_integral_mu1_d1.5_R1"] = ball_integral3(-1j, mp.mpf("1.5"), mp.mpf(1))
    out["far_field_bump_n3_mu1_r0.8"] = far_field_centered_bump(-1j, mp.mpf("0.8"))
    out["bump_mass_n3_r0.8"] = 4 * mp.pi * mp.quad(lambda s: bump_profile(s, mp.mpf("0.8")) * mp.sinh(s) ** 2, [0, 0.8])
    out["psi_n5_mu1_rho2"] = jacobi_psi(mp.mpf("1.5"), mp.mpf("-0.5"), 1, mp.mpf(2))
    out["cosh_ball_integral_R1"] = 4 * mp.pi * mp.sinh(1) ** 3 / 3
    for k, v in out.items():
        v = complex(v) if isinstance(v, mp.mpc) else float(v)
        print(f"{k!r}: {v!r},")


if __name__ == "__main__":
    main()
