"""Reference values for crates/core/tests/fixtures/oracles.toml.

Everything here is computed with mpmath at 30 digits, independently of the
Rust code: the double sine goes through tanh-sinh quadrature of its integral
representation, the wavefunction values through direct quadrature of the
defining integrals.
"""
import mpmath as mp

mp.mp.dps = 30


def ln_s2(z, w1, w2):
    W = w1 + w2
    a = 2 * z - W

    def f(t):
        # tanh-sinh samples t ~ 1e-30, where the bracket cancels completely
        if t < mp.mpf("1e-8"):
            return a * (a**2 - w1**2 - w2**2) / (12 * w1 * w2)
        return (mp.sinh(a * t) / (mp.sinh(w1 * t) * mp.sinh(w2 * t)) - a / (w1 * w2 * t)) / (2 * t)

    return mp.quad(f, [0, 0.5, 1, 2, 4, 8, 16, 32, 64, mp.inf])


def s2(z, w1, w2):
    return mp.exp(ln_s2(z, w1, w2))


def kg(u, g, w1, w2):
    return 1 / (s2(g / 2 + 1j * u, w1, w2) * s2(g / 2 - 1j * u, w1, w2))


def hatk(lam, g):
    return mp.gamma((g + 1j * lam) / 2) * mp.gamma((g - 1j * lam) / 2) / (2 ** (1 - g) * mp.gamma(g))


def psi_hr(l1, l2, x1, x2, g):
    f = lambda t: mp.exp(1j * l2 * (x1 + x2 - t) + 1j * l1 * t) / (mp.cosh(x1 - t) ** g * mp.cosh(x2 - t) ** g)
    return mp.quad(f, [-mp.inf, min(x1, x2), max(x1, x2), mp.inf])


def c(v):
    v = mp.mpc(v)
    return [float(v.real), float(v.imag)]


out = {}
out["gamma_0p3_0p7"] = c(mp.gamma(mp.mpc(0.3, 0.7)))
out["gamma_5p5_3"] = c(mp.gamma(mp.mpc(5.5, 3)))
out["gamma_m2p5_0p1"] = c(mp.gamma(mp.mpc(-2.5, 0.1)))
out["lngamma_30_40"] = c(mp.loggamma(mp.mpc(30, 40)))
out["lns2_0p7_1_1"] = c(ln_s2(mp.mpf("0.7"), 1, 1))
r2 = mp.sqrt(2)
out["lns2_0p5_0p3i_1_r2"] = c(ln_s2(mp.mpc(0.5, 0.3), 1, r2))
out["lns2_1p1_m0p8i_1_r2"] = c(ln_s2(mp.mpc(1.1, -0.8), 1, r2))
out["lns2_0p3_2i_0p7_1p3"] = c(ln_s2(mp.mpc(0.3, 2), mp.mpf("0.7"), mp.mpf("1.3")))
# S2 at a point far outside the core window, via the functional equation
z = mp.mpc(3.2, 0.4)
out["s2_3p2_0p4i_1_r2"] = c(s2(z - 2 * r2, 1, r2) / (2 * mp.sin(mp.pi * (z - 2 * r2) / 1)) / (2 * mp.sin(mp.pi * (z - r2) / 1)))
# S2(z)/z near the origin
eps = mp.mpf("1e-4")
out["s2_over_z_1em4_1_r2"] = c(s2(eps, 1, r2) / eps)
# relativistic measure at u=0.7, g=0.8, periods (1,1)
u, g = mp.mpf("0.7"), mp.mpf("0.8")
# S2(iu)S2(-iu) = 4 sh(pi u/w1) sh(pi u/w2); Re z = 0 is outside the strip
mu = s2(g + 1j * u, 1, 1) * s2(g - 1j * u, 1, 1) * 4 * mp.sinh(mp.pi * u) ** 2
out["mu_rel_0p7_0p8_1_1"] = c(mu)
out["kg_0p4_0p8_1_r2"] = c(kg(mp.mpf("0.4"), g, 1, r2))
out["hatk_0p6_g1"] = c(hatk(mp.mpf("0.6"), 1))
out["hatk_1p3_g0p7"] = c(hatk(mp.mpf("1.3"), mp.mpf("0.7")))
# wavefunctions
out["psi_g1_0p4_m0p3_0p2_m0p6"] = c(psi_hr(mp.mpf("0.4"), mp.mpf("-0.3"), mp.mpf("0.2"), mp.mpf("-0.6"), 1))
out["psi_g0p7_0p5_0p1_1p0_m0p4"] = c(psi_hr(mp.mpf("0.5"), mp.mpf("0.1"), mp.mpf("1.0"), mp.mpf("-0.4"), mp.mpf("0.7")))
# closed form at g=1 for comparison
l1, l2, x1, x2 = mp.mpf("0.4"), mp.mpf("-0.3"), mp.mpf("0.2"), mp.mpf("-0.6")
lam, x = (l1 - l2) / 2, x1 - x2
out["psi_g1_closed"] = c(mp.exp(1j * (l1 + l2) * (x1 + x2) / 2) * 2 * mp.pi * mp.sin(lam * x) / (mp.sinh(x) * mp.sinh(mp.pi * lam)))
# Fourier pair of the relativistic kernel at g=0.8, periods (1, sqrt 2), x=0.3
x = mp.mpf("0.3")
gs = 1 + r2 - g
sig = 2 * mp.pi / r2
mp.mp.dps = 20
lhs = mp.quad(lambda t: mp.cos(sig * x * t) * kg(t, g, 1, r2), [0, 1, 2, 4, 7, 10, 14])
out["betah_lhs_0p8_0p3"] = c(2 * lhs)
out["betah_rhs_0p8_0p3"] = c(mp.sqrt(r2) * s2(gs, 1, r2) * kg(x, gs, 1, r2))

with open("crates/core/tests/fixtures/oracles.toml", "w") as fh:
    fh.write("# Generated by scripts/oracles.py (mpmath, 30 digits). Values are [re, im].\n")
    for k, v in out.items():
        fh.write(f"{k} = [{v[0]!r}, {v[1]!r}]\n")
for k, v in out.items():
    print(k, v)
