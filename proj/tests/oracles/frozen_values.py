"""High-precision reference values frozen into the C++ unit tests.

Everything here is computed with mpmath at 50 significant digits, independent
of the C++ implementation. Re-run with `python3 frozen_values.py` to audit.
"""
import mpmath as mp

mp.mp.dps = 50


def a_const(d, variant):
    if variant == "paper":
        return (2 * mp.pi) ** (-mp.mpf(d) / 2) / d
    return 1 / (2 ** (mp.mpf(d) / 2 - 1) * mp.gamma(mp.mpf(d) / 2))


def big_radius(ln_n, c, d, variant):
    return mp.sqrt(2 * ln_n + (c + d - 2) * mp.log(ln_n) + 2 * mp.log(a_const(d, variant)))


def small_radius(ln_n, t):
    return t * mp.log(ln_n) / mp.sqrt(ln_n)


def radial_tail(R, d):
    return mp.gammainc(mp.mpf(d) / 2, mp.mpf(R) ** 2 / 2, mp.inf, regularized=True)


def ball_mass(rho, r, d):
    """Direct 1-D integral over the first coordinate; the remaining d-1
    coordinates contribute a central chi-square CDF."""
    rho, r = mp.mpf(rho), mp.mpf(r)

    def integrand(x):
        h2 = r * r - (x - rho) ** 2
        if h2 <= 0:
            return mp.mpf(0)
        inner = mp.gammainc(mp.mpf(d - 1) / 2, 0, h2 / 2, regularized=True)
        return mp.npdf(x) * inner

    return mp.quad(integrand, mp.linspace(rho - r, rho + r, 41))


def asym(rho, r, d, half):
    e = rho ** 2 / 2 if half else rho ** 2
    return (2 * mp.pi) ** mp.mpf(-0.5) * r ** d * mp.exp(rho * r - e) * (rho * r) ** (-mp.mpf(d + 1) / 2)


def show(label, v):
    print(f"{label:60s} {mp.nstr(v, 17)}")


if __name__ == "__main__":
    ln = mp.log
    for n in (mp.mpf(10) ** 4, mp.mpf(10) ** 6):
        for v in ("paper", "normalized"):
            show(f"big_radius n={mp.nstr(n,3)} c=2 d=2 {v}", big_radius(ln(n), 2, 2, v))
    show("big_radius n=e^e c=0 d=2 normalized", big_radius(mp.e, 0, 2, "normalized"))
    show("small_radius 1e6 t=1", small_radius(ln(10**6), 1))
    show("small_radius 1e6 t=sqrt2", small_radius(ln(10**6), mp.sqrt(2)))
    show("radial_tail R=2 d=2", radial_tail(2, 2))
    show("radial_tail R=3 d=3", radial_tail(3, 3))
    show("radial_tail R=8 d=10", radial_tail(8, 10))
    show("radial_tail R=15 d=50", radial_tail(15, 50))
    show("radial_tail R=0.5 d=50", radial_tail(0.5, 50))
    show("ball_mass rho=0 r=1 d=2", 1 - mp.exp(-0.5))
    for (rho, r, d) in [(1, 1, 2), (2.5, 0.7, 3), (5, 0.5, 2), (3, 2, 5)]:
        show(f"ball_mass rho={rho} r={r} d={d}", ball_mass(rho, r, d))
    for d in (2, 3):
        for (rho, r) in [(20, 0.4), (30, 0.3), (40, 0.25)]:
            ex = ball_mass(rho, r, d)
            show(f"log ball_mass rho={rho} r={r} d={d}", mp.log(ex))
            show(f"  half_rho_sq ratio", asym(rho, r, d, True) / ex)
            show(f"  as_printed log ratio", mp.log(asym(rho, r, d, False) / ex))
    # containment probabilities (normalized constant)
    n = 10 ** 4
    R = big_radius(ln(n), 2, 2, "normalized")
    show("R_1e4(2) d=2 normalized", R)
    show("P[U^c] n=1e4 c=2 d=2", 1 - (1 - radial_tail(R, 2)) ** n)
    Rm = big_radius(ln(n), -1, 2, "normalized")
    show("P[V^c] n=1e4 c=-1 d=2  (all inside)", (1 - radial_tail(Rm, 2)) ** n)
    show("containment_defect_asym n=1e4 c=2 d=2 normalized",
         n * a_const(2, "normalized") * mp.exp(-R ** 2 / 2))
    show("leading rate n=1e6 c=4 d=3", mp.sqrt(2) * ln(10 ** 6) ** -2)
    show("covering d=2 m=100", (100 / ln(100)) ** 2)
    show("packing simplified n=1e6 d=2", ln(10 ** 6) / ln(ln(10 ** 6)))
    show("final term eps=0 C2=1 n=e^e d=2", mp.exp(-mp.e))
    # E_n exact product form, probe at R'_n, normalized constant
    n = mp.mpf(10 ** 4)
    d, c, u, eps = 2, 2.5, 1.1, 0.05
    Rp = big_radius(ln(n), -2, d, "normalized")
    re, ru = small_radius(ln(n), eps), small_radius(ln(n), u)
    p = (n - n ** 0.75) * ball_mass(Rp, re, d) * mp.exp(-(n + n ** 0.75) * ball_mass(Rp, ru, d))
    show("R'_n n=1e4 d=2 normalized", Rp)
    show("P[E_n] probe at R'_n", p)
