"""Freeze extended-precision reference values into tests/oracle_values.json.

Only mpmath is used here; nothing from the package is imported so the
numbers stay independent of the code under test.
"""
import json
import pathlib
import sys

import mpmath as mp

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))
import oracles  # noqa: E402

mp.mp.dps = 50
OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "oracle_values.json"

B, ALPHA, R1F, R2F = mp.mpf("1.3"), mp.mpf("1.26"), mp.mpf("0.42"), mp.mpf("0.67")


def figure_model():
    rmax = B ** (-1 / (2 * B))
    r1, r2 = R1F * rmax, R2F * rmax
    p1, p2 = r1 ** (2 * B), r2 ** (2 * B)
    sig_star = (p2 - p1) / (2 * mp.log(r2 / r1))
    return r1, r2, sig_star, sig_star - B * p1, B * p2 - sig_star


def gamma_by_quadrature(a, lo, hi):
    a = mp.mpf(a)

    def f(t):
        return mp.exp((a - 1) * mp.log(t) - t - mp.loggamma(a))
    pts = [lo] + [v for v in (a - 200, a - 50, a, a + 50, a + 200) if lo < v < hi] + [hi]
    return mp.quad(f, pts)


def hard_constants(t1, t2, total):
    r1, _, _, s1, _ = figure_model()
    b = B
    t1, t2 = mp.mpf(t1), mp.mpf(t2)
    s = t1 + t2
    lap = b * b * r1 ** (2 * b - 2)
    g = 1 - (1 + s) * mp.exp(-s)
    c1 = s1**2 * g / (r1**2 * s**2)
    c2 = lap / 2
    sq = t1 * t1 + t2 * t2
    c3 = (-lap * (mp.e1(s) + mp.euler + mp.log(b * r1**b * s / (s1 * mp.sqrt(2 * mp.pi))))
          + s1 / (r1**2 * s**3) * (s * s * sq / (2 * mp.exp(s))
                                  + (2 * t1 * t2 - b * b * r1 ** (2 * b) / s1 * s * sq) * g))
    c4 = mp.sqrt(2) * b * b * r1 ** (b - 2) * (1 - 2 * b * r1 ** (2 * b) * s / s1) * total
    return [c1, c2, c3, c4]


def semi_constants(s1, s2):
    r1 = figure_model()[0]
    b = B
    lap = b * b * r1 ** (2 * b - 2)
    s1, s2 = mp.mpf(s1), mp.mpf(s2)
    c1 = 2 * lap * oracles.gauss_over_erfc_integral(s1, s2)
    ssum, ssq, scube = s1 + s2, s1 * s1 + s2 * s2, s1**3 + s2**3

    def extra(y):
        return ((10 * y * y - 2) * oracles.mills(y) / 3 + 5 * y - 10 * y**3 / 3 + ssum / b
                - y * ssq / (2 * b) - 2 * y * y * ssum + (2 * b - 3) / b * scube / 6)
    c2 = b * mp.sqrt(2 * lap) / r1 * oracles.gauss_over_erfc_integral(s1, s2, extra)
    return [c1, c2]


def main():
    r1, r2, sig_star, s1, s2 = figure_model()
    total = oracles.integral_I()
    vals = {
        "log_gamma_171_5": mp.loggamma(mp.mpf("171.5")),
        "P_5000_5000": gamma_by_quadrature(5000, mp.mpf(0), mp.mpf(5000)),
        "Q_5000_6000": gamma_by_quadrature(5000, mp.mpf(6000), mp.inf),
        "integral_I": total,
        "integrals_I1_I4": list(oracles.integrals_I1_to_I4()),
        "hard_constants_021_045": hard_constants("0.21", "0.45", total),
        "semi_constants_121_145": semi_constants("1.21", "1.45"),
        "rho_1": oracles.gauss_over_erfc_integral(1, 1),
        "hard_edge_r_t021_n1024": r1 * (1 - mp.mpf("0.21") / (s1 * 1024)),
        "semi_hard_r_s121_n1024": r1 * (1 - mp.mpf("1.21") / (B * r1**B * mp.sqrt(2 * 1024))),
        "figure_equilibrium": [sig_star, s1, s2],
    }
    kernels = []
    for n, z, w in ((1, (0.3, 0.0), (0.7, 1.0)), (2, (0.2, 0.4), (0.9, -1.1)),
                    (8, (0.35, 0.0), (0.35, 2.0)), (8, (0.1, 0.3), (0.8, 0.3))):
        value = oracles.kernel(B, ALPHA, r1, r2, n, z, w)
        kernels.append({"n": n, "z": list(z), "w": list(w), "re": value.real, "im": value.imag})
    vals["kernels"] = kernels

    def plain(v):
        if isinstance(v, list):
            return [plain(x) for x in v]
        if isinstance(v, dict):
            return {k: plain(x) for k, x in v.items()}
        if isinstance(v, (int, float)):
            return v
        return mp.nstr(v, 30)
    OUT.write_text(json.dumps(plain(vals), indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
