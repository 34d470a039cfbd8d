"""Regenerates tests/fixtures/derived_reference.hpp.

Values are computed here by direct summation in extended precision (mpmath),
independently of the C++ code, and frozen into the tests."""
import mpmath as mp
import numpy as np
from scipy.special import roots_hermite

mp.mp.dps = 40

FH22 = None


def fh22():
    import re
    txt = open("../fixtures/fh_reference.hpp").read()
    block = txt.split("fh_2x2_u2_half = {")[1].split("};")[0]
    return [float(v) for v in re.findall(r"[-+0-9.e]+", block)]


def gauss_hermite(m):
    """Newton-polished roots of H_m and normalized weights, in mpmath."""
    x0, _ = roots_hermite(m)
    xs, ws = [], []
    for g in x0:
        x = mp.mpf(g)
        for _ in range(60):
            x -= mp.hermite(m, x) / (2 * m * mp.hermite(m - 1, x))
        w = 2 ** (m - 1) * mp.factorial(m) * mp.sqrt(mp.pi) / (m ** 2 * mp.hermite(m - 1, x) ** 2)
        xs.append(x)
        ws.append(w / mp.sqrt(mp.pi))
    return xs, ws


def emit(name, values, lines):
    lines.append(f"inline constexpr std::array<double, {len(values)}> {name} = {{")
    for i in range(0, len(values), 4):
        lines.append("    " + ", ".join(f"{float(v):.17e}" for v in values[i:i + 4]) + ",")
    lines.append("};")


SYN_E = [0.0, 1.0, 1.4, 3.0, 3.5, 5.0]
SYN_G = [1, 3, 2, 1, 4, 2]
SYN_LAM = [-0.5, 0.5, 1.2, 2.2, 3.25, 4.25, 5.5]


def syn_sums(tau, lam):
    z = mp.fsum(g * mp.e ** (-tau * (e - lam) ** 2) for e, g in zip(SYN_E, SYN_G))
    n = mp.fsum(g * e * mp.e ** (-tau * (e - lam) ** 2) for e, g in zip(SYN_E, SYN_G))
    return z, n


lines = ["// Generated by tests/oracle/make_derived.py; do not edit.", "#pragma once", "",
         "#include <array>", "", "namespace staircase::fixtures {", ""]

# Gauss-Hermite rules
for m in (20, 64):
    xs, ws = gauss_hermite(m)
    lines.append(f"// Gauss-Hermite degree {m}, ascending nodes, weights normalized to sum 1")
    emit(f"gh{m}_nodes", xs, lines)
    emit(f"gh{m}_weights", ws, lines)
    lines.append("")

# synthetic spectrum sums at tau = 5
lines.append("// levels {0,1,1.4,3,3.5,5}, degeneracies {1,3,2,1,4,2}, tau = 5")
emit("syn_lambdas", SYN_LAM, lines)
emit("syn_Z_tau5", [syn_sums(5, l)[0] for l in SYN_LAM], lines)
emit("syn_H_tau5", [syn_sums(5, l)[1] / syn_sums(5, l)[0] for l in SYN_LAM], lines)
lines.append("")

# binomial: sum g cos^m(sqrt(2 dtau)(E - lambda)), tau = 5, dtau = 0.05
tau, dtau = mp.mpf(5), mp.mpf("0.05")
m = int(tau / dtau)
a = mp.sqrt(2 * dtau)
bz = [mp.fsum(g * mp.cos(a * (e - l)) ** m for e, g in zip(SYN_E, SYN_G)) for l in SYN_LAM]
bn = [mp.fsum(g * e * mp.cos(a * (e - l)) ** m for e, g in zip(SYN_E, SYN_G)) for l in SYN_LAM]
lines.append("// same spectrum, cos^m filter with tau = 5, dtau = 0.05 (m = 100)")
emit("syn_binomial_Z", bz, lines)
emit("syn_binomial_N", bn, lines)
lines.append("")

# quadrature Z on the 2x2 model, tau = 0.05, m = 30, all nodes
E = [mp.mpf(v) for v in fh22()]
xs, ws = gauss_hermite(30)
QLAM = [-2.0, 0.0, 1.0, 3.0, 5.0]
tq = mp.mpf("0.05")
qz = [mp.fsum(w * mp.fsum(mp.cos(2 * mp.sqrt(tq) * x * (e - l)) for e in E) for x, w in zip(xs, ws)) for l in QLAM]
lines.append("// 2x2 Fermi-Hubbard trace, tau = 0.05, degree 30 Gauss-Hermite, all nodes")
emit("fh22_quad_lambdas", QLAM, lines)
emit("fh22_quad_Z", qz, lines)
lines.append("")

# stability: tau = 20, m = 200, mbar = 16, r0 = 0.1, default 2001-point grid
tau, m, mbar, r0, npts = 20.0, 200, 16, 0.1, 2001
x0, w0 = roots_hermite(m)
w0 = w0 / np.sqrt(np.pi)
order = np.argsort(np.abs(x0), kind="stable")
zeps = float(np.sort(w0[order[mbar:]]).sum())
lo, hi = min(SYN_E) - 3 / np.sqrt(tau), max(SYN_E) + 3 / np.sqrt(tau)
lam = np.linspace(lo, hi, npts)
zex = np.array([float(syn_sums(tau, mp.mpf(l))[0]) for l in lam])
bad = zeps / zex > r0
ends = []
i = 0
while i < npts:
    if bad[i]:
        j = i
        while j + 1 < npts and bad[j + 1]:
            j += 1
        ends += [i, j]
        i = j + 1
    else:
        i += 1
lines.append("// stability on the synthetic spectrum: tau = 20, m = 200, mbar = 16, r0 = 0.1,")
lines.append("// 2001-point default grid; first/last grid index of each unstable run")
lines.append(f"inline constexpr double syn_stability_z_eps = {zeps:.17e};")
lines.append(f"inline constexpr std::array<int, {len(ends)}> syn_stability_runs = {{" + ", ".join(map(str, ends)) + "};")
lines.append("")
lines.append("}  // namespace staircase::fixtures")
open("../fixtures/derived_reference.hpp", "w").write("\n".join(lines) + "\n")
print("runs", ends, "zeps", zeps)
