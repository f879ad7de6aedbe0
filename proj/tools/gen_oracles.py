#!/usr/bin/env python3
"""Generate frozen oracle data for the test suite.

Independent reference implementations (naive O(N^2) trig sums, pure-python
Philox4x64-10 cross-checked against numpy) evaluated once and committed as
C++ include files under tests/oracle_data/.  Rerunning must reproduce the
committed files bit-for-bit.
"""
import math
import os
import textwrap

import numpy as np
from numpy.random import Philox

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "oracle_data")

# ---------------------------------------------------------------------------
# deterministic test vectors: exact small rationals from an integer LCG, so a
# C++ test can rebuild identical inputs with zero floating-point ambiguity.


def lcg_vector(n, seed):
    state = seed & 0xFFFFFFFF
    out = []
    for _ in range(n):
        state = (1103515245 * state + 12345) & 0x7FFFFFFF
        out.append(((state % 2001) - 1000) / 500.0)
    return out


# ---------------------------------------------------------------------------
# trig transforms: naive evaluation of the corrected printed sums.
# s = sqrt(2/(N-1)), M = N-1.  Storage is 1-based slots 1..N.


def dst1_forward(u):
    n_pts = len(u)
    m = n_pts - 1
    s = math.sqrt(2.0 / m)
    out = [0.0] * n_pts
    for k in range(2, n_pts):
        acc = 0.0
        for n in range(2, n_pts):
            acc += u[n - 1] * math.sin(math.pi * (k - 1) * (n - 1) / m)
        out[k - 1] = s * acc
    return out


def dct1_forward(u):
    n_pts = len(u)
    m = n_pts - 1
    s = math.sqrt(2.0 / m)
    out = [0.0] * n_pts
    for k in range(1, n_pts + 1):
        acc = 0.5 * (u[0] + (-1.0) ** (k - 1) * u[n_pts - 1])
        for n in range(2, n_pts):
            acc += u[n - 1] * math.cos(math.pi * (k - 1) * (n - 1) / m)
        out[k - 1] = s * acc
    return out


def dst3_forward(u):
    # D-R pair forward; modes k=1..N-1, slot N zero.
    n_pts = len(u)
    m = n_pts - 1
    s = math.sqrt(2.0 / m)
    out = [0.0] * n_pts
    for k in range(1, n_pts):
        acc = (-1.0) ** (k - 1) * u[n_pts - 1] / 2.0
        for n in range(2, n_pts):
            acc += u[n - 1] * math.sin(math.pi * (k - 0.5) * (n - 1) / m)
        out[k - 1] = s * acc
    return out


def dst2_inverse(c):
    # D-R pair inverse of dst3_forward.
    n_pts = len(c)
    m = n_pts - 1
    s = math.sqrt(2.0 / m)
    out = [0.0] * n_pts
    for n in range(1, n_pts + 1):
        acc = 0.0
        for k in range(1, n_pts):
            acc += c[k - 1] * math.sin(math.pi * (k - 0.5) * (n - 1) / m)
        out[n - 1] = s * acc
    return out


def dct3_forward(u):
    # R-D pair forward; modes k=1..N-1, slot N zero.
    n_pts = len(u)
    m = n_pts - 1
    s = math.sqrt(2.0 / m)
    out = [0.0] * n_pts
    for k in range(1, n_pts):
        acc = u[0] / 2.0
        for n in range(2, n_pts):
            acc += u[n - 1] * math.cos(math.pi * (k - 0.5) * (n - 1) / m)
        out[k - 1] = s * acc
    return out


def dct2_inverse(c):
    # R-D pair inverse of dct3_forward.
    n_pts = len(c)
    m = n_pts - 1
    s = math.sqrt(2.0 / m)
    out = [0.0] * n_pts
    for n in range(1, n_pts + 1):
        acc = 0.0
        for k in range(1, n_pts):
            acc += c[k - 1] * math.cos(math.pi * (k - 0.5) * (n - 1) / m)
        out[n - 1] = s * acc
    return out


def dst1_inverse(c):
    return dst1_forward(c)


def dct1_inverse(c):
    return dct1_forward(c)


def emit_array(f, name, vals):
    f.write(f"inline const std::vector<double> {name} = {{\n")
    body = ", ".join(f"{v:.17e}" for v in vals)
    f.write(textwrap.fill(body, 100, initial_indent="    ",
                          subsequent_indent="    "))
    f.write("};\n")


def gen_trig():
    sizes = [3, 4, 5, 8, 17, 33, 64]
    path = os.path.join(OUT, "trig_oracle.inc")
    with open(path, "w") as f:
        f.write("// Frozen trig-transform oracle (generated by tools/gen_oracles.py).\n")
        f.write("// Inputs are lcg_vector(N, 1000+N); values are the naive O(N^2) sums.\n")
        f.write("#pragma once\n#include <vector>\n\nnamespace trig_oracle {\n")
        f.write("inline const std::vector<int> sizes = {"
                + ", ".join(str(s) for s in sizes) + "};\n")
        for n in sizes:
            u = lcg_vector(n, 1000 + n)
            emit_array(f, f"input_{n}", u)
            emit_array(f, f"dst1_{n}", dst1_forward(u))
            emit_array(f, f"dct1_{n}", dct1_forward(u))
            emit_array(f, f"dst3_{n}", dst3_forward(u))
            emit_array(f, f"dct3_{n}", dct3_forward(u))
            # round trips of the paired kinds, as an oracle-side self check
            rt_dd = dst1_inverse(dst1_forward(list(u)))
            rt_rr = dct1_inverse(dct1_forward(list(u)))
            rt_dr = dst2_inverse(dst3_forward(list(u)))
            rt_rd = dct2_inverse(dct3_forward(list(u)))
            # D-D zeroes endpoints; D-R zeroes slot 1; R-D zeroes slot N.
            err = 0.0
            for i in range(n):
                if 0 < i < n - 1:
                    err = max(err, abs(rt_dd[i] - u[i]), abs(rt_rr[i] - u[i]),
                              abs(rt_dr[i] - u[i]), abs(rt_rd[i] - u[i]))
            err = max(err, abs(rt_rr[0] - u[0]), abs(rt_rr[n - 1] - u[n - 1]))
            err = max(err, abs(rt_dr[n - 1] - u[n - 1]), abs(rt_dr[0]))
            err = max(err, abs(rt_rd[0] - u[0]), abs(rt_rd[n - 1]))
            assert err < 1e-12, (n, err)
        f.write("}  // namespace trig_oracle\n")
    print("wrote", path)


# ---------------------------------------------------------------------------
# Philox4x64-10: pure-python block function cross-checked against numpy.

M0 = 0xD2E7470EE14C6C93
M1 = 0xCA5A826395121157
W0 = 0x9E3779B97F4A7C15
W1 = 0xBB67AE8584CAA73B
MASK = (1 << 64) - 1


def philox4x64_block(ctr, key):
    c = list(ctr)
    k = list(key)
    for _ in range(10):
        prod0 = M0 * c[0]
        hi0, lo0 = (prod0 >> 64) & MASK, prod0 & MASK
        prod1 = M1 * c[2]
        hi1, lo1 = (prod1 >> 64) & MASK, prod1 & MASK
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0]
        k = [(k[0] + W0) & MASK, (k[1] + W1) & MASK]
    return c


def gen_philox():
    cases = [
        ((0, 0, 0, 0), (0, 0)),
        ((MASK, MASK, MASK, MASK), (MASK, MASK)),
        ((0x0123456789ABCDEF, 0xFEDCBA9876543210, 0xDEADBEEFCAFEBABE,
          0x0F0E0D0C0B0A0908), (0x2468ACE013579BDF, 0x1122334455667788)),
        ((7, 0, 0, 0), (42, 99)),
    ]
    # Cross-check block function against numpy's generator stream.  numpy
    # pre-increments the counter, so its first raw block is block(ctr+1).
    def inc256(c):
        out = list(c)
        for i in range(4):
            out[i] = (out[i] + 1) & MASK
            if out[i]:
                break
        return out

    for ctr, key in cases:
        bg = Philox(counter=np.array(ctr, dtype=np.uint64),
                    key=np.array(key, dtype=np.uint64))
        raw = [int(x) for x in bg.random_raw(8)]
        nxt1 = inc256(ctr)
        nxt2 = inc256(nxt1)
        assert raw[:4] == philox4x64_block(nxt1, key), (ctr, key)
        assert raw[4:] == philox4x64_block(nxt2, key), (ctr, key)
    path = os.path.join(OUT, "philox_oracle.inc")
    with open(path, "w") as f:
        f.write("// Frozen Philox4x64-10 known answers (generated by tools/gen_oracles.py,\n")
        f.write("// cross-checked against numpy.random.Philox).\n")
        f.write("#pragma once\n#include <array>\n#include <cstdint>\n\n")
        f.write("namespace philox_oracle {\n")
        f.write("struct Case { std::array<std::uint64_t,4> ctr; "
                "std::array<std::uint64_t,2> key; "
                "std::array<std::uint64_t,4> out; };\n")
        f.write("inline const Case cases[] = {\n")
        for ctr, key in cases:
            out = philox4x64_block(ctr, key)
            def fmt(xs):
                return "{" + ", ".join(f"0x{x:016X}ull" for x in xs) + "}"
            f.write(f"    {{{fmt(ctr)}, {fmt(key)}, {fmt(out)}}},\n")
        f.write("};\n}  // namespace philox_oracle\n")
    print("wrote", path)


# ---------------------------------------------------------------------------
# Stratonovich drift-shift oracle: analytic values for B with cross terms,
# B(a) = [[a2, a1*a2], [3, a1]] acting on 2 noises, evaluated at sample points.
# shift_i = 0.5 * sum_{j,k} B_{jk} dB_{ik}/da_j.


def shift_oracle(a1, a2):
    # dB11/da = (0, 1); dB12/da = (a2, a1); dB21/da = (0,0); dB22/da = (1, 0).
    b = [[a2, a1 * a2], [3.0, a1]]
    db = {
        (0, 0): (0.0, 1.0),
        (0, 1): (a2, a1),
        (1, 0): (0.0, 0.0),
        (1, 1): (1.0, 0.0),
    }
    out = []
    for i in range(2):
        acc = 0.0
        for j in range(2):
            for k in range(2):
                acc += b[j][k] * db[(i, k)][j]
        out.append(0.5 * acc)
    return out


def gen_shift():
    pts = [(0.7, -1.3), (1.5, 0.25), (-2.0, 0.5)]
    path = os.path.join(OUT, "shift_oracle.inc")
    with open(path, "w") as f:
        f.write("// Frozen Ito->Stratonovich drift-shift oracle for\n")
        f.write("// B(a)=[[a2, a1*a2],[3, a1]] (generated by tools/gen_oracles.py).\n")
        f.write("#pragma once\n#include <array>\n\nnamespace shift_oracle {\n")
        f.write("struct Case { double a1, a2, s1, s2; };\n")
        f.write("inline const Case cases[] = {\n")
        for a1, a2 in pts:
            s1, s2 = shift_oracle(a1, a2)
            f.write(f"    {{{a1!r}, {a2!r}, {s1!r}, {s2!r}}},\n")
        f.write("};\n}  // namespace shift_oracle\n")
    print("wrote", path)


def gen_likelihood():
    # Frozen maximum-likelihood hand value for counts N=[12,8] vs E=[10,10]:
    # G^2 = 2*(12*ln 1.2 + 8*ln 0.8).
    g2 = 2 * (12 * math.log(1.2) + 8 * math.log(0.8))
    path = os.path.join(OUT, "likelihood_oracle.inc")
    with open(path, "w") as f:
        f.write("// Frozen G^2 hand value for N=[12,8], E=[10,10]\n")
        f.write("// (generated by tools/gen_oracles.py).\n")
        f.write("#pragma once\n\nnamespace likelihood_oracle {\n")
        f.write(f"inline constexpr double g2_12_8 = {g2!r};\n")
        f.write("}  // namespace likelihood_oracle\n")
    print("wrote", path)


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    gen_trig()
    gen_philox()
    gen_shift()
    gen_likelihood()
