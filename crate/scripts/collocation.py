#!/usr/bin/env python3
"""Compute Hecke eigenvalues and the Petersson norm of a level-1 Maass cusp form.

Uses automorphy collocation in multiprecision (mpmath). The spectral
parameter is refined by a secant iteration on the residual of the first
(unused) collocation equation. Output is the JSON form file consumed by
`thetalift --form`.

Conventions:
  * f(u+iv) = sum_{n != 0} rho(n) W_{0,iR}(4 pi |n| v) e(n u) with R = r/2,
    W_{0,iR}(4 pi |n| v) = 2 sqrt(|n| v) K_{iR}(2 pi |n| v).
  * rho(1) = 1, rho(n) = mu(n) / sqrt(n) for n >= 1, rho(-n) = parity * rho(n),
    so mu(n) is the Hecke eigenvalue normalized with mu(1) = 1.
  * norm_sq = int_{SL2(Z)\\H} |f|^2 du dv / v^2.

Usage: collocation.py R_GUESS PARITY OUT.json [PMAX]
"""
import json
import sys

import mpmath as mp


def pullback(x, y):
    x = mp.mpf(x)
    y = mp.mpf(y)
    while True:
        x = x - mp.nint(x)
        r2 = x * x + y * y
        if r2 >= 1 - mp.mpf(10) ** (-mp.mp.dps + 5):
            return x, y
        x, y = -x / r2, y / r2


def kappa(R, n, y):
    # scaled by exp(pi R / 2) to keep magnitudes near 1
    return mp.sqrt(y) * mp.besselk(1j * R, 2 * mp.pi * n * y).real * mp.exp(mp.pi * R / 2)


def trig(parity, t):
    return mp.cos(t) if parity > 0 else mp.sin(t)


def build_system(R, parity, M, Q, Y):
    xs = [(m - mp.mpf(1) / 2) / (2 * Q) for m in range(1, Q + 1)]
    pts = [pullback(x, Y) for x in xs]
    kstar = [[kappa(R, l, ys) * trig(parity, 2 * mp.pi * l * xsr) for l in range(1, M + 1)]
             for (xsr, ys) in pts]
    kY = [kappa(R, n, Y) for n in range(1, M + 1)]
    V = mp.matrix(M, M)
    for n in range(1, M + 1):
        tn = [trig(parity, 2 * mp.pi * n * xs[m]) for m in range(Q)]
        for l in range(1, M + 1):
            s = mp.fsum(kstar[m][l - 1] * tn[m] for m in range(Q))
            V[n - 1, l - 1] = 2 * s / Q
        V[n - 1, n - 1] -= kY[n - 1]
    return V


def solve(R, parity, M, Q, Y):
    V = build_system(R, parity, M, Q, Y)
    # a_1 = 1; use rows 2..M to solve for a_2..a_M, row 1 is the residual
    A = mp.matrix(M - 1, M - 1)
    b = mp.matrix(M - 1, 1)
    for i in range(1, M):
        b[i - 1] = -V[i, 0]
        for j in range(1, M):
            A[i - 1, j - 1] = V[i, j]
    sol = mp.lu_solve(A, b)
    a = [mp.mpf(1)] + [sol[i] for i in range(M - 1)]
    resid = mp.fsum(V[0, j] * a[j] for j in range(M))
    return a, resid


def primes_upto(n):
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p ** 0.5) + 1))]


def petersson_norm_sq(R, parity, a, nterms=12, nodes=40):
    """int over the fundamental domain of |f|^2 dudv/v^2, returned unscaled."""
    b = [4 * a[n - 1] for n in range(1, nterms + 1)]

    def overlap(n, m, u0):
        # int_{u0}^{1/2} trig(2 pi n u) trig(2 pi m u) du
        def prim(u):
            if n == m:
                s = mp.sin(4 * mp.pi * n * u) / (8 * mp.pi * n)
                return u / 2 + (s if parity > 0 else -s)
            d = (mp.sin(2 * mp.pi * (n - m) * u) / (4 * mp.pi * (n - m)))
            p = (mp.sin(2 * mp.pi * (n + m) * u) / (4 * mp.pi * (n + m)))
            return d + p if parity > 0 else d - p
        return prim(mp.mpf(1) / 2) - prim(u0)

    def integrand(v):
        u0 = mp.sqrt(1 - v * v) if v < 1 else mp.mpf(0)
        g = [mp.sqrt(v) * mp.besselk(1j * R, 2 * mp.pi * n * v).real * mp.exp(mp.pi * R / 2)
             for n in range(1, nterms + 1)]
        s = mp.mpf(0)
        for n in range(nterms):
            for m in range(nterms):
                s += b[n] * b[m] * g[n] * g[m] * overlap(n + 1, m + 1, u0)
        return 2 * s / (v * v)

    edges = [mp.sqrt(3) / 2, mp.mpf(1)] + [mp.mpf(1) + k * mp.mpf(1) / 2 for k in range(1, 19)]
    total = mp.mpf(0)
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += mp.quad(integrand, [lo, hi], method='gauss-legendre', maxdegree=4)
    return total * mp.exp(-mp.pi * R)


def cheb_interpolant(fun, lo, hi, width=4.0, nodes=32):
    """Piecewise Chebyshev interpolant of a real function on [lo, hi]."""
    import numpy as np
    edges = np.arange(lo, hi + width, width)
    pieces = []
    k = np.arange(nodes)
    t = np.cos(np.pi * (k + 0.5) / nodes)
    for a, b in zip(edges[:-1], edges[1:]):
        xs = 0.5 * (a + b) + 0.5 * (b - a) * t
        vals = np.array([float(fun(mp.mpf(float(x)))) for x in xs])
        coef = np.polynomial.chebyshev.chebfit(t, vals, nodes - 1)
        pieces.append((a, b, coef))

    def ev(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, b, coef in pieces:
            m = (x >= a) & (x < b)
            if m.any():
                out[m] = np.polynomial.chebyshev.chebval((2 * x[m] - a - b) / (b - a), coef)
        return out
    return ev


def extend_coefficients(R, parity, a_small, nmax, Y, Q=32768):
    """Coefficients a_1..a_nmax from one DFT at height Y, using f(z) = f(z*)."""
    import numpy as np
    L0 = len(a_small)
    Rf = float(R)
    g = cheb_interpolant(lambda x: mp.besselk(1j * R, x).real * mp.exp(mp.pi * R / 2),
                         5.0, 5.0 + 4.0 * 40)
    xs = (np.arange(1, Q + 1) - 0.5) / (2 * Q)
    x = xs.copy()
    y = np.full(Q, float(Y))
    for _ in range(10000):
        x = x - np.round(x)
        r2 = x * x + y * y
        m = r2 < 1.0 - 1e-15
        if not m.any():
            break
        x[m], y[m] = -x[m] / r2[m], y[m] / r2[m]
    trig_np = np.cos if parity > 0 else np.sin
    F = np.zeros(Q)
    for l in range(1, L0 + 1):
        arg = 2 * np.pi * l * y
        F += float(a_small[l - 1]) * np.sqrt(y) * np.where(arg < 165.0, g(arg), 0.0) \
            * trig_np(2 * np.pi * l * x)
    out = np.zeros(nmax)
    for lo in range(1, nmax + 1, 256):
        ns = np.arange(lo, min(lo + 256, nmax + 1))
        out[ns - 1] = (2.0 / Q) * (trig_np(2 * np.pi * np.outer(ns, xs)) @ F)
    mp.mp.dps = 20
    kap = np.array([float(mp.sqrt(Y) * mp.besselk(1j * R, 2 * mp.pi * n * Y).real
                          * mp.exp(mp.pi * R / 2)) for n in range(1, nmax + 1)])
    mp.mp.dps = 50
    return out / kap, np.abs(kap)


def main():
    import numpy as np
    R0 = mp.mpf(sys.argv[1])
    parity = int(sys.argv[2])
    out = sys.argv[3]
    pmax = int(sys.argv[4]) if len(sys.argv) > 4 else 10000
    mp.mp.dps = 50
    M, Q = 40, 50

    R_prev, R_cur = R0 - mp.mpf('1e-9'), R0
    f_prev = solve(R_prev, parity, M, Q, mp.mpf('0.35'))[1]
    for it in range(8):
        f_cur = solve(R_cur, parity, M, Q, mp.mpf('0.35'))[1]
        if f_cur == f_prev:
            break
        R_next = R_cur - f_cur * (R_cur - R_prev) / (f_cur - f_prev)
        print(f"secant {it}: R={mp.nstr(R_next, 25)} resid={mp.nstr(f_cur, 5)}", file=sys.stderr)
        R_prev, f_prev, R_cur = R_cur, f_cur, R_next
        if abs(R_cur - R_prev) < mp.mpf('1e-22'):
            break
    R = R_cur

    a1, _ = solve(R, parity, M, Q, mp.mpf('0.35'))
    a2, _ = solve(R, parity, M, Q, mp.mpf('0.32'))
    L0 = 24
    small_diff = max(abs(a1[n] - a2[n]) for n in range(L0))
    print(f"R={mp.nstr(R, 25)} max |a_n(Y1)-a_n(Y2)|, n<=24: {mp.nstr(small_diff, 3)}",
          file=sys.stderr)

    nmax = pmax
    e1, k1 = extend_coefficients(R, parity, a1[:L0], nmax, 3.0e-4)
    e2, k2 = extend_coefficients(R, parity, a1[:L0], nmax, 2.7e-4)
    ext = np.where(k1 >= k2, e1, e2)
    agree = np.abs(e1 - e2)
    primes = primes_upto(pmax)
    ext_vs_solve = max(abs(ext[n] - float(a1[n])) for n in range(L0))
    hecke_err = 0.0
    for p in primes:
        if p * p <= nmax:
            hecke_err = max(hecke_err, abs(ext[p - 1] ** 2 - 1 - ext[p * p - 1]))
        for q in primes:
            if q <= p or p * q > nmax:
                break
            hecke_err = max(hecke_err, abs(ext[p - 1] * ext[q - 1] - ext[p * q - 1]))
    print(f"extension: |ext - solve| (n<=24) = {ext_vs_solve:.3e}, "
          f"max |Y1 - Y2| = {agree.max():.3e}, hecke relation error = {hecke_err:.3e}",
          file=sys.stderr)

    norm_sq = petersson_norm_sq(R, parity, a1)
    print(f"norm_sq={mp.nstr(norm_sq, 20)}", file=sys.stderr)

    hecke = {}
    for p in primes:
        hecke[str(p)] = float(a1[p - 1]) if p <= L0 else float(ext[p - 1])
    data = {
        "source": "Computed with the collocation method (scripts/collocation.py): spectral "
                  "parameter and c(n), n <= 24, from a 40x40 multiprecision solve; larger "
                  "primes from a 65536-point transform at heights 3.0e-4 and 2.7e-4.",
        "precision": float(max(hecke_err, ext_vs_solve, 1e-15)),
        "R": float(R),
        "r": float(2 * R),
        "parity": parity,
        "c1": 1.0,
        "norm_sq": float(norm_sq),
        "hecke": hecke,
    }
    with open(out, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
