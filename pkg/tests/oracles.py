"""
Independent reference computations used to freeze expected values.

Nothing here imports the spectral pipeline: coefficients of the canonical
lift are recomputed from the analytic curve with high-precision central
finite differences (mpmath), and scalar problems are solved by bisection or
adaptive quadrature.
"""

from fractions import Fraction

import mpmath as mp

H_DEFAULT = 2 * mp.pi / 8192


def fornberg_weights(order, offsets):
    """Exact (rational) finite-difference weights for the ``order``-th derivative at 0."""
    offsets = [Fraction(o) for o in offsets]
    n = len(offsets)
    c = [[Fraction(0)] * (order + 1) for _ in range(n)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    c4 = offsets[0]
    for i in range(1, n):
        mn = min(i, order)
        c2 = Fraction(1)
        c5 = c4
        c4 = offsets[i]
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return [c[i][order] for i in range(n)]


def _stencil(order, accuracy=8):
    half = (order + 1) // 2 - 1 + accuracy // 2
    offsets = list(range(-half, half + 1))
    return offsets, fornberg_weights(order, offsets)


STENCILS = {k: _stencil(k) for k in (1, 2, 3)}


def fd(f, t, order, h=H_DEFAULT):
    offsets, weights = STENCILS[order]
    total = None
    for o, w in zip(offsets, weights):
        if w == 0:
            continue
        w = mp.mpf(w.numerator) / w.denominator
        term = [w * v for v in f(t + o * h)]
        total = term if total is None else [a + b for a, b in zip(total, term)]
    return [v / h ** order for v in total]


def det3(a, b, c):
    return mp.det(mp.matrix([[a[i], b[i], c[i]] for i in range(3)]))


def perturbed_ellipse(eps, k, reverse=True):
    """Analytic lift, already oriented (t -> -t) like the pipeline does."""
    eps = mp.mpf(eps)

    def g(t):
        s = -t if reverse else t
        rho = 1 + eps * mp.cos(k * s)
        return [mp.mpf(1), rho * mp.cos(s), rho * mp.sin(s)]

    return g


def canonical(g, h=H_DEFAULT):
    def y(t):
        delta = det3(fd(g, t, 2, h), fd(g, t, 1, h), g(t))
        scale = mp.cbrt(1 / delta)
        return [scale * v for v in g(t)]

    return y


def general_coefficients(y, t, h=H_DEFAULT):
    d1, d2, d3 = fd(y, t, 1, h), fd(y, t, 2, h), fd(y, t, 3, h)
    m = mp.matrix([[d2[i], d1[i], y(t)[i]] for i in range(3)])
    sol = mp.lu_solve(m, mp.matrix([-v for v in d3]))
    return sol[0], sol[1], sol[2]


def alpha_beta(g, t, h=H_DEFAULT, dps=50):
    """alpha(t), beta(t) of the lift g via finite differences at precision ``dps``."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        y = canonical(g, h)

        def alpha(s):
            return [general_coefficients(y, s, h)[1] / 2]

        c2, c1, c0 = general_coefficients(y, t, h)
        a = c1 / 2
        da = fd(alpha, t, 1, h)[0]
        return a, c0 - da, c2


def bisect_root(f, lo, hi, tol=1e-14):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
