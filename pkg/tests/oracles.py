"""Independent reference computations used by the tests."""

import numpy as np
from scipy.integrate import quad
from scipy.special import ellipkm1


def l1_kernel_elliptic(a: complex) -> float:
    """iint_D |1/(w-a) - 1/w| dA via the angular integral in closed form.

    On |w| = r the angular integral of 1/|w - a| is 4K(m)/(r + |a|) with
    m = 4 r |a| / (r + |a|)**2, and |1/(w-a) - 1/w| = |a| / (|w| |w-a|).
    """
    s = abs(a)
    # K(m) = ellipkm1(1 - m) with 1 - m = ((r - s)/(r + s))**2, accurate near m = 1
    f = lambda r: 4 * ellipkm1(((r - s) / (r + s)) ** 2) / (r + s)
    # the log singularity of K at r = |a| sits at an interval end
    lo, _ = quad(f, 0, s, limit=400, epsabs=0, epsrel=1e-11)
    hi, _ = quad(f, s, 1, limit=400, epsabs=0, epsrel=1e-11)
    return s * (lo + hi)


def _graded(lo, hi, n_panels, n_gauss, toward):
    """Gauss-Legendre panels on [lo, hi] shrinking geometrically toward one end."""
    frac = 2.0 ** -np.arange(n_panels - 1, -1, -1)
    frac = np.concatenate([[0.0], frac])
    edges = lo + (hi - lo) * frac if toward == "lo" else hi - (hi - lo) * frac[::-1]
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    a, b = edges[:-1, None], edges[1:, None]
    return ((a + b) / 2 + (b - a) / 2 * x).ravel(), ((b - a) / 2 * w).ravel()


def dense_polar_rule(a: complex, n_r: int = 1000, n_theta: int = 1000):
    """About n_r * n_theta nodes; panels split and graded at |a| in r and arg a in theta."""
    s, phi = abs(a), np.angle(a)
    g = 20
    npan_r = n_r // (2 * g)
    r1, w1 = _graded(0.0, s, npan_r, g, "hi")
    r2, w2 = _graded(s, 1.0, npan_r, g, "lo")
    r, wr = np.concatenate([r1, r2]), np.concatenate([w1, w2])
    npan_t = n_theta // (2 * g)
    t1, v1 = _graded(phi - np.pi, phi, npan_t, g, "hi")
    t2, v2 = _graded(phi, phi + np.pi, npan_t, g, "lo")
    th, wt = np.concatenate([t1, t2]), np.concatenate([v1, v2])
    z = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    w = (wr[:, None] * r[:, None] * wt[None, :]).ravel()
    return z, w


def l1_kernel_dense(a: complex) -> float:
    z, w = dense_polar_rule(a)
    return float(np.dot(w, np.abs(1 / (z - a) - 1 / z)))


def grid_search_l1(psi0, rho, quad, center=0j, half=2.0, levels=6, n=21):
    """Nested 2-D grid search for min over complex xi of ||psi0 + xi rho||_1."""
    rule = quad.rule([p for p, _ in psi0.poles] + [p for p, _ in rho.poles])
    p0, r = psi0(rule.nodes), rho(rule.nodes)
    best, d = center, np.inf
    for _ in range(levels):
        xs = np.linspace(-half, half, n)
        xi = best + xs[:, None] + 1j * xs[None, :]
        vals = np.array([[np.dot(rule.weights, np.abs(p0 + x * r)) for x in row] for row in xi])
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        best, d = xi[i, j], vals[i, j]
        half *= 3 / (n - 1)
    return float(d), complex(best)
