"""Independent numerical oracles used across the test suite.

Everything here recomputes results from the defining formulas by brute
force (dense scans, bisection, finite differences) without touching the
package's solver paths, so a bug in the implementation cannot hide in the
expectation.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def residual_formula(phi, phi_ext, beta, phi_fe=0.0):
    """g(phi) written out from scratch."""
    return phi - phi_ext - phi_fe - (beta / TWO_PI) * np.sin(TWO_PI * np.asarray(phi))


def brute_force_roots(phi_ext, beta, phi_fe=0.0, step=1e-5, refine=True):
    """All roots of g in the analytic window, by dense sign-change scan.

    Brackets are refined by plain bisection so the expected positions are
    good to ~1e-12 (without refinement they are only good to `step`).
    """
    lam = beta / TWO_PI
    c = phi_ext + phi_fe
    lo, hi = c - lam - 1e-9, c + lam + 1e-9
    n = int(math.ceil((hi - lo) / step))
    x = np.linspace(lo, hi, n + 1)
    y = residual_formula(x, phi_ext, beta, phi_fe)

    def refine_bracket(a, b, fa, fb):
        if not refine:
            return 0.5 * (a + b)
        for _ in range(200):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            fm = float(residual_formula(m, phi_ext, beta, phi_fe))
            if fm == 0.0:
                return m
            if (fa < 0.0) == (fm < 0.0):
                a, fa = m, fm
            else:
                b, fb = m, fm
        return a if abs(fa) <= abs(fb) else b

    candidates = np.nonzero((y[:-1] == 0.0) | ((y[:-1] < 0.0) != (y[1:] < 0.0)))[0]
    roots = []
    for i in candidates:
        fa, fb = float(y[i]), float(y[i + 1])
        if fa == 0.0:
            r = float(x[i])
        elif fb == 0.0:
            continue  # owned by the next cell's left endpoint
        else:
            r = refine_bracket(float(x[i]), float(x[i + 1]), fa, fb)
        if not roots or r - roots[-1] > 1e-9:
            roots.append(r)
    if float(y[-1]) == 0.0 and (not roots or x[-1] - roots[-1] > 1e-9):
        roots.append(float(x[-1]))
    return np.array(roots)


def brute_stability(phi, beta):
    """Sign of g' from the formula: +1 stable, -1 unstable, 0 marginal."""
    s = 1.0 - beta * math.cos(TWO_PI * phi)
    if s > 1e-9:
        return 1
    if s < -1e-9:
        return -1
    return 0


def central_difference(f, x, h):
    """Plain symmetric difference quotient."""
    return (f(x + h) - f(x - h)) / (2.0 * h)
