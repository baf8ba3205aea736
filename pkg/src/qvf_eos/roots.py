"""Bracketed scalar root finding.

Bisection safeguarded by a secant (regula falsi) trial step.  The secant
candidate is only accepted when it falls well inside the current bracket,
so the bracket shrinks at least geometrically and the method never loses
the root.
"""
from __future__ import annotations

import math

from .errors import NonConvergence

_EPS = 2.220446049250313e-16


def bracketed_root(f, lo, hi, rtol=_EPS, atol=0.0, maxiter=400):
    """Find a root of ``f`` in ``[lo, hi]``.

    ``f(lo)`` and ``f(hi)`` must have opposite signs (or one of them be 0).
    Iteration stops once the bracket is narrower than
    ``atol + rtol * |x|`` or ``f`` vanishes exactly; the returned point is
    whichever of the final bracket ends and midpoint has the smallest |f|.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")

    use_secant = True
    for _ in range(maxiter):
        width = hi - lo
        mid = lo + 0.5 * width
        if width <= atol + rtol * max(abs(lo), abs(hi)) or not lo < mid < hi:
            fmid = f(mid)
            return min((abs(flo), lo), (abs(fmid), mid), (abs(fhi), hi))[1]

        x = mid
        if use_secant and math.isfinite(flo) and math.isfinite(fhi):
            s = lo - flo * width / (fhi - flo)
            # keep the trial step away from the bracket ends
            if lo + 0.05 * width < s < hi - 0.05 * width:
                x = s
        fx = f(x)
        if fx == 0.0:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, flo):
            remaining = (hi - x) / width
            lo, flo = x, fx
        else:
            remaining = (x - lo) / width
            hi, fhi = x, fx
        # fall back to plain bisection for one step when the secant stalls
        use_secant = x == mid or remaining <= 0.5
    raise NonConvergence(f"no convergence in {maxiter} iterations on [{lo}, {hi}]")


def expand_upper(f, lo, start, factor=2.0, limit=1e300):
    """Grow ``start`` geometrically until ``f`` changes sign relative to ``f(lo)``."""
    flo = f(lo)
    hi = start
    while hi < limit:
        if math.copysign(1.0, f(hi)) != math.copysign(1.0, flo):
            return hi
        hi *= factor
    raise NonConvergence("could not bracket a root")
