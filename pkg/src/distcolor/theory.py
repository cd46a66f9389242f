"""Scaling functionals for the chromatic number of random geometric graphs.

``xi`` is only evaluated for indicator windows ``phi = 1_W``. There the
defining integral equation reduces to ``vol(W) * H(e^s) = 1 / (t f_max)`` and
``xi = vol(W) * e^s``, so everything comes down to inverting ``H`` on
``[1, inf)``. ``t = math.inf`` is accepted wherever ``t`` is.
"""

import math

import mpmath

from .errors import DomainError

H_TOL = 1e-12


def k_n(n, nrd):
    """``ln n / ln(ln n / (n r^d))``, defined below the connectivity regime."""
    if not n > 1:
        raise DomainError(f"k_n needs n > 1, got {n}")
    ln = math.log(n)
    if not 0 < nrd < ln:
        raise DomainError(f"k_n needs 0 < n r^d < ln n = {ln:.6g}, got {nrd}")
    return ln / math.log(ln / nrd)


def _h(x):
    # log1p keeps the (x - 1)^2 / 2 behaviour near 1; about one ulp of error
    return x * math.log1p(x - 1.0) - (x - 1.0)


def h_function(x):
    """``H(x) = x ln x - x + 1``, rounded once from 40-digit arithmetic."""
    if not x > 0:
        raise DomainError(f"H is defined for x > 0, got {x}")
    if math.isinf(x):
        return math.inf
    with mpmath.workdps(40):
        v = mpmath.mpf(x)
        return float(v * mpmath.log(v) - v + 1)


def h_inverse_upper(c, tol=H_TOL):
    """The unique ``y >= 1`` with ``H(y) = c``, by bisection."""
    if not c >= 0:
        raise DomainError(f"H^-1 needs c >= 0, got {c}")
    if c == 0:
        return 1.0
    if math.isinf(c):
        return math.inf
    lo, hi = 1.0, 2.0
    while _h(hi) < c:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _h(mid) < c:
            lo = mid
        else:
            hi = mid
    return _polish(lo, c)


def _polish(y, c, steps=4):
    """Nearest float to ``H^-1(c)`` near the bisection estimate ``y``.

    A few 40-digit Newton steps (``H'(y) = ln y``) remove what is left of
    the bracket width, then the float neighbours are ranked by 40-digit
    ``|H(x) - c|``.
    """
    with mpmath.workdps(40):
        target = mpmath.mpf(c)

        def miss(x):
            x = mpmath.mpf(x)
            return abs(x * mpmath.log(x) - x + 1 - target)

        z = mpmath.mpf(y)
        if y > 1.0:
            for _ in range(3):
                z -= (z * mpmath.log(z) - z + 1 - target) / mpmath.log(z)
        y = max(float(z), 1.0)
        cands = [y]
        up = down = y
        for _ in range(steps):
            up = math.nextafter(up, math.inf)
            down = math.nextafter(down, 1.0)
            cands.extend((up, down))
        return min((x for x in cands if x >= 1.0), key=lambda x: (miss(x), x))


def _check_positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")


def xi_indicator(volume_W, t, f_max):
    """``xi(1_W, t)``; equals ``vol(W)`` at ``t = inf``."""
    _check_positive(volume_W=volume_W, t=t, f_max=f_max)
    if math.isinf(t):
        return float(volume_W)
    return volume_W * h_inverse_upper(1.0 / (t * f_max * volume_W))


def c_ratio_indicator(l, d, t, volume_W=1.0, f_max=1.0):
    """``xi(1_W, l^d t) / xi(1_W, t)``, which lies in ``[l^-d, 1]``.

    This is the single-window value, not the supremum over all admissible
    ``phi``.
    """
    _check_positive(l=l, d=d)
    return xi_indicator(volume_W, l**d * t, f_max) / xi_indicator(volume_W, t, f_max)


def theory_table(ts, l, d, volume_W=1.0, f_max=1.0):
    """Rows ``(t, xi, c_ratio)`` for each ``t`` in ``ts``."""
    return [
        (t, xi_indicator(volume_W, t, f_max), c_ratio_indicator(l, d, t, volume_W, f_max))
        for t in ts
    ]
