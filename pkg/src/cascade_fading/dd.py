"""Vectorized double-double arithmetic (~31 significant digits).

The residue expansions in specfun cancel catastrophically between terms at
large arguments while every individual term stays well inside double range;
roughly 30 digits of working precision recover the lost accuracy without
any arbitrary-precision dependency.  Numbers are (hi, lo) pairs of float64
scalars or ndarrays with |lo| <= ulp(hi)/2; the error-free transforms are
the classic Dekker/Knuth ones (no FMA assumed).

Includes exp, log, pow, and a gamma function via the shifted Stirling
series with exact Bernoulli coefficients; unlike Spouge/Lanczos fits, the
Stirling series has no internal cancellation, so it actually delivers the
extended precision.
"""

from __future__ import annotations

import math

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1

# ln 2 and pi as double-double constants
_LN2 = (0.6931471805599453, 2.3190468138462996e-17)
_PI = (3.141592653589793, 1.2246467991473532e-16)
_SQRT_2PI = (2.5066282746310007, -1.8328579980459167e-16)


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def two_prod(a, b):
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def dd(x):
    """Lift a float/ndarray to double-double."""
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    return x, np.zeros_like(x) if not np.isscalar(x) else 0.0


def from_int(v: int):
    """Exact-ish dd from a (possibly large) python integer."""
    hi = float(v)
    lo = float(v - int(hi))
    return hi, lo


def add(x, y):
    xh, xl = x
    yh, yl = y
    sh, sl = two_sum(xh, yh)
    sl = sl + (xl + yl)
    return quick_two_sum(sh, sl)


def neg(x):
    return -x[0], -x[1]


def sub(x, y):
    return add(x, neg(y))


def mul(x, y):
    xh, xl = x
    yh, yl = y
    ph, pl = two_prod(xh, yh)
    pl = pl + (xh * yl + xl * yh)
    return quick_two_sum(ph, pl)


def div(x, y):
    xh, xl = x
    yh, yl = y
    q1 = xh / yh
    th, tl = two_prod(q1, yh)
    rh, rl = add((xh, xl), (-th, -tl))
    rl = rl - q1 * yl
    q2 = (rh + rl) / yh
    th, tl = two_prod(q2, yh)
    r2h, r2l = add((rh, rl), (-th, -tl))
    r2l = r2l - q2 * yl
    q3 = (r2h + r2l) / yh
    s, e = quick_two_sum(q1, q2)
    return quick_two_sum(s, e + q3)


def recip(y):
    one = (np.ones_like(y[0]) if not np.isscalar(y[0]) else 1.0,
           np.zeros_like(y[0]) if not np.isscalar(y[0]) else 0.0)
    return div(one, y)


def abs_hi(x):
    return np.abs(x[0]) if not np.isscalar(x[0]) else abs(x[0])


def ldexp(x, n):
    if np.isscalar(x[0]):
        return math.ldexp(x[0], n), math.ldexp(x[1], n)
    return np.ldexp(x[0], n), np.ldexp(x[1], n)


def exp(x):
    """dd exponential; argument reduction by ln 2, Taylor core."""
    xh, xl = x
    scalar = np.isscalar(xh)
    n = np.round(xh / _LN2[0]) if not scalar else round(xh / _LN2[0])
    rh, rl = add((xh, xl), neg(mul((float(n) if scalar else n, 0.0 * n if not scalar else 0.0), _LN2)))
    # Taylor sum of e^r, |r| <= 0.347
    term = (np.ones_like(rh) if not scalar else 1.0,
            np.zeros_like(rh) if not scalar else 0.0)
    total = term
    for k in range(1, 26):
        term = mul(term, (rh, rl))
        term = div(term, (float(k), 0.0))
        total = add(total, term)
    if scalar:
        return ldexp(total, int(n))
    hi = np.ldexp(total[0], n.astype(np.int64))
    lo = np.ldexp(total[1], n.astype(np.int64))
    return hi, lo


def log(x):
    """dd natural log by one Newton step from the double seed."""
    xh, xl = x
    t = np.log(xh) if not np.isscalar(xh) else math.log(xh)
    e = exp((-t if np.isscalar(t) else -t, 0.0 * t if not np.isscalar(t) else 0.0))
    u = mul((xh, xl), e)
    # log(x) = t + log(x e^-t) ~= t + (u - 1) - (u - 1)^2/2
    d = add(u, (-1.0 if np.isscalar(u[0]) else -np.ones_like(u[0]),
                0.0 if np.isscalar(u[0]) else np.zeros_like(u[0])))
    corr = sub(d, mul(mul(d, d), (0.5, 0.0)))
    return add((t, 0.0 * t if not np.isscalar(t) else 0.0), corr)


def pow_dd(x, b):
    """x**b for dd x > 0 and double exponent b."""
    return exp(mul(log(x), (b, 0.0)))


def _sin_taylor(r):
    term = r
    total = r
    r2 = mul(r, r)
    for k in range(1, 21):
        term = mul(term, r2)
        term = div(term, (-float((2 * k) * (2 * k + 1)), 0.0))
        total = add(total, term)
    return total


def sin_pi(x):
    """sin(pi x) for scalar dd x, exact integer reduction."""
    xh, xl = x
    n = round(xh)
    rh, rl = add((xh, xl), (-float(n), 0.0))
    # |r| <= 0.5: sin(pi(n + r)) = (-1)^n sin(pi r)
    val = _sin_taylor(mul(_PI, (rh, rl)))
    return neg(val) if n % 2 else val


# Bernoulli numbers B_2..B_40 as exact (numerator, denominator) pairs.
_BERNOULLI = [
    (1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730), (7, 6),
    (-3617, 510), (43867, 798), (-174611, 330), (854513, 138),
    (-236364091, 2730), (8553103, 6), (-23749461029, 870),
    (8615841276005, 14322), (-7709321041217, 510), (2577687858367, 6),
    (-26315271553053477373, 1919190), (2929993913841559, 6),
    (-261082718496449122051, 13530),
]
_STIRLING_COEFFS = [
    div(from_int(p), mul(from_int(q), (float(2 * j * (2 * j - 1)), 0.0)))
    for j, (p, q) in enumerate(_BERNOULLI, start=1)
]
_STIRLING_SHIFT = 36.0


def _lgamma_stirling(x):
    """ln Gamma for scalar dd x >= _STIRLING_SHIFT."""
    lx = log(x)
    res = mul(sub(x, (0.5, 0.0)), lx)
    res = sub(res, x)
    res = add(res, log(_SQRT_2PI))
    inv = recip(x)
    inv2 = mul(inv, inv)
    p = inv
    for c in _STIRLING_COEFFS:
        res = add(res, mul(c, p))
        p = mul(p, inv2)
        if abs_hi(mul(c, p)) < 1e-36 * abs(res[0]):
            break
    return res


def gamma(x):
    """Gamma function for scalar dd x (non-pole), ~1e-30 relative."""
    xh = x[0]
    if xh <= 0 and abs(xh - round(xh)) < 1e-13:
        raise ZeroDivisionError(f"dd gamma pole at {xh}")
    if xh < 0.5:
        # reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        s = sin_pi(x)
        g = gamma(sub((1.0, 0.0), x))
        return div(_PI, mul(s, g))
    m = 0
    y = x
    while y[0] < _STIRLING_SHIFT:
        m += 1
        y = add(x, (float(m), 0.0))
    res = exp(_lgamma_stirling(y))
    for i in range(m):
        res = div(res, add(x, (float(i), 0.0)))
    return res


def to_float(x):
    return x[0] + x[1]
