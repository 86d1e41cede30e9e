"""p-value kernels: regularized incomplete beta/gamma, erf, and the distributions built on them."""
from __future__ import annotations

import math

import numpy as np

EPS = 1e-15
FPMIN = 1e-300
MAX_ITER = 10000


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise ValueError("betainc requires 0 <= x <= 1")
    if x == 0.0 or x == 1.0:
        return x
    lbt = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(lbt) * _betacf(a, b, x) / a
    return 1.0 - math.exp(lbt) * _betacf(b, a, 1.0 - x) / b


def _gser(a, x):
    ap = a.copy()
    term = 1.0 / a
    total = term.copy()
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if np.all(np.abs(term) <= np.abs(total) * EPS):
            break
    else:
        raise ArithmeticError("incomplete gamma series did not converge")
    return total


def _gcf(a, x):
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / FPMIN)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, MAX_ITER + 1):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= EPS):
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return h


_lgamma = np.vectorize(math.lgamma, otypes=[float])


def gammainc(a, x):
    """Regularized lower incomplete gamma P(a, x); vectorised over arrays."""
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    if np.any(a <= 0) or np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("gammainc requires a > 0 and x >= 0")
    out = np.zeros(a.shape)
    a1, x1 = a.ravel(), x.ravel()
    res = out.ravel()
    pos = x1 > 0
    ser = pos & (x1 < a1 + 1.0)
    cf = pos & ~ser
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        if ser.any():
            aa, xx = a1[ser], x1[ser]
            res[ser] = _gser(aa, xx) * np.exp(-xx + aa * np.log(xx) - _lgamma(aa))
        if cf.any():
            aa, xx = a1[cf], x1[cf]
            res[cf] = 1.0 - _gcf(aa, xx) * np.exp(-xx + aa * np.log(xx) - _lgamma(aa))
    out = res.reshape(a.shape)
    return float(out) if out.ndim == 0 else out


def erf(x):
    x = np.asarray(x, dtype=float)
    out = np.sign(x) * gammainc(0.5, x * x)
    return float(out) if np.ndim(out) == 0 else out


def normal_cdf(x, mean: float = 0.0, std: float = 1.0):
    z = (np.asarray(x, dtype=float) - mean) / (std * math.sqrt(2.0))
    out = 0.5 * (1.0 + erf(z))
    return float(out) if np.ndim(out) == 0 else out


def t_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(df / 2.0, 0.5, df / (df + t * t)))


def t_sf(t: float, df: float) -> float:
    """P(T >= t)."""
    half = 0.5 * t_two_sided(t, df)
    return half if t >= 0 else 1.0 - half


def f_sf(f: float, d1: float, d2: float) -> float:
    """P(F >= f) for the F distribution."""
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))


def f_cdf(f: float, d1: float, d2: float) -> float:
    if f <= 0:
        return 0.0
    return betainc(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2))


def f_ppf_upper(alpha: float, d1: float, d2: float) -> float:
    """Critical value c with P(F >= c) = alpha, by bisection."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    lo, hi = 0.0, 1.0
    while f_sf(hi, d1, d2) > alpha:
        lo, hi = hi, hi * 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f_sf(mid, d1, d2) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    return 0.5 * (lo + hi)


def kolmogorov_sf(lam: float) -> float:
    """Limiting P(sqrt(n) * D > lam) for the one-sample KS statistic."""
    if lam <= 0:
        return 1.0
    if lam < 1.18:
        # theta-function form converges fast for small arguments
        y = math.exp(-math.pi ** 2 / (8.0 * lam * lam))
        s = sum(y ** ((2 * k - 1) ** 2) for k in range(1, 8))
        p = 1.0 - math.sqrt(2.0 * math.pi) / lam * s
    else:
        p = 2.0 * sum((-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam) for k in range(1, 101))
    return min(1.0, max(0.0, p))
