"""Self-contained Bessel functions of the first kind and their zeros.

``J_m(x)`` comes from the ascending series for small arguments and from
Miller's backward recurrence, normalised by ``J_0 + 2 sum J_2k = 1``,
elsewhere.  Zeros are bracketed on a coarse grid and refined by bisection.
"""
from __future__ import annotations

import math

import numpy as np

SERIES_LIMIT = 8.0


def _series(m: int, x: float) -> float:
    half = 0.5 * x
    term = half ** m / math.factorial(m)
    total = term
    q = -half * half
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + m))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > 3:
            return total


def _miller(m: int, x: float) -> tuple[float, float]:
    """``(J_m(x), J_{m+1}(x))`` by backward recurrence; accurate for any x > 0."""
    start = int(max(m, x)) + 30 + int(math.sqrt(40.0 * max(m, x)))
    start += start % 2
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    jm = jm1 = 0.0
    for n in range(start, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds J_{n-1}
        if n - 1 == m:
            jm = j_cur
        if n - 1 == m + 1:
            jm1 = j_cur
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
            jm *= 1e-250
            jm1 *= 1e-250
    norm += j_cur
    return jm / norm, jm1 / norm


def besselj(m: int, x: float) -> float:
    """``J_m(x)`` for integer ``m >= 0`` and real ``x``."""
    if m < 0:
        raise ValueError("order must be non-negative")
    if x < 0:
        return (-1) ** m * besselj(m, -x)
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= SERIES_LIMIT:
        return _series(m, x)
    return _miller(m, x)[0]


def besselj_array(m: int, x) -> np.ndarray:
    return np.array([besselj(m, float(v)) for v in np.atleast_1d(x)])


def neumann_sum(x: float, terms: int | None = None) -> float:
    """``J_0^2 + 2 sum_k J_k^2``, identically 1; used as an internal consistency check."""
    terms = terms or int(x) + 40
    return besselj(0, x) ** 2 + 2.0 * sum(besselj(k, x) ** 2 for k in range(1, terms))


def bessel_zeros(m: int, count: int | None = None, upper: float | None = None,
                 xtol: float = 1e-13) -> np.ndarray:
    """Positive zeros of ``J_m`` in ascending order.

    Returns the first ``count`` zeros, or all zeros below ``upper``.
    """
    if count is None and upper is None:
        raise ValueError("give count or upper")
    zeros: list[float] = []
    step = 0.1
    # j_{m,1} > m, so the scan may start just below m
    a = max(0.5 * m, step)
    fa = besselj(m, a)
    while True:
        if count is not None and len(zeros) >= count:
            break
        if upper is not None and a >= upper:
            break
        b = a + step
        fb = besselj(m, b)
        if fa == 0.0:
            zeros.append(a)
        elif fa * fb < 0.0:
            lo, hi, flo = a, b, fa
            while hi - lo > xtol * max(1.0, hi):
                mid = 0.5 * (lo + hi)
                fm = besselj(m, mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
        a, fa = b, fb
    out = np.array(zeros)
    if upper is not None:
        out = out[out < upper]
    return out
