"""Shapiro-Wilk W test, Royston's approximation (valid for 3 <= n <= 5000).

Weights come from Blom-style expected normal order statistics with the
two (one, for n <= 5) largest weights replaced by Royston's polynomial
corrections; the p-value uses his normalizing transforms of W.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm

from .errors import DegenerateSampleError, ValidationError

# Royston (1995) polynomial coefficients, highest power first.
_C1 = [-2.706056, 4.434685, -2.07119, -0.147981, 0.221157, 0.0]
_C2 = [-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0]
_C3 = [-0.0006714, 0.025054, -0.39978, 0.544]
_C4 = [-0.0020322, 0.062767, -0.77857, 1.3822]
_C5 = [0.0038915, -0.083751, -0.31082, -1.5861]
_C6 = [0.0030302, -0.082676, -0.4803]

_PI6 = 1.90985931710274  # 6/pi
_STQR = 1.04719755119660  # arcsin(sqrt(3/4))


def _weights(n: int) -> np.ndarray:
    m = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
        return a
    sm2 = float(m @ m)
    rsn = 1.0 / math.sqrt(n)
    an = np.polyval(_C1, rsn) + m[-1] / math.sqrt(sm2)
    if n > 5:
        an1 = np.polyval(_C2, rsn) + m[-2] / math.sqrt(sm2)
        phi = (sm2 - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * an ** 2 - 2 * an1 ** 2)
    else:
        an1 = None
        phi = (sm2 - 2 * m[-1] ** 2) / (1 - 2 * an ** 2)
    a = m / math.sqrt(phi)
    a[-1], a[0] = an, -an
    if an1 is not None:
        a[-2], a[1] = an1, -an1
    return a


def swilk(values: np.ndarray) -> tuple[float, float]:
    """Return (W, p_value) for a 1-D sample."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    if n < 3 or n > 5000:
        raise ValidationError(f"Shapiro-Wilk requires 3 <= n <= 5000, got {n}")
    ssq = float(np.sum((x - x.mean()) ** 2))
    if ssq <= 0.0:
        raise DegenerateSampleError("sample has zero variance")
    a = _weights(n)
    w = float((a @ x) ** 2 / ssq)
    w = min(w, 1.0)

    if n == 3:
        p = _PI6 * (math.asin(math.sqrt(w)) - _STQR)
        return w, min(max(p, 0.0), 1.0)
    if 1.0 - w < 1e-15:
        return w, 1.0
    if n <= 11:
        gamma = 0.459 * n - 2.273
        y = -math.log(gamma - math.log1p(-w))
        mu = np.polyval(_C3, n)
        sigma = math.exp(np.polyval(_C4, n))
    else:
        ln_n = math.log(n)
        y = math.log1p(-w)
        mu = np.polyval(_C5, ln_n)
        sigma = math.exp(np.polyval(_C6, ln_n))
    z = (y - mu) / sigma
    return w, float(norm.sf(z))
