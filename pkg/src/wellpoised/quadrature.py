"""Node/weight rules on [0, 1]: tanh-sinh (double exponential) and Gauss-Jacobi."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .numctx import PrecisionContext

# exp() of anything below this underflows in double precision
MAX_LOGISTIC_ARG = 700.0


@lru_cache(maxsize=64)
def tanh_sinh(n: int, u_max: float = 120.0):
    """Tanh-sinh rule on [0, 1] with ``n`` nodes, in log form.

    Returns (log x, log(1 - x), log w).  Nodes are x = 1/(1 + exp(-pi sinh t))
    on a uniform t grid; both endpoints are reached with full relative accuracy
    through the logarithms, which is what singular endpoint weights need.
    """
    if n < 3:
        raise ValueError("tanh-sinh needs at least 3 nodes")
    u_max = min(float(u_max), MAX_LOGISTIC_ARG)
    t_max = np.arcsinh(u_max / np.pi)
    t = np.linspace(-t_max, t_max, n)
    h = t[1] - t[0]
    u = np.pi * np.sinh(t)
    logx = -np.logaddexp(0.0, -u)
    log1mx = -np.logaddexp(0.0, u)
    logw = np.log(h * np.pi * np.cosh(t)) + logx + log1mx
    for arr in (logx, log1mx, logw):
        arr.setflags(write=False)
    return logx, log1mx, logw


def gauss_jacobi01(n: int, alpha: float, beta: float):
    """Gauss rule for the weight x**alpha (1 - x)**beta on [0, 1] (double precision)."""
    y, w = roots_jacobi(n, beta, alpha)
    x = (1 + y) / 2
    return x, w / 2 ** (alpha + beta + 1)


def gauss_jacobi01_mp(n: int, alpha, beta, ctx: PrecisionContext):
    """Gauss rule for x**alpha (1 - x)**beta on [0, 1] at context precision.

    Double-precision nodes are polished by Newton steps on the Jacobi
    polynomial evaluated with the three-term recurrence.
    """
    m = ctx.mp
    al, be = m.mpf(beta), m.mpf(alpha)  # Jacobi (1-y)^al (1+y)^be with x = (1+y)/2
    y0, _ = roots_jacobi(n, float(al), float(be))

    def jacobi_and_derivative(y):
        p_prev = m.mpf(1)
        p = (al - be + (al + be + 2) * y) / 2
        if n == 0:
            return p_prev, m.mpf(0)
        for j in range(2, n + 1):
            c = 2 * j + al + be
            a1 = 2 * j * (j + al + be) * (c - 2)
            a2 = (c - 1) * (al * al - be * be)
            a3 = (c - 2) * (c - 1) * c
            a4 = 2 * (j + al - 1) * (j + be - 1) * c
            p_prev, p = p, ((a2 + a3 * y) * p - a4 * p_prev) / a1
        # derivative from the standard identity
        c = 2 * n + al + be
        dp = (n * (al - be - c * y) * p + 2 * (n + al) * (n + be) * p_prev) / (c * (1 - y * y))
        return p, dp

    tol = m.mpf(2) ** (-ctx.precision_bits + 4)
    ys = []
    dps = []
    for y in y0:
        y = m.mpf(float(y))
        for _ in range(60):
            p, dp = jacobi_and_derivative(y)
            step = p / dp
            y -= step
            if abs(step) < tol:
                break
        p, dp = jacobi_and_derivative(y)
        ys.append(y)
        dps.append(dp)
    const = (
        m.gamma(n + al + 1) * m.gamma(n + be + 1) / (m.gamma(n + al + be + 1) * m.factorial(n))
        * m.mpf(2) ** (al + be + 1)
    )
    xs = [(1 + y) / 2 for y in ys]
    ws = [const / ((1 - y * y) * dp * dp) / m.mpf(2) ** (al + be + 1) for y, dp in zip(ys, dps)]
    return xs, ws
