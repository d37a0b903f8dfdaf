"""The multiple integrals J_k(a, b) and S(z), by quadrature and Monte Carlo.

Q_k is never formed as 1 - (...): inside the integrators it is built from
the positive-term recursion Q_k = (1 - x_1) + x_1 x_2 Q_{k-2}(x_3, ...) in log
space, which keeps full relative accuracy where Q_k vanishes on the boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import betaln

from .numctx import PrecisionContext, make_context
from .quadrature import gauss_jacobi01, tanh_sinh

__all__ = [
    "ABParams",
    "SParams",
    "McConfig",
    "QuadResult",
    "McResult",
    "IntegrabilityError",
    "eval_Q",
    "integrand",
    "eval_J_quad",
    "eval_J_complex",
    "eval_J_mc",
    "eval_S_mc",
    "MAX_QUAD_DIM",
]

MAX_QUAD_DIM = 4
_BATCH = 1 << 17


class IntegrabilityError(ValueError):
    pass


@dataclass(frozen=True)
class ABParams:
    """Integral parameters (a0; a1..ak; b1..bk)."""

    a0: object
    a: tuple
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("a and b must be non-empty and of equal length")

    @property
    def k(self) -> int:
        return len(self.a)

    def integrable(self) -> bool:
        """Each endpoint weight x^(a_j-1) (1-x)^(b_j-a_j-1) is integrable."""
        return all(float(aj) > 0 and float(bj) - float(aj) > 0 for aj, bj in zip(self.a, self.b))

    def well_poised(self) -> bool:
        """b_1 + a_2 = b_2 + a_3 = ... = b_{k-1} + a_k."""
        sums = [self.b[j] + self.a[j + 1] for j in range(self.k - 1)]
        return all(s == sums[0] for s in sums)

    def as_floats(self) -> "ABParams":
        return ABParams(float(self.a0), tuple(map(float, self.a)), tuple(map(float, self.b)))


@dataclass(frozen=True)
class SParams:
    a: tuple
    b: tuple
    c: tuple
    r: tuple
    z: float

    def __post_init__(self):
        for name in ("a", "b", "c", "r"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        k = len(self.a)
        if len(self.b) != k or k == 0:
            raise ValueError("a and b must be non-empty and of equal length")
        if len(self.c) != len(self.r) or not self.r:
            raise ValueError("c and r must be non-empty and of equal length")
        r = [int(x) for x in self.r]
        if r[0] < 1 or any(x >= y for x, y in zip(r, r[1:])) or r[-1] != k:
            raise ValueError("need 1 <= r_1 < r_2 < ... < r_m = k")
        if float(self.z) > 1:
            raise ValueError("S(z) is evaluated only for z <= 1")

    @property
    def k(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 42
    chunks: int = 16

    def __post_init__(self):
        if self.samples < 1 or self.chunks < 1:
            raise ValueError("samples and chunks must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class QuadResult:
    value: object
    error: float
    nodes: int
    rule: str
    convergence: str = "verified"

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class McResult:
    estimate: float
    stderr: float
    samples: int
    seed: int
    chunks: int = field(default=1)


# -- Q_k ---------------------------------------------------------------------

def _q_nested(x):
    k = x.shape[-1]
    v = np.ones(x.shape[:-1])
    for j in range(k - 1, -1, -1):
        v = 1 - v * x[..., j]
    return v


def _q_front(x):
    # Q_k(x_1..x_k) = 1 - x_1 Q_{k-1}(x_2..x_k)
    if x.shape[-1] == 0:
        return np.ones(x.shape[:-1])
    return 1 - x[..., 0] * _q_front(x[..., 1:])


def _q_back(x):
    # Q_k(x_1..x_k) = Q_{k-1}(x_1..x_{k-1}) + (-1)^k x_1...x_k
    k = x.shape[-1]
    q = np.ones(x.shape[:-1])
    prod = np.ones(x.shape[:-1])
    for j in range(k):
        prod = prod * x[..., j]
        q = q + prod if (j + 1) % 2 == 0 else q - prod
    return q


_Q_VARIANTS = {"nested": _q_nested, "recursive_front": _q_front, "recursive_back": _q_back}


def eval_Q(x, variant: str = "nested"):
    """Q_k(x_1, ..., x_k); ``x`` may be a sequence or an array with coordinates on the last axis."""
    try:
        fn = _Q_VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}; expected one of {sorted(_Q_VARIANTS)}") from None
    arr = np.asarray(x, dtype=float)
    out = fn(arr if arr.ndim else arr.reshape(1))
    return float(out) if np.ndim(out) == 0 else out


def _log_q(logx, log1mx):
    """log Q_k from per-coordinate log x_j, log(1 - x_j) (broadcastable lists)."""
    k = len(logx)
    # suffix values: logQ of (x_j, ..., x_k); Q of empty suffix is 1
    nxt = 0.0  # log Q_{suffix from j+1}
    nxt2 = None  # log Q_{suffix from j+2}
    for j in range(k - 1, -1, -1):
        if j == k - 1:
            cur = log1mx[j]
        else:
            tail = logx[j] + logx[j + 1] + (nxt2 if nxt2 is not None else 0.0)
            cur = np.logaddexp(log1mx[j], tail)
        nxt2, nxt = nxt, cur
    return nxt


def integrand(ab: ABParams, x: Sequence[float]) -> float:
    """prod x_j^(a_j-1) (1-x_j)^(b_j-a_j-1) / Q_k(x)^a0 at an interior point."""
    x = np.asarray(x, dtype=float)
    if x.shape != (ab.k,):
        raise ValueError(f"expected {ab.k} coordinates")
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("integrand is evaluated at interior points only")
    val = eval_Q(x) ** (-float(ab.a0))
    for xj, aj, bj in zip(x, ab.a, ab.b):
        val *= xj ** (float(aj) - 1) * (1 - xj) ** (float(bj) - float(aj) - 1)
    return float(val)


# -- quadrature ----------------------------------------------------------------

def _default_nodes(k: int) -> int:
    return {1: 257, 2: 193, 3: 129, 4: 65}.get(k, 65)


def _u_max(exponents) -> float:
    lo = min(float(np.real(e)) for e in exponents) + 1
    return 45.0 / max(min(lo, 1.0), 0.05)


def _tensor_sum(log_factors, logq_fn, a0, *, dtype=float):
    """Sum exp(sum_j log_factors[j] - a0 * logQ) over the tensor grid.

    ``log_factors[j]`` holds (logx_j, log1mx_j, logw_j + weight exponents);
    the first coordinate is looped in slices to bound memory.
    """
    k = len(log_factors)
    n0 = len(log_factors[0][0])
    rest = int(np.prod([len(f[0]) for f in log_factors[1:]])) if k > 1 else 1
    step = max(1, _BATCH * 8 // max(rest, 1))
    total = np.zeros((), dtype=dtype)
    for start in range(0, n0, step):
        sl = slice(start, start + step)
        shape = lambda j: tuple(-1 if i == j else 1 for i in range(k))
        lx = [f[0][sl].reshape(shape(0)) if j == 0 else f[0].reshape(shape(j)) for j, f in enumerate(log_factors)]
        l1 = [f[1][sl].reshape(shape(0)) if j == 0 else f[1].reshape(shape(j)) for j, f in enumerate(log_factors)]
        lw = sum(f[2][sl].reshape(shape(0)) if j == 0 else f[2].reshape(shape(j)) for j, f in enumerate(log_factors))
        logq = logq_fn(lx, l1)
        total = total + np.exp(lw - a0 * logq).sum()
    return total


def _j_tanh_sinh(a0, a, b, n):
    # Q_k vanishes as x_1 -> 1, so Q^(-a0) deepens the (1 - x) endpoint singularities
    exps = [aj - 1 for aj in a] + [bj - aj - 1 - np.real(a0) for aj, bj in zip(a, b)]
    logx, log1mx, logw = tanh_sinh(n, _u_max(exps))
    factors = [(logx, log1mx, logw + (aj - 1) * logx + (bj - aj - 1) * log1mx) for aj, bj in zip(a, b)]
    dtype = complex if any(isinstance(v, complex) for v in (a0, *a, *b)) else float
    return _tensor_sum(factors, _log_q, a0, dtype=dtype)


def _j_gauss_jacobi(a0, a, b, n):
    factors = []
    for aj, bj in zip(a, b):
        x, w = gauss_jacobi01(n, aj - 1, bj - aj - 1)
        factors.append((np.log(x), np.log1p(-x), np.log(w)))
    return _tensor_sum(factors, _log_q, a0)


_RULES = {"tanh-sinh": _j_tanh_sinh, "gauss-jacobi": _j_gauss_jacobi}


def _convergence_status(ab: ABParams) -> str:
    """'verified' when a known sufficient condition for convergence holds."""
    a0 = float(ab.a0)
    a = [float(v) for v in ab.a]
    b = [float(v) for v in ab.b]
    if ab.k == 1:
        return "verified" if b[0] - a[0] - a0 > 0 else "divergent"
    if not ab.well_poised():
        return "unverified convergence"
    # pull back to h = (h0; h1..h_{k+2}) and require every consecutive pair margin
    h0 = b[0] + a[1] - 1
    h = [a0, *a, 1 + h0 - b[-1]]
    pairs = min(1 + h0 - h[j] - h[j + 1] for j in range(len(h) - 1))
    ok6 = all(1 + h0 - h[j] > h[j - 1] > 0 for j in range(2, ab.k + 2))
    return "verified" if pairs > 0 and ok6 else "unverified convergence"


def _nested_estimate(fn, f, n):
    """Value at n nodes and an error estimate from the n, n/2, n/4 nested rules.

    With geometric convergence the next error is about d1**2 / d2, where d1, d2
    are the last two differences.
    """
    fine = fn(f.a0, f.a, f.b, n)
    mid = fn(f.a0, f.a, f.b, (n + 1) // 2)
    d1 = abs(fine - mid)
    if (n + 1) // 2 % 2 == 1 and (n + 1) // 2 >= 9:
        d2 = abs(mid - fn(f.a0, f.a, f.b, ((n + 1) // 2 + 1) // 2))
        est = d1 * d1 / d2 if d2 > d1 else d1
    else:
        est = d1
    return fine, est + 64 * np.finfo(float).eps * abs(fine) * math.sqrt(n ** len(f.a))


def eval_J_quad(
    ab: ABParams,
    nodes_per_dim: int | None = None,
    ctx: PrecisionContext | None = None,
    *,
    rule: str = "tanh-sinh",
    target_rel: float | None = None,
    max_nodes: int | None = None,
) -> QuadResult:
    """J_k(a, b) by a tensor-product rule.

    The endpoint weights x^(a_j-1) (1-x)^(b_j-a_j-1) are carried by the rule
    (exactly for Gauss-Jacobi, through logarithms for tanh-sinh).  With
    ``target_rel`` the tanh-sinh node count is raised by factors of about 1.5
    until the estimated relative error meets it or ``max_nodes`` is reached.
    """
    ctx = ctx or make_context()
    if ab.k > MAX_QUAD_DIM:
        raise ValueError(f"quadrature supports k <= {MAX_QUAD_DIM}; use eval_J_mc")
    if not ab.integrable():
        raise IntegrabilityError("need a_j > 0 and b_j - a_j > 0 for every j")
    try:
        fn = _RULES[rule]
    except KeyError:
        raise ValueError(f"unknown rule {rule!r}") from None
    f = ab.as_floats()
    n = nodes_per_dim or _default_nodes(ab.k)
    if rule == "tanh-sinh":
        if n % 2 == 0:
            n += 1  # odd counts nest: the half rule reuses every other node
        cap = max_nodes or 2 * n + 1
        while True:
            value, err = _nested_estimate(fn, f, n)
            if target_rel is None or err <= target_rel * abs(value) or n >= cap:
                break
            n = min(cap, (3 * n // 2) | 1)
            n += (n + 1) // 2 % 2 == 0 and 2  # keep the half rule odd
    else:
        value = fn(f.a0, f.a, f.b, n)
        half = fn(f.a0, f.a, f.b, max(2, n // 2))
        err = abs(value - half) + 64 * np.finfo(float).eps * abs(value) * math.sqrt(n**ab.k)
    return QuadResult(ctx.mpf(float(value)), float(err), n, rule, _convergence_status(ab))


def eval_J_complex(a0, a, b, nodes_per_dim: int | None = None) -> complex:
    """J_k at complex parameters by tanh-sinh (double precision, no error estimate).

    Used along Barnes contours, where the parameters carry an imaginary shift.
    """
    a0 = complex(a0)
    a = [complex(v) for v in a]
    b = [complex(v) for v in b]
    n = nodes_per_dim or _default_nodes(len(a))
    return complex(_j_tanh_sinh(a0, a, b, n))


# -- Monte Carlo -------------------------------------------------------------

def _chunk_sizes(mc: McConfig):
    base, extra = divmod(mc.samples, mc.chunks)
    return [base + (1 if i < extra else 0) for i in range(mc.chunks)]


def _log_beta_draws(rng, alpha, beta, size):
    """log X and log(1 - X) for X ~ Beta(alpha, beta), from two gamma draws."""
    g1 = rng.standard_gamma(alpha, size)
    g2 = rng.standard_gamma(beta, size)
    with np.errstate(divide="ignore"):
        ls = np.log(g1 + g2)
        return np.log(g1) - ls, np.log(g2) - ls


def _run_chunks(mc: McConfig, draw_chunk):
    """Fixed-order reduction of per-chunk (count, mean, M2)."""
    streams = np.random.SeedSequence(mc.seed).spawn(mc.chunks)
    count, mean, m2 = 0, 0.0, 0.0
    for ss, size in zip(streams, _chunk_sizes(mc)):
        if size == 0:
            continue
        rng = np.random.Generator(np.random.PCG64(ss))
        c_n, c_mean, c_m2 = 0, 0.0, 0.0
        remaining = size
        while remaining:
            b = min(_BATCH, remaining)
            vals = draw_chunk(rng, b)
            b_mean = float(np.mean(vals))
            b_m2 = float(np.sum((vals - b_mean) ** 2))
            c_n, c_mean, c_m2 = _merge(c_n, c_mean, c_m2, b, b_mean, b_m2)
            remaining -= b
        count, mean, m2 = _merge(count, mean, m2, c_n, c_mean, c_m2)
    var = m2 / (count - 1) if count > 1 else 0.0
    return mean, math.sqrt(var / count)


def _merge(n1, mean1, m21, n2, mean2, m22):
    n = n1 + n2
    if n1 == 0:
        return n2, mean2, m22
    delta = mean2 - mean1
    mean = mean1 + delta * n2 / n
    return n, mean, m21 + m22 + delta * delta * n1 * n2 / n


def eval_J_mc(ab: ABParams, mc: McConfig = McConfig()) -> McResult:
    """Importance-sampled Monte Carlo estimate of J_k(a, b).

    Coordinates are drawn from the Beta densities of the endpoint weights.  Part
    of Q_k^(-a0) is folded into the first coordinate: since Q_k >= 1 - x_1, the
    factor (1 - x_1)^(-f) with f = min(a0, (b_1 - a_1)/2) moves into its Beta
    density and the averaged quantity becomes (1 - x_1)^f / Q_k^a0.  For k = 1
    and a0 <= (b_1 - a_1)/2 this is exact and the estimate has zero variance.
    """
    if not ab.integrable():
        raise IntegrabilityError("need a_j > 0 and b_j - a_j > 0 for every j")
    f = ab.as_floats()
    a0, a, b = f.a0, f.a, f.b
    fold = min(a0, (b[0] - a[0]) / 2) if a0 > 0 else 0.0
    shapes = [(a[0], b[0] - a[0] - fold)] + [(aj, bj - aj) for aj, bj in zip(a[1:], b[1:])]
    log_norm = sum(betaln(p, q) for p, q in shapes)

    def draw(rng, size):
        lx, l1 = [], []
        for p, q in shapes:
            u, v = _log_beta_draws(rng, p, q, size)
            lx.append(u)
            l1.append(v)
        logq = _log_q(lx, l1)
        return np.exp(log_norm + fold * l1[0] - a0 * logq)

    mean, se = _run_chunks(mc, draw)
    return McResult(mean, se, mc.samples, mc.seed, mc.chunks)


def eval_S_mc(sp: SParams, mc: McConfig = McConfig()) -> McResult:
    """Monte Carlo estimate of S(z) with Beta-distributed coordinates."""
    a = [float(v) for v in sp.a]
    b = [float(v) for v in sp.b]
    if not all(aj > 0 and bj - aj > 0 for aj, bj in zip(a, b)):
        raise IntegrabilityError("need a_j > 0 and b_j - a_j > 0 for every j")
    z = float(sp.z)
    c = [float(v) for v in sp.c]
    cuts = set(int(r) for r in sp.r)
    log_norm = sum(betaln(aj, bj - aj) for aj, bj in zip(a, b))

    def draw(rng, size):
        logf = np.full(size, log_norm)
        prod = np.ones(size)
        comp = np.zeros(size)  # 1 - prod, built from positive terms
        ci = iter(c)
        for j, (p, q) in enumerate(zip(a, b), start=1):
            lx, l1 = _log_beta_draws(rng, p, q - p, size)
            x, one_minus_x = np.exp(lx), np.exp(l1)
            comp = comp + prod * one_minus_x
            prod = prod * x
            if j in cuts:
                denom = (1 - z) + z * comp if z >= 0 else 1 - z * prod
                logf -= next(ci) * np.log(denom)
        return np.exp(logf)

    mean, se = _run_chunks(mc, draw)
    return McResult(mean, se, mc.samples, mc.seed, mc.chunks)
