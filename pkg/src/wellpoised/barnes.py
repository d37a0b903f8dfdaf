"""Euler integral, Barnes contour integral and Gauss series for the 2F1 triad,
and the contour recursion that lowers the dimension of J_k by one.

Contour integrals are taken over t(y) = -t0 + g(y) + i y.  For 0 < z < 1 the
path bends to the right (g > 0 for |y| beyond a short vertical stretch); all
poles of the gamma factors lie on the real axis, so the bent path is
equivalent to the vertical line while |z|^Re(t) supplies exponential decay.
Where the integrand decays only like a power of t (z = 1, or the odd-k
recursion), the part beyond |y| = T is added from a least-squares fit of the
asymptotic expansion t^P (c_0 + c_1/t + ...), integrated in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import loggamma

from .hyperseries import levin_sum
from .multint import ABParams, eval_J_complex, eval_J_quad
from .numctx import PrecisionContext, make_context, to_hp
from .quadrature import gauss_jacobi01_mp

__all__ = [
    "ContourConfig",
    "EpsilonSign",
    "BarnesResult",
    "Lemma3Result",
    "TruncationError",
    "BranchMismatchError",
    "euler_side",
    "barnes_side",
    "gauss_2f1_side",
    "lemma3_check",
]

_VERTICAL = 2.0  # |y| below which the bent path stays vertical
_TAIL_TERMS = 10


class TruncationError(RuntimeError):
    """The part of the contour beyond |Im t| = T is not negligible: increase T."""


class BranchMismatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class ContourConfig:
    t0: float
    T: float | None = None
    nodes: int = 16

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if self.T is not None and not self.T > _VERTICAL:
            raise ValueError(f"T must exceed {_VERTICAL}")
        if self.nodes < 2:
            raise ValueError("need at least two nodes per panel")


@dataclass(frozen=True)
class EpsilonSign:
    value: int
    k: int

    def __post_init__(self):
        if self.k % 2 == 0 and self.value != 0:
            raise ValueError("epsilon must be 0 for even k")
        if self.k % 2 == 1 and self.value not in (1, -1):
            raise ValueError("epsilon must be +1 or -1 for odd k")

    @classmethod
    def default(cls, k: int) -> "EpsilonSign":
        return cls(0 if k % 2 == 0 else 1, k)


@dataclass(frozen=True)
class BarnesResult:
    value: object
    tail_bound: float
    T: float
    branch_values: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class Lemma3Result:
    lhs: float
    rhs: float
    rhs_imag: float
    tail_correction: float
    tail_bound: float
    lhs_error: float

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)


def _strip_ok(a0, a, b, z, t0):
    # off z = 1 the integrand decays exponentially and b > a suffices
    return a0 > t0 > 0 and a > t0 and (b > a0 + a if z == 1 else b > a)


# -- Euler side and Gauss series ----------------------------------------------

def euler_side(a0, a, b, z, ctx: PrecisionContext | None = None, *, max_nodes: int = 512):
    """int_0^1 x^(a-1) (1-x)^(b-a-1) (1-zx)^(-a0) dx by Gauss-Jacobi, doubling n until settled."""
    ctx = ctx or make_context()
    m = ctx.mp
    a0, a, b, z = (to_hp(v, ctx) for v in (a0, a, b, z))
    if not (a > 0 and b - a > 0):
        raise ValueError("need a > 0 and b - a > 0")
    if z > 1:
        raise ValueError("euler_side needs z <= 1")
    if z == 1:
        # (1 - x)^(-a0) folds into the weight: a Beta integral
        if not b - a - a0 > 0:
            raise ValueError("diverges at z = 1 unless b > a + a0")
        return m.beta(a, b - a - a0)
    work = ctx.extended(16)
    tol = m.mpf(ctx.rel_tol)
    prev = None
    n = 16
    while n <= max_nodes:
        xs, ws = gauss_jacobi01_mp(n, a - 1, b - a - 1, work)
        val = m.fsum(w * (1 - z * x) ** (-a0) for x, w in zip(xs, ws))
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return ctx.mpf(val)
        prev = val
        n *= 2
    raise TruncationError(f"Gauss-Jacobi did not settle with {max_nodes} nodes")


def gauss_2f1_side(a0, a, b, z, ctx: PrecisionContext | None = None):
    """Gamma(b-a)/Gamma(a0) * sum_nu Gamma(a0+nu) Gamma(a+nu) / (nu! Gamma(b+nu)) z^nu."""
    ctx = ctx or make_context()
    a0, a, b, z = (to_hp(v, ctx) for v in (a0, a, b, z))
    if abs(z) > 1:
        raise ValueError("the Gauss series needs |z| <= 1")
    if z == 1 and not b - a0 - a > 0:
        raise ValueError("the series diverges at z = 1 unless b > a0 + a")
    if z == -1 and not b - a0 - a > -1:
        raise ValueError("the series diverges at z = -1 unless b > a0 + a - 1")
    work = ctx.extended(ctx.precision_bits + 32)
    w = work.mp
    a0w, aw, bw, zw = (w.mpf(v) for v in (a0, a, b, z))
    first = w.gamma(bw - aw) * w.gamma(aw) / w.gamma(bw)
    res = levin_sum(first, lambda nu: (a0w + nu) * (aw + nu) / ((nu + 1) * (bw + nu)) * zw, work, alternating=bool(z < 0))
    if not res.converged:
        raise TruncationError("Gauss series did not converge")
    return ctx.mpf(res.value)


# -- contour machinery ---------------------------------------------------------

class _Path:
    """t(y) = -t0 + c * s(|y|) + i y with s smooth, zero on |y| <= ~_VERTICAL."""

    def __init__(self, t0, bend, lib):
        self.t0 = t0
        self.c = bend
        self.lib = lib
        self.s0 = (-_VERTICAL + lib.sqrt(_VERTICAL**2 + 1)) / 2

    def __call__(self, y):
        L = self.lib
        v = abs(y) - _VERTICAL
        r = L.sqrt(v * v + 1)
        g = self.c * ((v + r) / 2 - self.s0)
        dg = self.c * (1 + v / r) / 2 * (1 if y >= 0 else -1)
        return -self.t0 + g + 1j * y, dg + 1j


@lru_cache(maxsize=32)
def _gl_nodes_mp(n: int, prec: int):
    ctx = PrecisionContext(max(prec, 64), 2.0 ** (-max(prec, 64) + 8))
    xs, ws = gauss_jacobi01_mp(n, 0, 0, ctx)
    return tuple(xs), tuple(ws)


@lru_cache(maxsize=32)
def _gl_nodes_np(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _panel_edges(direction: int, first_width: float, outer_width: float = 1.0):
    """Panel boundaries going outward from y = 0: narrow near 0, ``outer_width`` beyond |y| = 2."""
    y = 0.0
    width = min(first_width, outer_width)
    while True:
        nxt = y + (width if y < _VERTICAL else outer_width)
        yield direction * y, direction * nxt
        y = nxt


def _tail_fit_integral(ys, fs, t_of_y, P, direction, T, lib):
    """Fit f(y) ~ t^P sum_j c_j (tT/t)^j on samples and integrate it from |y| = T to infinity.

    Returns (tail integral, bound); the bound is the change when three
    expansion terms are dropped.
    """
    tT = t_of_y(direction * T)[0]
    ests = []
    for M in (_TAIL_TERMS, _TAIL_TERMS - 3):
        if lib is np:
            ts = np.array([t_of_y(y)[0] for y in ys])
            A = np.stack([ts**P * (tT / ts) ** j for j in range(M)], axis=1)
            coef, *_ = np.linalg.lstsq(A, np.asarray(fs), rcond=None)
            ests.append(complex(sum(c * tT**j * (-(tT ** (P - j + 1)) / (P - j + 1)) / 1j for j, c in enumerate(coef))))
        else:
            m = lib
            ts = [t_of_y(y)[0] for y in ys]
            A = m.matrix([[t**P * (tT / t) ** j for j in range(M)] for t in ts])
            coef, _ = m.qr_solve(A, m.matrix(list(fs)))
            # int_{y=T}^{inf} t^q dy = -tT^(q+1) / (i (q+1)); the same form serves both directions
            ests.append(m.fsum(coef[j] * tT**j * (-(tT ** (P - j + 1)) / (P - j + 1)) / m.mpc(0, 1) for j in range(M)))
    return ests[0], float(abs(ests[0] - ests[1]))


def _integrate_side(f, direction, nodes_fn, first_width, tol_abs, *, T=None, slow=None, max_T=400.0, lib=np, outer_width=1.0):
    """Integrate f(y) dy from 0 outward in ``direction``.

    Fixed ``T``: integrate to T.  Otherwise march panels until two in a row
    contribute less than ``tol_abs``.  ``slow`` = (P, t_of_y) requests a
    power-tail correction beyond T.  Returns (integral, T, tail_bound, tail_correction).
    """
    xs, ws = nodes_fn
    total = 0
    quiet = 0
    samples_y, samples_f = [], []
    for lo, hi in _panel_edges(direction, first_width, outer_width):
        top = abs(hi)
        width = hi - lo
        vals = [f(lo + width * x) for x in xs]
        part = sum(w * v for w, v in zip(ws, vals)) * width
        total += part
        if slow is not None and T is not None and top > T / 2:
            samples_y.extend(lo + width * x for x in xs)
            samples_f.extend(vals)
        if T is not None:
            if top >= T - 1e-12:
                break
            continue
        edge = max(abs(v) for v in vals[-2:])
        if abs(part) < tol_abs and edge < tol_abs:
            quiet += 1
            if quiet >= 2:
                return total, top, float(abs(part)), 0
        else:
            quiet = 0
        if top > max_T:
            raise TruncationError(f"contour integrand still significant at |Im t| = {top:.0f}; increase T")
    T_reached = top
    if slow is not None:
        P, t_of_y = slow
        tail, bound = _tail_fit_integral(samples_y, samples_f, t_of_y, P, direction, T_reached, lib)
        return total + tail, T_reached, bound, tail
    edge = float(max(abs(v) for v in vals[-2:]))
    return total, T_reached, edge, 0


def _barnes_branch(a0, a, b, z, arg, cc, ctx):
    work = ctx.extended(24)
    w = work.mp
    a0, a, b, z = (w.mpf(v) for v in (a0, a, b, z))
    t0 = w.mpf(cc.t0)
    if 0 < z < 1:
        bend = min(40.0, max(1.0, 2.0 / math.log(1 / float(z))))
        max_T = _VERTICAL + 4 * (math.log(1 / ctx.rel_tol) + 10) / (bend * math.log(1 / float(z)))
    else:
        bend = 0.0
        max_T = 400.0
    path = _Path(t0, w.mpf(bend), w)
    lnz = w.log(abs(z))
    pref = w.gamma(b - a) / w.gamma(a0) / (2 * w.pi * w.mpc(0, 1))
    phase = w.mpc(lnz, arg)

    def f(y):
        t, dt = path(w.mpf(y))
        g = w.gamma(a0 + t) * w.gamma(a + t) * w.gamma(-t) * w.rgamma(b + t)
        return pref * g * w.exp(t * phase) * dt

    nodes = _gl_nodes_mp(cc.nodes, work.precision_bits)
    first = max(0.05, min(0.5, float(min(t0, a0 - t0, a - t0))))
    tol_abs = w.mpf(ctx.rel_tol) * 1e-3
    total = w.mpc(0)
    bound = 0.0
    T_used = 0.0
    for direction in (1, -1):
        slow_side = z == 1 and arg * direction < 0
        slow = (float(a0 + a - b - 1), path) if slow_side else None
        T = cc.T if (cc.T is not None or not slow_side) else 60.0
        # exp(i arg Re t) turns over c*pi times per unit y on the bent path
        part, T_side, tb, _ = _integrate_side(
            f, direction, nodes, first, tol_abs, T=T, slow=slow, lib=w, outer_width=1.0 / max(1.0, bend), max_T=max_T
        )
        if direction < 0:
            part = -part
        total += part
        bound += tb
        T_used = max(T_used, T_side)
    return total, bound, T_used


def barnes_side(a0, a, b, z, cc: ContourConfig, ctx: PrecisionContext | None = None) -> BarnesResult:
    """Gamma(b-a)/Gamma(a0) (1/2 pi i) int Gamma(a0+t) Gamma(a+t) Gamma(-t) / Gamma(b+t) (-z)^t dt.

    (-z)^t = |z|^t exp(i t arg(-z)), with arg(-z) = 0 for z < 0 and both
    arg(-z) = +pi and -pi evaluated for 0 < z <= 1; the two must agree.
    """
    ctx = ctx or make_context()
    m = ctx.mp
    fa0, fa, fb, fz = float(a0), float(a), float(b), float(z)
    if fz == 0 or fz > 1:
        raise ValueError("barnes_side needs a non-zero z <= 1")
    if not _strip_ok(fa0, fa, fb, fz, cc.t0):
        raise ValueError("need a0 > t0 > 0, a > t0, b > a, and b > a0 + a at z = 1")
    if fz < 0:
        val, bound, T = _barnes_branch(a0, a, b, z, 0, cc, ctx)
        branches = {"0": val}
    else:
        pi = ctx.extended(24).mp.pi
        vp, bp, Tp = _barnes_branch(a0, a, b, z, pi, cc, ctx)
        vm, bm, Tm = _barnes_branch(a0, a, b, z, -pi, cc, ctx)
        bound, T = max(bp, bm), max(Tp, Tm)
        scale = max(abs(vp), m.mpf(1))
        if abs(vp - vm) > max(100 * bound, 1e3 * ctx.rel_tol) * scale:
            raise BranchMismatchError(f"arg(-z) = +pi and -pi disagree: {vp} vs {vm}")
        val = (vp + vm) / 2
        branches = {"+pi": vp, "-pi": vm}
    if bound > max(1e-8, 1e3 * ctx.rel_tol) * max(abs(val), 1):
        raise TruncationError(f"tail bound {bound:.3g} exceeds tolerance; increase T")
    return BarnesResult(ctx.mpf(val.real), float(bound), float(T), {k: ctx.mp.mpc(v) for k, v in branches.items()})


# -- dimension-lowering recursion ------------------------------------------------

def _inner_nodes(k_inner: int, y: float) -> int:
    n = {1: 257, 2: 129, 3: 65}[k_inner] + int(65 * abs(y)) * (2 if k_inner == 1 else 1)
    return n | 1


def lemma3_check(
    ab: ABParams,
    eps: EpsilonSign,
    cc: ContourConfig,
    ctx: PrecisionContext | None = None,
    *,
    tol: float = 1e-9,
) -> Lemma3Result:
    """Compare J_k(a, b) with its contour representation over J_{k-1} at shifted parameters.

    The inner J_{k-1}(a0+t; a1+t..a_{k-1}+t; b1+t..b_{k-1}+t) is computed by
    tanh-sinh quadrature with complex parameters, with the node count growing
    with |Im t| to follow the oscillation of x^(i Im t).
    """
    ctx = ctx or make_context()
    k = ab.k
    if k not in (2, 3):
        raise ValueError("lemma3_check supports k = 2 and k = 3")
    if eps.k != k:
        raise ValueError("epsilon sign belongs to a different k")
    f = ab.as_floats()
    a0, a, b = f.a0, list(f.a), list(f.b)
    t0 = cc.t0
    # b_k = a0 + a_k is admitted: the inner Euler integrals only reach z = 1 on a null set,
    # and absolute convergence of the contour integral is checked through the tail exponent
    if not (a0 > t0 > 0 and a[-1] > t0 and b[-1] > a[-1]):
        raise ValueError("need a0 > t0 > 0, a_k > t0 and b_k > a_k")
    if any(aj - t0 <= 0 for aj in a[:-1]) or a0 - t0 <= 0:
        raise ValueError("inner integral diverges on the contour: need a_j > t0")

    lhs = eval_J_quad(ab, ctx=ctx)
    pref = math.exp(loggamma(b[-1] - a[-1]) - loggamma(a0)) / (2 * math.pi)
    e = eps.value

    def t_of_y(y):
        return complex(-t0, y), 1j

    def f(y):
        t = complex(-t0, y)
        g = np.exp(loggamma(a0 + t) + loggamma(a[-1] + t) + loggamma(-t) - loggamma(b[-1] + t) + e * math.pi * 1j * t)
        inner = eval_J_complex(a0 + t, [v + t for v in a[:-1]], [v + t for v in b[:-1]], _inner_nodes(k - 1, y))
        # (1 / 2 pi i) dt = (1 / 2 pi) dy
        return pref * g * inner

    nodes = _gl_nodes_np(cc.nodes)
    first = max(0.05, min(0.5, t0, a0 - t0, a[-1] - t0))
    total = 0j
    bound = 0.0
    tail_total = 0j
    for direction in (1, -1):
        slow_side = e != 0 and e * direction < 0
        if slow_side:
            # leading power: Gamma-quotient t^(a0+a_k-1-b_k) times the inner edge behaviour t^-(b_1-a_1)
            P = a0 + a[-1] - 1 - b[-1] - (b[0] - a[0])
            if k != 3 or P >= -1:
                raise TruncationError("contour integrand decays too slowly for a convergent tail")
            T = cc.T if cc.T is not None else 16.0
            part, _, tb, tail = _integrate_side(f, direction, nodes, first, tol * 1e-3, T=T, slow=(P, t_of_y))
            tail_total += tail
        else:
            part, _, tb, _ = _integrate_side(f, direction, nodes, first, tol * 1e-3, max_T=60.0)
        total += part if direction > 0 else -part
        bound += tb
    return Lemma3Result(
        lhs=float(lhs.value),
        rhs=float(total.real),
        rhs_imag=float(total.imag),
        tail_correction=float(abs(tail_total)),
        tail_bound=float(bound),
        lhs_error=lhs.error,
    )
