"""Precision contexts and the special-function primitives shared by every module.

Each :class:`PrecisionContext` owns a private mpmath context, so values built
in one context never depend on the global ``mpmath.mp`` state and two contexts
with different precisions can be used side by side.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

MIN_PRECISION_BITS = 64

__all__ = [
    "PrecisionContext",
    "PoleError",
    "make_context",
    "log_gamma",
    "gamma",
    "rgamma",
    "zeta_const",
    "eta_to_zeta_factor",
    "to_hp",
]


class PoleError(ValueError):
    """A gamma argument sits on (or is numerically at) a pole."""


@dataclass(frozen=True)
class PrecisionContext:
    precision_bits: int
    rel_tol: float
    max_terms: int = 200_000
    mp: mpmath.ctx_mp.MPContext = field(init=False, repr=False, compare=False)
    _zeta_cache: dict = field(init=False, repr=False, compare=False)
    _lock: threading.Lock = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.precision_bits) != self.precision_bits or self.precision_bits < MIN_PRECISION_BITS:
            raise ValueError(f"precision_bits must be an integer >= {MIN_PRECISION_BITS}, got {self.precision_bits}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not 2.0 ** (-self.precision_bits) < self.rel_tol:
            raise ValueError("rel_tol is below the resolution of precision_bits")
        if self.max_terms < 1:
            raise ValueError("max_terms must be positive")
        ctx = mpmath.MPContext()
        ctx.prec = int(self.precision_bits)
        object.__setattr__(self, "mp", ctx)
        object.__setattr__(self, "_zeta_cache", {})
        object.__setattr__(self, "_lock", threading.Lock())

    def mpf(self, x) -> mpmath.mpf:
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        return self.mp.mpf(x)

    @property
    def digits(self) -> int:
        """Decimal digits carried by the working precision."""
        return int(self.precision_bits * 0.30102999566398120)

    def extended(self, extra_bits: int) -> "PrecisionContext":
        """A context with more guard bits and the same tolerance."""
        return PrecisionContext(self.precision_bits + extra_bits, self.rel_tol, self.max_terms)


def make_context(precision_bits: int = 128, rel_tol: float = 1e-20, max_terms: int = 200_000) -> PrecisionContext:
    return PrecisionContext(precision_bits, rel_tol, max_terms)


def to_hp(x, ctx: PrecisionContext):
    return ctx.mpf(x)


def _is_nonpositive_integer(x, ctx: PrecisionContext) -> bool:
    m = ctx.mp
    return x <= 0 and m.almosteq(x, m.nint(x), abs_eps=m.eps * 16)


def log_gamma(x, ctx: PrecisionContext):
    """ln Gamma(x) for real x > 0."""
    x = to_hp(x, ctx)
    if not x > 0:
        raise ValueError(f"log_gamma needs x > 0, got {x}")
    return ctx.mp.loggamma(x)


def gamma(x, ctx: PrecisionContext):
    """Gamma(x) for real x away from the poles 0, -1, -2, ..."""
    x = to_hp(x, ctx)
    if _is_nonpositive_integer(x, ctx):
        raise PoleError(f"Gamma has a pole at {x}")
    return ctx.mp.gamma(x)


def rgamma(x, ctx: PrecisionContext):
    """1/Gamma(x); zero at the poles."""
    return ctx.mp.rgamma(to_hp(x, ctx))


def zeta_const(s: int, ctx: PrecisionContext):
    """zeta(s) for an integer s >= 2, cached per context."""
    if int(s) != s or s < 2:
        raise ValueError(f"zeta_const needs an integer s >= 2, got {s}")
    s = int(s)
    with ctx._lock:
        val = ctx._zeta_cache.get(s)
        if val is None:
            val = ctx.mp.zeta(s)
            ctx._zeta_cache[s] = val
    return val


def eta_to_zeta_factor(s: int) -> Fraction:
    """The exact factor 1 - 2**(1-s) with eta(s) = factor * zeta(s)."""
    if int(s) != s or s < 2:
        raise ValueError(f"eta_to_zeta_factor needs an integer s >= 2, got {s}")
    return 1 - Fraction(1, 2 ** (int(s) - 1))
