"""Command-line front end: one subcommand per computation, one JSON document on stdout.

Exit codes: 0 success, 1 invalid input, 2 convergence failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Sequence

import mpmath
from mpmath.ctx_mp_python import _mpc, _mpf

from . import __version__
from .barnes import (
    BranchMismatchError,
    ContourConfig,
    EpsilonSign,
    TruncationError,
    barnes_side,
    euler_side,
    gauss_2f1_side,
    lemma3_check,
)
from .hyperseries import ConvergenceError, HParams, eval_F
from .identity import (
    c_transform,
    group_closure,
    permutation_generators,
    verify_theorem,
)
from .multint import ABParams, McConfig, McResult, QuadResult, SParams, eval_J_mc, eval_J_quad, eval_S_mc
from .numctx import PrecisionContext, make_context
from .zetaforms import (
    LinearForm,
    build_rational_term,
    inclusion_report,
    linear_form_for,
    normalizers,
    partial_fractions,
    phi_growth,
    sum_to_linear_form,
)

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_USAGE = 0, 1, 2, 64


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 128
    rel_tol: float = 1e-20
    mc_samples: int = 10**6
    mc_seed: int = 42
    mc_chunks: int = 16
    quad_nodes: int = 64
    output_path: str | None = None

    def context(self) -> PrecisionContext:
        return make_context(self.precision_bits, self.rel_tol)

    def mc(self) -> McConfig:
        return McConfig(self.mc_samples, self.mc_seed, self.mc_chunks)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# -- serialization -----------------------------------------------------------------

def _hp_str(x, cfg: RunConfig) -> str:
    m = mpmath.MPContext()
    m.prec = cfg.precision_bits
    return m.nstr(x, max(1, m.dps - 1), strip_zeros=False)


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def to_jsonable(value: Any, cfg: RunConfig) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return _frac(value)
    if isinstance(value, _mpf):
        return _hp_str(value, cfg)
    if isinstance(value, _mpc):
        return {"re": _hp_str(value.real, cfg), "im": _hp_str(value.imag, cfg)}
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, LinearForm):
        return value.to_json()
    if isinstance(value, QuadResult):
        return {"value": to_jsonable(value.value, cfg), "error": value.error, "nodes": value.nodes,
                "rule": value.rule, "convergence": value.convergence}
    if isinstance(value, McResult):
        return {"estimate": value.estimate, "stderr": value.stderr, "samples": value.samples,
                "seed": value.seed, "chunks": value.chunks}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, cfg) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, cfg) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return to_jsonable(value.item(), cfg)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def emit_json(result: dict, cfg: RunConfig) -> str:
    doc = dict(to_jsonable(result, cfg))
    doc["config"] = asdict(cfg)
    doc["tool_version"] = __version__
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# -- argument parsing --------------------------------------------------------------

def _number(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        pass
    if "/" in tok:
        return Fraction(tok)
    return float(tok)


def _numbers(text: str) -> list:
    try:
        return [_number(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {exc}") from None


def _ints(text: str) -> list:
    vals = _numbers(text)
    if not all(isinstance(v, int) for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}")
    return vals


def _scalar(text: str):
    vals = _numbers(text)
    if len(vals) != 1:
        raise argparse.ArgumentTypeError(f"expected one number, got {text!r}")
    return vals[0]


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--prec", type=int, default=128, help="working precision in bits")
    g.add_argument("--tol", type=float, default=1e-20, help="relative tolerance")
    g.add_argument("--mc-samples", type=int, default=10**6)
    g.add_argument("--mc-seed", type=int, default=42)
    g.add_argument("--mc-chunks", type=int, default=16)
    g.add_argument("--quad-nodes", type=int, default=64)
    g.add_argument("--out", default=None, help="also write the JSON document to this path")

    p = _Parser(prog="wellpoised", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("series", parents=[common], help="sum F_k(h0; h1..hk)")
    s.add_argument("--h", type=_numbers, required=True, help="h0,h1,...,hk")

    s = sub.add_parser("integral", parents=[common], help="J_k(a; b) by quadrature or Monte Carlo")
    s.add_argument("--a", type=_numbers, required=True, help="a0,a1,...,ak")
    s.add_argument("--b", type=_numbers, required=True, help="b1,...,bk")
    s.add_argument("--method", choices=("quad", "mc"), default="quad")

    s = sub.add_parser("s-integral", parents=[common], help="S(z) by Monte Carlo")
    s.add_argument("--a", type=_numbers, required=True)
    s.add_argument("--b", type=_numbers, required=True)
    s.add_argument("--c", type=_numbers, required=True)
    s.add_argument("--r", type=_ints, required=True)
    s.add_argument("--z", type=_scalar, required=True)

    s = sub.add_parser("verify", parents=[common], help="compare both sides of the F = J identity")
    s.add_argument("--h", type=_numbers, required=True, help="h0,h1,...,h_{k+2}")
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--method", choices=("auto", "quadrature", "mc"), default="auto")

    s = sub.add_parser("barnes", parents=[common], help="Euler, Barnes and Gauss forms of one 2F1")
    s.add_argument("--a", type=_numbers, required=True, help="a0,a")
    s.add_argument("--b", type=_scalar, required=True)
    s.add_argument("--z", type=_scalar, required=True)
    s.add_argument("--t0", type=float, default=None, help="abscissa -t0 of the contour")

    s = sub.add_parser("lemma3", parents=[common], help="J_k against its contour recursion over J_{k-1}")
    s.add_argument("--a", type=_numbers, required=True, help="a0,a1,...,ak")
    s.add_argument("--b", type=_numbers, required=True)
    s.add_argument("--eps", type=int, default=None, help="sign for odd k (+1 or -1)")
    s.add_argument("--t0", type=float, default=0.5)

    s = sub.add_parser("zetaform", parents=[common], help="exact q0 + sum q_s zeta(s)")
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--r-mult", type=int, default=1, help="r in h0 = (2r+1)n+2, h_j = rn+1")
    s.add_argument("--h", type=_ints, default=None, help="explicit integer h0,h1,...")

    s = sub.add_parser("inclusion", parents=[common], help="integrality of D_n^(k+1) Phi_n^(-1) J_{k,n}")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("phi", parents=[common], help="D_n and Phi_n")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("group", parents=[common], help="order of the parameter group")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--c", action="store_true", help="add the extra involution")
    s.add_argument("--elements", action="store_true", help="list every element")
    return p


# -- subcommands ----------------------------------------------------------------------

def _ab(a: list, b: list) -> ABParams:
    if len(a) < 2:
        raise ValueError("--a needs a0 followed by a1..ak")
    return ABParams(a[0], tuple(a[1:]), tuple(b))


def _cmd_series(args, cfg):
    r = eval_F(HParams.of(args.h), cfg.context())
    return {"value": r.value, "converged": r.converged, "terms": r.terms, "error_estimate": r.error_estimate}


def _cmd_integral(args, cfg):
    ab = _ab(args.a, args.b)
    if args.method == "mc":
        return {"method": "mc", **to_jsonable(eval_J_mc(ab, cfg.mc()), cfg)}
    q = eval_J_quad(ab, None if args.quad_nodes == 64 else args.quad_nodes, cfg.context())
    return {"method": "quad", **to_jsonable(q, cfg)}


def _cmd_s_integral(args, cfg):
    sp = SParams(tuple(args.a), tuple(args.b), tuple(args.c), tuple(args.r), args.z)
    return to_jsonable(eval_S_mc(sp, cfg.mc()), cfg)


def _cmd_verify(args, cfg):
    hp = HParams.of(args.h)
    if args.k is not None and args.k != hp.k - 2:
        raise ValueError(f"--k {args.k} does not match {hp.k} lower parameters (expected k + 2)")
    r = verify_theorem(hp, cfg.context(), mc=cfg.mc(), method=args.method)
    return {"k": hp.k - 2, "lhs": r.lhs, "rhs": r.rhs, "rhs_error": r.rhs_error, "method": r.method, "pass": r.passed}


def _cmd_barnes(args, cfg):
    if len(args.a) != 2:
        raise ValueError("--a takes a0,a")
    a0, a = args.a
    ctx = cfg.context()
    t0 = args.t0 if args.t0 is not None else min(float(a0), float(a)) / 2
    br = barnes_side(a0, a, args.b, args.z, ContourConfig(t0), ctx)
    out = {"euler": euler_side(a0, a, args.b, args.z, ctx), "barnes": br.value, "tail_bound": br.tail_bound,
           "T": br.T, "branches": br.branch_values}
    if abs(float(args.z)) <= 1:
        out["gauss_2f1"] = gauss_2f1_side(a0, a, args.b, args.z, ctx)
    return out


def _cmd_lemma3(args, cfg):
    ab = _ab(args.a, args.b)
    eps = EpsilonSign(args.eps, ab.k) if args.eps is not None else EpsilonSign.default(ab.k)
    r = lemma3_check(ab, eps, ContourConfig(args.t0), cfg.context())
    return {"k": ab.k, "eps": eps.value, "lhs": r.lhs, "rhs": r.rhs, "rhs_imag": r.rhs_imag,
            "tail_correction": r.tail_correction, "tail_bound": r.tail_bound, "abs_diff": r.abs_diff}


def _cmd_zetaform(args, cfg):
    if args.h is not None:
        rf, alt = build_rational_term(HParams.of(args.h))
        form = sum_to_linear_form(partial_fractions(rf), alt)
        src = {"h": args.h}
    else:
        if args.k is None or args.n is None:
            raise ValueError("give either --h or both --k and --n")
        form = linear_form_for(args.k, args.n, args.r_mult)
        src = {"k": args.k, "n": args.n, "r": args.r_mult}
    return {"source": src, "form": form, "value": form.value(cfg.context())}


def _cmd_inclusion(args, cfg):
    r = inclusion_report(args.k, args.n)
    return {"k": r.k, "n": r.n, "pass": r.passed, "integral": r.integral, "parity_ok": r.parity_ok,
            "min_exponent": r.min_exponent, "scaled_form": r.form}


def _cmd_phi(args, cfg):
    nm = normalizers(args.n)
    return {"n": nm.n, "D_n": str(nm.D_n), "Phi_n": str(nm.Phi_n),
            "log_phi_over_n": phi_growth(args.n) if args.n >= 2 else None}


def _cmd_group(args, cfg):
    gens = permutation_generators(args.k)
    if args.c:
        gens = gens + [c_transform(args.k)]
    order, elems = group_closure(gens)
    out = {"k": args.k, "with_c": args.c, "order": order, "generators": [g.to_json() for g in gens]}
    if args.elements:
        out["elements"] = sorted((g.to_json() for g in elems), key=lambda d: json.dumps(d, sort_keys=True))
    return out


_COMMANDS = {
    "series": _cmd_series,
    "integral": _cmd_integral,
    "s-integral": _cmd_s_integral,
    "verify": _cmd_verify,
    "barnes": _cmd_barnes,
    "lemma3": _cmd_lemma3,
    "zetaform": _cmd_zetaform,
    "inclusion": _cmd_inclusion,
    "phi": _cmd_phi,
    "group": _cmd_group,
}


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        stderr.write(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    cfg = RunConfig(args.prec, args.tol, args.mc_samples, args.mc_seed, args.mc_chunks, args.quad_nodes, args.out)
    try:
        text = emit_json(_COMMANDS[args.command](args, cfg), cfg)
    except (ConvergenceError, TruncationError, BranchMismatchError) as exc:
        stderr.write(f"convergence failure: {exc}\n")
        return EXIT_CONVERGENCE
    except (ValueError, ZeroDivisionError) as exc:
        stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    stdout.write(text)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def main() -> int:
    return run(sys.argv[1:])
