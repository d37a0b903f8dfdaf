"""Very-well-poised hypergeometric series, their multiple-integral
representations, and exact linear forms in zeta values."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .hyperseries import HParams, eval_F
from .multint import ABParams, McConfig, eval_J_mc, eval_J_quad
from .numctx import PrecisionContext, make_context

__all__ = [
    "__version__",
    "ABParams",
    "HParams",
    "McConfig",
    "PrecisionContext",
    "eval_F",
    "eval_J_mc",
    "eval_J_quad",
    "make_context",
]
