"""Certified spectral gaps for one-dimensional Schrodinger operators.

``H = -1/2 d^2/dx^2 + V(x)`` with polynomial ``V``.  The ladder module derives
the polynomial differential expressions F_N(a0, v); gapcert turns them into
exact certificates that an energy interval holds no eigenvalue; oracle gives
independent numerical spectra to check against.
"""

__version__ = "0.1.0"

from .diffpoly import DiffPoly, ParamPoly, Poly1, substitute
from .gapcert import GapInterval, bifurcationSolve, build_F, findLambda, scanGaps, sturmSign
from .kernels import BACKEND
from .ladder import compute_A, compute_F, compute_J
from .oracle import divergenceCheck, eigensolveFD, eigensolveShoot, odeSolve
from .parse import PolyParseError, parse_param_poly, parse_poly1, parse_polyd

__all__ = [
    "__version__",
    "BACKEND",
    "DiffPoly",
    "Poly1",
    "ParamPoly",
    "substitute",
    "compute_F",
    "compute_A",
    "compute_J",
    "sturmSign",
    "findLambda",
    "scanGaps",
    "GapInterval",
    "bifurcationSolve",
    "build_F",
    "eigensolveFD",
    "eigensolveShoot",
    "odeSolve",
    "divergenceCheck",
    "PolyParseError",
    "parse_poly1",
    "parse_param_poly",
    "parse_polyd",
]
