"""Certified continued-fraction bounds on the Gaussian upper tail 1 - Phi(x)."""

from .constants import c_star, delta_k, x_star, x_tilde
from .ext import ExtReal, ext, fmt
from .families import BoundId, DomainError, Family, Side, bound_side, eval_h, tail_bound
from .oracle import gaussian_density, mills_ratio, upper_tail

__all__ = [
    "BoundId",
    "DomainError",
    "ExtReal",
    "Family",
    "Side",
    "bound_side",
    "c_star",
    "delta_k",
    "eval_h",
    "ext",
    "fmt",
    "gaussian_density",
    "mills_ratio",
    "tail_bound",
    "upper_tail",
    "x_star",
    "x_tilde",
]

__version__ = "0.1.0"
