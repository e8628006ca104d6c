"""Sliding vector fields on the intersection of two switching planes in R^3."""

from __future__ import annotations

__version__ = "0.1.0"

from ._backend import BACKEND
from .canopy import (
    BilinearMap2,
    CanopyInvariants,
    OriginLocation,
    QuadClass,
    QuadShape,
    Region,
    Variant,
    bilinear_coeffs,
    canopy_invariants,
    f_tilde,
    f_x,
    origin_location,
    quad_shape,
)
from .pws_model import FieldTriple, PolynomialScalar, PwsSystem, QuadCorners, project
from .regularization import ARCTAN, ST, TANH, RegFunction, by_name
from .sliding_solver import SlidingSolution, oracle_roots, solve_sigmas
from .stability import Kind, stability_report, tangent_jacobian

__all__ = [
    "__version__",
    "BACKEND",
    "BilinearMap2",
    "CanopyInvariants",
    "OriginLocation",
    "QuadClass",
    "QuadShape",
    "Region",
    "Variant",
    "bilinear_coeffs",
    "canopy_invariants",
    "f_tilde",
    "f_x",
    "origin_location",
    "quad_shape",
    "FieldTriple",
    "PolynomialScalar",
    "PwsSystem",
    "QuadCorners",
    "project",
    "ARCTAN",
    "ST",
    "TANH",
    "RegFunction",
    "by_name",
    "SlidingSolution",
    "oracle_roots",
    "solve_sigmas",
    "Kind",
    "stability_report",
    "tangent_jacobian",
]
