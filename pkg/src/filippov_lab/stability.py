"""Layer-problem linearization and stability type of sliding solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .canopy import (
    TAU_DEG,
    OriginLocation,
    Region,
    Variant,
    _in_triangle,
    _orient,
    canopy_invariants,
    det2,
    fold_geometry,
    quad_shape,
)
from .errors import NoQualifyingEdge, PreconditionError
from .pws_model import QuadCorners, wrap
from .regularization import RegFunction
from .sliding_solver import SlidingSolution

__all__ = [
    "Kind",
    "GeometricType",
    "RegIndependent",
    "StabilityReport",
    "tangent_jacobian",
    "fast_jacobian",
    "classify_stability",
    "type_from_geometry",
    "s_values",
    "trace_sigma_form",
    "reg_independent_stability",
    "stability_report",
]


class Kind(Enum):
    SADDLE = "saddle"
    NODE_ATTRACTING = "node_attracting"
    NODE_REPELLING = "node_repelling"
    FOCUS_ATTRACTING = "focus_attracting"
    FOCUS_REPELLING = "focus_repelling"
    CENTER = "center"
    NON_HYPERBOLIC = "non_hyperbolic"

    @property
    def attracting(self) -> bool:
        return self in (Kind.NODE_ATTRACTING, Kind.FOCUS_ATTRACTING)

    @property
    def repelling(self) -> bool:
        return self in (Kind.NODE_REPELLING, Kind.FOCUS_REPELLING)


class GeometricType(Enum):
    SADDLE = "saddle_type"
    NODE_FOCUS_CENTER = "node_focus_center_type"


class RegIndependent(Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    DEPENDS = "depends_on_regularization"


def tangent_jacobian(corners: QuadCorners, psi: float, phi: float) -> np.ndarray:
    """DF~ at (psi, phi); columns are the psi- and phi-tangent vectors."""
    X1, X2, X3, X4 = corners.xt
    d_psi = 0.25 * ((X1 - X2) * (1 + phi) + (X4 - X3) * (1 - phi))
    d_phi = 0.25 * ((X1 - X4) * (1 + psi) + (X2 - X3) * (1 - psi))
    return np.column_stack([d_psi, d_phi])


def fast_jacobian(d_ftilde: np.ndarray, dpsi: float, dphi: float) -> np.ndarray:
    if not (dpsi > 0 and dphi > 0):
        raise PreconditionError("regularization derivatives must be positive")
    return np.asarray(d_ftilde, float) * np.array([dpsi, dphi])


def classify_stability(J: np.ndarray) -> Kind:
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    tr = float(J[0, 0] + J[1, 1])
    if det < -TAU_DEG:
        return Kind.SADDLE
    if det <= TAU_DEG:
        return Kind.NON_HYPERBOLIC
    if abs(tr) <= TAU_DEG:
        return Kind.CENTER
    disc = tr * tr - 4.0 * det
    if disc > TAU_DEG:
        return Kind.NODE_ATTRACTING if tr < 0 else Kind.NODE_REPELLING
    if disc < -TAU_DEG:
        return Kind.FOCUS_ATTRACTING if tr < 0 else Kind.FOCUS_REPELLING
    # repeated real eigenvalue: a degenerate node
    return Kind.NODE_ATTRACTING if tr < 0 else Kind.NODE_REPELLING


def _winding(poly: list[np.ndarray], o: np.ndarray) -> int:
    total = 0.0
    n = len(poly)
    for k in range(n):
        a = poly[k] - o
        b = poly[(k + 1) % n] - o
        total += math.atan2(det2(a, b), float(np.dot(a, b)))
    return int(round(total / (2 * math.pi)))


def _crossed_side(corners: QuadCorners) -> int:
    """Uncut side whose half of the canopy covers the origin, for a crossed shape."""
    shape = quad_shape(corners)
    fg = fold_geometry(corners, shape)
    inv = canopy_invariants(corners)
    o = np.zeros(2)
    tan = dict(zip(fg.cut, fg.tangent))
    in_lens = inv.Delta < 0 and _in_triangle(o, fg.tangent[0], fg.apex, fg.tangent[1])
    for u in (1, 2, 3, 4):
        if u in fg.cut:
            continue
        t_in, t_out = tan[wrap(u - 1)], tan[wrap(u + 1)]
        w = _winding([t_in, corners.corner(u), corners.corner(u + 1), t_out], o)
        if in_lens:
            w += int(np.sign(_orient(t_out, fg.apex, t_in)))
        if w != 0:
            return u
    raise NoQualifyingEdge("origin is in neither half of the crossed canopy")


def type_from_geometry(corners: QuadCorners, loc: OriginLocation) -> tuple[GeometricType, int]:
    """Saddle vs node/focus/center from the orientation of one bounding edge.

    Returns the type and the 1-based edge index k used.
    """
    if loc.variant is not Variant.UNIQUE:
        raise PreconditionError("geometric type needs a unique sliding solution")
    if loc.region is Region.CONVEX_INTERIOR:
        k = 1
    elif loc.region in (Region.CONCAVE_CROSSED_SUB, Region.CONCAVE_CONVEX_SUB):
        k = loc.shape.tip
    elif loc.region is Region.CROSSED_HOMEO:
        k = _crossed_side(corners)
    else:
        raise NoQualifyingEdge(f"no bounding edge for region {loc.region}")
    d = det2(corners.corner(k), corners.corner(k + 1))
    if abs(d) <= TAU_DEG:
        raise NoQualifyingEdge(f"edge {k} passes through the origin")
    return (GeometricType.SADDLE if d < 0 else GeometricType.NODE_FOCUS_CENTER), k


def s_values(corners: QuadCorners, sigma_psi: float, sigma_phi: float) -> tuple[float, float]:
    b, g = corners.beta, corners.gamma
    s1 = (b[0] - b[1]) * sigma_phi + (b[3] - b[2]) * (1 - sigma_phi)
    s2 = (g[0] - g[3]) * sigma_psi + (g[1] - g[2]) * (1 - sigma_psi)
    return float(s1), float(s2)


def trace_sigma_form(corners: QuadCorners, sol: SlidingSolution, dpsi: float, dphi: float) -> float:
    s1, s2 = s_values(corners, sol.sigma_psi, sol.sigma_phi)
    return 0.5 * dpsi * s1 + 0.5 * dphi * s2


def reg_independent_stability(corners: QuadCorners, sol: SlidingSolution) -> RegIndependent:
    d = np.linalg.det(tangent_jacobian(corners, sol.psi_star, sol.phi_star))
    if d <= 0:
        raise PreconditionError("attracting/repelling verdict applies to node/focus type only")
    s1, s2 = s_values(corners, sol.sigma_psi, sol.sigma_phi)
    if s1 > TAU_DEG and s2 > TAU_DEG:
        return RegIndependent.REPELLING
    if s1 < -TAU_DEG and s2 < -TAU_DEG:
        return RegIndependent.ATTRACTING
    return RegIndependent.DEPENDS


@dataclass(frozen=True)
class StabilityReport:
    d_ftilde: np.ndarray
    p_diag: tuple[float, float]
    jacobian: np.ndarray
    det_j: float
    trace_j: float
    kind: Kind
    reg_independent: bool
    verdict: RegIndependent | None = None
    outside_hyperbolic: bool = False  # center / non-hyperbolic labels


def stability_report(
    corners: QuadCorners, sol: SlidingSolution, reg_y: RegFunction, reg_z: RegFunction
) -> StabilityReport:
    D = tangent_jacobian(corners, sol.psi_star, sol.phi_star)
    dpsi = float(reg_y.derivative(reg_y.inverse(sol.psi_star)))
    dphi = float(reg_z.derivative(reg_z.inverse(sol.phi_star)))
    J = fast_jacobian(D, dpsi, dphi)
    tr = float(np.trace(J))
    tr_sigma = trace_sigma_form(corners, sol, dpsi, dphi)
    if abs(tr - tr_sigma) > 1e-8 * max(1.0, abs(tr)):
        raise RuntimeError(f"trace mismatch: {tr} vs sigma form {tr_sigma}")
    kind = classify_stability(J)
    verdict = None
    if kind is Kind.SADDLE:
        reg_ind = True  # the saddle/non-saddle split follows sign(det DF~) alone
    elif kind is Kind.NON_HYPERBOLIC:
        reg_ind = False
    else:
        verdict = reg_independent_stability(corners, sol)
        reg_ind = verdict is not RegIndependent.DEPENDS
    return StabilityReport(
        D,
        (dpsi, dphi),
        J,
        float(np.linalg.det(J)),
        tr,
        kind,
        reg_ind,
        verdict,
        kind in (Kind.CENTER, Kind.NON_HYPERBOLIC),
    )
