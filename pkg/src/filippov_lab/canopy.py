"""Canopy map, projected quadrilateral geometry and sliding-existence criteria."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import AmbiguousKappa, DegenerateQuadrilateral
from .pws_model import QuadCorners, wrap

__all__ = [
    "TAU_DEG",
    "BilinearMap2",
    "QuadClass",
    "ChiRole",
    "QuadShape",
    "CanopyInvariants",
    "Region",
    "Variant",
    "OriginLocation",
    "LiteralDoubleCheck",
    "f_x",
    "f_tilde",
    "bilinear_coeffs",
    "quad_shape",
    "canopy_invariants",
    "origin_location",
    "literal_double_conditions",
    "concave_permutation",
    "fold_geometry",
]

TAU_DEG = 1e-9


def det2(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def _d(c: QuadCorners, i: int, j: int) -> float:
    """det(X~_i X~_j) with wrapping 1-based indices."""
    return det2(c.corner(i), c.corner(j))


# --------------------------------------------------------------------------- maps


def f_x(corners: QuadCorners, psi: float, phi: float) -> np.ndarray:
    """Bilinear convex combination of the full vectors X_1..X_4."""
    w = 0.25 * np.array(
        [(1 + psi) * (1 + phi), (1 - psi) * (1 + phi), (1 - psi) * (1 - phi), (1 + psi) * (1 - phi)]
    )
    return w @ corners.full()


def f_tilde(corners: QuadCorners, psi: float, phi: float) -> np.ndarray:
    w = 0.25 * np.array(
        [(1 + psi) * (1 + phi), (1 - psi) * (1 + phi), (1 - psi) * (1 - phi), (1 + psi) * (1 - phi)]
    )
    return w @ corners.xt


@dataclass(frozen=True)
class BilinearMap2:
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray

    def __call__(self, psi, phi):
        return self.a0 + self.a1 * psi + self.a2 * phi + self.a3 * (psi * phi)

    def jacobian(self, psi: float, phi: float) -> np.ndarray:
        return np.column_stack([self.a1 + self.a3 * phi, self.a2 + self.a3 * psi])

    def as_array(self) -> np.ndarray:
        """Rows a0..a3, columns (beta, gamma)."""
        return np.vstack([self.a0, self.a1, self.a2, self.a3])


def bilinear_coeffs(corners: QuadCorners) -> BilinearMap2:
    X1, X2, X3, X4 = corners.xt
    return BilinearMap2(
        (X1 + X2 + X3 + X4) / 4,
        (X1 - X2 - X3 + X4) / 4,
        (X1 + X2 - X3 - X4) / 4,
        (X1 - X2 + X3 - X4) / 4,
    )


# ---------------------------------------------------------------- quadrilateral


class QuadClass(Enum):
    CONVEX = "convex"
    CROSSED = "crossed"
    CONCAVE = "concave"
    DEGENERATE = "degenerate"


class ChiRole(Enum):
    EDGE = "edge"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class QuadShape:
    """Difference vectors, difference determinants and the resulting class.

    ``delta[k]`` (0-based) is the turn at corner X~_{k+2}. For concave shapes
    ``reflex`` is the corner whose turn has the minority sign and ``tip`` is the
    opposite corner, the point of the dart.
    """

    chi: np.ndarray
    delta: np.ndarray
    cls: QuadClass
    chi1_role: ChiRole | None = None
    tip: int | None = None
    reflex: int | None = None
    odd_delta: int | None = None  # 1-based index of the minority difference determinant


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = det2(q2 - q1, p1 - q1)
    d2 = det2(q2 - q1, p2 - q1)
    d3 = det2(p2 - p1, q1 - p1)
    d4 = det2(p2 - p1, q2 - p1)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def quad_shape(corners: QuadCorners) -> QuadShape:
    X = corners.xt
    chi = np.array([X[(k + 1) % 4] - X[k] for k in range(4)])
    delta = np.array([det2(chi[k], chi[(k + 1) % 4]) for k in range(4)])
    if np.any(np.abs(delta) <= TAU_DEG):
        return QuadShape(chi, delta, QuadClass.DEGENERATE)
    npos = int(np.sum(delta > 0))
    if npos in (0, 4):
        return QuadShape(chi, delta, QuadClass.CONVEX)
    if npos == 2:
        crosses = _segments_intersect(X[0], X[1], X[2], X[3])
        role = ChiRole.DIAGONAL if crosses else ChiRole.EDGE
        return QuadShape(chi, delta, QuadClass.CROSSED, chi1_role=role)
    minority = delta > 0 if npos == 1 else delta < 0
    k = int(np.flatnonzero(minority)[0])  # 0-based index of the odd determinant
    reflex = wrap(k + 2)
    return QuadShape(
        chi, delta, QuadClass.CONCAVE, tip=wrap(reflex + 2), reflex=reflex, odd_delta=k + 1
    )


# Relabelings that move a concave quadrilateral into the reference orientation
# with its reflex corner at X~_2. Keyed by the 1-based odd difference
# determinant; entry m is the old index that plays the role of new index m+1.
_CONCAVE_PERM: dict[int, tuple[int, int, int, int]] = {
    1: (1, 2, 3, 4),
    4: (4, 1, 2, 3),
    3: (3, 4, 1, 2),
    2: (2, 3, 4, 1),
}


def concave_permutation(shape: QuadShape) -> tuple[int, int, int, int]:
    if shape.cls is not QuadClass.CONCAVE:
        raise ValueError("permutation only defined for concave shapes")
    return _CONCAVE_PERM[shape.odd_delta]


# ------------------------------------------------------------------ invariants


@dataclass(frozen=True)
class CanopyInvariants:
    A: float
    B: float
    Gamma: float
    Delta: float

    @property
    def quad_a(self) -> float:
        """Leading coefficient A + Gamma - B of the sigma_phi quadratic."""
        return self.A + self.Gamma - self.B

    @property
    def quad_b(self) -> float:
        return self.B - 2.0 * self.Gamma


def canopy_invariants(corners: QuadCorners) -> CanopyInvariants:
    A = _d(corners, 1, 2)
    B = _d(corners, 4, 2) + _d(corners, 1, 3)
    G = _d(corners, 4, 3)
    return CanopyInvariants(A, B, G, B * B - 4.0 * A * G)


# ------------------------------------------------------------- fold geometry


@dataclass(frozen=True)
class FoldGeometry:
    """Image of the fold of the canopy map inside the quadrilateral.

    ``cut`` are the 1-based sides (X~_i -> X~_{i+1}) that the fold crosses,
    ``tangent`` the images of the crossing points, ``apex`` the common point of
    the two cut sides (shared corner or line intersection).
    """

    cut: tuple[int, int]
    tangent: tuple[np.ndarray, np.ndarray]
    apex: np.ndarray


def fold_geometry(corners: QuadCorners, shape: QuadShape | None = None) -> FoldGeometry | None:
    """None for convex quadrilaterals, whose canopy map has no fold."""
    shape = shape or quad_shape(corners)
    if shape.cls in (QuadClass.CONVEX, QuadClass.DEGENERATE):
        return None
    X = corners.xt
    # sign of det DF~ at parameter corner i is the sign of the turn at X~_i
    turn = np.array([shape.delta[(i - 1) % 4] for i in range(4)])
    cut = [i for i in range(4) if np.sign(turn[i]) != np.sign(turn[(i + 1) % 4])]
    pts = []
    for i in cut:
        t = turn[i] / (turn[i] - turn[(i + 1) % 4])
        pts.append(X[i] + t * (X[(i + 1) % 4] - X[i]))
    a, b = cut
    if (a + 1) % 4 == b:
        apex = X[b]
    elif (b + 1) % 4 == a:
        apex = X[a]
    else:
        p, r = X[a], X[(a + 1) % 4] - X[a]
        q, s = X[b], X[(b + 1) % 4] - X[b]
        den = det2(r, s)
        apex = p + r * (det2(q - p, s) / den) if den != 0 else 0.5 * (pts[0] + pts[1])
    return FoldGeometry((a + 1, b + 1), (pts[0], pts[1]), np.asarray(apex, float))


def _orient(a, b, c) -> float:
    return det2(b - a, c - a)


def _in_triangle(o, a, b, c, closed: bool = False) -> bool:
    s1, s2, s3 = _orient(a, b, o), _orient(b, c, o), _orient(c, a, o)
    if closed:
        return (s1 >= 0 and s2 >= 0 and s3 >= 0) or (s1 <= 0 and s2 <= 0 and s3 <= 0)
    return (s1 > 0 and s2 > 0 and s3 > 0) or (s1 < 0 and s2 < 0 and s3 < 0)


# ------------------------------------------------------------ origin location


class Variant(Enum):
    NO_SLIDING = "no_sliding"
    UNIQUE = "unique"
    DOUBLE = "double"


class Region(Enum):
    CONVEX_INTERIOR = "convex_interior"
    CROSSED_HOMEO = "crossed_homeo"
    CONCAVE_CROSSED_SUB = "concave_crossed_sub"
    CONCAVE_CONVEX_SUB = "concave_convex_sub"
    ON_PARABOLIC_LINE = "on_parabolic_line"


@dataclass(frozen=True)
class LiteralDoubleCheck:
    """Literal determinant conditions for two sliding vector fields.

    ``kappa`` is only set for crossed shapes.
    """

    cond1: bool
    cond2: bool
    cond3: bool
    kappa: int | None = None

    @property
    def holds(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3


@dataclass(frozen=True)
class OriginLocation:
    variant: Variant
    region: Region | None = None
    shape: QuadShape | None = field(default=None, repr=False)
    invariants: CanopyInvariants | None = None
    conditions: dict[str, bool] = field(default_factory=dict)
    literal_double: LiteralDoubleCheck | None = None

    @property
    def count(self) -> int:
        return {Variant.NO_SLIDING: 0, Variant.UNIQUE: 1, Variant.DOUBLE: 2}[self.variant]


def _relabel(corners: QuadCorners, perm) -> QuadCorners:
    idx = [p - 1 for p in perm]
    return QuadCorners(corners.x, corners.alpha[idx], corners.xt[idx])


def literal_double_conditions(corners: QuadCorners, shape: QuadShape | None = None) -> LiteralDoubleCheck:
    """Evaluate the determinant double-sliding conditions literally.

    Crossed shapes pick kappa by comparing the two diagonals; the diagonal case
    swaps the roles of indices 2 and 4 throughout. Concave shapes are first
    relabeled to the reference orientation. Raises :class:`AmbiguousKappa` on a
    diagonal-length tie.
    """
    shape = shape or quad_shape(corners)
    inv = canopy_invariants(corners)
    c3 = inv.Delta > 0
    if shape.cls is QuadClass.CROSSED:
        X = corners
        n13 = float(np.linalg.norm(X.corner(1) - X.corner(3)))
        n42 = float(np.linalg.norm(X.corner(4) - X.corner(2)))
        if abs(n13 - n42) <= TAU_DEG:
            raise AmbiguousKappa(f"diagonals tie: {n13} vs {n42}")
        kappa = 1 if n13 > n42 else 2
        sw = {1: 1, 2: 4, 3: 3, 4: 2} if shape.chi1_role is ChiRole.DIAGONAL else {1: 1, 2: 2, 3: 3, 4: 4}

        def D(i, j):
            return _d(X, sw[wrap(i)], sw[wrap(j)])

        dk = D(kappa, kappa + 2)
        return LiteralDoubleCheck(dk * D(2, 3) < 0, dk * D(4, 1) > 0, c3, kappa)
    if shape.cls is QuadClass.CONCAVE:
        Y = _relabel(corners, concave_permutation(shape))
        d13 = _d(Y, 1, 3)
        return LiteralDoubleCheck(_d(Y, 1, 2) * d13 < 0, _d(Y, 2, 3) * d13 < 0, c3)
    return LiteralDoubleCheck(False, False, c3)


def origin_location(corners: QuadCorners) -> OriginLocation:
    """Decide whether the origin lies in the projected canopy, and how often it is covered.

    Unique coverage uses the closed-form sign conditions per class. Double
    coverage is decided by the fold geometry: the origin must sit inside the
    triangle spanned by the two fold tangency points and the apex, on the
    positive side of the discriminant. The literal determinant double conditions
    are still evaluated and attached as ``literal_double``.
    """
    shape = quad_shape(corners)
    if shape.cls is QuadClass.DEGENERATE:
        raise DegenerateQuadrilateral(f"difference determinants {shape.delta.tolist()}")
    inv = canopy_invariants(corners)
    c = corners
    d12, d23, d34, d41 = _d(c, 1, 2), _d(c, 2, 3), _d(c, 3, 4), _d(c, 4, 1)
    loc = dict(shape=shape, invariants=inv)

    if shape.cls is QuadClass.CONVEX:
        conds = {"d12*d34>0": d12 * d34 > 0, "d23*d41>0": d23 * d41 > 0}
        if all(conds.values()):
            return OriginLocation(Variant.UNIQUE, Region.CONVEX_INTERIOR, conditions=conds, **loc)
        return OriginLocation(Variant.NO_SLIDING, conditions=conds, **loc)

    if shape.cls is QuadClass.CROSSED:
        if shape.chi1_role is ChiRole.EDGE:
            conds = {"d12*d34<0": d12 * d34 < 0, "d23*d41>0": d23 * d41 > 0}
        else:
            conds = {"d12*d34>0": d12 * d34 > 0, "d23*d41<0": d23 * d41 < 0}
        unique_region = Region.CROSSED_HOMEO if all(conds.values()) else None
    else:
        Y = _relabel(c, concave_permutation(shape))
        e12, e23, e34, e41 = _d(Y, 1, 2), _d(Y, 2, 3), _d(Y, 3, 4), _d(Y, 4, 1)
        conds = {
            "crossed_sub": e12 * e23 < 0 and e34 * e41 > 0,
            "convex_sub": e23 * e34 > 0 and e41 * e12 > 0,
        }
        unique_region = (
            Region.CONCAVE_CROSSED_SUB
            if conds["crossed_sub"]
            else Region.CONCAVE_CONVEX_SUB if conds["convex_sub"] else None
        )

    try:
        literal = literal_double_conditions(c, shape)
    except AmbiguousKappa:
        literal = None

    if unique_region is not None:
        return OriginLocation(Variant.UNIQUE, unique_region, conditions=conds, literal_double=literal, **loc)

    fg = fold_geometry(c, shape)
    o = np.zeros(2)
    if abs(inv.Delta) <= TAU_DEG and _in_triangle(o, fg.tangent[0], fg.apex, fg.tangent[1], closed=True):
        return OriginLocation(Variant.UNIQUE, Region.ON_PARABOLIC_LINE, conditions=conds, literal_double=literal, **loc)
    if inv.Delta > 0 and _in_triangle(o, fg.tangent[0], fg.apex, fg.tangent[1]):
        return OriginLocation(Variant.DOUBLE, conditions=conds, literal_double=literal, **loc)
    return OriginLocation(Variant.NO_SLIDING, conditions=conds, literal_double=literal, **loc)
