"""Piecewise-smooth system in R^3 with switching planes y=0 and z=0.

Each quadrant field X_i = (alpha_i, beta_i, gamma_i) depends on x only and is
stored as three polynomials. Indices run 1..4 and wrap with 5 == 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidIndex, NotSlidingRegion, PreconditionError

__all__ = [
    "TAU_FOLD",
    "PolynomialScalar",
    "FieldTriple",
    "PwsSystem",
    "QuadCorners",
    "QuadrantResult",
    "Codim1Class",
    "Codim1Stability",
    "Codim1Sliding",
    "eval_field",
    "select_quadrant",
    "classify_codim1",
    "filippov_codim1",
    "project",
    "wrap",
]

TAU_FOLD = 1e-10


def wrap(i: int) -> int:
    """Map any integer onto 1..4 with 5 == 1."""
    return (i - 1) % 4 + 1


def _check_index(i: int) -> int:
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or i not in (1, 2, 3, 4):
        raise InvalidIndex(f"field index must be 1..4, got {i!r}")
    return int(i)


@dataclass(frozen=True)
class PolynomialScalar:
    """Polynomial in x with ascending coefficients c0..cd."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        cs = tuple(float(c) for c in self.coeffs)
        if not cs:
            raise ValueError("empty coefficient list; use [0] for the zero polynomial")
        if not all(math.isfinite(c) for c in cs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def const(cls, c: float) -> PolynomialScalar:
        return cls((c,))

    def __call__(self, x: float) -> float:
        return float(npoly.polyval(x, self.coeffs))

    def derivative(self) -> PolynomialScalar:
        d = npoly.polyder(self.coeffs)
        return PolynomialScalar(tuple(d) if len(d) else (0.0,))

    def shifted(self, c: float) -> PolynomialScalar:
        cs = list(self.coeffs)
        cs[0] += c
        return PolynomialScalar(tuple(cs))


@dataclass(frozen=True)
class FieldTriple:
    alpha: PolynomialScalar
    beta: PolynomialScalar
    gamma: PolynomialScalar

    @classmethod
    def const(cls, alpha: float, beta: float, gamma: float) -> FieldTriple:
        P = PolynomialScalar.const
        return cls(P(alpha), P(beta), P(gamma))

    def __call__(self, x: float) -> tuple[float, float, float]:
        return (self.alpha(x), self.beta(x), self.gamma(x))


@dataclass(frozen=True)
class PwsSystem:
    fields: tuple[FieldTriple, FieldTriple, FieldTriple, FieldTriple]
    x_domain: tuple[float, float] = (-1.0, 1.0)
    name: str = "system"

    def __post_init__(self) -> None:
        fs = tuple(self.fields)
        if len(fs) != 4:
            raise ValueError("exactly four fields are required")
        lo, hi = (float(v) for v in self.x_domain)
        if not lo <= hi:
            raise ValueError("x_domain must satisfy lo <= hi")
        object.__setattr__(self, "fields", fs)
        object.__setattr__(self, "x_domain", (lo, hi))

    @classmethod
    def constant(
        cls,
        xt: Sequence[Sequence[float]],
        alpha: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
        x_domain: tuple[float, float] = (-1.0, 1.0),
        name: str = "system",
    ) -> PwsSystem:
        """System with x-independent fields from projected corners and alphas."""
        fs = tuple(FieldTriple.const(a, b, g) for a, (b, g) in zip(alpha, xt))
        return cls(fs, x_domain, name)

    def field(self, i: int) -> FieldTriple:
        return self.fields[_check_index(i) - 1]

    def in_domain(self, x: float) -> bool:
        return self.x_domain[0] <= x <= self.x_domain[1]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuadCorners:
    """Projected corners X~_i = (beta_i, gamma_i) and alphas at one x.

    Arrays are 0-based: ``xt[0]`` is X~_1.
    """

    x: float
    alpha: np.ndarray
    xt: np.ndarray

    def __post_init__(self) -> None:
        a = _frozen(self.alpha)
        p = _frozen(self.xt)
        if a.shape != (4,) or p.shape != (4, 2):
            raise ValueError("alpha must have shape (4,), xt shape (4, 2)")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "xt", p)
        object.__setattr__(self, "x", float(self.x))

    @classmethod
    def from_xt(cls, xt, alpha=(1.0, 1.0, 1.0, 1.0), x: float = 0.0) -> QuadCorners:
        return cls(x, np.asarray(alpha, float), np.asarray(xt, float))

    def corner(self, i: int) -> np.ndarray:
        """X~_i with 1-based wrapping index."""
        return self.xt[wrap(i) - 1]

    @property
    def beta(self) -> np.ndarray:
        return self.xt[:, 0]

    @property
    def gamma(self) -> np.ndarray:
        return self.xt[:, 1]

    def full(self) -> np.ndarray:
        """Full vectors X_i as rows (alpha, beta, gamma)."""
        return np.column_stack([self.alpha, self.xt])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuadCorners):
            return NotImplemented
        return (
            self.x == other.x
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.xt, other.xt)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class QuadrantResult:
    """Either an open quadrant (``interior`` set) or a switching set (``plane`` set)."""

    interior: int | None = None
    plane: str | None = None  # "Pi_f", "Pi_g" or "Lambda"

    @property
    def on_plane(self) -> bool:
        return self.plane is not None


def select_quadrant(y: float, z: float) -> QuadrantResult:
    if y == 0 and z == 0:
        return QuadrantResult(plane="Lambda")
    if y == 0:
        return QuadrantResult(plane="Pi_f")
    if z == 0:
        return QuadrantResult(plane="Pi_g")
    if y > 0:
        return QuadrantResult(interior=1 if z > 0 else 4)
    return QuadrantResult(interior=2 if z > 0 else 3)


def eval_field(system: PwsSystem, i: int, x: float) -> tuple[float, float, float]:
    """Evaluate X_i at x. Points outside ``x_domain`` are allowed; see :func:`eval_field_checked`."""
    return system.field(i)(x)


def eval_field_checked(system: PwsSystem, i: int, x: float) -> tuple[tuple[float, float, float], bool]:
    """Like :func:`eval_field` but also returns whether x lay outside the domain."""
    return system.field(i)(x), not system.in_domain(x)


def project(system: PwsSystem, x: float) -> QuadCorners:
    vals = np.array([f(x) for f in system.fields])
    return QuadCorners(x, vals[:, 0], vals[:, 1:])


# Plane Pi_i separates Q_i and Q_{i+1}. For each i: which coordinate of X~ is
# normal to the plane (0 = beta, 1 = gamma) and the sign of that coordinate
# inside Q_i and inside Q_{i+1}.
_PLANES: dict[int, tuple[int, int, int]] = {
    1: (0, +1, -1),  # y = 0, Q1 has y > 0, Q2 has y < 0
    2: (1, +1, -1),  # z = 0, Q2 has z > 0, Q3 has z < 0
    3: (0, -1, +1),  # y = 0, Q3 has y < 0, Q4 has y > 0
    4: (1, -1, +1),  # z = 0, Q4 has z < 0, Q1 has z > 0
}


class Codim1Class(Enum):
    CROSSING = "crossing"
    SLIDING = "sliding"
    FOLD = "fold"


class Codim1Stability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class Codim1Sliding:
    plane: int
    sigma: float
    vector: np.ndarray = field(repr=False)
    stability: Codim1Stability


def _normals(system: PwsSystem, i: int, x: float) -> tuple[float, float]:
    comp = _PLANES[i][0] + 1
    a = system.field(i)(x)[comp]
    b = system.field(wrap(i + 1))(x)[comp]
    return a, b


def classify_codim1(system: PwsSystem, i: int, x: float) -> Codim1Class:
    i = _check_index(i)
    a, b = _normals(system, i, x)
    prod = a * b
    if abs(prod) <= TAU_FOLD:
        return Codim1Class.FOLD
    return Codim1Class.CROSSING if prod > 0 else Codim1Class.SLIDING


def filippov_codim1(system: PwsSystem, i: int, x: float) -> Codim1Sliding:
    """Filippov sliding vector on Pi_i, the convex combination of X_i and X_{i+1}."""
    i = _check_index(i)
    if classify_codim1(system, i, x) is not Codim1Class.SLIDING:
        raise NotSlidingRegion(f"Pi_{i} is not a sliding region at x={x}")
    n_i, n_j = _normals(system, i, x)
    sigma = n_j / (n_j - n_i)
    xi = np.array(system.field(i)(x))
    xj = np.array(system.field(wrap(i + 1))(x))
    vec = sigma * xi + (1.0 - sigma) * xj
    _, s_i, s_j = _PLANES[i]
    # attracting when each field points back toward the plane from its own side
    stable = s_i * n_i < 0 and s_j * n_j < 0
    return Codim1Sliding(i, float(sigma), vec, Codim1Stability.STABLE if stable else Codim1Stability.UNSTABLE)


def system_from_rows(rows: Iterable[tuple[Sequence[float], Sequence[float], Sequence[float]]], **kw) -> PwsSystem:
    """Build from four (alpha, beta, gamma) coefficient lists."""
    fs = tuple(FieldTriple(*(PolynomialScalar(tuple(c)) for c in r)) for r in rows)
    return PwsSystem(fs, **kw)


def require(cond: bool, msg: str) -> None:
    if not cond:
        raise PreconditionError(msg)
