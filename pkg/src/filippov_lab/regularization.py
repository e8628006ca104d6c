"""Monotone sigmoid regularization functions and the doubly regularized field."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import PreconditionError
from .pws_model import PwsSystem, QuadCorners, project

__all__ = [
    "Family",
    "RegFunction",
    "TANH",
    "ARCTAN",
    "ST",
    "by_name",
    "phi_plus",
    "phi_minus",
    "regularized_field",
]

_TWO_OVER_PI = 2.0 / math.pi


class Family(Enum):
    TANH = "tanh"
    ARCTAN = "arctan"
    SOTOMAYOR_TEIXEIRA = "st"


def _st_value(s: float) -> float:
    if s >= 1.0:
        return 1.0
    if s <= -1.0:
        return -1.0
    return 0.5 * s * (3.0 - s * s)


def _st_inverse(p: float) -> float:
    # Newton on the cubic, kept inside a shrinking bisection bracket.
    lo, hi = -1.0, 1.0
    s = p  # decent start: the cubic is close to identity near 0
    for _ in range(200):
        f = _st_value(s) - p
        if f == 0.0:
            return s
        if f > 0:
            hi = s
        else:
            lo = s
        d = 1.5 * (1.0 - s * s)
        step_ok = False
        if d > 0:
            s_new = s - f / d
            if lo < s_new < hi:
                step_ok = True
        if not step_ok:
            s_new = 0.5 * (lo + hi)
        if abs(s_new - s) <= 1e-16 * max(1.0, abs(s)) or hi - lo <= 1e-16:
            return s_new
        s = s_new
    return s


@dataclass(frozen=True)
class RegFunction:
    """Strictly increasing transition from -1 to +1."""

    family: Family

    @property
    def name(self) -> str:
        return self.family.value

    def value(self, s):
        if self.family is Family.TANH:
            return np.tanh(s)
        if self.family is Family.ARCTAN:
            return _TWO_OVER_PI * np.arctan(s)
        if np.ndim(s) == 0:
            return _st_value(float(s))
        s = np.asarray(s, float)
        return np.where(np.abs(s) >= 1.0, np.sign(s), 0.5 * s * (3.0 - s * s))

    __call__ = value

    def derivative(self, s):
        if self.family is Family.TANH:
            c = np.cosh(s)
            return 1.0 / (c * c)
        if self.family is Family.ARCTAN:
            return _TWO_OVER_PI / (1.0 + np.square(s))
        s_arr = np.asarray(s, float)
        d = np.where(np.abs(s_arr) >= 1.0, 0.0, 1.5 * (1.0 - s_arr * s_arr))
        return float(d) if np.ndim(s) == 0 else d

    def inverse(self, p: float) -> float:
        p = float(p)
        if not -1.0 < p < 1.0:
            raise PreconditionError(f"inverse needs p in (-1, 1), got {p}")
        if self.family is Family.TANH:
            return math.atanh(p)
        if self.family is Family.ARCTAN:
            return math.tan(p / _TWO_OVER_PI)
        return _st_inverse(p)


TANH = RegFunction(Family.TANH)
ARCTAN = RegFunction(Family.ARCTAN)
ST = RegFunction(Family.SOTOMAYOR_TEIXEIRA)

_BY_NAME = {f.name: f for f in (TANH, ARCTAN, ST)}


def by_name(name: str) -> RegFunction:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise PreconditionError(f"unknown regularization {name!r}; choose from {sorted(_BY_NAME)}") from None


def phi_plus(f: RegFunction, r: float) -> float:
    """phi_+(r) = f(1/r) for r > 0, extended by 1 at r = 0."""
    if r < 0:
        raise PreconditionError("phi_plus needs r >= 0")
    if r == 0:
        return 1.0
    return float(f.value(1.0 / r))


def phi_minus(f: RegFunction, r: float) -> float:
    if r > 0:
        raise PreconditionError("phi_minus needs r <= 0")
    if r == 0:
        return -1.0
    return float(f.value(1.0 / r))


def regularized_field(
    system: PwsSystem | QuadCorners,
    reg_y: RegFunction,
    reg_z: RegFunction,
    eps: float,
    p,
) -> np.ndarray:
    """Doubly regularized vector field at p = (x, y, z).

    ``system`` may already be a :class:`QuadCorners` when x is frozen.
    """
    if not eps > 0:
        raise PreconditionError("eps must be positive")
    x, y, z = (float(v) for v in p)
    corners = system if isinstance(system, QuadCorners) else project(system, x)
    from .canopy import f_x  # local import: canopy depends on this module's siblings only

    return f_x(corners, float(reg_y.value(y / eps)), float(reg_z.value(z / eps)))
