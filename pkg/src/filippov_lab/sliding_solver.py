"""Closed-form sliding coefficients on the codimension-2 line, plus a brute-force oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _backend
from .canopy import TAU_DEG, bilinear_coeffs, canopy_invariants, f_tilde
from .errors import DegenerateBoth, PreconditionError, SigmaPsiDenominatorZero
from .pws_model import QuadCorners
from .regularization import RegFunction

__all__ = [
    "TAU_ROOT",
    "TAU_BND",
    "TAU_RES",
    "Branch",
    "SlidingSolution",
    "Rejected",
    "CriticalPoint",
    "solve_sigmas",
    "solve_sigmas_detailed",
    "nu_coefficients",
    "sliding_speed",
    "critical_manifold_point",
    "oracle_roots",
    "oracle_scan",
]

TAU_ROOT = 1e-10
TAU_BND = 1e-9
TAU_RES = 1e-12


class Branch(Enum):
    PLUS = "plus"
    MINUS = "minus"
    SINGLE = "single"


@dataclass(frozen=True)
class SlidingSolution:
    sigma_psi: float
    sigma_phi: float
    nu: np.ndarray = field(repr=False)
    speed: float
    branch: Branch
    on_parabolic_line: bool = False

    @property
    def psi_star(self) -> float:
        return 2.0 * self.sigma_psi - 1.0

    @property
    def phi_star(self) -> float:
        return 2.0 * self.sigma_phi - 1.0


@dataclass(frozen=True)
class Rejected:
    """A quadratic root that did not yield an admissible solution."""

    sigma_phi: float
    sigma_psi: float | None
    reason: str  # "outside", "boundary_grazing" or "sigma_psi_denominator_zero"


def nu_coefficients(sigma_psi: float, sigma_phi: float) -> np.ndarray:
    if not (0.0 < sigma_psi < 1.0 and 0.0 < sigma_phi < 1.0):
        raise PreconditionError("sigma values must lie in (0, 1)")
    sp, sf = sigma_psi, sigma_phi
    return np.array([sp * sf, (1 - sp) * sf, (1 - sp) * (1 - sf), sp * (1 - sf)])


def sliding_speed(corners: QuadCorners, nu) -> float:
    return float(np.dot(nu, corners.alpha))


def _sigma_psi(corners: QuadCorners, sf: float) -> float | None:
    b = corners.beta
    g = corners.gamma
    # both rows give the same value in exact arithmetic; take the better-conditioned one
    den_b = (b[1] - b[0]) * sf + (b[2] - b[3]) * (1 - sf)
    den_g = (g[1] - g[0]) * sf + (g[2] - g[3]) * (1 - sf)
    if max(abs(den_b), abs(den_g)) <= TAU_DEG:
        return None
    if abs(den_b) >= abs(den_g):
        return (b[1] * sf + b[2] * (1 - sf)) / den_b
    return (g[1] * sf + g[2] * (1 - sf)) / den_g


def _quadratic_roots(a: float, b: float, c: float, disc: float) -> list[tuple[float, Branch]]:
    """Roots of a s^2 + b s + c with disc = b^2 - 4ac >= 0, cancellation-free."""
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0.0:  # b == 0 and c == 0: double root at zero
        return [(0.0, Branch.PLUS), (0.0, Branch.MINUS)]
    r1, r2 = q / a, c / q
    # with b >= 0, q/a is the "-sqrt" root; with b < 0 it is the "+sqrt" root
    if b >= 0:
        return [(r2, Branch.PLUS), (r1, Branch.MINUS)]
    return [(r1, Branch.PLUS), (r2, Branch.MINUS)]


def solve_sigmas_detailed(corners: QuadCorners) -> tuple[list[SlidingSolution], list[Rejected]]:
    inv = canopy_invariants(corners)
    a, b, c = inv.quad_a, inv.quad_b, inv.Gamma
    fold = False
    if abs(a) <= TAU_DEG:
        if abs(b) <= TAU_DEG:
            raise DegenerateBoth("both A+Gamma-B and 2Gamma-B vanish")
        cands = [(-c / b, Branch.SINGLE)]
    elif inv.Delta >= 0:
        cands = _quadratic_roots(a, b, c, inv.Delta)
    elif inv.Delta > -TAU_DEG:
        cands = [(-b / (2 * a), Branch.SINGLE)]
        fold = True
    else:
        cands = []

    sols: list[SlidingSolution] = []
    rejected: list[Rejected] = []
    lo, hi = TAU_BND, 1.0 - TAU_BND
    for sf, br in cands:
        if not (0.0 < sf < 1.0):
            rejected.append(Rejected(sf, None, "outside"))
            continue
        sp = _sigma_psi(corners, sf)
        if sp is None:
            rejected.append(Rejected(sf, None, "sigma_psi_denominator_zero"))
            continue
        if not (0.0 < sp < 1.0):
            rejected.append(Rejected(sf, sp, "outside"))
            continue
        if not (lo < sf < hi and lo < sp < hi):
            rejected.append(Rejected(sf, sp, "boundary_grazing"))
            continue
        nu = nu_coefficients(sp, sf)
        sols.append(SlidingSolution(sp, sf, nu, sliding_speed(corners, nu), br, fold))
    sols.sort(key=lambda s: (s.psi_star, s.phi_star))
    return sols, rejected


def solve_sigmas(corners: QuadCorners, strict: bool = False) -> list[SlidingSolution]:
    """Admissible sliding coefficient pairs (0, 1 or 2), sorted by psi* then phi*.

    With ``strict`` a candidate whose sigma_psi is undetermined raises
    :class:`SigmaPsiDenominatorZero` instead of being dropped.
    """
    sols, rej = solve_sigmas_detailed(corners)
    if strict:
        for r in rej:
            if r.reason == "sigma_psi_denominator_zero":
                raise SigmaPsiDenominatorZero(f"sigma_psi undetermined at sigma_phi={r.sigma_phi}")
    return sols


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    y_hat: float
    z_hat: float


def critical_manifold_point(
    sol: SlidingSolution, reg_y: RegFunction, reg_z: RegFunction, x: float
) -> CriticalPoint:
    return CriticalPoint(float(x), reg_y.inverse(sol.psi_star), reg_z.inverse(sol.phi_star))


def oracle_roots(corners: QuadCorners, n: int = 101, *, tol: float = 1e-12, max_iter: int = 50) -> list[tuple[float, float]]:
    """Zeros of the projected canopy map over the open square, found by brute force.

    Independent of the closed form: scans sign-change cells, refines each by
    2-D Newton, deduplicates at 1e-6 and drops anything within the boundary band.
    """
    return oracle_scan(corners, n, tol=tol, max_iter=max_iter)[0]


def oracle_scan(
    corners: QuadCorners, n: int = 101, *, tol: float = 1e-12, max_iter: int = 50
) -> tuple[list[tuple[float, float]], int]:
    """:func:`oracle_roots` plus the number of cells skipped after Newton divergence."""
    if n < 41:
        raise PreconditionError("oracle grid needs n >= 41")
    bm = bilinear_coeffs(corners)
    pts, failed = _backend.scan_roots(bm.as_array(), n, tol, max_iter)
    lim = 1.0 - 2.0 * TAU_BND
    roots: list[tuple[float, float]] = []
    for p, f in pts:
        if not (abs(p) < lim and abs(f) < lim):
            continue
        if any(math.hypot(p - q, f - r) <= 1e-6 for q, r in roots):
            continue
        roots.append((float(p), float(f)))
    if len(roots) > 2:
        raise RuntimeError(f"bilinear map cannot have {len(roots)} isolated zeros")
    roots.sort()
    return roots, int(failed)


def residual(corners: QuadCorners, sol: SlidingSolution) -> float:
    return float(np.max(np.abs(f_tilde(corners, sol.psi_star, sol.phi_star))))
