"""Sliding bifurcations along the x-axis: sampling, bracketing and bisection."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._parallel import worker_count
from .canopy import TAU_DEG, canopy_invariants, det2
from .errors import DegenerateBoth, PreconditionError
from .pws_model import PwsSystem, QuadCorners, project
from .regularization import TANH, RegFunction
from .sliding_solver import _sigma_psi, nu_coefficients, solve_sigmas
from .stability import fast_jacobian, tangent_jacobian

__all__ = [
    "EventKind",
    "BifurcationEvent",
    "CanardCheck",
    "EquatorRoot",
    "EquatorDiagnostic",
    "scan",
    "canard_candidate",
    "equator_equilibria",
]

X_TOL = 1e-10
MERGE_TOL = 1e-8
SEGMENT_TOL = 1e-8


class EventKind(Enum):
    EDGE_CROSSING = "edge_crossing"
    PARABOLIC_TANGENCY = "parabolic_tangency"
    COUNT_CHANGE = "count_change"
    CANARD_CANDIDATE = "canard_candidate"
    DEGENERACY = "degeneracy_encountered"


@dataclass(frozen=True)
class BifurcationEvent:
    x_star: float
    kind: EventKind
    bracket: tuple[float, float]
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "x_star": float(self.x_star),
            "bracket": [float(self.bracket[0]), float(self.bracket[1])],
            "diagnostics": _plain(self.diagnostics),
        }


def _plain(v):
    """Convert numpy scalars inside nested containers to builtin types."""
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


# ------------------------------------------------------------------ monitors


def _edge_det(system: PwsSystem, i: int, x: float) -> float:
    c = project(system, x)
    return det2(c.corner(i), c.corner(i + 1))


def _delta(system: PwsSystem, x: float) -> float:
    return canopy_invariants(project(system, x)).Delta


def _count(system: PwsSystem, x: float) -> int | None:
    try:
        return len(solve_sigmas(project(system, x)))
    except DegenerateBoth:
        return None


def _bisect(fn, lo: float, hi: float, f_lo: float) -> tuple[float, float]:
    """Shrink a sign-change bracket of ``fn`` below X_TOL."""
    s_lo = math.copysign(1.0, f_lo)
    for _ in range(200):
        if hi - lo <= X_TOL:
            break
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid, mid
        if math.copysign(1.0, f_mid) == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _bisect_count(system, lo: float, hi: float, c_lo) -> tuple[float, float]:
    for _ in range(200):
        if hi - lo <= X_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _count(system, mid) == c_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _seg_distance(o, a, b) -> tuple[float, float]:
    ab = b - a
    L = float(np.hypot(*ab))
    if L == 0:
        return float(np.hypot(*(a - o))), 0.0
    t = min(1.0, max(0.0, float(np.dot(o - a, ab)) / (L * L)))
    return float(np.hypot(*(a + t * ab - o))), L


def _brackets(xs: np.ndarray, vals: np.ndarray) -> list[tuple[float, float, float]]:
    """(lo, hi, value at lo) for each sign change, including exact zeros at samples."""
    out = []
    k = 0
    n = len(xs)
    while k < n - 1:
        a, b = vals[k], vals[k + 1]
        if a * b < 0:
            out.append((xs[k], xs[k + 1], a))
        elif b == 0 and a != 0:
            j = k + 1
            while j < n - 1 and vals[j] == 0:
                j += 1
            if vals[j] * a < 0:
                out.append((xs[k], xs[j], a))
            k = j - 1
        k += 1
    return out


def _double_root(c: QuadCorners) -> tuple[float, float] | None:
    inv = canopy_invariants(c)
    a, b = inv.quad_a, inv.quad_b
    if abs(a) <= TAU_DEG:
        return None
    sf = -b / (2 * a)
    if not 0 < sf < 1:
        return None
    sp = _sigma_psi(c, sf)
    if sp is None or not 0 < sp < 1:
        return None
    return sp, sf


# ---------------------------------------------------------------------- scan


def _scan_once(system: PwsSystem, x_lo: float, x_hi: float, n: int, canard_regs) -> list[BifurcationEvent]:
    xs = np.linspace(x_lo, x_hi, n)
    with ThreadPoolExecutor(max_workers=worker_count(n)) as ex:
        corners = list(ex.map(lambda x: project(system, float(x)), xs))
    dets = np.array([[det2(c.corner(i), c.corner(i + 1)) for i in (1, 2, 3, 4)] for c in corners])
    deltas = np.array([canopy_invariants(c).Delta for c in corners])
    counts = []
    for c in corners:
        try:
            counts.append(len(solve_sigmas(c)))
        except DegenerateBoth:
            counts.append(None)

    events: list[BifurcationEvent] = []

    # edge crossings
    edge_hits: list[tuple[float, float, float, int]] = []
    for i in (1, 2, 3, 4):
        for lo, hi, f_lo in _brackets(xs, dets[:, i - 1]):
            lo, hi = _bisect(lambda x, i=i: _edge_det(system, i, x), lo, hi, f_lo)
            xm = 0.5 * (lo + hi)
            c = project(system, xm)
            a, b = c.corner(i), c.corner(i + 1)
            dist, L = _seg_distance(np.zeros(2), a, b)
            # a corner sitting on the origin is a corner exit, left to the count monitor
            at_corner = min(np.hypot(*a), np.hypot(*b)) <= SEGMENT_TOL * L
            if L > 0 and dist <= SEGMENT_TOL * L and not at_corner:
                edge_hits.append((xm, lo, hi, i))
    edge_hits.sort()
    groups: list[list[tuple[float, float, float, int]]] = []
    for h in edge_hits:
        if groups and abs(h[0] - groups[-1][0][0]) <= MERGE_TOL:
            groups[-1].append(h)
        else:
            groups.append([h])
    for g in groups:
        xm = g[0][0]
        lo = min(h[1] for h in g)
        hi = max(h[2] for h in g)
        lo, hi = _widen(lo, hi, xm)
        edges = sorted({h[3] for h in g})
        events.append(
            BifurcationEvent(
                xm,
                EventKind.EDGE_CROSSING,
                (lo, hi),
                {
                    "edge": edges[0],
                    "edges": edges,
                    "count_left": _count(system, lo - 1e-7),
                    "count_right": _count(system, hi + 1e-7),
                },
            )
        )

    # parabolic-line tangencies
    for lo, hi, f_lo in _brackets(xs, deltas):
        lo, hi = _bisect(lambda x: _delta(system, x), lo, hi, f_lo)
        xm = 0.5 * (lo + hi)
        dr = _double_root(project(system, xm))
        if dr is None:
            continue
        lo, hi = _widen(lo, hi, xm)
        ev = BifurcationEvent(
            xm,
            EventKind.PARABOLIC_TANGENCY,
            (lo, hi),
            {
                "Delta": _delta(system, xm),
                "sigma_psi": dr[0],
                "sigma_phi": dr[1],
                "count_left": _count(system, lo - 1e-7),
                "count_right": _count(system, hi + 1e-7),
            },
        )
        events.append(ev)
        if canard_regs is not None:
            chk = canard_candidate(system, ev, *canard_regs)
            if chk.flagged:
                events.append(
                    BifurcationEvent(xm, EventKind.CANARD_CANDIDATE, (lo, hi), chk.to_json())
                )

    # count changes not explained by a geometric event, and degenerate samples
    explained = [e.x_star for e in events]
    for k in range(n - 1):
        a, b = counts[k], counts[k + 1]
        if a is None:
            lo_b = xs[k - 1] if k > 0 else xs[k]
            events.append(
                BifurcationEvent(float(xs[k]), EventKind.DEGENERACY, (float(lo_b), float(xs[k + 1])), {})
            )
            continue
        if b is None or a == b:
            continue
        lo, hi = _bisect_count(system, float(xs[k]), float(xs[k + 1]), a)
        xm = 0.5 * (lo + hi)
        if any(abs(xm - e) <= 1e-6 for e in explained):
            continue
        c = project(system, xm)
        events.append(
            BifurcationEvent(
                xm,
                EventKind.COUNT_CHANGE,
                (lo, hi),
                {"from": a, "to": b, "min_corner_norm": float(np.min(np.hypot(c.xt[:, 0], c.xt[:, 1])))},
            )
        )
    if counts[-1] is None:
        events.append(BifurcationEvent(float(xs[-1]), EventKind.DEGENERACY, (float(xs[-2]), float(xs[-1])), {}))

    order = list(EventKind)
    events.sort(key=lambda e: (e.x_star, order.index(e.kind)))
    return events


def _widen(lo: float, hi: float, xm: float) -> tuple[float, float]:
    """Keep x_star strictly inside its bracket when bisection hit a zero exactly."""
    if lo == hi:
        return xm - 0.5 * X_TOL, xm + 0.5 * X_TOL
    return lo, hi


def _same_events(a: list[BifurcationEvent], b: list[BifurcationEvent]) -> bool:
    if len(a) != len(b):
        return False
    return all(p.kind == q.kind and abs(p.x_star - q.x_star) <= MERGE_TOL for p, q in zip(a, b))


def scan(
    system: PwsSystem,
    x_lo: float,
    x_hi: float,
    n: int = 200,
    refine: bool = False,
    canard_regs: tuple[RegFunction, RegFunction] | None = (TANH, TANH),
    max_doublings: int = 8,
) -> list[BifurcationEvent]:
    """Events ordered by x_star.

    With ``refine`` the sample count doubles until two consecutive doublings
    return the same event set.
    """
    if n < 3:
        raise PreconditionError("scan needs n >= 3")
    if not x_lo < x_hi:
        raise PreconditionError("scan needs x_lo < x_hi")
    events = _scan_once(system, x_lo, x_hi, n, canard_regs)
    if not refine:
        return events
    stable = 0
    for _ in range(max_doublings):
        n = 2 * n - 1
        nxt = _scan_once(system, x_lo, x_hi, n, canard_regs)
        stable = stable + 1 if _same_events(events, nxt) else 0
        events = nxt
        if stable >= 2:
            break
    return events


# -------------------------------------------------------------------- canard


@dataclass(frozen=True)
class CanardCheck:
    x_star: float
    a_rank_one: bool
    b_speed_transversal: bool
    c_unfolding: bool
    psi_star: float
    phi_star: float
    speed: float
    speed_slope: float
    d_delta_dx: float
    eigenvalues: tuple[float, float]

    @property
    def flagged(self) -> bool:
        return self.a_rank_one and self.b_speed_transversal and self.c_unfolding

    def to_json(self) -> dict:
        return {
            "checks": {"a": bool(self.a_rank_one), "b": bool(self.b_speed_transversal), "c": bool(self.c_unfolding)},
            "psi_star": self.psi_star,
            "phi_star": self.phi_star,
            "speed": self.speed,
            "speed_slope": self.speed_slope,
            "d_delta_dx": self.d_delta_dx,
        }


def canard_candidate(
    system: PwsSystem,
    event: BifurcationEvent,
    reg_y: RegFunction = TANH,
    reg_z: RegFunction = TANH,
    h: float = 1e-6,
) -> CanardCheck:
    """Check the three canard-point conditions at a parabolic tangency.

    (a) the fast Jacobian has exactly one zero eigenvalue; (b) the sliding
    speed vanishes at the fold and changes at nonzero rate along the critical
    curve, whose tangent at the fold is the kernel of DF~; (c) the
    discriminant crosses zero with nonzero x-slope.
    """
    if event.kind is not EventKind.PARABOLIC_TANGENCY:
        raise PreconditionError("canard check needs a parabolic tangency event")
    x = event.x_star
    c = project(system, x)
    dr = _double_root(c)
    if dr is None:
        raise PreconditionError("no admissible double root at the event")
    sp, sf = dr
    psi, phi = 2 * sp - 1, 2 * sf - 1
    D = tangent_jacobian(c, psi, phi)
    J = fast_jacobian(
        D,
        float(reg_y.derivative(reg_y.inverse(psi))),
        float(reg_z.derivative(reg_z.inverse(phi))),
    )
    ev = np.linalg.eigvals(J)
    mags = np.sort(np.abs(ev))
    scale = max(1.0, float(np.max(np.abs(J))))
    a_ok = bool(mags[0] <= TAU_DEG * scale and mags[1] > TAU_DEG * scale)

    speed = float(np.dot(nu_coefficients(sp, sf), c.alpha))
    # kernel of DF~ gives the tangent of the critical curve at the fold
    _, _, vt = np.linalg.svd(D)
    v = vt[-1]

    def speed_at(p, f):
        return float(np.dot(nu_coefficients((1 + p) / 2, (1 + f) / 2), c.alpha))

    slope = (speed_at(psi + h * v[0], phi + h * v[1]) - speed_at(psi - h * v[0], phi - h * v[1])) / (2 * h)
    b_ok = bool(abs(speed) <= TAU_DEG and abs(slope) > TAU_DEG)
    dd = (_delta(system, x + h) - _delta(system, x - h)) / (2 * h)
    c_ok = bool(abs(dd) > TAU_DEG)
    return CanardCheck(
        x, a_ok, b_ok, c_ok, psi, phi, speed, slope, dd, (complex(ev[0]).real, complex(ev[1]).real)
    )


# ------------------------------------------------------------------- equator


@dataclass(frozen=True)
class EquatorRoot:
    rho: float
    linearization: float
    stability: str  # "stable", "unstable" or "nonhyperbolic"


@dataclass(frozen=True)
class EquatorDiagnostic:
    quadrant: int
    roots: tuple[EquatorRoot, ...]


# quadrant sign pattern (sign y, sign z)
_QSIGNS = {1: (1, 1), 2: (-1, 1), 3: (-1, -1), 4: (1, -1)}


def _tag(lam: float) -> str:
    if abs(lam) <= TAU_DEG:
        return "nonhyperbolic"
    return "stable" if lam < 0 else "unstable"


def equator_equilibria(corners: QuadCorners) -> list[EquatorDiagnostic]:
    """Equilibria of rho' = rho (b - rho g) on rho >= 0 for each quadrant.

    Quadrant 1 uses (b, g) = (beta_1, gamma_1). The others are mapped onto it
    by reflecting y and/or z, which flips the sign of the matching component.
    """
    out = []
    for i in (1, 2, 3, 4):
        sy, sz = _QSIGNS[i]
        b = sy * float(corners.beta[i - 1])
        g = sz * float(corners.gamma[i - 1])
        roots = [EquatorRoot(0.0, b, _tag(b))]
        if g != 0 and b / g > 0:
            roots.append(EquatorRoot(b / g, -b, _tag(-b)))
        out.append(EquatorDiagnostic(i, tuple(roots)))
    return out
