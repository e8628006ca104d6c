"""Layer and reduced problems, regularized simulation and the eps -> 0 experiment."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _dopri
from ._parallel import worker_count
from .canopy import f_tilde
from .errors import PreconditionError
from .pws_model import PwsSystem, QuadCorners, project
from .regularization import RegFunction, regularized_field
from .sliding_solver import SlidingSolution, critical_manifold_point, sliding_speed, solve_sigmas
from .stability import stability_report

__all__ = [
    "LayerState",
    "Trajectory",
    "NoAttractingSolution",
    "layer_rhs",
    "reduced_rhs",
    "integrate_regularized",
    "integrate_layer",
    "attracting_solution",
    "ConvergenceRow",
    "ConvergenceResult",
    "convergence_experiment",
]


class NoAttractingSolution(PreconditionError):
    pass


@dataclass(frozen=True)
class LayerState:
    y_hat: float
    z_hat: float


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")

    def to_csv(self, header: str) -> str:
        lines = [header]
        for t, s in zip(self.times, self.states):
            lines.append(",".join(f"{v:.17g}" for v in (t, *s)))
        return "\n".join(lines) + "\n"


def layer_rhs(corners: QuadCorners, reg_y: RegFunction, reg_z: RegFunction, s: LayerState) -> np.ndarray:
    return f_tilde(corners, float(reg_y.value(s.y_hat)), float(reg_z.value(s.z_hat)))


def reduced_rhs(corners: QuadCorners, sol: SlidingSolution) -> float:
    return sliding_speed(corners, sol.nu)


def _meta(eps, reg_y, reg_z, sol: _dopri.Solution, **extra) -> dict:
    return {
        "eps": eps,
        "reg_y": reg_y.name,
        "reg_z": reg_z.name,
        "nfev": sol.stats.nfev,
        "naccept": sol.stats.naccept,
        "nreject": sol.stats.nreject,
        **extra,
    }


def integrate_regularized(
    system: PwsSystem,
    reg_y: RegFunction,
    reg_z: RegFunction,
    eps: float,
    p0,
    t_end: float,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    t_eval=None,
    max_steps: int = 500_000,
) -> Trajectory:
    if not eps > 0:
        raise PreconditionError("eps must be positive")
    if not t_end > 0:
        raise PreconditionError("t_end must be positive")
    if not (rtol > 0 and atol > 0):
        raise PreconditionError("tolerances must be positive")

    def rhs(_t, p):
        return regularized_field(system, reg_y, reg_z, eps, p)

    sol = _dopri.solve(rhs, 0.0, np.asarray(p0, float), t_end, rtol, atol, t_eval, max_steps)
    return Trajectory(sol.t, sol.y, _meta(eps, reg_y, reg_z, sol))


def integrate_layer(
    corners: QuadCorners,
    reg_y: RegFunction,
    reg_z: RegFunction,
    s0: LayerState,
    tau_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    t_eval=None,
) -> Trajectory:
    """Fast-time flow of the layer problem with x frozen. Negative ``tau_end`` runs backward."""
    sign = 1.0 if tau_end > 0 else -1.0
    if tau_end == 0:
        raise PreconditionError("tau_end must be nonzero")

    def rhs(_t, s):
        return sign * f_tilde(corners, float(reg_y.value(s[0])), float(reg_z.value(s[1])))

    te = None if t_eval is None else sign * np.asarray(t_eval, float)
    sol = _dopri.solve(rhs, 0.0, [s0.y_hat, s0.z_hat], abs(tau_end), rtol, atol, te)
    return Trajectory(sign * sol.t, sol.y, _meta(None, reg_y, reg_z, sol, x=corners.x))


def attracting_solution(
    corners: QuadCorners, reg_y: RegFunction, reg_z: RegFunction
) -> SlidingSolution:
    """The single attracting sliding solution, or :class:`NoAttractingSolution`."""
    sols = [s for s in solve_sigmas(corners) if stability_report(corners, s, reg_y, reg_z).kind.attracting]
    if len(sols) != 1:
        raise NoAttractingSolution(f"{len(sols)} attracting sliding solutions at x={corners.x}")
    return sols[0]


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    error: float
    error_x: float
    order: float | None


@dataclass(frozen=True)
class ConvergenceResult:
    rows: list[ConvergenceRow]

    @property
    def monotone(self) -> bool:
        errs = [r.error for r in sorted(self.rows, key=lambda r: -r.eps)]
        return all(b < a for a, b in zip(errs, errs[1:]))

    def to_csv(self) -> str:
        lines = ["eps,error,error_x,order"]
        for r in self.rows:
            o = "" if r.order is None else f"{r.order:.17g}"
            lines.append(f"{r.eps:.17g},{r.error:.17g},{r.error_x:.17g},{o}")
        return "\n".join(lines) + "\n"


def _reduced_flow(system, reg_y, reg_z, x0, t_grid):
    def rhs(_t, x):
        c = project(system, float(x[0]))
        return np.array([sliding_speed(c, attracting_solution(c, reg_y, reg_z).nu)])

    return _dopri.solve(rhs, 0.0, [x0], float(t_grid[-1]), 1e-12, 1e-14, t_grid).y[:, 0]


def _one_run(system, reg_y, reg_z, eps, x0, yz_hat, t_end, rtol, atol, x_red, n_samples):
    t_bl = 10.0 * eps * abs(math.log(eps))
    if t_bl >= t_end:
        raise PreconditionError(f"boundary layer {t_bl:.3g} exceeds t_end for eps={eps}")
    t_eval = np.linspace(t_bl, t_end, n_samples)
    p0 = (x0, eps * yz_hat[0], eps * yz_hat[1])
    tr = integrate_regularized(system, reg_y, reg_z, eps, p0, t_end, rtol, atol, t_eval)
    xr = x_red(t_eval)
    dx = np.abs(tr.states[:, 0] - xr)
    dyz = np.abs(tr.states[:, 1:]).max(axis=1)
    return float(np.max(np.maximum(dx, dyz))), float(np.max(dx))


def convergence_experiment(
    system: PwsSystem,
    reg_y: RegFunction,
    reg_z: RegFunction,
    x0: float,
    eps_list,
    t_end: float = 1.0,
    yz_hat0: tuple[float, float] = (1.0, 1.0),
    rtol: float = 1e-10,
    atol: float = 1e-13,
    n_samples: int = 2001,
) -> ConvergenceResult:
    """Sup-distance between regularized trajectories and the sliding flow on the x-axis.

    Each run starts at (x0, eps*y_hat0, eps*z_hat0). Samples before
    10*eps*|ln eps| are discarded. ``error`` measures all three components
    against (x_r(t), 0, 0); ``error_x`` only the first.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 or e >= 1 for e in eps_list):
        raise PreconditionError("eps values must lie in (0, 1)")
    attracting_solution(project(system, x0), reg_y, reg_z)

    t_grid_cache: dict[tuple, np.ndarray] = {}

    def x_red(t):
        key = (float(t[0]), float(t[-1]), len(t))
        if key not in t_grid_cache:
            grid = np.concatenate([[0.0], t]) if t[0] > 0 else t
            xr = _reduced_flow(system, reg_y, reg_z, x0, grid)
            t_grid_cache[key] = xr[-len(t):]
        return t_grid_cache[key]

    # reduced flows are computed up front so worker threads only read the cache
    for e in eps_list:
        x_red(np.linspace(10.0 * e * abs(math.log(e)), t_end, n_samples))

    with ThreadPoolExecutor(max_workers=worker_count(len(eps_list))) as ex:
        futs = [
            ex.submit(_one_run, system, reg_y, reg_z, e, x0, yz_hat0, t_end, rtol, atol, x_red, n_samples)
            for e in eps_list
        ]
        errs = [f.result() for f in futs]

    rows = []
    for k, (e, (err, err_x)) in enumerate(zip(eps_list, errs)):
        order = None
        if k > 0:
            e_prev, err_prev = eps_list[k - 1], errs[k - 1][0]
            if err > 0 and err_prev > 0:
                order = math.log(err_prev / err) / math.log(e_prev / e)
        rows.append(ConvergenceRow(e, err, err_x, order))
    return ConvergenceResult(rows)
