"""Command-line front end.

Exit codes: 0 sliding found / success, 1 input file unreadable or invalid,
2 invalid arguments, 3 no sliding, 4 degenerate configuration, 5 solver
failure, 6 no attracting sliding solution.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bifurcation import scan
from .canopy import QuadClass, canopy_invariants, origin_location, quad_shape
from .dynamics import NoAttractingSolution, convergence_experiment, integrate_regularized
from .errors import DegenerateBoth, DegenerateQuadrilateral, MaxStepsExceeded, PreconditionError, StepSizeUnderflow
from .pws_model import project
from .regularization import by_name
from .sliding_solver import solve_sigmas
from .stability import Kind, stability_report
from .sysfile import SystemParseError, canonical_digest, load_system

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_ARGS = 2
EXIT_NO_SLIDING = 3
EXIT_DEGENERATE = 4
EXIT_SOLVER = 5
EXIT_NO_ATTRACTING = 6


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse's exit code 2 but one-line message
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ARGS)


def _g(v: float) -> str:
    return f"{v:.10g}"


def _g17(v: float) -> str:
    return f"{v:.17g}"


def _reg(name: str):
    try:
        return by_name(name)
    except PreconditionError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _describe(kind: Kind, rep) -> str:
    if kind is Kind.SADDLE:
        return "saddle"
    if kind is Kind.CENTER:
        return "center"
    if kind is Kind.NON_HYPERBOLIC:
        return "non-hyperbolic"
    base, direction = kind.value.split("_")
    tag = "regularization-independent" if rep.reg_independent else "regularization-dependent"
    return f"{base} ({direction}, {tag})"


# ------------------------------------------------------------------ commands


def cmd_classify(args) -> int:
    system = load_system(args.system)
    c = project(system, args.x)
    shape = quad_shape(c)
    inv = canopy_invariants(c)
    out = [f"system: {system.name}", f"x: {_g(args.x)}", f"class: {shape.cls.value}"]
    if shape.chi1_role is not None:
        out.append(f"chi1_role: {shape.chi1_role.value}")
    if shape.tip is not None:
        out.append(f"tip: {shape.tip}  reflex: {shape.reflex}")
    out.append("delta: " + ", ".join(_g(d) for d in shape.delta))
    out.append(f"A: {_g(inv.A)}  B: {_g(inv.B)}  Gamma: {_g(inv.Gamma)}  Delta: {_g(inv.Delta)}")
    code = None
    location = "undetermined (degenerate quadrilateral)"
    if shape.cls is not QuadClass.DEGENERATE:
        loc = origin_location(c)
        location = loc.variant.value + (f" ({loc.region.value})" if loc.region else "")
    else:
        code = EXIT_DEGENERATE
    out.append(f"location: {location}")
    try:
        sols = solve_sigmas(c)
    except DegenerateBoth as exc:
        out.append(f"solver: degenerate ({exc})")
        print("\n".join(out))
        return EXIT_DEGENERATE
    reports = [stability_report(c, s, args.reg_y, args.reg_z) for s in sols]
    for k, (s, r) in enumerate(zip(sols, reports), start=1):
        out.append(
            f"solution {k}: sigma=({_g(s.sigma_psi)}, {_g(s.sigma_phi)}) "
            f"nu=({', '.join(_g(v) for v in s.nu)}) speed={_g(s.speed)} "
            f"kind={r.kind.value} reg_independent={str(r.reg_independent).lower()} branch={s.branch.value}"
        )
    if not sols:
        summary = "no sliding"
    elif len(sols) == 1:
        summary = f"{shape.cls.value}; unique; {_describe(reports[0].kind, reports[0])}; speed={_g(sols[0].speed)}"
    else:
        kinds = " + ".join(
            "saddle" if r.kind is Kind.SADDLE else "node/focus" for r in sorted(reports, key=lambda r: r.kind is not Kind.SADDLE)
        )
        summary = f"two solutions: {kinds}"
    out.append(f"summary: {summary}")
    if args.json:
        env = {
            "tool_version": __version__,
            "input_digest": canonical_digest(system),
            "command": "classify",
            "parameters": {"x": args.x, "reg_y": args.reg_y.name, "reg_z": args.reg_z.name},
            "results": {
                "class": shape.cls.value,
                "delta": [float(d) for d in shape.delta],
                "invariants": {"A": inv.A, "B": inv.B, "Gamma": inv.Gamma, "Delta": inv.Delta},
                "location": location,
                "solutions": [
                    {
                        "sigma_psi": s.sigma_psi,
                        "sigma_phi": s.sigma_phi,
                        "nu": [float(v) for v in s.nu],
                        "speed": s.speed,
                        "kind": r.kind.value,
                        "reg_independent": r.reg_independent,
                    }
                    for s, r in zip(sols, reports)
                ],
            },
        }
        print(json.dumps(env, indent=2, sort_keys=True))
    else:
        print("\n".join(out))
    if code is not None:
        return code
    return EXIT_OK if sols else EXIT_NO_SLIDING


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    if not args.eps > 0:
        print("error: --eps must be positive", file=sys.stderr)
        return EXIT_ARGS
    if not args.t_end > 0 or not args.rtol > 0 or not args.atol > 0:
        print("error: --t-end, --rtol and --atol must be positive", file=sys.stderr)
        return EXIT_ARGS
    if args.samples is not None and args.samples < 2:
        print("error: --samples must be at least 2", file=sys.stderr)
        return EXIT_ARGS
    system = load_system(args.system)
    t_eval = None if args.samples is None else np.linspace(0.0, args.t_end, args.samples)
    header = "t,x,y,z"
    try:
        tr = integrate_regularized(
            system, args.reg_y, args.reg_z, args.eps, (args.x0, args.y0, args.z0), args.t_end, args.rtol, args.atol, t_eval
        )
    except (StepSizeUnderflow, MaxStepsExceeded) as exc:
        rows = [header] + [
            ",".join(_g17(v) for v in (t, *s)) for t, s in zip(exc.partial_t, exc.partial_y)
        ]
        _emit("\n".join(rows) + "\n", args.out)
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(tr.to_csv(header), args.out)
    return EXIT_OK


def cmd_layer(args) -> int:
    if args.grid < 2:
        print("error: --grid must be at least 2", file=sys.stderr)
        return EXIT_ARGS
    if not args.L > 0:
        print("error: --L must be positive", file=sys.stderr)
        return EXIT_ARGS
    system = load_system(args.system)
    c = project(system, args.x)
    g = np.linspace(-args.L, args.L, args.grid)
    rows = ["y_hat,z_hat,dy_hat,dz_hat"]
    from .dynamics import LayerState, layer_rhs

    for yh in g:
        for zh in g:
            d = layer_rhs(c, args.reg_y, args.reg_z, LayerState(float(yh), float(zh)))
            rows.append(",".join(_g17(float(v)) for v in (yh, zh, d[0], d[1])))
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    system = load_system(args.system)
    lo = system.x_domain[0] if args.x_lo is None else args.x_lo
    hi = system.x_domain[1] if args.x_hi is None else args.x_hi
    if not lo < hi or args.n < 3:
        print("error: need x-lo < x-hi and n >= 3", file=sys.stderr)
        return EXIT_ARGS
    events = scan(system, lo, hi, args.n, refine=args.refine)
    _emit(json.dumps([e.to_json() for e in events], indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_converge(args) -> int:
    try:
        eps = [float(v) for v in args.eps_list.split(",") if v.strip()]
    except ValueError:
        print("error: --eps-list must be comma-separated numbers", file=sys.stderr)
        return EXIT_ARGS
    if not eps or any(not 0 < e < 1 for e in eps):
        print("error: eps values must lie in (0, 1)", file=sys.stderr)
        return EXIT_ARGS
    system = load_system(args.system)
    x0 = system.x_domain[0] if args.x0 is None else args.x0
    try:
        res = convergence_experiment(
            system, args.reg_y, args.reg_z, x0, eps, args.t_end, (args.y_hat0, args.z_hat0)
        )
    except NoAttractingSolution as exc:
        print(f"no attracting sliding solution: {exc}", file=sys.stderr)
        return EXIT_NO_ATTRACTING
    except (StepSizeUnderflow, MaxStepsExceeded) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(res.to_csv(), args.out)
    return EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="filippov-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, regs=True):
        sp.add_argument("--system", required=True, help="system JSON file")
        if regs:
            sp.add_argument("--reg-y", type=_reg, default=by_name("tanh"), help="tanh | arctan | st")
            sp.add_argument("--reg-z", type=_reg, default=by_name("tanh"), help="tanh | arctan | st")

    sp = sub.add_parser("classify", help="quadrilateral class, sliding solutions and stability at one x")
    common(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--json", action="store_true", help="emit a JSON report envelope")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("simulate", help="integrate the regularized system, CSV out")
    common(sp)
    for k in ("x0", "y0", "z0"):
        sp.add_argument(f"--{k}", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--t-end", type=float, required=True)
    sp.add_argument("--rtol", type=float, default=1e-8)
    sp.add_argument("--atol", type=float, default=1e-10)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("layer", help="layer-problem vector field on a grid, CSV out")
    common(sp)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--grid", type=int, required=True)
    sp.add_argument("--L", type=float, default=3.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_layer)

    sp = sub.add_parser("scan", help="sliding bifurcations along x, JSON out")
    common(sp, regs=False)
    sp.add_argument("--x-lo", type=float)
    sp.add_argument("--x-hi", type=float)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--refine", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("converge", help="regularized vs sliding flow as eps shrinks, CSV out")
    common(sp)
    sp.add_argument("--eps-list", required=True)
    sp.add_argument("--x0", type=float)
    sp.add_argument("--t-end", type=float, default=1.0)
    sp.add_argument("--y-hat0", type=float, default=1.0)
    sp.add_argument("--z-hat0", type=float, default=1.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_converge)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DegenerateQuadrilateral, DegenerateBoth) as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except PreconditionError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    raise SystemExit(main())
