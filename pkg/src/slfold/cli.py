"""Command-line interface.

Subcommands: solve, verify, example, embed, wind.
Exit codes: 0 ok, 1 usage/config, 2 no convergence, 3 singular parameters,
4 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .branch import ReductionParams, eval_p_prime
from .calibration import (
    decomposition_check,
    im_omega_residual,
    omega_residual,
    tangent_frame,
)
from .config import RunConfig, load_config
from .embedding import lift_point, sample_fields
from .errors import (
    ConfigError,
    DegeneracyEncounteredError,
    DegenerateRegionError,
    NoConvergenceError,
    SingularParametersError,
    SlfoldError,
    YZeroError,
)
from .families import AffineSolution, HLConfig, affine_uv, hl_triple, joyce_deviation
from .fieldio import (
    fmt,
    parse_projection,
    read_field_csv,
    write_field_csv,
    write_field_vtk,
    write_json,
    write_points_vtk,
    write_rows_csv,
    write_samples_csv,
)
from .grid import GridDomain
from .pde import residual_first_order, solve_dirichlet
from .winding import angle_increments, difference_trace, winding_number


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slfold", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve the Dirichlet problem from a config file")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", default=".", help="directory for output artifacts")

    p_verify = sub.add_parser("verify", help="check solution fields against the calibration budgets")
    p_verify.add_argument("--config", required=True, help="config file supplying [params]")
    p_verify.add_argument("--u", required=True)
    p_verify.add_argument("--v", required=True)
    p_verify.add_argument("--report", default="", help="path for the JSON report")
    p_verify.add_argument("--budget-first-order", type=float, default=1e-8)
    p_verify.add_argument("--budget-omega", type=float, default=1e-6)
    p_verify.add_argument("--budget-im-omega", type=float, default=1e-6)
    p_verify.add_argument("--budget-gamma", type=float, default=1e-6)
    p_verify.add_argument("--max-frames", type=int, default=200)

    p_ex = sub.add_parser("example", help="emit an explicit solution family as CSV")
    p_ex.add_argument("family", choices=["affine", "hl", "joyce"])
    p_ex.add_argument("--alpha", type=float, default=1.0)
    p_ex.add_argument("--beta", type=float, default=0.0)
    p_ex.add_argument("--gamma", type=float, default=0.0)
    p_ex.add_argument("--a", default="", help="levels, comma separated (hl: last must be 0; joyce: one value)")
    p_ex.add_argument("--b", type=float, default=0.0)
    p_ex.add_argument("--domain", default="-1,1,-1,1")
    p_ex.add_argument("--nx", type=int, default=5)
    p_ex.add_argument("--ny", type=int, default=5)
    p_ex.add_argument("--s-max", type=float, default=100.0)
    p_ex.add_argument("--s-count", type=int, default=1000)
    p_ex.add_argument("--out", default="", help="CSV output path")

    p_embed = sub.add_parser("embed", help="lift solution fields to a point cloud")
    p_embed.add_argument("--config", required=True)
    p_embed.add_argument("--u", required=True)
    p_embed.add_argument("--v", required=True)
    p_embed.add_argument("--torus-res", type=int, default=1)
    p_embed.add_argument("--project", default="", help="three of re:zK/im:zK, comma separated")
    p_embed.add_argument("--vtk", action="store_true", help="also write a VTK point cloud")
    p_embed.add_argument("--out", default=".", help="directory for output artifacts")

    p_wind = sub.add_parser("wind", help="winding number of a solution-difference map on a circle")
    p_wind.add_argument("--config", required=True)
    p_wind.add_argument("--u1", required=True)
    p_wind.add_argument("--v1", required=True)
    p_wind.add_argument("--u2", required=True)
    p_wind.add_argument("--v2", required=True)
    p_wind.add_argument("--center", required=True, help="x,y")
    p_wind.add_argument("--radius", type=float, required=True)
    p_wind.add_argument("--samples", type=int, default=256)
    p_wind.add_argument("--out", default="", help="trace CSV path")
    return parser


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    phi = cfg.boundary.resolve(cfg.domain)
    try:
        sol = solve_dirichlet(cfg.params, cfg.domain, phi, cfg.solver)
    except NoConvergenceError as exc:
        print(f"solve: {exc}", file=sys.stderr)
        return 2
    report = {
        "converged": True,
        "iterations": sol.iterations,
        "final_residual": sol.final_residual,
        "ellipticity_margin": sol.ellipticity_margin,
        "grid": {"nx": cfg.domain.nx, "ny": cfg.domain.ny},
        "params": {"n": cfg.params.n, "a": list(cfg.params.a)},
        "tolerance": cfg.solver.tolerance,
    }
    wrote_any = False
    for spec in cfg.outputs:
        target = out / spec.path
        if spec.kind == "field":
            writer = write_field_csv if spec.format == "csv" else write_field_vtk
            suffix = ".csv" if spec.format == "csv" else ".vtk"
            for name, fld in (("f", sol.f), ("u", sol.u), ("v", sol.v)):
                writer(fld, target.parent / f"{target.name}_{name}{suffix}", name=name)
            wrote_any = True
        elif spec.kind == "report":
            write_json(report, target)
            wrote_any = True
        elif spec.kind == "embedding":
            cloud = sample_fields(cfg.params, sol.u, sol.v, cfg.torus_resolution)
            write_samples_csv(cloud.samples, cfg.params.n, target)
            wrote_any = True
    if not wrote_any:
        for name, fld in (("f", sol.f), ("u", sol.u), ("v", sol.v)):
            write_field_csv(fld, out / f"{name}.csv", name=name)
        write_json(report, out / "report.json")
    print(
        f"solved: iterations={sol.iterations} residual={sol.final_residual:.3e} "
        f"ellipticity_margin={sol.ellipticity_margin:.6g}"
    )
    return 0


def _frame_partials(u: np.ndarray, v: np.ndarray, i: int, j: int, hx: float, hy: float):
    u_x = (u[i + 1, j] - u[i - 1, j]) / (2.0 * hx)
    u_y = (u[i, j + 1] - u[i, j - 1]) / (2.0 * hy)
    v_x = (v[i + 1, j] - v[i - 1, j]) / (2.0 * hx)
    v_y = (v[i, j + 1] - v[i, j - 1]) / (2.0 * hy)
    return u_x, u_y, v_x, v_y


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    params = cfg.params
    u = read_field_csv(args.u)
    v = read_field_csv(args.v)
    r1, r2 = residual_first_order(params, u, v)
    max_first_order = float(max(np.abs(r1.values).max(), np.abs(r2.values).max()))

    dom = u.domain
    xs, ys = dom.xs(), dom.ys()
    stride = max(1, int(np.ceil(np.sqrt((dom.nx - 2) * (dom.ny - 2) / args.max_frames))))
    sign_target = 1.0 if params.n % 2 == 0 else -1.0  # (-1)^{2-n}
    max_omega = max_im_omega = max_gamma = max_fit = 0.0
    argmax_omega = argmax_im = None
    frames = skipped = 0
    per_point = []
    for i in range(1, dom.nx - 1, stride):
        for j in range(1, dom.ny - 1, stride):
            vv, yy = float(v.values[i, j]), float(ys[j])
            try:
                sample = lift_point(params, float(xs[i]), yy, float(u.values[i, j]), vv)
                frame = tangent_frame(
                    params, sample, *_frame_partials(u.values, v.values, i, j, dom.hx, dom.hy)
                )
                fit = decomposition_check(params, frame)
            except SlfoldError:
                skipped += 1
                continue
            frames += 1
            om = omega_residual(frame)
            im = im_omega_residual(frame)
            if om > max_omega:
                max_omega, argmax_omega = om, (float(xs[i]), yy)
            if im > max_im_omega:
                max_im_omega, argmax_im = im, (float(xs[i]), yy)
            gdev = abs(fit.gamma * eval_p_prime(params, sample.w) - sign_target)
            max_gamma = max(max_gamma, gdev)
            max_fit = max(max_fit, fit.residual)
            per_point.append(
                {
                    "x": float(xs[i]),
                    "y": yy,
                    "omega": om,
                    "im_omega": im,
                    "gamma": fit.gamma,
                    "fit_residual": fit.residual,
                }
            )

    passed = (
        max_first_order <= args.budget_first_order
        and max_omega <= args.budget_omega
        and max_im_omega <= args.budget_im_omega
        and max_gamma <= args.budget_gamma
        and max_fit <= args.budget_gamma
    )
    report = {
        "passed": bool(passed),
        "frames": frames,
        "skipped_frames": skipped,
        "max_first_order_residual": max_first_order,
        "max_omega_residual": max_omega,
        "argmax_omega": argmax_omega,
        "max_im_omega_residual": max_im_omega,
        "argmax_im_omega": argmax_im,
        "max_gamma_deviation": max_gamma,
        "max_fit_residual": max_fit,
        "points": per_point,
        "budgets": {
            "first_order": args.budget_first_order,
            "omega": args.budget_omega,
            "im_omega": args.budget_im_omega,
            "gamma": args.budget_gamma,
        },
    }
    if args.report:
        write_json(report, args.report)
    print(
        f"verify: first_order={max_first_order:.3e} omega={max_omega:.3e} "
        f"im_omega={max_im_omega:.3e} gamma={max_gamma:.3e} fit={max_fit:.3e} "
        f"-> {'PASS' if passed else 'FAIL'}"
    )
    return 0 if passed else 4


def _parse_domain(spec: str, nx: int, ny: int) -> GridDomain:
    try:
        x0, x1, y0, y1 = (float(t) for t in spec.split(","))
    except ValueError:
        raise ConfigError(f"bad --domain {spec!r}; expected x0,x1,y0,y1")
    return GridDomain(x0, x1, y0, y1, nx, ny)


def cmd_example(args) -> int:
    if args.family == "affine":
        dom = _parse_domain(args.domain, args.nx, args.ny)
        sol = AffineSolution(args.alpha, args.beta, args.gamma)
        rows = []
        for x in dom.xs():
            for y in dom.ys():
                uu, vv = affine_uv(sol, float(x), float(y))
                rows.append((x, y, uu, vv))
        out = args.out or "affine.csv"
        write_rows_csv(("x", "y", "u", "v"), rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return 0

    if args.family == "hl":
        if not args.a:
            raise ConfigError("hl needs --a with the full level vector (last entry 0)")
        levels = tuple(float(t) for t in args.a.split(","))
        if levels[-1] != 0.0:
            raise ConfigError("hl convention: the last level must be exactly 0")
        cfg = HLConfig.from_head(levels[:-1], args.b)
        dom = _parse_domain(args.domain, args.nx, args.ny)
        rows = []
        for x in dom.xs():
            for y in dom.ys():
                try:
                    t = hl_triple(cfg, float(x), float(y))
                    rows.append((x, y, t.u, t.v, t.w, t.alpha, "ok"))
                except YZeroError:
                    rows.append((x, y, 0.0, 0.0, 0.0, 0.0, "skipped_y0"))
                except DegenerateRegionError:
                    rows.append((x, y, 0.0, 0.0, 0.0, 0.0, "degenerate"))
        out = args.out or "hl.csv"
        write_rows_csv(("x", "y", "u", "v", "w", "alpha", "status"), rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return 0

    # joyce
    if not args.a:
        raise ConfigError("joyce needs --a with one nonzero value")
    a = float(args.a.split(",")[0])
    s_grid = np.linspace(0.0, args.s_max, args.s_count)
    dev = joyce_deviation(a, s_grid)
    if args.out:
        from .branch import ellipticity_coefficient, params_from_levels

        params = params_from_levels((a, -a))
        rows = [
            (s, ellipticity_coefficient(params, float(s)), 2.0 * np.sqrt(s + a * a))
            for s in s_grid
        ]
        write_rows_csv(("s", "coefficient", "closed_form"), rows, args.out)
    print(f"max_deviation={fmt(dev)}")
    return 0


def cmd_embed(args) -> int:
    cfg = load_config(args.config)
    u = read_field_csv(args.u)
    v = read_field_csv(args.v)
    torus_res = args.torus_res if args.torus_res else cfg.torus_resolution
    proj_spec = args.project or cfg.projection
    proj = parse_projection(proj_spec, cfg.params.n)
    cloud = sample_fields(cfg.params, u, v, torus_res)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_samples_csv(cloud.samples, cfg.params.n, out / "points.csv")
    if args.vtk:
        write_points_vtk(cloud.samples, proj, out / "points.vtk")
    write_json(
        {
            "samples": len(cloud.samples),
            "skipped_nodes": [list(t) for t in cloud.skipped_nodes],
            "torus_resolution": torus_res,
            "projection": proj_spec,
        },
        out / "skip_report.json",
    )
    print(f"embedded {len(cloud.samples)} samples ({len(cloud.skipped_nodes)} nodes skipped)")
    return 0


def cmd_wind(args) -> int:
    load_config(args.config)  # validated for side effect: params present and sane
    u1, v1 = read_field_csv(args.u1), read_field_csv(args.v1)
    u2, v2 = read_field_csv(args.u2), read_field_csv(args.v2)
    try:
        cx, cy = (float(t) for t in args.center.split(","))
    except ValueError:
        raise ConfigError(f"bad --center {args.center!r}; expected x,y")
    trace = difference_trace(u1, v1, u2, v2, (cx, cy), args.radius, args.samples)
    steps = angle_increments(trace)
    wind = winding_number(trace)
    if args.out:
        cum = np.cumsum(steps)
        rows = [
            (trace.points[k, 0], trace.points[k, 1],
             trace.values[k, 0], trace.values[k, 1], float(cum[k]))
            for k in range(len(steps))
        ]
        write_rows_csv(("x", "y", "f1", "f2", "cumulative_angle"), rows, args.out)
    print(f"winding={wind}")
    return 0


_DISPATCH = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "example": cmd_example,
    "embed": cmd_embed,
    "wind": cmd_wind,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _DISPATCH[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SingularParametersError as exc:
        print(f"singular parameters: {exc}", file=sys.stderr)
        return 3
    except (NoConvergenceError, DegeneracyEncounteredError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, SlfoldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
