"""Command-line surface for the library.

One subcommand per operation; inputs are point-cloud or distance-matrix
CSV files, results go to a CSV or JSON table plus a one-line summary on
standard output. Exit codes: 0 success, 1 input or geometry error, 2
size-guard violation. Error output is a single machine-parsable line
``error: <category>: <reason>``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import balls, formats, lens, quasigeodesic
from .formats import InputError
from .hyperbolicity import four_point_delta, four_point_delta_fixed_base, ultrametric_delta
from .spaces import (
    Chain,
    FiniteMetricSpace,
    GeometryError,
    PointCloud,
    Region,
    SizeGuardError,
    log_transform,
    validate_metric,
)

FULL_SCAN_GUARD = 400


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _add_space_args(p: _Parser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="point cloud CSV (header row, one point per row)")
    src.add_argument("--matrix", help="distance matrix CSV (headerless, square)")
    p.add_argument("--log", action="store_true", help="measure in the log metric d' = ln(1+d)")
    p.add_argument("--tol", type=float, default=1e-9, help="metric validation tolerance")


def _add_io_args(p: _Parser) -> None:
    p.add_argument("--output", help="output file (default <command>_out.<format>)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("LOGMETRIC_THREADS", "1")),
        help="worker threads for row-parallel experiments",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="logmetric", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check metric axioms of an input space")
    _add_space_args(p)
    _add_io_args(p)

    p = sub.add_parser("transform", help="emit the log-metric distance matrix")
    _add_space_args(p)
    _add_io_args(p)

    p = sub.add_parser("delta", help="four-point hyperbolicity defect")
    _add_space_args(p)
    _add_io_args(p)
    p.add_argument("--base", type=int, help="fixed base point (cubic scan)")
    p.add_argument("--force", action="store_true", help="allow full scan above the guard")

    p = sub.add_parser("ultra", help="ultrametric defect")
    _add_space_args(p)
    _add_io_args(p)

    p = sub.add_parser("ecc", help="eccentricity of a region or ball intersection")
    _add_space_args(p)
    _add_io_args(p)
    p.add_argument("--region", help="comma-separated member indices")
    p.add_argument("--ball1", help="center,radius of the first ball")
    p.add_argument("--ball2", help="center,radius of the second ball")

    p = sub.add_parser("quasiball", help="nearest-ball Hausdorff defect of a region")
    _add_space_args(p)
    _add_io_args(p)
    p.add_argument("--region", required=True, help="comma-separated member indices")

    p = sub.add_parser("weakecc", help="weak eccentricity defect of a region")
    _add_space_args(p)
    _add_io_args(p)
    p.add_argument("--region", required=True, help="comma-separated member indices")
    p.add_argument("--lambda", dest="lam", type=float, required=True, help="radius scale >= 1")

    p = sub.add_parser("lens", help="lens growth experiment")
    _add_io_args(p)
    p.add_argument("--n-list", dest="n_list", type=int, nargs="+", required=True)
    p.add_argument("--h", type=float, default=0.05, help="grid spacing")
    p.add_argument("--plot", action="store_true", help="also render a PNG figure")

    p = sub.add_parser("grid", help="square-grid four-point defect experiment")
    _add_io_args(p)
    p.add_argument("--sides", type=int, nargs="+", required=True)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument(
        "--fixed-base-above",
        dest="fixed_base_above",
        type=int,
        help="switch grids above this point count to the fixed-base scan",
    )
    p.add_argument("--plot", action="store_true", help="also render a PNG figure")

    p = sub.add_parser("lineultra", help="ultrametric defect of the integer line")
    _add_io_args(p)
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("horizon", help="log-distance beyond which no tamed path exists")
    _add_io_args(p)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--plot", action="store_true", help="also render a PNG figure")

    p = sub.add_parser("tame", help="interpolate and verify a discrete quasi-geodesic")
    _add_io_args(p)
    p.add_argument("--input", required=True, help="path CSV with rows t,x,y")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--emit-path", dest="emit_path", help="write the tamed breakpoints as t,x,y CSV")

    p = sub.add_parser("lengths", help="path length under both metrics")
    _add_io_args(p)
    p.add_argument("--input", required=True, help="path CSV with rows t,x,y")
    p.add_argument("--refine-tol", dest="refine_tol", type=float, default=1e-6)

    return parser


def _load_space(args) -> FiniteMetricSpace:
    if args.points is not None:
        space = PointCloud(formats.load_points_csv(args.points))
    else:
        space = FiniteMetricSpace.from_matrix(formats.load_matrix_csv(args.matrix), tol=args.tol)
    if args.log:
        space = log_transform(space)
    return space


def _output_path(args) -> Path:
    if args.output:
        return Path(args.output)
    return Path(f"{args.command}_out.{args.format}")


def _figure_path(out: Path) -> Path:
    return out.with_name(out.stem + "_fig.png")


def _write(args, rows, columns) -> Path:
    out = _output_path(args)
    formats.write_table(out, rows, columns, args.format)
    return out


def _region_from_args(args, space) -> Region:
    if args.region is not None:
        if args.ball1 is not None or args.ball2 is not None:
            raise InputError("give either --region or --ball1/--ball2, not both")
        return Region(space, tuple(formats.parse_index_list(args.region)))
    if not (args.ball1 and args.ball2):
        raise InputError("need --region or both --ball1 and --ball2")
    c1, r1 = formats.parse_center_radius(args.ball1)
    c2, r2 = formats.parse_center_radius(args.ball2)
    return balls.intersect_balls(space, balls.BallSpec(c1, r1), balls.BallSpec(c2, r2))


def _cmd_validate(args) -> int:
    if args.points is not None:
        space = PointCloud(formats.load_points_csv(args.points))
    else:
        space = FiniteMetricSpace(formats.load_matrix_csv(args.matrix))
    if args.log:
        space = log_transform(space)
    report = validate_metric(space, tol=args.tol)
    row = {
        "ok": report.ok,
        "failure_kind": None if report.failure is None else report.failure.kind,
        "witness": None if report.failure is None else "/".join(str(i) for i in report.failure.witness),
        "detail": None if report.failure is None else report.failure.detail,
        "pseudometric_count": report.pseudometric_count,
        "tol": report.tol,
    }
    out = _write(args, [row], list(row))
    print(report.summary())
    print(f"wrote {out}")
    return 0 if report.ok else 1


def _cmd_transform(args) -> int:
    if args.log:
        raise InputError("transform always emits the log metric; drop the --log flag")
    if args.points is not None:
        space = PointCloud(formats.load_points_csv(args.points))
    else:
        space = FiniteMetricSpace.from_matrix(formats.load_matrix_csv(args.matrix), tol=args.tol)
    matrix = log_transform(space).matrix()
    out = _output_path(args)
    formats.write_matrix(out, matrix, args.format)
    print(f"wrote log-metric matrix for {space.n} points to {out}")
    return 0


def _cmd_delta(args) -> int:
    space = _load_space(args)
    if args.base is not None:
        rep = four_point_delta_fixed_base(space, args.base)
        variant = f"fixed-base({args.base})"
    else:
        if space.n > FULL_SCAN_GUARD and not args.force:
            raise SizeGuardError(
                f"full four-point scan over {space.n} points exceeds the "
                f"{FULL_SCAN_GUARD}-point guard; pass --force or --base"
            )
        rep = four_point_delta(space)
        variant = "full"
    p_, x, y, z = rep.witness
    row = {
        "delta": rep.delta,
        "p": p_,
        "x": x,
        "y": y,
        "z": z,
        "quadruples_scanned": rep.quadruples_scanned,
        "points": space.n,
        "variant": variant,
    }
    out = _write(args, [row], list(row))
    print(f"delta={rep.delta!r} witness=({p_},{x},{y},{z}) variant={variant}")
    print(f"wrote {out}")
    return 0


def _cmd_ultra(args) -> int:
    space = _load_space(args)
    rep = ultrametric_delta(space)
    x, y, z = rep.witness
    row = {"delta_u": rep.delta_u, "x": x, "y": y, "z": z, "points": space.n}
    out = _write(args, [row], list(row))
    print(f"delta_u={rep.delta_u!r} witness=({x},{y},{z})")
    print(f"wrote {out}")
    return 0


def _cmd_ecc(args) -> int:
    space = _load_space(args)
    region = _region_from_args(args, space)
    rep = balls.eccentricity(space, region)
    row = {
        "ecc": rep.ecc,
        "inner_center": None if rep.inner is None else rep.inner.center,
        "inner_radius": None if rep.inner is None else rep.inner.radius,
        "outer_center": None if rep.outer is None else rep.outer.center,
        "outer_radius": None if rep.outer is None else rep.outer.radius,
        "region_size": len(region),
    }
    out = _write(args, [row], list(row))
    print(f"ecc={rep.ecc!r}")
    print(f"wrote {out}")
    return 0


def _cmd_quasiball(args) -> int:
    space = _load_space(args)
    region = Region(space, tuple(formats.parse_index_list(args.region)))
    defect, spec = balls.quasi_ball_defect(space, region)
    row = {
        "defect": defect,
        "center": spec.center,
        "radius": spec.radius,
        "region_size": len(region),
    }
    out = _write(args, [row], list(row))
    print(f"defect={defect!r} center={spec.center} radius={spec.radius!r}")
    print(f"wrote {out}")
    return 0


def _cmd_weakecc(args) -> int:
    space = _load_space(args)
    region = Region(space, tuple(formats.parse_index_list(args.region)))
    defect = balls.weak_ecc_defect(space, region, args.lam)
    row = {"defect": defect, "lambda": args.lam, "region_size": len(region)}
    out = _write(args, [row], list(row))
    print(f"weak_ecc_defect={defect!r} lambda={args.lam!r}")
    print(f"wrote {out}")
    return 0


def _cmd_lens(args) -> int:
    rows = lens.ecc_growth_experiment(args.n_list, args.h, workers=max(1, args.threads))
    out = _write(args, rows, lens.LENS_COLUMNS)
    for row in rows:
        print(
            f"n={row['n']} ecc_d={row['ecc_d_measured']!r} "
            f"ecc_dprime={row['ecc_dprime_measured']!r} "
            f"quasiball_d={row['quasiball_d']!r}"
        )
    print(f"wrote {out}")
    if args.plot:
        from . import plots

        fig = _figure_path(out)
        plots.plot_lens_table(rows, fig)
        print(f"figure: {fig}")
    return 0


def _cmd_grid(args) -> int:
    rows = lens.grid_experiment(args.sides, args.spacing, fixed_base_above=args.fixed_base_above)
    out = _write(args, rows, lens.GRID_COLUMNS)
    for row in rows:
        print(
            f"side={row['side']} variant={row['variant']} "
            f"delta_d={row['delta_d']!r} delta_dprime={row['delta_dprime']!r}"
        )
    print(f"wrote {out}")
    if args.plot:
        from . import plots

        fig = _figure_path(out)
        plots.plot_grid_table(rows, fig)
        print(f"figure: {fig}")
    return 0


def _cmd_lineultra(args) -> int:
    delta_u, gap = lens.line_ultrametric_experiment(args.N)
    row = {"N": args.N, "delta_u": delta_u, "gap_to_ln2": gap}
    out = _write(args, [row], list(row))
    print(f"delta_u={delta_u!r} gap_to_ln2={gap!r}")
    print(f"wrote {out}")
    return 0


def _cmd_horizon(args) -> int:
    params = quasigeodesic.QGParams(args.L, args.C)
    consts = quasigeodesic.TameConstants.from_params(params)
    d_star = quasigeodesic.horizon(params)
    row = {
        "L": args.L,
        "C": args.C,
        "c_prime": consts.c_prime,
        "k1": consts.k1,
        "k2": consts.k2,
        "d_star": d_star,
    }
    out = _write(args, [row], list(row))
    print(f"d_star={d_star!r} (k1={consts.k1!r}, k2={consts.k2!r})")
    print(f"wrote {out}")
    if args.plot:
        from . import plots

        fig = _figure_path(out)
        plots.plot_horizon(args.L, args.C, consts.k1, consts.k2, d_star, fig)
        print(f"figure: {fig}")
    return 0


def _cmd_tame(args) -> int:
    params_t, pts = formats.load_path_csv(args.input)
    chain = Chain(params=tuple(float(t) for t in params_t), points=pts)
    qparams = quasigeodesic.QGParams(args.L, args.C)
    path, consts, report = quasigeodesic.tame(chain, qparams)
    row = {
        "ok": report.ok,
        "endpoints_ok": report.endpoints_ok,
        "qg_c_measured": report.qg_c_measured,
        "c_prime": consts.c_prime,
        "k1": consts.k1,
        "k2": consts.k2,
        "chordarc_margin": report.chordarc_margin,
        "hausdorff_dprime": report.hausdorff_dprime,
        "hausdorff_bound": report.hausdorff_bound,
        "probe_spacing": report.probe_spacing,
    }
    out = _write(args, [row], list(row))
    print(
        f"ok={str(report.ok).lower()} qg_c={report.qg_c_measured!r} "
        f"chordarc_margin={report.chordarc_margin!r} hausdorff={report.hausdorff_dprime!r}"
    )
    print(f"wrote {out}")
    if args.emit_path:
        rows = [
            {"t": t, "x": float(p[0]), "y": float(p[1])}
            for t, p in zip(path.params, path.breakpoints)
        ]
        formats.write_table_csv(args.emit_path, rows, ["t", "x", "y"])
        print(f"tamed path: {args.emit_path}")
    return 0


def _cmd_lengths(args) -> int:
    params_t, pts = formats.load_path_csv(args.input)
    path = quasigeodesic.PLPath(params=tuple(float(t) for t in params_t), breakpoints=pts)
    length_d = quasigeodesic.pl_length(path, "euclidean")
    length_dp = quasigeodesic.pl_length(path, "log-euclidean", refine_tol=args.refine_tol)
    row = {
        "length_d": length_d,
        "length_dprime": length_dp,
        "refine_tol": args.refine_tol,
        "segments": len(path.params) - 1,
    }
    out = _write(args, [row], list(row))
    print(f"length_d={length_d!r} length_dprime={length_dp!r}")
    print(f"wrote {out}")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "transform": _cmd_transform,
    "delta": _cmd_delta,
    "ultra": _cmd_ultra,
    "ecc": _cmd_ecc,
    "quasiball": _cmd_quasiball,
    "weakecc": _cmd_weakecc,
    "lens": _cmd_lens,
    "grid": _cmd_grid,
    "lineultra": _cmd_lineultra,
    "horizon": _cmd_horizon,
    "tame": _cmd_tame,
    "lengths": _cmd_lengths,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise InputError("--threads must be at least 1")
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 1
    except SizeGuardError as exc:
        print(f"error: guard: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"error: geometry: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
