"""Command-line front end: ``icotomo <subcommand> ...``.

Reports are line-oriented ``key=value``.  Exit codes: 0 success, 2 infeasible
reconstruction (or failed demo reconstruction), 1 any other error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import formats as fmt
from .geometry import ORIGIN, Direction, LineKey, ModulePoint, Point3, embed, rotate_fivefold
from .modelset import Ball, PatchSpec, Slice, central_slice, check_generic_bounded, generate, slice_patch
from .plot import KINDS, PlotSpec, plot
from .qtau import QTau, format_qtau, parse_qtau
from .reconstruction import (
    Infeasible,
    ReconstructionError,
    ReconstructionInstance,
    enumerate_all,
    solve_fixed,
    solve_search_2d,
    solve_slices,
    split_slices,
    verify_solution,
)
from .tomography import XRayData, coset_classify, grid, xray
from .uniqueness import check_determination, find_u_polygon, verify_u_polygon, witness_pair, Counterexample
from .window import Window, example_shift, window_icosahedron

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


class CliError(Exception):
    pass


def _emit(key: str, value) -> None:
    print(f"{key}={value}")


def _fmt3(p: Point3) -> str:
    return ",".join(format_qtau(c) for c in p)


def _load_window(path: Optional[str]) -> Window:
    if path is None or path == "icosahedron":
        return window_icosahedron()
    return fmt.parse_window(fmt.read(path), source=path)


def _shift(values: Optional[Sequence[str]]) -> Point3:
    return example_shift() if values is None else fmt.parse_qtau3(values)


def _load_points(path: str) -> list[Point3]:
    text = fmt.read(path)
    first = next((ln.split("#", 1)[0].split() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), [])
    if first[:1] == ["slice"]:
        return fmt.parse_slice(text, source=path).physical()
    return [embed(p) if isinstance(p, ModulePoint) else p for p in fmt.parse_points(text, source=path)]


def _load_slice(path: str) -> Slice:
    return fmt.parse_slice(fmt.read(path), source=path)


def _write_or_print(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        fmt.write(path, text)


# -- subcommands ------------------------------------------------------------------


def cmd_generate(args) -> int:
    w = _load_window(args.window).shifted(_shift(args.shift))
    center = fmt.parse_qtau3(args.center) if args.center else ORIGIN
    spec = PatchSpec(w, Ball(center, Fraction(args.radius)))
    patch = generate(spec)
    _write_or_print(args.out, fmt.serialize_points(patch.points))
    if args.out:
        _emit("points", len(patch))
    return EXIT_OK


def cmd_slice(args) -> int:
    pts = fmt.parse_points(fmt.read(args.points), source=args.points)
    if not all(isinstance(p, ModulePoint) for p in pts):
        raise CliError("slicing needs module-coefficient points")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    slices = slice_patch(pts)
    _emit("slices", len(slices))
    for i, s in enumerate(slices):
        name = out / f"slice_{i:03d}.l"
        fmt.write(name, fmt.serialize_slice(s))
        print(f"{name} height={format_qtau(s.height)} points={len(s)}")
    return EXIT_OK


def cmd_xray(args) -> int:
    pts = _load_points(args.points)
    u = Direction.from_module(ModulePoint(*args.dir))
    _write_or_print(args.out, fmt.serialize_xray(xray(pts, u)))
    return EXIT_OK


def cmd_grid(args) -> int:
    data = [fmt.parse_xray(fmt.read(p), source=p) for p in args.xray]
    g = coset_classify(grid(data))
    _emit("grid_size", len(g))
    _emit("cosets", len(g.classes()) if g.points else 0)
    _emit("l_class", "none" if g.l_class is None else g.l_class)
    if args.out:
        fmt.write(args.out, fmt.serialize_points(g.points))
    return EXIT_OK


def _write_solution(path: Optional[str], pts: Sequence[Point3]) -> None:
    if path is not None:
        fmt.write(path, fmt.serialize_points(pts))


def cmd_reconstruct(args) -> int:
    first = fmt.parse_xray(fmt.read(args.xray[0]), source=args.xray[0])
    second = fmt.parse_xray(fmt.read(args.xray[1]), source=args.xray[1])
    window = _load_window(args.window)
    if args.search_plane is not None:
        inst = ReconstructionInstance(first, second, window)
        res = solve_search_2d(inst, parse_qtau(args.search_plane) if window.dimension == 3 else None)
        if isinstance(res, Infeasible):
            _emit("feasible", 0)
            _emit("reason", res.reason)
            return EXIT_INFEASIBLE
        _emit("feasible", 1)
        _emit("points", len(res.solution.points))
        _emit("translate", _fmt3(res.translate))
        _emit("cells_examined", res.cells_examined)
        _write_solution(args.out, res.solution.points)
        return EXIT_OK

    t = _shift(args.shift)
    if args.all is not None:
        inst = ReconstructionInstance(first, second, window, t)
        en = enumerate_all(inst, args.all)
        _emit("solutions", len(en))
        _emit("truncated", int(en.truncated))
        if args.out:
            stem = Path(args.out)
            for k, sol in enumerate(en.solutions):
                _write_solution(str(stem.with_name(f"{stem.stem}_{k}{stem.suffix}")), sol.points)
        return EXIT_OK if len(en) else EXIT_INFEASIBLE
    if len(split_slices(first, second)) > 1:
        res = solve_slices(first, second, window, t)
    else:
        res = solve_fixed(ReconstructionInstance(first, second, window, t))
    if isinstance(res, Infeasible):
        _emit("feasible", 0)
        _emit("reason", res.reason)
        return EXIT_INFEASIBLE
    _emit("feasible", 1)
    _emit("points", len(res.points))
    _write_solution(args.out, res.points)
    return EXIT_OK


def _ambient_note(s: Slice, radius: Optional[str]) -> None:
    """Convexity is relative to the slice; with a region radius, check the slice sits in that ball."""
    if radius is None:
        _emit("ambient", "slice-file")
        return
    r2 = QTau(Fraction(radius) ** 2)
    if any((p.norm2() - r2).sign() > 0 for p in s.physical()):
        raise CliError("slice points lie outside the stated region radius")
    _emit("ambient", "ball-slice")


def cmd_upolygon(args) -> int:
    s = _load_slice(args.slice)
    dirs = fmt.parse_directions(fmt.read(args.dirs), source=args.dirs)
    _ambient_note(s, args.radius)
    pts = s.physical()
    P = find_u_polygon(pts, dirs, args.max_vertices)
    if P is None:
        _emit("found", 0)
        return EXIT_OK
    _emit("found", 1)
    _emit("vertices", len(P))
    _emit("verified", int(verify_u_polygon(P.vertices, dirs, pts)))
    a, b = witness_pair(P, pts)
    _emit("witness_sizes", f"{len(a)},{len(b)}")
    if args.out:
        fmt.write(args.out, fmt.serialize_points(P.vertices))
    return EXIT_OK


def cmd_determine(args) -> int:
    s = _load_slice(args.slice)
    dirs = fmt.parse_directions(fmt.read(args.dirs), source=args.dirs)
    _ambient_note(s, args.radius)
    res = check_determination(s.physical(), dirs, args.size_bound)
    _emit("subsets_checked", res.subsets_checked)
    if isinstance(res, Counterexample):
        _emit("result", "counterexample")
        _emit("sizes", f"{len(res.first)},{len(res.second)}")
    else:
        _emit("result", "determined-up-to-bound")
        _emit("size_bound", res.size_bound)
    return EXIT_OK


def cmd_plot(args) -> int:
    s = _load_slice(args.slice)
    window = None
    if args.kind != "slice-physical":
        window = _load_window(args.window).shifted(_shift(args.shift))
    g = None
    if args.kind == "grid-star-with-window":
        if not args.dirs:
            raise CliError("grid plots need --dirs")
        dirs = fmt.parse_directions(fmt.read(args.dirs), source=args.dirs)
        pts = s.physical()
        g = grid([xray(pts, u) for u in dirs])
    spec = PlotSpec(args.kind, slice=s, window=window, grid=g, height=s.height, outline=not args.no_outline)
    _write_or_print(args.out, plot(spec))
    return EXIT_OK


def _demo(args) -> int:
    stage = "generate"
    try:
        shift = example_shift()
        spec = PatchSpec(window_icosahedron(shift), Ball(ORIGIN, Fraction(args.radius)))
        patch = generate(spec)
        _emit("patch_size", len(patch))
        stage = "genericity"
        rep = check_generic_bounded(spec)
        _emit("generic_boundary_hits", len(rep.boundary_hits))
        stage = "slice"
        slices = slice_patch(patch)
        _emit("slice_count", len(slices))
        cs = central_slice(patch)
        pts = cs.physical()
        _emit("central_slice_size", len(pts))
        stage = "xray"
        d1 = Direction(Point3(0, 1, 0))
        d2 = Direction(rotate_fivefold(Point3(0, 1, 0)))
        x1, x2 = xray(pts, d1), xray(pts, d2)
        if args.corrupt_xray:
            counts = dict(x1.counts)
            if counts:
                k = x1.support[0]
                counts[k] += 1
            else:
                counts[LineKey(d1, ORIGIN)] = 1
            x1 = XRayData(d1, counts)
        _emit("xray_lines", f"{len(x1.counts)},{len(x2.counts)}")
        stage = "grid"
        if x1.counts and x2.counts:
            g = coset_classify(grid([x1, x2]))
            _emit("grid_size", len(g))
            _emit("cosets", len(g.classes()))
        else:
            _emit("grid_size", 0)
            _emit("cosets", 0)
        stage = "reconstruct"
        inst = ReconstructionInstance(x1, x2, window_icosahedron(), shift)
        res = solve_fixed(inst)
        if isinstance(res, Infeasible):
            _emit("feasible", 0)
            _emit("reason", res.reason)
            _emit("stage", stage)
            return EXIT_INFEASIBLE
        _emit("feasible", 1)
        _emit("solution_size", len(res.points))
        stage = "verify"
        failed = verify_solution(inst, res.points)
        _emit("verify_xray", int("xray" not in failed))
        _emit("verify_window", int("window" not in failed))
        _emit("verify_coset", int("coset" not in failed))
        en = enumerate_all(inst, 10)
        _emit("solutions_found", len(en))
        ok = not failed
        if args.search and pts:
            stage = "search"
            ns = shift.dot(Point3(QTau(0, 1).galois(), 0, 1))
            sr = solve_search_2d(ReconstructionInstance(x1, x2, window_icosahedron()), ns)
            if isinstance(sr, Infeasible):
                _emit("search_feasible", 0)
                ok = False
            else:
                _emit("search_feasible", 1)
                _emit("search_cells", sr.cells_examined)
                v = verify_solution(ReconstructionInstance(x1, x2, window_icosahedron()), sr.solution.points, sr.translate)
                _emit("search_verified", int(not v))
                ok = ok and not v
        stage = "patch"
        if len(patch):
            full = patch.physical()
            y1, y2 = xray(full, d1), xray(full, d2)
            pr = solve_slices(y1, y2, window_icosahedron(), shift)
            pok = not isinstance(pr, Infeasible) and xray(pr.points, d1) == y1 and xray(pr.points, d2) == y2
            _emit("patch_reconstruct", int(pok))
            ok = ok and pok
        _emit("status", "ok" if ok else "failed")
        return EXIT_OK if ok else EXIT_ERROR
    except Exception as exc:  # report the failing stage
        _emit("stage", stage)
        _emit("error", str(exc).replace("\n", " "))
        return EXIT_ERROR


def cmd_demo(args) -> int:
    return _demo(args)


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="icotomo", description="Discrete tomography of icosahedral model sets.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a model-set patch")
    g.add_argument("--window", help="window file (default: built-in icosahedron)")
    g.add_argument("--shift", nargs="+", metavar="QTAU", help="window translate s (default 1/1000 each)")
    g.add_argument("--radius", default="3", help="ball radius (rational)")
    g.add_argument("--center", nargs="+", metavar="QTAU", help="ball center")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("slice", help="split a points file into slices")
    s.add_argument("points")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_slice)

    x = sub.add_parser("xray", help="X-ray of a points or slice file")
    x.add_argument("points")
    x.add_argument("--dir", nargs=6, type=int, required=True, metavar="N")
    x.add_argument("--out")
    x.set_defaults(func=cmd_xray)

    gr = sub.add_parser("grid", help="grid and coset classes of X-ray supports")
    gr.add_argument("--xray", action="append", required=True)
    gr.add_argument("--out")
    gr.set_defaults(func=cmd_grid)

    r = sub.add_parser("reconstruct", help="reconstruct from two X-rays")
    r.add_argument("--xray", action="append", required=True)
    r.add_argument("--window")
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--shift", nargs="+", metavar="QTAU")
    mode.add_argument("--search-plane", metavar="QTAU", help="search the in-plane translate; value is s . (tau', 0, 1)")
    r.add_argument("--out")
    r.add_argument("--all", type=int, metavar="N", help="enumerate up to N solutions")
    r.set_defaults(func=cmd_reconstruct)

    u = sub.add_parser("upolygon", help="search a U-polygon in a slice")
    u.add_argument("--slice", required=True)
    u.add_argument("--dirs", required=True)
    u.add_argument("--max-vertices", type=int, default=10)
    u.add_argument("--radius", help="radius of the ball the slice was cut from")
    u.add_argument("--out")
    u.set_defaults(func=cmd_upolygon)

    d = sub.add_parser("determine", help="bounded check that convex subsets are determined")
    d.add_argument("--slice", required=True)
    d.add_argument("--dirs", required=True)
    d.add_argument("--size-bound", type=int, default=10)
    d.add_argument("--radius", help="radius of the ball the slice was cut from")
    d.set_defaults(func=cmd_determine)

    pl = sub.add_parser("plot", help="SVG view of a slice")
    pl.add_argument("--kind", choices=KINDS, default="slice-star-with-window")
    pl.add_argument("--slice", required=True)
    pl.add_argument("--window")
    pl.add_argument("--shift", nargs="+", metavar="QTAU")
    pl.add_argument("--dirs")
    pl.add_argument("--no-outline", action="store_true")
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_plot)

    dm = sub.add_parser("demo", help="end-to-end round trip on the central slice")
    dm.add_argument("--radius", default="3")
    dm.add_argument("--corrupt-xray", action="store_true")
    dm.add_argument("--no-search", dest="search", action="store_false")
    dm.set_defaults(func=cmd_demo)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "reconstruct" and len(args.xray) != 2:
        print("error: reconstruct takes exactly two --xray files", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (CliError, fmt.ParseError, ReconstructionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
