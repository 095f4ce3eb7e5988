"""Batch command-line interface.

Subcommands:
  render   mesh -> final PNG (+ optional intermediate buffer dumps)
  metrics  mesh -> StyleReport JSON; nonzero exit when a style gate fails
  serve    local HTTP service for the tuning UI
  bench    compiled-vs-python kernel benchmark

Exit codes: 0 ok, 2 invalid arguments/params, 3 load failure, 4 render
failure, 5 metric gate failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LOAD = 3
EXIT_RENDER = 4
EXIT_GATES = 5


def _fail(code: int, message: str) -> int:
    print(f"inkwash: {message}", file=sys.stderr)
    return code


def parse_camera_spec(spec: str, viewport, mesh):
    """Camera from 'pos=x,y,z;look=x,y,z;up=x,y,z;fov=40' (or 'ortho=H')."""
    from .geometry import Camera
    from .transforms import auto_camera

    if not spec:
        return auto_camera(mesh, viewport)
    fields = {}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad camera field {part!r}")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()

    def vec(key, default=None):
        if key not in fields:
            if default is None:
                raise ValueError(f"camera spec needs {key}=x,y,z")
            return np.asarray(default, dtype=np.float64)
        items = [float(t) for t in fields[key].split(",")]
        if len(items) != 3:
            raise ValueError(f"{key} needs three components")
        return np.asarray(items)

    base = auto_camera(mesh, viewport)
    position = vec("pos", base.position)
    look_at = vec("look", base.look_at)
    up = vec("up", (0.0, 1.0, 0.0))
    distance = float(np.linalg.norm(position - look_at))
    near = float(fields.get("near", max(distance * 0.05, 1e-6)))
    far = float(fields.get("far", distance * 4.0))
    if "ortho" in fields:
        return Camera(position=position, look_at=look_at, up=up,
                      viewport=viewport, projection="orthographic",
                      half_height=float(fields["ortho"]), near=near, far=far)
    return Camera(position=position, look_at=look_at, up=up, viewport=viewport,
                  projection="perspective", fov_y_deg=float(fields.get("fov", 40.0)),
                  near=near, far=far)


def _load_params(path: str | None):
    from .pipeline import InvalidParamsError, StyleParams

    if path is None:
        return StyleParams()
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"params file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InvalidParamsError([{
            "field": "<document>", "value": None, "message": f"invalid JSON: {exc}",
        }])
    if not isinstance(doc, dict):
        raise InvalidParamsError([{
            "field": "<document>", "value": doc, "message": "expected a JSON object",
        }])
    return StyleParams.from_dict(doc)


def _parse_size(text: str):
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ValueError(f"bad --size {text!r}, expected WxH")


def _dump_intermediates(frame, out_dir: Path) -> None:
    from .imageio import write_pgm, write_png

    out_dir.mkdir(parents=True, exist_ok=True)
    write_pgm(out_dir / "depth.pgm", frame.depth.data)
    write_png(out_dir / "normal_depth.png",
              frame.normal_depth.data[:, :, :3].astype(np.float64) / 255.0)
    # ids rendered as presence for quick inspection
    write_pgm(out_dir / "index.pgm", (frame.index.data > 0).astype(np.float64))
    write_pgm(out_dir / "geometry_lines.pgm", frame.geometry_lines.data)
    write_pgm(out_dir / "nd_lines.pgm", frame.nd_lines.data)
    write_pgm(out_dir / "composite_lines.pgm", frame.composite_lines.data)
    write_pgm(out_dir / "line_value.pgm", frame.line_value.data)
    write_pgm(out_dir / "shaded.pgm", frame.shaded.data)
    write_pgm(out_dir / "shadow_fraction.pgm", frame.shadow_fraction.data)
    write_pgm(out_dir / "shaded_shadowed.pgm", frame.shaded_shadowed.data)
    write_png(out_dir / "final.png", frame.final_rgb)


def cmd_render(args) -> int:
    from .geometry import MeshLoadError, load_mesh
    from .imageio import write_png
    from .pipeline import InvalidParamsError, StageError, render_frame

    try:
        params = _load_params(args.params)
    except InvalidParamsError as exc:
        for v in exc.violations:
            print(f"inkwash: params: {v['field']}: {v['message']}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        return _fail(EXIT_USAGE, str(exc))

    try:
        mesh = load_mesh(args.mesh)
    except MeshLoadError as exc:
        return _fail(EXIT_LOAD, str(exc))

    try:
        size = _parse_size(args.size)
        camera = parse_camera_spec(args.camera, size, mesh)
    except ValueError as exc:
        return _fail(EXIT_USAGE, f"camera: {exc}")

    try:
        t0 = time.perf_counter()
        frame = render_frame(mesh, camera, params, workers=args.workers,
                             backend=args.backend)
        elapsed = (time.perf_counter() - t0) * 1000.0
    except StageError as exc:
        return _fail(EXIT_RENDER, str(exc))

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_png(out, frame.final_rgb)
    if args.dump_intermediates:
        _dump_intermediates(frame, Path(args.dump_intermediates))
    print(f"wrote {out} ({mesh.n_faces} faces, {elapsed:.0f} ms)")
    return EXIT_OK


def cmd_metrics(args) -> int:
    from .geometry import MeshLoadError, light_from_angles, load_mesh
    from .fixtures import make_pole_on_plane, pole_camera
    from .pipeline import InvalidParamsError, StageError, render_frame
    from .stylemetrics import compute_style_report
    from .transforms import auto_camera

    try:
        params = _load_params(args.params)
    except InvalidParamsError as exc:
        for v in exc.violations:
            print(f"inkwash: params: {v['field']}: {v['message']}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        return _fail(EXIT_USAGE, str(exc))

    try:
        mesh = load_mesh(args.mesh)
    except MeshLoadError as exc:
        return _fail(EXIT_LOAD, str(exc))

    size = _parse_size(args.size)
    try:
        camera = auto_camera(mesh, size)
        frame = render_frame(mesh, camera, params, workers=args.workers,
                             backend=args.backend)
        light = light_from_angles(params.light_azimuth_deg,
                                  params.light_elevation_deg)
        report = compute_style_report(frame, params, camera)

        if args.fixture == "pole":
            pole_mesh, descriptor = make_pole_on_plane()
            pole_cam = pole_camera(pole_mesh, size)
            pole_frame = render_frame(pole_mesh, pole_cam, params,
                                      workers=args.workers, backend=args.backend)
            pole_report = compute_style_report(pole_frame, params, pole_cam,
                                               fixture=descriptor, light=light)
            report.shadow_length_ratio = pole_report.shadow_length_ratio
            report.gates["shadow_ratio"] = pole_report.gates["shadow_ratio"]
            report.passed = all(report.gates.values())
    except (StageError, ValueError) as exc:
        return _fail(EXIT_RENDER, str(exc))

    out = Path(args.report)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n")
    for gate, ok in report.gates.items():
        print(f"{'PASS' if ok else 'FAIL'} {gate}")
    if not report.passed:
        return EXIT_GATES
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    frontend = Path(args.frontend_dir) if args.frontend_dir else Path("frontend/dist")
    app = create_app(Path(args.mesh_dir), workers=args.workers,
                     frontend_dir=frontend if frontend.is_dir() else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .benchmark import run_benchmark

    rows = run_benchmark(
        triangle_counts=[int(t) for t in args.triangles.split(",")],
        size=_parse_size(args.size),
        workers=args.workers,
        repeats=args.repeats,
    )
    print(f"{'triangles':>10} {'stage':<12} {'compiled ms':>12} {'python ms':>12} {'speedup':>8}")
    for row in rows:
        speedup = row["python_ms"] / row["compiled_ms"] if row["compiled_ms"] else float("inf")
        print(f"{row['triangles']:>10} {row['stage']:<12} "
              f"{row['compiled_ms']:>12.1f} {row['python_ms']:>12.1f} {speedup:>8.1f}x")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inkwash",
        description="Deterministic ink-and-wash mesh renderer and style metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a mesh to PNG")
    p.add_argument("--mesh", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--params", help="StyleParams JSON document")
    p.add_argument("--camera", help="pos=x,y,z;look=x,y,z;up=x,y,z;fov=40|ortho=H")
    p.add_argument("--dump-intermediates", metavar="DIR")
    p.add_argument("--size", default="512x512")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=("auto", "compiled", "python"), default=None)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("metrics", help="render and verify style gates")
    p.add_argument("--mesh", required=True)
    p.add_argument("--params")
    p.add_argument("--report", required=True, help="output StyleReport JSON path")
    p.add_argument("--fixture", choices=("pole", "none"), default="none")
    p.add_argument("--size", default="512x512")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=("auto", "compiled", "python"), default=None)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("serve", help="run the tuning service")
    p.add_argument("--port", type=int, default=8033)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--mesh-dir", required=True)
    p.add_argument("--frontend-dir", help="static UI bundle (default frontend/dist)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("bench", help="compare compiled and python kernels")
    p.add_argument("--triangles", default="20000,100000")
    p.add_argument("--size", default="512x512")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
