"""Full-frame orchestration: buffers -> lines -> shading -> shadows -> final
multiplicative composition, governed by one validated StyleParams record.

The grayscale pipeline runs first; the optional paper tint is a final
channel-wise multiply, so chroma never enters the shading math.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields as dc_fields

import numpy as np

from . import contour, linecomposite, rasterizer, shadowing
from .geometry import Camera, Mesh, build_adjacency, light_from_angles
from .linecomposite import LineImage, LineValueImage
from .rasterizer import DepthBuffer, IndexBuffer, IntensityImage, NormalDepthMap
from .shading import ShadingParams, intensity_phong_shader
from .shadowing import FailureMap


@dataclass
class ParamSpec:
    name: str
    default: float
    lo: float
    hi: float
    kind: str  # "float" | "int" | "rgb"
    provenance: str  # "paper" (measured constant) | "placeholder" (free knob)
    doc: str


PARAM_SPECS: list[ParamSpec] = [
    ParamSpec("ambient", 0.55, 0.0, 1.0, "float", "paper",
              "Darkest-region brightness; the ambient and shadow color."),
    ParamSpec("kd", 0.25, 0.0, 1.0, "float", "paper",
              "Diffuse weight; ambient + kd pins the lit-band ceiling."),
    ParamSpec("ks", 0.10, 0.0, 1.0, "float", "placeholder",
              "Specular weight; sized so highlights stay small."),
    ParamSpec("shininess", 24.0, 1.0, 512.0, "float", "placeholder",
              "Specular exponent."),
    ParamSpec("background_brightness", 0.62, 0.0, 1.0, "float", "placeholder",
              "Paper ground brightness behind the model."),
    ParamSpec("light_azimuth_deg", 45.0, -360.0, 360.0, "float", "paper",
              "Light azimuth in the image plane, degrees from horizontal."),
    ParamSpec("light_elevation_deg", 45.0, 1.0, 90.0, "float", "paper",
              "Light elevation above the ground plane; 45 deg matches shadow "
              "lengths to object heights."),
    ParamSpec("w_geom", 0.3, 0.0, 1.0, "float", "paper",
              "Geometry-line share of the composite."),
    ParamSpec("w_nd", 0.7, 0.0, 1.0, "float", "paper",
              "Normal-depth-line share of the composite."),
    ParamSpec("blur_radius_px", 0, 0, 8, "int", "placeholder",
              "Box-blur radius applied to geometry lines before compositing; "
              "0 keeps strokes within the 1-2 px width target."),
    ParamSpec("geometry_line_darkness", 0.6, 0.0, 1.0, "float", "placeholder",
              "Stroke darkness of rasterized geometry lines."),
    ParamSpec("nd_k_depth", 6.0, 0.0, 64.0, "float", "placeholder",
              "Depth-difference gain of the four-corner edge operator."),
    ParamSpec("nd_k_normal", 0.5, 0.0, 8.0, "float", "placeholder",
              "Normal-difference gain of the four-corner edge operator."),
    ParamSpec("line_threshold", 0.05, 0.0, 0.999, "float", "placeholder",
              "Darkness below this is treated as paper, not line."),
    ParamSpec("line_b_min", 0.4, 0.001, 1.0, "float", "paper",
              "Brightness of the strongest line."),
    ParamSpec("line_b_max", 0.8, 0.001, 1.0, "float", "paper",
              "Brightness of the faintest line."),
    ParamSpec("crease_threshold_deg", 40.0, 0.001, 179.999, "float", "placeholder",
              "Dihedral deviation beyond which an edge is a ridge/valley."),
    ParamSpec("shadow_bias", 2e-3, 0.0, 0.1, "float", "placeholder",
              "Depth-test bias against shadow acne, light-frame units."),
    ParamSpec("pcf_radius_px", 2, 0, 16, "int", "placeholder",
              "Percentage-closer filter radius."),
    ParamSpec("depth_offset", 1e-3, 0.0, 0.1, "float", "placeholder",
              "Occluder depth displacement in the edge id pass."),
    ParamSpec("samples_per_edge_min", 8, 1, 256, "int", "placeholder",
              "Minimum visibility samples per candidate edge."),
    ParamSpec("paper_tint", (1.0, 1.0, 1.0), 0.0, 1.0, "rgb", "placeholder",
              "Channel-wise multiplier converting grayscale to paper color."),
]

_SPEC_BY_NAME = {s.name: s for s in PARAM_SPECS}


@dataclass
class StyleParams:
    """Every calibrated constant of the style in one validated record."""

    ambient: float = 0.55
    kd: float = 0.25
    ks: float = 0.10
    shininess: float = 24.0
    background_brightness: float = 0.62
    light_azimuth_deg: float = 45.0
    light_elevation_deg: float = 45.0
    w_geom: float = 0.3
    w_nd: float = 0.7
    blur_radius_px: int = 0
    geometry_line_darkness: float = 0.6
    nd_k_depth: float = 6.0
    nd_k_normal: float = 0.5
    line_threshold: float = 0.05
    line_b_min: float = 0.4
    line_b_max: float = 0.8
    crease_threshold_deg: float = 40.0
    shadow_bias: float = 2e-3
    pcf_radius_px: int = 2
    depth_offset: float = 1e-3
    samples_per_edge_min: int = 8
    paper_tint: tuple = (1.0, 1.0, 1.0)

    def to_dict(self) -> dict:
        out = {}
        for f in dc_fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if f.name == "paper_tint" else v
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "StyleParams":
        """Build from a JSON document; unknown keys are rejected."""
        known = {f.name for f in dc_fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidParamsError([{
                "field": k, "value": doc[k], "message": "unknown parameter"
            } for k in sorted(unknown)])
        merged = cls().to_dict()
        merged.update(doc)
        if isinstance(merged["paper_tint"], (list, tuple)):
            merged["paper_tint"] = tuple(float(c) for c in merged["paper_tint"])
        params = cls(**merged)
        violations = validate_params(params)
        if violations:
            raise InvalidParamsError(violations)
        return params


class InvalidParamsError(ValueError):
    def __init__(self, violations: list[dict]):
        self.violations = violations
        super().__init__("; ".join(
            f"{v['field']}: {v['message']}" for v in violations
        ))


def validate_params(params: StyleParams) -> list[dict]:
    """All range and cross-field violations at once; empty list means valid."""
    violations = []

    def bad(name, value, message, spec=None):
        entry = {"field": name, "value": value, "message": message}
        if spec is not None:
            entry["allowed"] = [spec.lo, spec.hi]
        violations.append(entry)

    for spec in PARAM_SPECS:
        value = getattr(params, spec.name)
        if spec.kind == "rgb":
            if (not isinstance(value, (tuple, list)) or len(value) != 3
                    or not all(isinstance(c, (int, float)) for c in value)):
                bad(spec.name, value, "must be an RGB triple", spec)
            elif not all(spec.lo <= float(c) <= spec.hi for c in value):
                bad(spec.name, value, f"components must lie in [{spec.lo}, {spec.hi}]", spec)
            continue
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            bad(spec.name, value, "must be a number", spec)
            continue
        if spec.kind == "int" and float(value) != int(value):
            bad(spec.name, value, "must be an integer", spec)
            continue
        if not (spec.lo <= float(value) <= spec.hi):
            bad(spec.name, value, f"must lie in [{spec.lo}, {spec.hi}]", spec)

    by_name = {v["field"] for v in violations}
    if not {"w_geom", "w_nd"} & by_name and params.w_geom + params.w_nd > 1.0 + 1e-9:
        bad("w_nd", params.w_nd,
            f"weights exceed 1: w_geom + w_nd = {params.w_geom + params.w_nd:.3f}")
    if not {"line_b_min", "line_b_max"} & by_name and params.line_b_min >= params.line_b_max:
        bad("line_b_min", params.line_b_min, "line_b_min must be below line_b_max")
    if not {"line_threshold", "line_b_min"} & by_name and params.line_threshold >= 1.0:
        bad("line_threshold", params.line_threshold, "must be below 1")
    return violations


def param_schema() -> list[dict]:
    """Field descriptors for the service schema endpoint and the tuning UI."""
    out = []
    for spec in PARAM_SPECS:
        default = list(spec.default) if spec.kind == "rgb" else spec.default
        out.append({
            "name": spec.name,
            "default": default,
            "min": spec.lo,
            "max": spec.hi,
            "type": spec.kind,
            "provenance": spec.provenance,
            "doc": spec.doc,
        })
    return out


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class RenderFrame:
    """Every intermediate buffer of one frame plus per-stage timings (ms)."""

    depth: DepthBuffer
    normal_depth: NormalDepthMap
    index: IndexBuffer
    geometry_lines: LineImage
    nd_lines: LineImage
    composite_lines: LineImage
    line_value: LineValueImage
    shaded: IntensityImage
    shadow_fraction: FailureMap
    shaded_shadowed: IntensityImage
    final: IntensityImage
    final_rgb: np.ndarray  # (H, W, 3) float64
    timings_ms: dict = field(default_factory=dict)


def _adjacency_of(mesh: Mesh):
    if "adjacency" not in mesh._cache:
        mesh._cache["adjacency"] = build_adjacency(mesh)
    return mesh._cache["adjacency"]


def render_frame(mesh: Mesh, camera: Camera, params: StyleParams,
                 workers: int = 1, backend: str | None = None,
                 enable_shadows: bool = True) -> RenderFrame:
    """Execute the full pipeline; deterministic for identical inputs."""
    violations = validate_params(params)
    if violations:
        raise InvalidParamsError(violations)

    timings: dict[str, float] = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            result = fn()
        except Exception as exc:
            raise StageError(name, exc) from exc
        timings[name] = (time.perf_counter() - t0) * 1000.0
        return result

    w, h = camera.viewport
    light = light_from_angles(params.light_azimuth_deg, params.light_elevation_deg)
    adjacency = stage("adjacency", lambda: _adjacency_of(mesh))

    depth, faceid = stage("visibility", lambda: rasterizer.rasterize_visibility(
        mesh, camera, workers=workers, backend=backend))

    nd_map = stage("normal_depth", lambda: rasterizer.normal_depth_from_visibility(
        mesh, camera, depth, faceid))

    def do_contours():
        cands = contour.candidate_edges(mesh, adjacency, camera,
                                        params.crease_threshold_deg)
        edge_ids = np.array([c.edge_id for c in cands], dtype=np.int64)
        index = rasterizer.rasterize_ids(
            edge_ids + 1, adjacency.edge_vertices[edge_ids], mesh, camera,
            depth_offset=params.depth_offset, workers=workers, backend=backend,
        )
        segments = contour.hidden_line_removal(
            edge_ids, index, mesh, adjacency, camera,
            min_samples=params.samples_per_edge_min,
        )
        geom = contour.render_geometry_lines(
            segments, mesh, adjacency, camera,
            darkness=params.geometry_line_darkness,
        )
        return index, geom

    index, geom_lines = stage("contour", do_contours)

    nd_lines = stage("nd_lines", lambda: linecomposite.detect_nd_edges(
        nd_map, params.nd_k_depth, params.nd_k_normal))

    def do_composite():
        composite = linecomposite.composite_lines(
            geom_lines, nd_lines, params.w_geom, params.w_nd,
            blur_radius=params.blur_radius_px,
        )
        value = linecomposite.remap_line_brightness(
            composite, params.line_threshold, params.line_b_min, params.line_b_max,
        )
        return composite, value

    composite, line_value = stage("composite", do_composite)

    shader = intensity_phong_shader(
        ShadingParams(params.ambient, params.kd, params.ks, params.shininess),
        light.direction,
    )
    shaded = stage("shading", lambda: rasterizer.shade_visibility(
        mesh, camera, depth, faceid, shader,
        background=params.background_brightness))

    def do_shadows():
        if not enable_shadows:
            return FailureMap(w, h, np.zeros((h, w)))
        sm = shadowing.build_shadow_map(mesh, light, camera.viewport,
                                        workers=workers, backend=backend)
        positions, covered = shadowing.world_positions(depth, camera)
        binary = shadowing.compute_failure_map(positions, covered, sm,
                                               bias=params.shadow_bias)
        return shadowing.pcf_filter(binary, params.pcf_radius_px)

    fractions = stage("shadows", do_shadows)
    shaded_shadowed = stage("apply_shadows", lambda: shadowing.apply_shadows(
        shaded, fractions, params.ambient))

    def do_final():
        gray = shaded_shadowed.data * line_value.data
        tint = np.asarray(params.paper_tint, dtype=np.float64)
        rgb = gray[:, :, None] * tint[None, None, :]
        return IntensityImage(w, h, gray), rgb

    final, final_rgb = stage("final", do_final)

    return RenderFrame(
        depth=depth,
        normal_depth=nd_map,
        index=index,
        geometry_lines=geom_lines,
        nd_lines=nd_lines,
        composite_lines=composite,
        line_value=line_value,
        shaded=shaded,
        shadow_fraction=fractions,
        shaded_shadowed=shaded_shadowed,
        final=final,
        final_rgb=final_rgb,
        timings_ms=timings,
    )
