"""Image-based style checks: brightness histograms, line band mass, stroke
width statistics, regional dark floor and shadow-geometry ratios.

These turn the calibration targets (line brightness band, lit band, shadow
size match) into executable gates over rendered frames.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Camera, DirectionalLight
from .linecomposite import LineValueImage, box_mean
from .shadowing import world_positions

DEFAULT_TAIL_CUTOFF = 0.95  # values above are the ignored smoothing tail
BAND_SLACK = 0.02
REFERENCE_LINE_BAND = (0.4, 0.8)  # measured stroke brightness range
REFERENCE_LIT_BAND = (0.6, 0.8)  # measured lit-region brightness range


@dataclass
class Histogram256:
    """256 equal bins over [0, 1]; bin k covers [k/256, (k+1)/256)."""

    counts: np.ndarray  # (256,) int64
    total: int
    masked: bool = False

    def to_csv(self) -> str:
        lines = ["bin_low,bin_high,count"]
        for k in range(256):
            lines.append(f"{k / 256:.6f},{(k + 1) / 256:.6f},{int(self.counts[k])}")
        return "\n".join(lines) + "\n"


def brightness_histogram(data: np.ndarray, mask: np.ndarray | None = None) -> Histogram256:
    """Standard 256-bin brightness histogram, optionally masked."""
    if mask is not None:
        if mask.shape != data.shape:
            raise ValueError("mask dimensions differ from image")
        values = data[mask]
    else:
        values = data.ravel()
    bins = np.minimum((values * 256.0).astype(np.int64), 255)
    counts = np.bincount(bins, minlength=256).astype(np.int64)
    return Histogram256(counts=counts, total=int(len(values)), masked=mask is not None)


@dataclass
class LineBandResult:
    has_lines: bool
    n_line_pixels: int
    fraction: float | None  # in-band share among true line pixels


def line_band_mass(lineimg: LineValueImage, b_min: float, b_max: float,
                   tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LineBandResult:
    """Share of true line pixels inside [b_min - 0.02, b_max + 0.02].

    Pixels at or above tail_cutoff are the near-white smoothing tail and are
    ignored, mirroring how the reference histograms discard it.
    """
    if not (b_min < tail_cutoff <= 1.0):
        raise ValueError("require b_min < tail_cutoff <= 1")
    values = lineimg.data[lineimg.data < tail_cutoff]
    if len(values) == 0:
        return LineBandResult(has_lines=False, n_line_pixels=0, fraction=None)
    inband = (values >= b_min - BAND_SLACK) & (values <= b_max + BAND_SLACK)
    return LineBandResult(True, int(len(values)), float(inband.mean()))


def _run_lengths(mask: np.ndarray, axis: int) -> np.ndarray:
    """Length of the consecutive-True run containing each pixel, per row/col."""
    m = mask if axis == 1 else mask.T
    h, w = m.shape
    padded = np.concatenate([m, np.zeros((h, 1), dtype=bool)], axis=1).ravel()
    starts = padded & ~np.concatenate([[False], padded[:-1]])
    run_id = np.cumsum(starts) - 1
    out = np.zeros(padded.shape, dtype=np.int64)
    if padded.any():
        lengths = np.bincount(run_id[padded])
        out[padded] = lengths[run_id[padded]]
    out = out.reshape(h, w + 1)[:, :w]
    return out if axis == 1 else out.T


@dataclass
class LineWidthStats:
    median_px: float
    p90_px: float
    n_pixels: int


def estimate_line_width(lineimg: LineValueImage,
                        tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> LineWidthStats:
    """Stroke width via perpendicular run length at every stroke pixel.

    For each line pixel the width is the smaller of the horizontal and
    vertical run lengths through it, which measures across thin strokes at
    any orientation.
    """
    mask = lineimg.data < tail_cutoff
    if not mask.any():
        raise ValueError("no line pixels below the tail cutoff")
    widths = np.minimum(_run_lengths(mask, 1), _run_lengths(mask, 0))[mask]
    return LineWidthStats(
        median_px=float(np.median(widths)),
        p90_px=float(np.percentile(widths, 90)),
        n_pixels=int(mask.sum()),
    )


def dark_floor(final: np.ndarray, line_mask: np.ndarray) -> float:
    """Minimum 3x3 regional mean brightness over windows free of line pixels."""
    means = box_mean(final, 1)
    has_line = box_mean(line_mask.astype(np.float64), 1) > 0.0
    interior = np.zeros_like(has_line)
    interior[1:-1, 1:-1] = True
    eligible = interior & ~has_line
    if not eligible.any():
        raise ValueError("no line-free interior windows")
    return float(means[eligible].min())


def shadow_length_ratio(frame, fixture: dict, camera: Camera,
                        light: DirectionalLight) -> float:
    """Planar shadow extent of the pole fixture divided by pole height.

    Ground pixels are unprojected to world space and binned by their
    projection along the horizontal shadow direction; the shadow tip is the
    farthest half-maximum crossing of the PCF shadow-fraction profile
    (sub-pixel, symmetric in the penumbra), minus the pole's own radius.
    """
    height = float(fixture["pole_height"])
    pole_radius = float(fixture.get("pole_radius", 0.0))
    base = np.asarray(fixture["pole_base"], dtype=np.float64)
    plane_y = float(fixture["plane_y"])

    d = light.direction
    horiz = np.array([-d[0], 0.0, -d[2]])
    norm = np.linalg.norm(horiz)
    if norm < 1e-12:
        raise ValueError("vertical light casts no planar shadow")
    horiz /= norm

    positions, covered = world_positions(frame.depth, camera)
    tol = 1e-6 + 1e-3 * height
    on_plane = covered & (np.abs(positions[..., 1] - plane_y) < tol)
    fractions = frame.shadow_fraction.data[on_plane]
    if not (fractions >= 0.5).any():
        raise ValueError("no shadow detected on the ground plane")
    extents = (positions[on_plane] - base) @ horiz

    # Max-fraction profile over extent bins, then the farthest 0.5 crossing.
    nbins = 512
    hi = float(extents.max())
    if hi <= 0:
        raise ValueError("shadow lies against the measurement direction")
    bins = np.clip((extents / hi * nbins).astype(np.int64), 0, nbins - 1)
    profile = np.zeros(nbins)
    np.maximum.at(profile, bins, fractions)
    centers = (np.arange(nbins) + 0.5) * (hi / nbins)
    idx = int(np.nonzero(profile >= 0.5)[0].max())
    tip = centers[idx]
    if idx + 1 < nbins and profile[idx] > profile[idx + 1]:
        t = (profile[idx] - 0.5) / (profile[idx] - profile[idx + 1])
        tip += t * (hi / nbins)
    return (tip - pole_radius) / height


@dataclass
class StyleReport:
    """Measured style statistics plus pass/fail per calibration gate."""

    line_band_mass: float | None
    n_line_pixels: int
    median_line_width_px: float | None
    p90_line_width_px: float | None
    dark_floor: float
    lit_band_mass: float | None
    shadow_length_ratio: float | None
    gates: dict = field(default_factory=dict)
    passed: bool = True

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.__dict__, indent=indent, sort_keys=True)


def compute_style_report(frame, params, camera: Camera,
                         fixture: dict | None = None,
                         light: DirectionalLight | None = None,
                         tail_cutoff: float = DEFAULT_TAIL_CUTOFF) -> StyleReport:
    """Run every metric against one rendered frame and gate the results.

    Band gates judge against the reference style bands, not the params in
    effect: detuned sliders are exactly what the gates should catch.
    """
    lv = frame.line_value
    band = line_band_mass(lv, *REFERENCE_LINE_BAND, tail_cutoff)
    line_mask = lv.data < tail_cutoff

    median_w = p90_w = None
    if band.has_lines:
        widths = estimate_line_width(lv, tail_cutoff)
        median_w, p90_w = widths.median_px, widths.p90_px

    floor = dark_floor(frame.final.data, line_mask)

    lit = None
    covered = frame.depth.data < 1.0
    lit_mask = covered & (frame.shadow_fraction.data < 0.5) & ~line_mask
    if lit_mask.any():
        vals = frame.shaded_shadowed.data[lit_mask]
        lo, hi = REFERENCE_LIT_BAND
        lit = float(((vals >= lo) & (vals <= hi)).mean())

    ratio = None
    if fixture is not None:
        if light is None:
            raise ValueError("fixture metrics need the light used to render")
        ratio = shadow_length_ratio(frame, fixture, camera, light)

    gates = {
        "line_band_mass": bool(band.has_lines and band.fraction >= 0.95),
        "line_width": bool(median_w is not None and 1.0 <= median_w <= 2.0),
        "dark_floor": bool(floor >= params.ambient - 1.0 / 255.0),
    }
    if ratio is not None:
        expected = 1.0 / math.tan(math.radians(light.elevation_deg))
        gates["shadow_ratio"] = bool(abs(ratio - expected) <= 0.05 * expected)

    return StyleReport(
        line_band_mass=band.fraction,
        n_line_pixels=band.n_line_pixels,
        median_line_width_px=median_w,
        p90_line_width_px=p90_w,
        dark_floor=floor,
        lit_band_mass=lit,
        shadow_length_ratio=ratio,
        gates=gates,
        passed=all(gates.values()),
    )
