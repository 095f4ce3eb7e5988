import numpy as np
import pytest

from inkwash.fixtures import make_cube, make_pole_on_plane, pole_camera
from inkwash.geometry import light_from_angles
from inkwash.linecomposite import LineValueImage
from inkwash.pipeline import StyleParams, render_frame
from inkwash.stylemetrics import (brightness_histogram, compute_style_report,
                                  dark_floor, estimate_line_width, line_band_mass,
                                  shadow_length_ratio)

from conftest import small_camera


def lv(values):
    arr = np.asarray(values, dtype=np.float64)
    return LineValueImage(arr.shape[1], arr.shape[0], arr)


# --- histogram -----------------------------------------------------------------

def test_histogram_constant_half():
    hist = brightness_histogram(np.full((8, 8), 0.5))
    assert hist.total == 64
    assert hist.counts[128] == 64
    assert hist.counts.sum() == 64


def test_histogram_two_values():
    data = np.zeros((4, 8))
    data[:, 4:] = 1.0
    hist = brightness_histogram(data)
    assert hist.counts[0] == 16
    assert hist.counts[255] == 16


def test_histogram_mask_conservation():
    rng = np.random.default_rng(3)
    data = rng.uniform(0, 1, (16, 16))
    mask = rng.uniform(size=(16, 16)) > 0.5
    full = brightness_histogram(data)
    a = brightness_histogram(data, mask)
    b = brightness_histogram(data, ~mask)
    np.testing.assert_array_equal(a.counts + b.counts, full.counts)


def test_histogram_mask_dim_check():
    with pytest.raises(ValueError):
        brightness_histogram(np.zeros((4, 4)), np.zeros((5, 4), dtype=bool))


def test_histogram_csv():
    hist = brightness_histogram(np.full((2, 2), 0.5))
    lines = hist.to_csv().strip().splitlines()
    assert lines[0] == "bin_low,bin_high,count"
    assert len(lines) == 257


# --- band mass -----------------------------------------------------------------

def test_band_mass_all_at_half():
    img = lv(np.where(np.eye(8) > 0, 0.5, 1.0))
    res = line_band_mass(img, 0.4, 0.8)
    assert res.has_lines
    assert res.n_line_pixels == 8
    assert res.fraction == 1.0


def test_band_mass_no_lines_reported():
    res = line_band_mass(lv(np.ones((4, 4))), 0.4, 0.8)
    assert not res.has_lines
    assert res.fraction is None


def test_band_mass_invariant_under_added_paper():
    base = np.ones((6, 6))
    base[2, 2] = 0.5
    base[3, 3] = 0.39
    small = line_band_mass(lv(base), 0.4, 0.8)
    grown = np.ones((12, 12))
    grown[:6, :6] = base
    big = line_band_mass(lv(grown), 0.4, 0.8)
    assert small.fraction == big.fraction
    assert small.n_line_pixels == big.n_line_pixels


def test_band_mass_rendered_cube():
    frame = render_frame(make_cube(), small_camera(viewport=(256, 256), near=0.15,
                                                   far=12.0), StyleParams())
    res = line_band_mass(frame.line_value, 0.4, 0.8)
    assert res.has_lines
    assert res.fraction >= 0.95
    # histogram view: >= 95% of line-mask mass inside the band
    mask = frame.line_value.data < 0.95
    hist = brightness_histogram(frame.line_value.data, mask)
    lo = int(0.38 * 256)
    hi = int(0.82 * 256) + 1
    assert hist.counts[lo:hi].sum() / hist.total >= 0.95


# --- line width ------------------------------------------------------------------

def test_width_one_px_vertical():
    data = np.ones((16, 16))
    data[:, 8] = 0.5
    stats = estimate_line_width(lv(data))
    assert stats.median_px == 1.0


def test_width_two_px():
    data = np.ones((16, 16))
    data[:, 8:10] = 0.5
    stats = estimate_line_width(lv(data))
    assert stats.median_px == 2.0


def test_width_diagonal_stroke():
    data = np.ones((16, 16))
    for i in range(16):
        data[i, i] = 0.5
    stats = estimate_line_width(lv(data))
    assert stats.median_px == 1.0


def test_width_requires_lines():
    with pytest.raises(ValueError):
        estimate_line_width(lv(np.ones((4, 4))))


def test_width_cube_render_in_band():
    frame = render_frame(make_cube(), small_camera(viewport=(512, 512), near=0.15,
                                                   far=12.0), StyleParams())
    stats = estimate_line_width(frame.line_value)
    assert 1.0 <= stats.median_px <= 2.0


# --- dark floor ------------------------------------------------------------------

def test_dark_floor_excludes_line_windows():
    final = np.full((10, 10), 0.7)
    final[5, 5] = 0.1  # a line pixel
    line_mask = np.zeros((10, 10), dtype=bool)
    line_mask[5, 5] = True
    floor = dark_floor(final, line_mask)
    assert floor == pytest.approx(0.7)
    no_mask = np.zeros((10, 10), dtype=bool)
    assert dark_floor(final, no_mask) < 0.7


# --- shadow ratio ----------------------------------------------------------------

@pytest.mark.parametrize("elevation,expected", [
    (26.565051177077986, 2.0),
    (45.0, 1.0),
    (63.434948822922010, 0.5),
])
def test_shadow_ratio_acceptance_elevations(elevation, expected):
    mesh, fixture = make_pole_on_plane()
    cam = pole_camera(mesh, (512, 512))
    from dataclasses import replace
    p = replace(StyleParams(), light_elevation_deg=elevation)
    frame = render_frame(mesh, cam, p)
    light = light_from_angles(p.light_azimuth_deg, elevation)
    ratio = shadow_length_ratio(frame, fixture, cam, light)
    assert ratio == pytest.approx(expected, rel=0.05)


def test_shadow_ratio_matches_cot_across_elevations():
    mesh, fixture = make_pole_on_plane()
    cam = pole_camera(mesh, (512, 512))
    from dataclasses import replace
    for elevation in (30.0, 40.0, 45.0, 55.0, 60.0):
        p = replace(StyleParams(), light_elevation_deg=elevation)
        frame = render_frame(mesh, cam, p)
        light = light_from_angles(p.light_azimuth_deg, elevation)
        ratio = shadow_length_ratio(frame, fixture, cam, light)
        expected = 1.0 / np.tan(np.radians(elevation))
        assert ratio == pytest.approx(expected, rel=0.05), f"elev {elevation}"


def test_shadow_ratio_requires_shadow():
    mesh, fixture = make_pole_on_plane()
    cam = pole_camera(mesh, (128, 128))
    p = StyleParams()
    frame = render_frame(mesh, cam, p, enable_shadows=False)
    light = light_from_angles(p.light_azimuth_deg, p.light_elevation_deg)
    with pytest.raises(ValueError, match="no shadow"):
        shadow_length_ratio(frame, fixture, cam, light)


# --- report ----------------------------------------------------------------------

def test_report_gates_pass_on_defaults():
    # the width finding holds at the 512 px reference resolution
    frame = render_frame(make_cube(), small_camera(viewport=(512, 512), near=0.15,
                                                   far=12.0), StyleParams())
    report = compute_style_report(frame, StyleParams(), None)
    assert report.gates["line_band_mass"]
    assert report.gates["line_width"]
    assert report.gates["dark_floor"]
    assert report.passed
    parsed = __import__("json").loads(report.to_json())
    assert parsed["passed"] is True


def test_report_detuned_band_fails():
    from dataclasses import replace
    p = replace(StyleParams(), line_b_min=0.1)
    frame = render_frame(make_cube(), small_camera(viewport=(512, 512), near=0.15,
                                                   far=12.0), p)
    report = compute_style_report(frame, p, None)
    assert not report.gates["line_band_mass"]
    assert not report.passed
