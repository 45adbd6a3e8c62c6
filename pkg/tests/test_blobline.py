import numpy as np
import pytest

from conftest import brute_force_distance_field
from lineseg.blobline import (
    build_blob_line_set,
    nearest_blob_distance,
    rasterize_polygon,
    skeleton_labels_from_polygons,
)
from lineseg.components import extract_components
from lineseg.errors import LineSegError, NoBlobLinesError
from lineseg.raster import BinaryPage


def _bar_mask(h=40, w=60, rows=(10,)):
    mask = np.zeros((h, w), dtype=bool)
    for r in rows:
        mask[r, 5 : w - 5] = True
    return BinaryPage(mask)


def test_single_bar_count_and_vertical_distance():
    blobs = build_blob_line_set(_bar_mask(rows=(10,)))
    assert blobs.count == 1
    # pixel 5 rows above the bar, within its column span
    assert blobs.distance_fields[0][5, 20] == 5.0


def test_three_bars_three_lines():
    blobs = build_blob_line_set(_bar_mask(rows=(5, 15, 30)))
    assert blobs.count == 3
    # labels follow raster-scan order: top bar is line 1
    assert blobs.label_raster.labels[5, 20] == 1
    assert blobs.label_raster.labels[30, 20] == 3


def test_distance_zero_on_own_pixels():
    blobs = build_blob_line_set(_bar_mask(rows=(5, 15)))
    for line in (1, 2):
        rr, cc = np.nonzero(blobs.label_raster.labels == line)
        assert (blobs.distance_fields[line - 1][rr, cc] == 0.0).all()


def test_point_query_via_345_triangle():
    mask = np.zeros((20, 20), dtype=bool)
    mask[13, 14] = True
    blobs = build_blob_line_set(BinaryPage(mask))
    assert nearest_blob_distance(blobs, 1, (10.0, 10.0)) == 5.0
    assert nearest_blob_distance(blobs, 1, (14.0, 13.0)) == 0.0


def test_symmetric_points_equidistant_around_bar():
    blobs = build_blob_line_set(_bar_mask(rows=(20,)))
    up = nearest_blob_distance(blobs, 1, (30.0, 13.0))
    down = nearest_blob_distance(blobs, 1, (30.0, 27.0))
    assert up == down == 7.0


def test_real_valued_points_round_to_nearest_pixel():
    blobs = build_blob_line_set(_bar_mask(rows=(10,)))
    assert nearest_blob_distance(blobs, 1, (20.2, 6.7)) == 3.0
    # out-of-page points clamp to the border pixel
    assert nearest_blob_distance(blobs, 1, (-50.0, 10.0)) == 5.0


def test_label_out_of_range_rejected():
    blobs = build_blob_line_set(_bar_mask())
    with pytest.raises(LineSegError):
        nearest_blob_distance(blobs, 0, (1.0, 1.0))
    with pytest.raises(LineSegError):
        nearest_blob_distance(blobs, 2, (1.0, 1.0))


def test_empty_mask_refused_with_stable_code():
    with pytest.raises(NoBlobLinesError) as exc:
        build_blob_line_set(BinaryPage(np.zeros((5, 5), dtype=bool)))
    assert exc.value.code == "no-blob-lines"
    assert "no blob lines detected" in str(exc.value)


def test_distance_fields_match_brute_force(rng):
    for _ in range(6):
        mask = rng.random((32, 32)) < 0.03
        if not mask.any():
            mask[3, 3] = True
        blobs = build_blob_line_set(BinaryPage(mask))
        for i in range(blobs.count):
            oracle = brute_force_distance_field(blobs.label_raster.labels == i + 1)
            assert np.array_equal(blobs.distance_fields[i], oracle)


def _rect_ring(x0, y0, x1, y1):
    return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], dtype=np.float64)


def test_rectangle_skeleton_stroke_stays_inside_and_spans():
    ring = _rect_ring(10, 30, 210, 50)  # 200 x 20 rectangle
    page = skeleton_labels_from_polygons([ring], (260, 90), thickness=12.0)
    interior = rasterize_polygon(ring, (260, 90))
    assert page.pixels.any()
    assert not (page.pixels & ~interior).any()
    covered_cols = np.nonzero(page.pixels.any(axis=0))[0]
    assert covered_cols.size >= 180  # the pruned medial path runs the length
    assert len(extract_components(page.pixels)) == 1
    # stroke is the brush-thick band around the medial path; an even-height
    # rectangle has a two-row medial axis, so allow thickness + 2
    rows = np.nonzero(page.pixels.any(axis=1))[0]
    assert rows.size <= 14


def test_empty_polygon_list_gives_blank_mask():
    blank = skeleton_labels_from_polygons([], (30, 30))
    assert blank.foreground_count() == 0
    with pytest.raises(NoBlobLinesError):
        build_blob_line_set(blank)


def test_two_disjoint_rectangles_two_strokes():
    rings = [_rect_ring(5, 5, 80, 20), _rect_ring(5, 40, 80, 55)]
    page = skeleton_labels_from_polygons(rings, (100, 70))
    assert len(extract_components(page.pixels)) == 2


def test_degenerate_polygon_skipped_with_warning():
    # a ring that clips entirely off the canvas covers no pixels
    rings = [_rect_ring(-30, -20, -5, -8), _rect_ring(10, 10, 60, 25)]
    with pytest.warns(UserWarning, match="empty interior"):
        page = skeleton_labels_from_polygons(rings, (80, 40))
    assert len(extract_components(page.pixels)) == 1


def test_thin_polygon_falls_back_to_its_interior():
    ring = np.array([(5.0, 10.0), (40.0, 10.0), (40.0, 11.0), (5.0, 11.0)])
    page = skeleton_labels_from_polygons([ring], (50, 20), thickness=4.0)
    assert page.pixels.any()


def test_thickness_controls_stroke_width():
    ring = _rect_ring(10, 20, 150, 60)
    thin = skeleton_labels_from_polygons([ring], (170, 80), thickness=4.0)
    thick = skeleton_labels_from_polygons([ring], (170, 80), thickness=12.0)
    assert thick.foreground_count() > thin.foreground_count()
