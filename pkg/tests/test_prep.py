import numpy as np
import pytest

from lineseg.blobline import build_blob_line_set
from lineseg.components import label_components
from lineseg.errors import LineSegError
from lineseg.extract import extract_lines
from lineseg.metrics import evaluate, regions_from_label_raster
from lineseg.prep import (
    PageSpec,
    SyntheticPage,
    TileSpec,
    acceptance_specs,
    augment_warp,
    generate_synthetic_page,
    stitch_tiles,
    synthetic_corpus,
    tile_page,
)
from lineseg.raster import BinaryPage


def _random_page(rng, w, h, density=0.3):
    return BinaryPage(rng.random((h, w)) < density)


# ---------------------------------------------------------------- tiling


def test_exact_fit_single_tile(rng):
    page = _random_page(rng, 250, 250)
    tiles = tile_page(page)
    assert len(tiles) == 1
    tile, offset = tiles[0]
    assert offset == (0, 0)
    assert tile.shape == (350, 350)
    assert np.array_equal(tile.pixels[50:300, 50:300], page.pixels)
    assert not tile.pixels[:50, :].any() and not tile.pixels[:, :50].any()


def test_double_width_two_tiles(rng):
    page = _random_page(rng, 500, 250)
    tiles = tile_page(page)
    assert [off for _, off in tiles] == [(0, 0), (250, 0)]


def test_one_pixel_over_requires_second_tile(rng):
    page = _random_page(rng, 251, 250)
    tiles = tile_page(page)
    assert [off for _, off in tiles] == [(0, 0), (250, 0)]


def test_tile_count_and_row_major_order(rng):
    page = _random_page(rng, 700, 600)
    tiles = tile_page(page)  # ceil(700/250)=3, ceil(600/250)=3
    assert len(tiles) == 9
    expected = [(x * 250, y * 250) for y in range(3) for x in range(3)]
    assert [off for _, off in tiles] == expected


def test_tiles_replicate_padded_page_content(rng):
    page = _random_page(rng, 420, 310)
    spec = TileSpec()
    m = spec.margin
    padded = np.zeros((m + 2 * 250 + m, m + 2 * 250 + m), dtype=bool)
    padded[m : m + 310, m : m + 420] = page.pixels
    for tile, (x, y) in tile_page(page, spec):
        assert np.array_equal(tile.pixels, padded[y : y + 350, x : x + 350])


def test_round_trip_random_sizes(rng):
    for _ in range(10):
        w = int(rng.integers(1, 700))
        h = int(rng.integers(1, 700))
        page = _random_page(rng, w, h)
        tiles = tile_page(page)
        back = stitch_tiles(tiles, (w, h))
        assert np.array_equal(back.pixels, page.pixels)


def test_round_trip_small_custom_spec(rng):
    spec = TileSpec(window=8, inner=4)
    assert spec.margin == 2
    page = _random_page(rng, 11, 6)
    back = stitch_tiles(tile_page(page, spec), (11, 6), spec)
    assert np.array_equal(back.pixels, page.pixels)


def test_margin_pixels_do_not_affect_stitch(rng):
    page = _random_page(rng, 300, 300)
    tiles = tile_page(page)
    noisy = []
    m = TileSpec().margin
    for tile, off in tiles:
        px = tile.pixels.copy()
        px[:m, :] = ~px[:m, :]
        px[-m:, :] = ~px[-m:, :]
        px[:, :m] = ~px[:, :m]
        px[:, -m:] = ~px[:, -m:]
        noisy.append((BinaryPage(px), off))
    back = stitch_tiles(noisy, (300, 300))
    assert np.array_equal(back.pixels, page.pixels)


def test_stitch_rejects_bad_tiles(rng):
    page = _random_page(rng, 300, 260)
    tiles = tile_page(page)
    with pytest.raises(LineSegError):
        stitch_tiles(tiles[:-1], (300, 260))  # a corner is never covered
    wrong = [(BinaryPage(np.zeros((349, 350), dtype=bool)), (0, 0))]
    with pytest.raises(LineSegError):
        stitch_tiles(wrong, (100, 100))


def test_tile_spec_validation():
    with pytest.raises(LineSegError):
        TileSpec(window=250, inner=0)
    with pytest.raises(LineSegError):
        TileSpec(window=249, inner=250)
    with pytest.raises(LineSegError):
        TileSpec(window=351, inner=250)  # odd margin
    assert TileSpec().margin == 50
    assert TileSpec(window=250, inner=250).margin == 0


# ---------------------------------------------------------------- warping


def test_warp_returns_four_mirror_variants(rng):
    strip = _random_page(rng, 120, 8, density=0.4)
    variants = augment_warp(strip)
    assert len(variants) == 4
    base = variants[0].pixels
    assert np.array_equal(variants[1].pixels, np.fliplr(base))
    assert np.array_equal(variants[2].pixels, np.flipud(base))
    assert np.array_equal(variants[3].pixels, np.flipud(np.fliplr(base)))


def test_warp_blank_stays_blank():
    variants = augment_warp(BinaryPage(np.zeros((6, 90), dtype=bool)))
    assert all(v.foreground_count() == 0 for v in variants)
    shapes = {v.shape for v in variants}
    assert len(shapes) == 1


def test_warp_left_edge_is_fixed():
    strip = np.zeros((5, 100), dtype=bool)
    strip[:, 0] = True
    strip[2, 1] = True
    warped = augment_warp(BinaryPage(strip))[0].pixels
    assert np.array_equal(warped[:5, 0], strip[:, 0])
    assert not warped[5:, 0].any()


def test_warp_right_half_pixel_lands_rotated():
    # straight zone: out[v, u] samples strip[rint(radius - u), rint(mid + v - radius)]
    # with w=100: mid=50, radius=100/pi; the mark at (row 5, col 80) appears
    # exactly once, at (v, u) = (62, 27)
    strip = np.zeros((10, 100), dtype=bool)
    strip[5, 80] = True
    warped = augment_warp(BinaryPage(strip))[0].pixels
    assert warped[62, 27]
    assert warped.sum() == 1


def test_warp_end_of_line_points_down():
    strip = np.zeros((5, 100), dtype=bool)
    strip[2, :] = True  # a single text row
    warped = augment_warp(BinaryPage(strip))[0].pixels
    radius = 50.0 / (np.pi / 2.0)
    below = warped[int(np.ceil(radius)) + 2 :, :]
    cols = {tuple(np.nonzero(row)[0].tolist()) for row in below if row.any()}
    assert len(cols) == 1  # one vertical stroke in the straight zone
    (col_tuple,) = cols
    assert np.allclose(col_tuple, radius - 2, atol=1.0)


def test_warp_validation():
    with pytest.raises(LineSegError):
        augment_warp(BinaryPage(np.zeros((1, 50), dtype=bool)))
    with pytest.raises(LineSegError):
        augment_warp(BinaryPage(np.zeros((5, 1), dtype=bool)))
    with pytest.raises(LineSegError):  # quarter-circle radius must exceed height
        augment_warp(BinaryPage(np.zeros((50, 60), dtype=bool)))


# ---------------------------------------------------------------- generator


def test_generator_products_are_consistent():
    spec = PageSpec(lines=4, width=400)
    synth = generate_synthetic_page(3, spec)
    assert isinstance(synth, SyntheticPage)
    assert synth.page.shape == synth.blob_mask.shape
    assert synth.page.shape == (synth.labels.labels.shape[0], synth.labels.labels.shape[1])
    assert synth.labels.ids().tolist() == [1, 2, 3, 4]
    assert np.array_equal(synth.page.pixels, synth.labels.labels > 0)
    assert build_blob_line_set(synth.blob_mask).count == 4
    assert sorted(synth.polygons) == [1, 2, 3, 4]
    assert all(len(rings) == 1 for rings in synth.polygons.values())


def test_generator_is_deterministic():
    spec = PageSpec(lines=3, width=350, orientation="curved")
    a = generate_synthetic_page(11, spec)
    b = generate_synthetic_page(11, spec)
    assert np.array_equal(a.page.pixels, b.page.pixels)
    assert np.array_equal(a.labels.labels, b.labels.labels)
    assert np.array_equal(a.blob_mask.pixels, b.blob_mask.pixels)
    assert all(
        np.array_equal(ra, rb)
        for ra, rb in zip(a.polygons[2], b.polygons[2])
    )
    c = generate_synthetic_page(12, spec)
    assert not np.array_equal(a.page.pixels, c.page.pixels)


def test_single_line_page():
    synth = generate_synthetic_page(0, PageSpec(lines=1, width=200))
    assert synth.labels.ids().tolist() == [1]
    assert build_blob_line_set(synth.blob_mask).count == 1


def test_every_mark_is_strictly_nearest_its_own_line():
    synth = generate_synthetic_page(21, PageSpec(lines=4, width=400, diacritic_density=0.8))
    blobs = build_blob_line_set(synth.blob_mask)
    fields = blobs.distance_fields
    labels = synth.labels.labels
    for i in range(1, 5):
        sel = labels == i
        own = fields[i - 1][sel]
        others = np.stack([fields[j][sel] for j in range(4) if j != i - 1])
        assert (own < others.min(axis=0)).all()


def test_no_cross_line_touching_without_bridges():
    synth = generate_synthetic_page(8, PageSpec(lines=4, width=400, diacritic_density=0.6))
    comp_lab = label_components(synth.page.pixels, connectivity=8)
    for cid in range(1, int(comp_lab.max()) + 1):
        vals = np.unique(synth.labels.labels[comp_lab == cid])
        assert len(vals) == 1


def test_bridges_create_components_spanning_two_lines():
    spec = PageSpec(lines=2, width=200, margin=20, touching_bridge_probability=1.0)
    synth = generate_synthetic_page(4, spec)
    labels = synth.labels.labels
    assert int(labels.max()) <= 2  # bridge markers all resolved to real lines
    comp_lab = label_components(synth.page.pixels, connectivity=8)
    spans = []
    for cid in range(1, int(comp_lab.max()) + 1):
        vals = np.unique(labels[comp_lab == cid])
        if len(vals) > 1:
            spans.append(cid)
    assert spans, "bridge page must contain at least one touching component"
    # ground truth for touching components follows the nearest-line rule
    blobs = build_blob_line_set(synth.blob_mask)
    d1, d2 = blobs.distance_fields
    for cid in spans:
        sel = comp_lab == cid
        want = np.where(d1[sel] <= d2[sel], 1, 2)  # tie goes to the lower id
        assert np.array_equal(labels[sel], want)


def test_page_height_constraints():
    spec = PageSpec(lines=6)
    assert spec.required_height == 2 * 40 + 6 * 40 + 5 * 30
    with pytest.raises(LineSegError):
        generate_synthetic_page(0, PageSpec(lines=6, page_height=100))
    tall = generate_synthetic_page(0, PageSpec(lines=2, width=200, page_height=600))
    assert tall.page.shape[0] == 600


def test_page_spec_validation():
    with pytest.raises(LineSegError):
        PageSpec(lines=0)
    with pytest.raises(LineSegError):
        PageSpec(interline_gap=0)
    with pytest.raises(LineSegError):
        PageSpec(orientation="diagonal")


@pytest.mark.parametrize("orientation", ["skewed", "curved"])
def test_transformed_pages_keep_their_guarantees(orientation):
    spec = PageSpec(lines=3, width=300, orientation=orientation)
    synth = generate_synthetic_page(17, spec)
    assert synth.labels.ids().tolist() == [1, 2, 3]
    assert np.array_equal(synth.page.pixels, synth.labels.labels > 0)
    assert build_blob_line_set(synth.blob_mask).count == 3
    assert sorted(synth.polygons) == [1, 2, 3]
    assert all(len(rings) == 1 for rings in synth.polygons.values())
    if orientation == "skewed":
        assert synth.page.shape[0] > spec.required_height
        assert synth.page.shape[1] > spec.width
    else:
        assert synth.page.shape[1] == spec.width


def test_corpus_uses_derived_seeds():
    specs = [PageSpec(lines=2, width=200), PageSpec(lines=2, width=200)]
    corpus = synthetic_corpus(5, specs)
    assert len(corpus) == 2
    a = generate_synthetic_page(5, specs[0])
    b = generate_synthetic_page(1005, specs[1])
    assert np.array_equal(corpus[0].labels.labels, a.labels.labels)
    assert np.array_equal(corpus[1].labels.labels, b.labels.labels)


def test_acceptance_specs_composition():
    specs = acceptance_specs()
    assert len(specs) == 20
    kinds = [s.orientation for s in specs]
    assert kinds.count("horizontal") == 10
    assert kinds.count("skewed") == 5
    assert kinds.count("curved") == 5
    assert all(s.skew_degrees == 30.0 for s in specs if s.orientation == "skewed")


def test_generated_page_segments_back_to_its_own_truth():
    synth = generate_synthetic_page(33, PageSpec(lines=4, width=500))
    result = extract_lines(synth.page, synth.blob_mask)
    gt = regions_from_label_raster(synth.labels)
    pred = regions_from_label_raster(result.pixel_labels)
    report = evaluate(gt, pred)
    assert report.icdar2017.line_iu == 1.0
    assert report.icdar2017.pixel_iu >= 0.99
    assert report.icdar2013.fm >= 0.99
