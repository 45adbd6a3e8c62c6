"""Dataset plumbing: patch tiling/stitching, curved-line augmentation, and
a synthetic page generator with exact ground truth.

The tiling protocol pads the page, slides a 350x350 window so that the
central 250x250 inner regions partition the original page, and stitching
keeps only those inner regions. The warp bends a straight text strip 90
degrees from its middle (a quarter-circle ribbon bend continuing straight
down) and returns the bend plus its mirrors. The generator builds toy
pages (word-like blobs, floating diacritics, optional touching bridges,
optional skew or curvature) whose labels, blob mask, and polygons are
exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .blobline import build_blob_line_set
from .components import Component, label_components
from .errors import LineSegError
from .extract import polygons_from_labels, split_multiline_component
from .raster import BinaryPage, LabelRaster


@dataclass(frozen=True)
class TileSpec:
    """Sliding-window geometry; the inner windows tile the page exactly."""

    window: int = 350
    inner: int = 250

    def __post_init__(self):
        if self.inner < 1 or self.window < self.inner:
            raise LineSegError("need 1 <= inner <= window")
        if (self.window - self.inner) % 2 != 0:
            raise LineSegError("window minus inner must be even (centered margin)")

    @property
    def margin(self) -> int:
        return (self.window - self.inner) // 2


def tile_page(page: BinaryPage, spec: TileSpec = TileSpec()) -> list:
    """Cut the padded page into overlapping window tiles.

    Returns (tile, (x, y)) pairs in row-major order, where (x, y) is the
    position of the tile's inner window in original page coordinates.
    """
    h, w = page.shape
    nx = -(-w // spec.inner)  # ceil division
    ny = -(-h // spec.inner)
    padded = np.zeros(
        (2 * spec.margin + ny * spec.inner, 2 * spec.margin + nx * spec.inner), dtype=bool
    )
    padded[spec.margin : spec.margin + h, spec.margin : spec.margin + w] = page.pixels
    out = []
    for iy in range(ny):
        for ix in range(nx):
            r0 = iy * spec.inner
            c0 = ix * spec.inner
            tile = padded[r0 : r0 + spec.window, c0 : c0 + spec.window]
            out.append((BinaryPage(tile.copy()), (ix * spec.inner, iy * spec.inner)))
    return out


def stitch_tiles(tiles, page_size: tuple[int, int], spec: TileSpec = TileSpec()) -> BinaryPage:
    """Reassemble a page from tile predictions, keeping inner windows only.

    ``page_size`` is (width, height). Raises when the tiles do not cover
    every page pixel.
    """
    w, h = page_size
    out = np.zeros((h, w), dtype=bool)
    covered = np.zeros((h, w), dtype=bool)
    m = spec.margin
    for tile, (x, y) in tiles:
        if tile.shape != (spec.window, spec.window):
            raise LineSegError(f"tile at {(x, y)} has shape {tile.shape}, want window size")
        inner = tile.pixels[m : m + spec.inner, m : m + spec.inner]
        rows = min(spec.inner, h - y)
        cols = min(spec.inner, w - x)
        if rows <= 0 or cols <= 0:
            continue
        out[y : y + rows, x : x + cols] = inner[:rows, :cols]
        covered[y : y + rows, x : x + cols] = True
    if not covered.all():
        raise LineSegError("tiles do not cover the full page")
    return BinaryPage(out)


def augment_warp(strip: BinaryPage) -> list[BinaryPage]:
    """Bend a straight-line strip 90 degrees from its middle, plus mirrors.

    The left half follows a quarter-circle (the rotation angle ramps
    linearly from 0 at the left edge to 90 degrees at the midpoint), and
    columns past the midpoint continue straight down. Nearest-neighbor
    sampling of the analytic inverse keeps the output binary and hole
    free. Returns [warp, horizontal mirror, vertical mirror, both].
    """
    h, w = strip.shape
    if h < 2 or w < 2:
        raise LineSegError("strip too small to warp")
    mid = w / 2.0
    radius = mid / (np.pi / 2.0)  # unit-speed arc: angle(s) = s / radius
    if radius <= h:
        raise LineSegError(
            f"strip of height {h} is too tall for a quarter-circle bend of radius {radius:.1f}"
        )
    out_h = int(np.ceil(radius + (w - mid))) + 1
    out_w = int(np.ceil(radius)) + 1
    vv, uu = np.indices((out_h, out_w), dtype=np.float64)
    du = uu  # bend center sits at (x, y) = (0, radius)
    dv = vv - radius
    arc = dv <= 0.0
    rho = np.hypot(du, dv)
    theta = np.arctan2(du, -dv)
    src_col = np.where(arc, theta * radius, mid + dv)
    src_row = np.where(arc, radius - rho, radius - du)
    sr = np.rint(src_row).astype(np.int64)
    sc = np.rint(src_col).astype(np.int64)
    valid = (sr >= 0) & (sr < h) & (sc >= 0) & (sc < w)
    warped = np.zeros((out_h, out_w), dtype=bool)
    warped[valid] = strip.pixels[sr[valid], sc[valid]]
    return [
        BinaryPage(warped),
        BinaryPage(np.fliplr(warped)),
        BinaryPage(np.flipud(warped)),
        BinaryPage(np.flipud(np.fliplr(warped))),
    ]


@dataclass(frozen=True)
class PageSpec:
    """Knobs for the synthetic generator; all geometry in pixels."""

    lines: int = 6
    width: int = 900
    interline_gap: int = 30
    body_height: int = 40
    word_height: int = 24
    blob_thickness: int = 12
    margin: int = 40
    diacritic_density: float = 0.3
    touching_bridge_probability: float = 0.0
    orientation: str = "horizontal"  # horizontal | skewed | curved
    skew_degrees: float = 30.0
    curve_amplitude: float = 25.0
    curve_cycles: float = 1.0
    page_height: int | None = None

    def __post_init__(self):
        if self.lines < 1:
            raise LineSegError("need at least one line")
        if self.interline_gap < 1:
            raise LineSegError("interline gap must be at least 1 px")
        if self.orientation not in ("horizontal", "skewed", "curved"):
            raise LineSegError(f"unknown orientation {self.orientation!r}")

    @property
    def required_height(self) -> int:
        return 2 * self.margin + self.lines * self.body_height + (
            self.lines - 1
        ) * self.interline_gap


@dataclass(frozen=True)
class SyntheticPage:
    """One generated page with its exact ground truth."""

    page: BinaryPage
    labels: LabelRaster
    blob_mask: BinaryPage
    polygons: dict = field(default_factory=dict)


def _column_shift(arr: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Shift every column down by its own amount, growing the canvas."""
    h, w = arr.shape
    pad = int(np.abs(shifts).max())
    out = np.zeros((h + 2 * pad, w), dtype=arr.dtype)
    for c in range(w):
        r0 = pad + int(shifts[c])
        out[r0 : r0 + h, c] = arr[:, c]
    return out


def generate_synthetic_page(seed: int, spec: PageSpec = PageSpec()) -> SyntheticPage:
    """Deterministic toy page: words on blob lines, diacritics, bridges.

    Words are rectangles with a sinusoidal top edge, vertically centered
    on their line; diacritics float above or below their word, always
    nearer to their own blob line than to any other. Bridges are short
    vertical strokes joining words of adjacent lines; their ground-truth
    pixels follow the nearest-blob-line rule, the same rule the extractor
    uses to split touching components.
    """
    if spec.page_height is not None and spec.required_height > spec.page_height:
        raise LineSegError(
            f"{spec.lines} lines need {spec.required_height} px, page allows {spec.page_height}"
        )
    rng = np.random.default_rng(seed)
    h = max(spec.required_height, spec.page_height or 0)
    w = spec.width
    half_word = spec.word_height // 2
    half_blob = spec.blob_thickness // 2
    pitch = spec.body_height + spec.interline_gap
    labels = np.zeros((h, w), dtype=np.int32)
    mask = np.zeros((h, w), dtype=bool)
    centers = [spec.margin + spec.body_height // 2 + i * pitch for i in range(spec.lines)]
    word_spans: list[list[tuple[int, int]]] = [[] for _ in range(spec.lines)]

    for i, cy in enumerate(centers):
        mask[cy - half_blob : cy - half_blob + spec.blob_thickness, spec.margin : w - spec.margin] = True
        # Word-like blobs must sit much closer along the line than the
        # interline pitch, as in real text, so the neighbor graph stays
        # dominated by same-line edges.
        x = spec.margin + int(rng.integers(0, 12))
        while True:
            width = int(rng.integers(14, 32))
            if x + width > w - spec.margin:
                break
            phase = float(rng.uniform(0.0, 2.0 * np.pi))
            for col in range(x, x + width):
                off = int(np.rint(3.0 * np.sin(2.0 * np.pi * (col - x) / 40.0 + phase)))
                labels[cy - half_word + off : cy + half_word, col] = i + 1
            word_spans[i].append((x, x + width))
            if rng.random() < spec.diacritic_density:
                size = int(rng.integers(3, 6))
                clearance = int(rng.integers(2, 7))
                dy = half_word + 3 + clearance  # 3 covers the top-edge wobble
                if dy + size < pitch // 2 - 4:  # stay nearer to our own blob line
                    c0 = x + int(rng.integers(0, max(1, width - size)))
                    r0 = cy - dy - size if rng.random() < 0.5 else cy + dy
                    labels[r0 : r0 + size, c0 : c0 + size] = i + 1
            x += width + int(rng.integers(7, 13))
        if not word_spans[i]:
            x0 = spec.margin
            x1 = min(w - spec.margin, x0 + 20)
            labels[cy - half_word : cy + half_word, x0:x1] = i + 1
            word_spans[i].append((x0, x1))

    bridge_marker = spec.lines + 1
    for i in range(spec.lines - 1):
        if rng.random() >= spec.touching_bridge_probability:
            continue
        overlaps = []
        for a0, a1 in word_spans[i]:
            for b0, b1 in word_spans[i + 1]:
                lo, hi = max(a0, b0), min(a1, b1)
                if hi - lo >= 3:
                    overlaps.append((lo, hi))
        if not overlaps:
            continue
        lo, hi = overlaps[int(rng.integers(0, len(overlaps)))]
        x0 = int(rng.integers(lo, hi - 2))
        block = labels[centers[i] : centers[i + 1] + 1, x0 : x0 + 3]
        block[block == 0] = bridge_marker

    if spec.orientation == "skewed":
        labels = ndimage.rotate(labels, spec.skew_degrees, order=0, reshape=True, prefilter=False)
        mask = ndimage.rotate(
            mask.astype(np.uint8), spec.skew_degrees, order=0, reshape=True, prefilter=False
        ).astype(bool)
    elif spec.orientation == "curved":
        phase = float(rng.uniform(0.0, 2.0 * np.pi))
        shifts = np.rint(
            spec.curve_amplitude
            * np.sin(2.0 * np.pi * spec.curve_cycles * np.arange(w) / w + phase)
        ).astype(np.int64)
        labels = _column_shift(labels, shifts)
        mask = _column_shift(mask, shifts)

    if spec.orientation != "horizontal":
        # Nearest-neighbor resampling leaves 1-2 px artifacts at rotated word
        # corners: orphan specks, and vertex pixels whose only attachment to
        # the body is diagonal.  Drop both so they cannot masquerade as marks
        # or spawn stray regions downstream.  Real marks are >= 9 px.
        eight = np.ones((3, 3), dtype=int)
        for lid in np.unique(labels):
            if lid == 0:
                continue
            sel = labels == lid
            piece_lab, n_pieces = ndimage.label(sel, structure=eight)
            if n_pieces > 1:
                sizes = np.bincount(piece_lab.ravel())
                for pid in np.nonzero(sizes[1:] <= 3)[0] + 1:
                    sel[piece_lab == pid] = False
            while True:
                # a pixel with no 4-neighbour inside its own label
                nbr = np.zeros_like(sel)
                nbr[1:, :] |= sel[:-1, :]
                nbr[:-1, :] |= sel[1:, :]
                nbr[:, 1:] |= sel[:, :-1]
                nbr[:, :-1] |= sel[:, 1:]
                lonely = sel & ~nbr
                if not lonely.any():
                    break
                sel[lonely] = False
            labels[(labels == lid) & ~sel] = 0
        piece_lab, n_pieces = ndimage.label(mask, structure=eight)
        if n_pieces > 1:
            sizes = np.bincount(piece_lab.ravel())
            for pid in np.nonzero(sizes[1:] <= 3)[0] + 1:
                mask[piece_lab == pid] = False

    # Resolve bridge pixels: whole touching components get the per-pixel
    # nearest-blob-line ground truth (word pixels sit on their own blob, so
    # this only decides the bridge stroke itself).
    blobs = build_blob_line_set(BinaryPage(mask))
    if (labels == bridge_marker).any():
        comp_lab = label_components(labels > 0, connectivity=8)
        bridged = np.unique(comp_lab[labels == bridge_marker])
        for cid in bridged[bridged > 0]:
            rr, cc = np.nonzero(comp_lab == cid)
            touched = np.unique(blobs.label_raster.labels[rr, cc])
            touched = touched[touched > 0]
            if touched.size == 0:
                touched = np.arange(1, blobs.count + 1)
            comp = Component(0, rr, cc)
            labels[rr, cc] = split_multiline_component(comp, blobs, touched).astype(np.int32)

    raster = LabelRaster(labels)
    # Radius 10 closes every intra-line gap (word gaps top out at 12 px, plus
    # resampling jitter and corner rounding on skewed pages) so each line
    # exports a single bounding polygon, as real ground truth does, while
    # staying well below the cross-line clearance.
    return SyntheticPage(
        page=BinaryPage(labels > 0),
        labels=raster,
        blob_mask=BinaryPage(mask),
        polygons=polygons_from_labels(raster, closing_radius=10.0),
    )


def synthetic_corpus(seed: int, specs: list[PageSpec]) -> list[SyntheticPage]:
    """Generate one page per spec, with per-page seeds derived from ``seed``."""
    return [generate_synthetic_page(seed + 1000 * i, s) for i, s in enumerate(specs)]


def acceptance_specs() -> list[PageSpec]:
    """The standard 20-page mix: 10 horizontal, 5 skewed 30, 5 curved."""
    out = [PageSpec(orientation="horizontal", diacritic_density=0.4) for _ in range(10)]
    out += [PageSpec(orientation="skewed", skew_degrees=30.0, diacritic_density=0.3) for _ in range(5)]
    out += [PageSpec(orientation="curved", diacritic_density=0.3) for _ in range(5)]
    return out
