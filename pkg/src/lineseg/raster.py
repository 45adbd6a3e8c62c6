"""Image containers and lossless I/O for binary pages and label rasters.

Internal convention: foreground ink is boolean True regardless of the
on-disk polarity, so the math modules never branch on polarity. Label
rasters store one non-negative integer id per pixel, 0 = background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import LineSegError

# Knuth multiplicative hash over 24-bit RGB: odd multiplier, hence a bijection
# mod 2**24, so distinct label ids always map to distinct colors.
_COLOR_HASH_MULTIPLIER = 2654435761


@dataclass(frozen=True)
class BinaryPage:
    """A bilevel page raster; ``pixels[row, col]`` is True on ink."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2 or p.size == 0:
            raise LineSegError("binary page must be a non-empty 2-D raster")
        if p.dtype != bool:
            object.__setattr__(self, "pixels", p.astype(bool))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def foreground_count(self) -> int:
        return int(self.pixels.sum())


@dataclass(frozen=True)
class LabelRaster:
    """Per-pixel integer line ids; 0 = background."""

    labels: np.ndarray

    def __post_init__(self):
        a = self.labels
        if a.ndim != 2 or a.size == 0:
            raise LineSegError("label raster must be a non-empty 2-D raster")
        if not np.issubdtype(a.dtype, np.integer):
            raise LineSegError("label raster must hold integers")
        if a.min() < 0:
            raise LineSegError("label ids must be non-negative")
        if a.dtype != np.int32:
            object.__setattr__(self, "labels", a.astype(np.int32))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.labels.shape

    def ids(self) -> np.ndarray:
        """Distinct nonzero ids present, ascending."""
        u = np.unique(self.labels)
        return u[u > 0]

    def compact(self) -> "LabelRaster":
        """Remap nonzero ids to the contiguous range 1..K.

        Ids are renumbered by order of first appearance in raster scan, so
        compaction is deterministic for a given raster.
        """
        flat = self.labels.ravel()
        nz = np.flatnonzero(flat)
        if nz.size == 0:
            return LabelRaster(np.zeros_like(self.labels))
        vals = flat[nz]
        uniq, first = np.unique(vals, return_index=True)
        order = np.argsort(first, kind="stable")
        mapping = np.zeros(int(uniq.max()) + 1, dtype=np.int32)
        mapping[uniq[order]] = np.arange(1, uniq.size + 1, dtype=np.int32)
        return LabelRaster(mapping[self.labels])


def _threshold_to_foreground(arr: np.ndarray, polarity: str) -> np.ndarray:
    if polarity not in ("ink-dark", "ink-light"):
        raise LineSegError(f"unknown polarity {polarity!r}")
    if arr.dtype == bool:
        dark = ~arr
    else:
        # Mid-gray split; datasets ship binarized, this only absorbs
        # antialiased edges or stray format noise.
        mid = 128 if arr.dtype == np.uint8 else (int(arr.max()) + 1) // 2 or 1
        dark = arr < mid
    return dark if polarity == "ink-dark" else ~dark


def load_binary_page(path, polarity: str = "ink-dark") -> BinaryPage:
    """Read a grayscale/bilevel PNG or PGM as a foreground-true page.

    ``polarity`` names where the ink is on disk: ``ink-dark`` for ordinary
    scans, ``ink-light`` for inverted images with white ink on black.
    """
    img = Image.open(path)
    if img.width < 1 or img.height < 1:
        raise LineSegError(f"zero-dimension image: {path}")
    if img.mode in ("1",):
        arr = np.array(img, dtype=bool)
    elif img.mode in ("L", "I", "I;16"):
        arr = np.array(img)
    else:
        arr = np.array(img.convert("L"))
    return BinaryPage(_threshold_to_foreground(arr, polarity))


def save_binary_page(page: BinaryPage, path) -> None:
    """Write a page as an 8-bit PNG, ink black on white."""
    arr = np.where(page.pixels, 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path)


def label_color(label_id: int) -> tuple[int, int, int]:
    """Deterministic distinct RGB for a label id; 0 maps to black."""
    v = (label_id * _COLOR_HASH_MULTIPLIER) % (1 << 24)
    return (v >> 16) & 0xFF, (v >> 8) & 0xFF, v & 0xFF


def save_label_raster(raster: LabelRaster, path, mode: str = "indexed") -> None:
    """Serialize a label raster as PNG.

    ``indexed`` stores ids verbatim in a 16-bit single channel;
    ``distinct-colors`` renders each id with a deterministic distinct RGB
    (background black) for visual inspection.
    """
    if mode == "indexed":
        if raster.labels.max() > np.iinfo(np.uint16).max:
            raise LineSegError("too many labels for 16-bit indexed PNG")
        Image.fromarray(raster.labels.astype(np.uint16)).save(path)
    elif mode == "distinct-colors":
        ids = raster.ids()
        lut = np.zeros((int(raster.labels.max()) + 1, 3), dtype=np.uint8)
        for i in ids:
            lut[i] = label_color(int(i))
        Image.fromarray(lut[raster.labels], mode="RGB").save(path)
    else:
        raise LineSegError(f"unknown save mode {mode!r}")


def load_label_raster(path) -> LabelRaster:
    """Read a label raster from PNG.

    Single-channel images are taken as ids verbatim. RGB images (the
    color-pixel-label ground-truth format) are converted by assigning ids
    1..K to distinct non-black colors in raster-scan order of first
    appearance; black is background.
    """
    img = Image.open(path)
    if img.mode in ("I", "I;16", "L"):
        return LabelRaster(np.array(img).astype(np.int32))
    if img.mode == "1":
        return LabelRaster(np.array(img, dtype=bool).astype(np.int32))
    arr = np.array(img.convert("RGB")).astype(np.int32)
    packed = (arr[..., 0] << 16) | (arr[..., 1] << 8) | arr[..., 2]
    flat = packed.ravel()
    nz = np.flatnonzero(flat)
    out = np.zeros(flat.shape, dtype=np.int32)
    if nz.size:
        uniq, inverse = np.unique(flat[nz], return_inverse=True)
        first = np.full(uniq.size, flat.size, dtype=np.int64)
        np.minimum.at(first, inverse, nz)
        order = np.argsort(first, kind="stable")
        rank = np.empty(uniq.size, dtype=np.int32)
        rank[order] = np.arange(1, uniq.size + 1, dtype=np.int32)
        out[nz] = rank[inverse]
    return LabelRaster(out.reshape(packed.shape))
