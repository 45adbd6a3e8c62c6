"""Blob lines: labeled guide strokes and their exact distance fields.

A blob line is a thick stroke through a text line's character bodies. This
module labels the detection mask, precomputes one exact Euclidean distance
field per blob line (data costs query these), and can generate blob-line
masks from ground-truth line polygons by skeletonizing each polygon and
dilating the longest skeleton path to brush thickness.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.draw import polygon as draw_polygon
from skimage.morphology import skeletonize

from .components import label_components
from .errors import LineSegError, NoBlobLinesError
from .raster import BinaryPage, LabelRaster

_NEIGHBORS_8 = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


@dataclass(frozen=True)
class BlobLineSet:
    """Labeled blob lines plus per-label full-page distance fields.

    ``distance_fields[i]`` holds, for blob line id i+1, the Euclidean
    distance from every pixel to that line's nearest foreground pixel.
    """

    label_raster: LabelRaster
    distance_fields: np.ndarray  # (count, H, W) float64

    @property
    def count(self) -> int:
        return int(self.distance_fields.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.label_raster.shape


def _exact_distance_field(on_pixels: np.ndarray) -> np.ndarray:
    """Distance from every pixel to the nearest True pixel, exact.

    Computed from the feature transform so each value is sqrt of an integer
    sum of two squares; matches a brute-force nearest search bit for bit.
    """
    if not on_pixels.any():
        raise LineSegError("distance field requested for an empty pixel set")
    ir, ic = ndimage.distance_transform_edt(~on_pixels, return_distances=False, return_indices=True)
    rr, cc = np.indices(on_pixels.shape)
    dr = (rr - ir).astype(np.float64)
    dc = (cc - ic).astype(np.float64)
    return np.sqrt(dr * dr + dc * dc)


def build_blob_line_set(mask: BinaryPage) -> BlobLineSet:
    """Label the mask's 8-connected components as blob lines 1..count."""
    if not mask.pixels.any():
        raise NoBlobLinesError()
    labels = label_components(mask.pixels, connectivity=8)
    count = int(labels.max())
    fields = np.empty((count, *mask.shape), dtype=np.float64)
    for i in range(count):
        fields[i] = _exact_distance_field(labels == i + 1)
    return BlobLineSet(LabelRaster(labels), fields)


def nearest_blob_distance(blobs: BlobLineSet, label: int, point: tuple[float, float]) -> float:
    """Euclidean distance from a point to blob line ``label``.

    ``point`` is (x, y); real-valued coordinates are rounded to the nearest
    pixel (then clamped to the page) before the exact field is read.
    """
    if not 1 <= label <= blobs.count:
        raise LineSegError(f"blob line id {label} out of range 1..{blobs.count}")
    x, y = point
    h, w = blobs.shape
    r = min(max(int(np.rint(y)), 0), h - 1)
    c = min(max(int(np.rint(x)), 0), w - 1)
    return float(blobs.distance_fields[label - 1][r, c])


def _longest_skeleton_path(skel: np.ndarray) -> np.ndarray:
    """Keep only the longest simple path of the largest skeleton piece.

    Skeletons are trees up to rare small cycles, so the two-sweep BFS
    (farthest node from an arbitrary start, then farthest from that) finds
    the diameter path.
    """
    pts = list(zip(*np.nonzero(skel)))
    if not pts:
        return skel
    index = {p: i for i, p in enumerate(pts)}
    adj: list[list[int]] = [[] for _ in pts]
    for p, i in index.items():
        for dr, dc in _NEIGHBORS_8:
            q = (p[0] + dr, p[1] + dc)
            j = index.get(q)
            if j is not None:
                adj[i].append(j)

    def bfs(start: int) -> tuple[int, list[int]]:
        parent = [-1] * len(pts)
        parent[start] = start
        frontier = [start]
        last = start
        while frontier:
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if parent[v] < 0:
                        parent[v] = u
                        nxt.append(v)
            if nxt:
                last = nxt[-1]
            frontier = nxt
        return last, parent

    # Restrict to the largest connected piece, then take its diameter path.
    seen = [False] * len(pts)
    best_nodes: list[int] = []
    for s in range(len(pts)):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        qi = 0
        while qi < len(comp):
            for v in adj[comp[qi]]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
            qi += 1
        if len(comp) > len(best_nodes):
            best_nodes = comp
    u, _ = bfs(best_nodes[0])
    v, parent = bfs(u)
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    out = np.zeros_like(skel)
    for i in path:
        out[pts[i]] = True
    return out


def _disk_footprint(diameter: float) -> np.ndarray:
    r = diameter / 2.0
    n = int(np.floor(r))
    yy, xx = np.mgrid[-n : n + 1, -n : n + 1]
    return (yy * yy + xx * xx) <= r * r


def rasterize_polygon(ring, page_size: tuple[int, int]) -> np.ndarray:
    """Fill a closed (x, y) ring into a boolean mask of (width, height) page."""
    w, h = page_size
    ring = np.asarray(ring, dtype=np.float64)
    rr, cc = draw_polygon(ring[:, 1], ring[:, 0], shape=(h, w))
    out = np.zeros((h, w), dtype=bool)
    out[rr, cc] = True
    return out


def skeleton_labels_from_polygons(
    polygons, page_size: tuple[int, int], thickness: float = 12.0
) -> BinaryPage:
    """Derive a blob-line mask from ground-truth line polygons.

    Each polygon's interior is skeletonized, pruned to its single longest
    path, dilated to the brush thickness, and clipped back to the polygon
    so the stroke stays inside its line region. Degenerate polygons are
    skipped with a warning.
    """
    w, h = page_size
    out = np.zeros((h, w), dtype=bool)
    footprint = _disk_footprint(thickness)
    for idx, ring in enumerate(polygons):
        interior = rasterize_polygon(ring, page_size)
        if not interior.any():
            warnings.warn(f"polygon {idx} has empty interior, skipped", stacklevel=2)
            continue
        skel = skeletonize(interior)
        if not skel.any():
            # A 1-px-thin region can skeletonize to itself or to nothing
            # depending on parity; fall back to the region.
            skel = interior
        stroke = ndimage.binary_dilation(_longest_skeleton_path(skel), structure=footprint)
        out |= stroke & interior
    return BinaryPage(out)
