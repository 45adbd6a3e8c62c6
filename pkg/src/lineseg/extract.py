"""End-to-end extraction: page + blob mask -> per-pixel line labels + polygons.

Pipeline: connected components -> blob-line labeling and distance fields ->
(optional) per-pixel split of components touching several blob lines ->
energy assembly -> alpha-expansion -> paint labels -> trace bounding rings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .blobline import BlobLineSet, build_blob_line_set, _disk_footprint
from .components import Component, extract_components, label_components
from .energy import build_energy_model, build_neighbor_graph
from .errors import DimensionMismatchError
from .mincut import alpha_expansion
from .raster import BinaryPage, LabelRaster

# Corner-lattice crack directions, clockwise in image coordinates.
_DIR_VECS = ((0, 1), (1, 0), (0, -1), (-1, 0))  # E, S, W, N


@dataclass(frozen=True)
class ExtractionResult:
    """Everything a caller needs from one page run."""

    pixel_labels: LabelRaster
    polygons: dict  # line id -> list of (N, 2) float arrays of (x, y) ring vertices
    line_count: int
    diagnostics: list  # per component: id, label, costs, split info
    empty_lines: tuple
    energy: float


def split_multiline_component(
    component: Component, blobs: BlobLineSet, intersecting
) -> np.ndarray:
    """Assign each pixel of a touching component to its nearest blob line.

    ``intersecting`` is the set of blob-line ids the component has pixels
    on; ties go to the lower id.
    """
    ids = np.asarray(sorted(int(i) for i in intersecting), dtype=np.int64)
    if ids.size == 0:
        raise ValueError("split requested with no intersecting lines")
    d = blobs.distance_fields[ids - 1][:, component.rows, component.cols]
    return ids[np.argmin(d, axis=0)]


def _crack_valid(region: np.ndarray, corner: tuple[int, int], d: int) -> bool:
    """True when walking crack ``d`` from ``corner`` keeps region on the right."""
    r, c = corner
    h, w = region.shape

    def at(rr, cc):
        return 0 <= rr < h and 0 <= cc < w and region[rr, cc]

    if d == 0:  # E: right flank below, left flank above
        return at(r, c) and not at(r - 1, c)
    if d == 1:  # S: right flank west
        return at(r, c - 1) and not at(r, c)
    if d == 2:  # W: right flank above
        return at(r - 1, c - 1) and not at(r, c - 1)
    return at(r - 1, c) and not at(r - 1, c - 1)  # N: right flank east


def trace_region_ring(region: np.ndarray) -> np.ndarray:
    """Trace the outer boundary of one connected region as a closed ring.

    Walks pixel cracks clockwise (region always on the right), taking the
    rightmost available turn, and emits a vertex at every turn. Vertices
    are (x, y) with pixel centers at integer coordinates, so ring points
    sit on the half-integer corner lattice and every region pixel center
    lies strictly inside. The first vertex is not repeated at the end.
    """
    rows, cols = np.nonzero(region)
    if rows.size == 0:
        raise ValueError("cannot trace an empty region")
    start = (int(rows[0]), int(cols[0]))  # topmost, then leftmost pixel
    verts = [start]
    cur = start
    d = 0  # E along the top edge of the start pixel is always a valid crack
    while True:
        cur = (cur[0] + _DIR_VECS[d][0], cur[1] + _DIR_VECS[d][1])
        if cur == start:
            break
        for cand in ((d + 1) % 4, d, (d + 3) % 4, (d + 2) % 4):
            if _crack_valid(region, cur, cand):
                if cand != d:
                    verts.append(cur)
                    d = cand
                break
        else:
            raise AssertionError("crack walk left the boundary")
    out = np.empty((len(verts), 2), dtype=np.float64)
    for i, (r, c) in enumerate(verts):
        out[i] = (c - 0.5, r - 0.5)
    return out


def polygons_from_labels(raster: LabelRaster, closing_radius: float = 5.0) -> dict:
    """Bounding rings per line id.

    Each id's mask is morphologically closed (disk of the given radius) to
    merge near-adjacent fragments, holes are filled, and the outer ring of
    every remaining 4-connected region is traced. Closing is extensive, so
    every labeled pixel stays inside some ring of its id.
    """
    out: dict[int, list[np.ndarray]] = {}
    pad = int(np.ceil(closing_radius)) + 1
    footprint = _disk_footprint(2.0 * closing_radius)
    for line_id in raster.ids():
        mask = raster.labels == line_id
        if closing_radius > 0:
            padded = np.pad(mask, pad)
            closed = ndimage.binary_closing(padded, structure=footprint)[
                pad:-pad, pad:-pad
            ]
        else:
            closed = mask
        closed = ndimage.binary_fill_holes(closed)
        regions = label_components(closed, connectivity=4)
        rings = []
        for k in range(1, int(regions.max()) + 1):
            rings.append(trace_region_ring(regions == k))
        out[int(line_id)] = rings
    return out


def extract_lines(
    page: BinaryPage,
    blob_mask: BinaryPage,
    *,
    k: int = 4,
    smoothness_scale: float | None = None,
    connectivity: int = 8,
    split_multiline_components: bool = True,
    max_sweeps: int = 10,
    closing_radius: float = 5.0,
) -> ExtractionResult:
    """Label every foreground pixel of ``page`` with a blob-line id.

    ``smoothness_scale=None`` selects the data-driven default; 0 disables
    smoothness entirely (pure nearest-blob clustering). Components whose
    pixels lie on two or more blob lines are split per pixel by nearest
    intersecting line before the energy stage, when enabled.
    """
    if page.shape != blob_mask.shape:
        raise DimensionMismatchError(
            f"page {page.shape} and blob mask {blob_mask.shape} differ in size"
        )
    blobs = build_blob_line_set(blob_mask)
    comps = extract_components(page.pixels, connectivity)
    labels_img = np.zeros(page.shape, dtype=np.int32)
    diagnostics: list[dict] = [None] * len(comps)  # type: ignore[list-item]
    em_comps: list[Component] = []
    blob_lab = blobs.label_raster.labels
    for comp in comps:
        touched = np.unique(blob_lab[comp.rows, comp.cols])
        touched = touched[touched > 0]
        if split_multiline_components and touched.size >= 2:
            per_pixel = split_multiline_component(comp, blobs, touched)
            labels_img[comp.rows, comp.cols] = per_pixel
            diagnostics[comp.id] = {
                "component": comp.id,
                "area": comp.area,
                "centroid": comp.centroid,
                "split": True,
                "lines": [int(t) for t in touched],
            }
        else:
            em_comps.append(comp)

    energy = 0.0
    if em_comps:
        graph = build_neighbor_graph(em_comps, k=k)
        model = build_energy_model(em_comps, blobs, graph, smoothness_scale)
        labeling = alpha_expansion(model, max_sweeps=max_sweeps)
        energy = labeling.energy
        incident = np.zeros(len(em_comps), dtype=np.float64)
        for m in range(len(model.edges)):
            i, j = model.edges[m]
            if labeling.assignment[i] != labeling.assignment[j]:
                incident[i] += model.smoothness_weights[m]
                incident[j] += model.smoothness_weights[m]
        for idx, comp in enumerate(em_comps):
            lab = int(labeling.assignment[idx])
            labels_img[comp.rows, comp.cols] = lab
            diagnostics[comp.id] = {
                "component": comp.id,
                "area": comp.area,
                "centroid": comp.centroid,
                "split": False,
                "label": lab,
                "data_cost": float(model.data_cost[idx, lab - 1]),
                "incident_smoothness": float(incident[idx]),
            }

    raster = LabelRaster(labels_img)
    present = {int(v) for v in np.unique(labels_img) if v > 0}
    empty = tuple(i for i in range(1, blobs.count + 1) if i not in present)
    return ExtractionResult(
        pixel_labels=raster,
        polygons=polygons_from_labels(raster, closing_radius),
        line_count=blobs.count,
        diagnostics=diagnostics,
        empty_lines=empty,
        energy=energy,
    )
