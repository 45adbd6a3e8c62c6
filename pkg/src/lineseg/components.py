"""Connected components of a binary page.

Components are the unit the energy model assigns labels to. Ordering is
deterministic: ids follow raster-scan order of each component's first
(topmost, then leftmost) foreground pixel, starting at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import LineSegError

_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Component:
    """One connected component: its pixels and derived geometry."""

    id: int
    rows: np.ndarray
    cols: np.ndarray
    centroid: tuple[float, float] = field(init=False)
    bbox: tuple[int, int, int, int] = field(init=False)

    def __post_init__(self):
        if self.rows.size == 0 or self.rows.size != self.cols.size:
            raise LineSegError("component needs matching non-empty pixel arrays")
        cy = float(self.rows.mean())
        cx = float(self.cols.mean())
        object.__setattr__(self, "centroid", (cx, cy))
        object.__setattr__(
            self,
            "bbox",
            (
                int(self.rows.min()),
                int(self.cols.min()),
                int(self.rows.max()),
                int(self.cols.max()),
            ),
        )

    @property
    def area(self) -> int:
        return int(self.rows.size)


def label_components(pixels: np.ndarray, connectivity: int = 8) -> np.ndarray:
    """Label foreground pixels 1..K in raster-scan order of first pixel.

    Returns an int32 raster, 0 on background.
    """
    if connectivity == 4:
        struct = _STRUCT_4
    elif connectivity == 8:
        struct = _STRUCT_8
    else:
        raise LineSegError(f"connectivity must be 4 or 8, got {connectivity}")
    raw, n = ndimage.label(pixels, structure=struct)
    if n == 0:
        return raw.astype(np.int32)
    # scipy already labels by row-major discovery, but that is an
    # implementation detail; renumber explicitly by first-pixel position.
    flat = raw.ravel()
    nz = np.flatnonzero(flat)
    first = np.full(n + 1, flat.size, dtype=np.int64)
    np.minimum.at(first, flat[nz], nz)
    order = np.argsort(first[1:], kind="stable")
    mapping = np.zeros(n + 1, dtype=np.int32)
    mapping[1 + order] = np.arange(1, n + 1, dtype=np.int32)
    return mapping[raw]


def extract_components(pixels: np.ndarray, connectivity: int = 8) -> list[Component]:
    """Split a foreground mask into Component objects, ids 0..K-1."""
    lab = label_components(pixels, connectivity)
    n = int(lab.max())
    out: list[Component] = []
    if n == 0:
        return out
    # One pass over all foreground pixels, then group by label.
    rr, cc = np.nonzero(lab)
    ids = lab[rr, cc]
    order = np.argsort(ids, kind="stable")
    rr, cc, ids = rr[order], cc[order], ids[order]
    bounds = np.searchsorted(ids, np.arange(1, n + 2))
    for k in range(n):
        start, stop = bounds[k], bounds[k + 1]
        out.append(Component(id=k, rows=rr[start:stop].copy(), cols=cc[start:stop].copy()))
    return out
