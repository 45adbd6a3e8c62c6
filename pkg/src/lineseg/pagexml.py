"""Minimal PAGE XML read/write: per-line bounding polygons only.

Reading is namespace-agnostic and pulls just the TextLine coordinate
rings; everything else in the document is ignored. Writing emits one
TextLine element per ring with the owning line id recorded in the
``custom`` attribute, and no timestamps, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

import numpy as np

from .errors import LineSegError

_PAGE_NS = "http://schema.primaresearch.org/PAGE/gts/pagecontent/2013-07-15"


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_points(text: str) -> np.ndarray:
    pts = []
    for token in text.split():
        x, _, y = token.partition(",")
        pts.append((float(x), float(y)))
    if len(pts) < 3:
        raise LineSegError(f"polygon needs at least 3 points, got {len(pts)}")
    return np.asarray(pts, dtype=np.float64)


def read_page_xml(path) -> tuple[tuple[int, int] | None, dict]:
    """Return ((width, height) or None, {line id: [rings]}).

    Line ids come from a ``lineid:N`` marker in the TextLine ``custom``
    attribute when present, else TextLines are numbered 1.. in document
    order. Several TextLines may share one id (multi-polygon lines).
    """
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise LineSegError(f"malformed PAGE XML {path}: {exc}") from exc
    size = None
    polygons: dict[int, list[np.ndarray]] = {}
    seq = 0
    for el in root.iter():
        name = _localname(el.tag)
        if name == "Page":
            try:
                size = (int(el.attrib["imageWidth"]), int(el.attrib["imageHeight"]))
            except (KeyError, ValueError):
                size = None
        elif name == "TextLine":
            seq += 1
            line_id = seq
            m = re.search(r"lineid:(\d+)", el.attrib.get("custom", ""))
            if m:
                line_id = int(m.group(1))
            for child in el:
                if _localname(child.tag) == "Coords" and child.attrib.get("points"):
                    polygons.setdefault(line_id, []).append(
                        _parse_points(child.attrib["points"])
                    )
                    break
    return size, polygons


def _format_ring(ring: np.ndarray) -> str:
    pts = np.rint(np.asarray(ring, dtype=np.float64)).astype(np.int64)
    pts = np.maximum(pts, 0)
    return " ".join(f"{x},{y}" for x, y in pts)


def write_page_xml(path, page_size: tuple[int, int], polygons: dict) -> None:
    """Serialize {line id: [rings]} with one TextLine element per ring."""
    w, h = page_size
    root = ET.Element("PcGts", xmlns=_PAGE_NS)
    page = ET.SubElement(
        root, "Page", imageWidth=str(int(w)), imageHeight=str(int(h))
    )
    region = ET.SubElement(page, "TextRegion", id="r0")
    n = 0
    for line_id in sorted(polygons):
        for ring in polygons[line_id]:
            n += 1
            tl = ET.SubElement(
                region, "TextLine", id=f"l{n}", custom=f"lineid:{int(line_id)}"
            )
            ET.SubElement(tl, "Coords", points=_format_ring(ring))
    tree = ET.ElementTree(root)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)
