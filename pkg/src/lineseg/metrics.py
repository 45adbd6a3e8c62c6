"""Line-segmentation evaluation suites.

Two standard protocols over foreground pixel sets:

- the 2013-style region matching: MatchScore = |G n R| / |G u R|, one-to-one
  matches at a threshold (default 0.90), DR = M/N1, RA = M/N2, FM their
  harmonic mean;
- the 2017-style IU protocol: max-IU one-to-one matching, pixel IU =
  sum TP / (sum TP + sum FP + sum FN) over matched pairs, and line IU =
  CL / (CL + ML + EL) where a line is correct when both its precision and
  recall reach the threshold (default 0.75).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LineSegError
from .raster import BinaryPage, LabelRaster


@dataclass(frozen=True)
class EvalRegion:
    """One region to score: a set of foreground pixels with an id."""

    id: int
    keys: np.ndarray  # sorted unique int64 pixel keys ((row << 32) | col)
    name: str = ""

    def __post_init__(self):
        if self.keys.size == 0:
            raise LineSegError("evaluation regions must be non-empty")

    @property
    def area(self) -> int:
        return int(self.keys.size)


def _pixel_keys(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    keys = (rows.astype(np.int64) << 32) | cols.astype(np.int64)
    keys = np.unique(keys)
    return keys


def region_from_mask(region_id: int, mask: np.ndarray, name: str = "") -> EvalRegion:
    rows, cols = np.nonzero(mask)
    return EvalRegion(region_id, _pixel_keys(rows, cols), name)


def regions_from_label_raster(raster: LabelRaster) -> list[EvalRegion]:
    """One region per nonzero label id, ascending."""
    out = []
    for i in raster.ids():
        out.append(region_from_mask(int(i), raster.labels == i, name=f"line{int(i)}"))
    return out


def regions_from_polygons(
    line_rings: dict, page: BinaryPage, merge_regions: bool = False
) -> list[EvalRegion]:
    """Rasterize polygon rings against the page foreground.

    With ``merge_regions`` False (the competition-tool behavior), every ring
    becomes its own region, so a line split into several polygons competes
    as separate regions and only its best piece can match. True unions all
    rings of a line id into one region. Rings that cover no foreground are
    dropped.
    """
    from .blobline import rasterize_polygon  # local import to avoid a cycle

    h, w = page.shape
    out: list[EvalRegion] = []
    seq = 0
    for line_id in sorted(line_rings):
        masks = []
        for ring in line_rings[line_id]:
            m = rasterize_polygon(ring, (w, h)) & page.pixels
            if m.any():
                masks.append(m)
        if not masks:
            continue
        if merge_regions:
            union = np.logical_or.reduce(masks)
            seq += 1
            out.append(region_from_mask(seq, union, name=f"line{line_id}"))
        else:
            for ri, m in enumerate(masks):
                seq += 1
                out.append(region_from_mask(seq, m, name=f"line{line_id}/ring{ri}"))
    return out


def match_score(g: EvalRegion, r: EvalRegion) -> float:
    """Jaccard overlap |G n R| / |G u R| of the two pixel sets."""
    inter = np.intersect1d(g.keys, r.keys, assume_unique=True).size
    union = g.area + r.area - inter
    return inter / union


@dataclass(frozen=True)
class Icdar2013Report:
    matches: tuple  # (gt id, pred id, score), in acceptance order
    m: int
    n1: int
    n2: int
    dr: float
    ra: float
    fm: float

    def to_dict(self) -> dict:
        return {
            "matches": [list(t) for t in self.matches],
            "M": self.m,
            "N1": self.n1,
            "N2": self.n2,
            "DR": self.dr,
            "RA": self.ra,
            "FM": self.fm,
        }


def evaluate_icdar2013(
    gt: list[EvalRegion], pred: list[EvalRegion], threshold: float = 0.90
) -> Icdar2013Report:
    """One-to-one region matching at a MatchScore threshold.

    Candidate pairs at or above the threshold are accepted greedily by
    descending score (ties by gt id then pred id), each region used once.
    Empty sides leave the corresponding rate at 0.
    """
    if not 0.0 < threshold <= 1.0:
        raise LineSegError(f"threshold must be in (0, 1], got {threshold}")
    n1, n2 = len(gt), len(pred)
    candidates = []
    for gi, g in enumerate(gt):
        for pi, p in enumerate(pred):
            s = match_score(g, p)
            if s >= threshold:
                candidates.append((-s, gi, pi))
    candidates.sort()
    used_g = set()
    used_p = set()
    matches = []
    for negs, gi, pi in candidates:
        if gi in used_g or pi in used_p:
            continue
        used_g.add(gi)
        used_p.add(pi)
        matches.append((gt[gi].id, pred[pi].id, -negs))
    m = len(matches)
    assert m <= min(n1, n2)
    dr = m / n1 if n1 else 0.0
    ra = m / n2 if n2 else 0.0
    fm = 2.0 * dr * ra / (dr + ra) if dr + ra > 0 else 0.0
    return Icdar2013Report(tuple(matches), m, n1, n2, dr, ra, fm)


@dataclass(frozen=True)
class Icdar2017Report:
    pixel_iu: float
    line_iu: float
    cl: int
    ml: int
    el: int
    tp: int
    fp: int
    fn: int
    lines: tuple = field(default_factory=tuple)  # per-line diagnostics dicts

    def to_dict(self) -> dict:
        return {
            "pixel_IU": self.pixel_iu,
            "line_IU": self.line_iu,
            "CL": self.cl,
            "ML": self.ml,
            "EL": self.el,
            "TP": self.tp,
            "FP": self.fp,
            "FN": self.fn,
            "lines": [dict(d) for d in self.lines],
        }


def evaluate_icdar2017(
    gt: list[EvalRegion], pred: list[EvalRegion], threshold: float = 0.75
) -> Icdar2017Report:
    """IU matching with pixel-level and line-level scores.

    Every GT region is paired with the prediction of maximum IU, each
    prediction used at most once (conflicts resolved by descending IU,
    ties by gt id then pred id). Matched pairs accumulate pixel TP/FP/FN;
    a pair is a correct line when precision and recall both reach the
    threshold; GT regions failing recall (or unmatched) are missed;
    predictions failing precision (or unmatched) are extra.
    """
    if not 0.0 < threshold <= 1.0:
        raise LineSegError(f"threshold must be in (0, 1], got {threshold}")
    candidates = []
    inter_cache: dict[tuple[int, int], int] = {}
    for gi, g in enumerate(gt):
        for pi, p in enumerate(pred):
            inter = np.intersect1d(g.keys, p.keys, assume_unique=True).size
            if inter == 0:
                continue
            iu = inter / (g.area + p.area - inter)
            inter_cache[gi, pi] = inter
            candidates.append((-iu, gi, pi))
    candidates.sort()
    pair_of_g: dict[int, int] = {}
    used_p = set()
    for negs, gi, pi in candidates:
        if gi in pair_of_g or pi in used_p:
            continue
        pair_of_g[gi] = pi
        used_p.add(pi)

    tp = fp = fn = 0
    cl = ml = el = 0
    lines = []
    for gi, g in enumerate(gt):
        if gi not in pair_of_g:
            ml += 1
            lines.append({"gt": g.id, "pred": None, "status": "missed"})
            continue
        pi = pair_of_g[gi]
        p = pred[pi]
        inter = inter_cache[gi, pi]
        pair_tp = inter
        pair_fp = p.area - inter
        pair_fn = g.area - inter
        tp += pair_tp
        fp += pair_fp
        fn += pair_fn
        precision = pair_tp / p.area
        recall = pair_tp / g.area
        correct = precision >= threshold and recall >= threshold
        if correct:
            cl += 1
        if recall < threshold:
            ml += 1
        if precision < threshold:
            el += 1
        lines.append(
            {
                "gt": g.id,
                "pred": p.id,
                "precision": precision,
                "recall": recall,
                "status": "correct" if correct else "low-overlap",
            }
        )
    for pi, p in enumerate(pred):
        if pi not in used_p:
            el += 1
            lines.append({"gt": None, "pred": p.id, "status": "extra"})
    pix_denom = tp + fp + fn
    pixel_iu = tp / pix_denom if pix_denom else 0.0
    line_denom = cl + ml + el
    line_iu = cl / line_denom if line_denom else 0.0
    return Icdar2017Report(pixel_iu, line_iu, cl, ml, el, tp, fp, fn, tuple(lines))


@dataclass(frozen=True)
class EvalReport:
    """Combined report; either suite may be absent."""

    icdar2013: Icdar2013Report | None = None
    icdar2017: Icdar2017Report | None = None

    def to_dict(self) -> dict:
        out: dict = {}
        if self.icdar2013 is not None:
            out["icdar2013"] = self.icdar2013.to_dict()
        if self.icdar2017 is not None:
            out["icdar2017"] = self.icdar2017.to_dict()
        return out


def evaluate(
    gt: list[EvalRegion],
    pred: list[EvalRegion],
    suite: str = "both",
    match_threshold: float = 0.90,
    iu_threshold: float = 0.75,
) -> EvalReport:
    if suite not in ("icdar2013", "icdar2017", "both"):
        raise LineSegError(f"unknown evaluation suite {suite!r}")
    r13 = evaluate_icdar2013(gt, pred, match_threshold) if suite != "icdar2017" else None
    r17 = evaluate_icdar2017(gt, pred, iu_threshold) if suite != "icdar2013" else None
    return EvalReport(r13, r17)
