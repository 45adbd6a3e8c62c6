"""Command-line front end.

Subcommands: extract, evaluate, genlabels, tile, stitch, augment, synth.
All numeric defaults live in DEFAULTS and can be overridden by LINESEG_*
environment variables (e.g. LINESEG_K=6); `lineseg --print-config` shows
the effective values. Every command writes a run.json manifest next to
its outputs and is deterministic given flags plus seed. Domain errors
exit nonzero with a one-line machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .blobline import skeleton_labels_from_polygons
from .errors import DimensionMismatchError, LineSegError
from .extract import extract_lines
from .metrics import (
    evaluate,
    regions_from_label_raster,
    regions_from_polygons,
)
from .pagexml import read_page_xml, write_page_xml
from .prep import PageSpec, TileSpec, augment_warp, generate_synthetic_page, stitch_tiles, tile_page
from .raster import (
    BinaryPage,
    LabelRaster,
    label_color,
    load_binary_page,
    load_label_raster,
    save_binary_page,
    save_label_raster,
)

DEFAULTS = {
    "k": 4,
    "lambda": "auto",
    "connectivity": 8,
    "match_threshold": 0.90,
    "iu_threshold": 0.75,
    "brush_thickness": 12.0,
    "closing_radius": 5.0,
    "seed": 0,
    "split_touching": "on",
    "merge_pred_regions": "off",
    "max_sweeps": 10,
    "window": 350,
    "inner": 250,
    "workers": 1,
    "polarity": "ink-dark",
}

_ENV_PREFIX = "LINESEG_"


def effective_defaults() -> dict:
    """DEFAULTS with LINESEG_* environment overrides applied."""
    out = {}
    for key, base in DEFAULTS.items():
        raw = os.environ.get(_ENV_PREFIX + key.upper())
        if raw is None:
            out[key] = base
        elif isinstance(base, int):
            out[key] = int(raw)
        elif isinstance(base, float):
            out[key] = float(raw)
        else:
            out[key] = raw
    return out


def _parse_lambda(value) -> float | None:
    if value in (None, "auto"):
        return None
    return float(value)


def _onoff(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected on|off, got {value!r}")
    return value == "on"


def _parse_size(value: str) -> tuple[int, int]:
    try:
        w, h = value.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected WxH, got {value!r}") from exc


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(outdir: Path, command: str, params: dict, outputs: list[str]) -> None:
    _write_json(
        outdir / "run.json",
        {"command": command, "params": params, "outputs": sorted(outputs)},
    )


def _overlay_png(page: BinaryPage, labels: LabelRaster, mask: BinaryPage, path: Path) -> None:
    from PIL import Image

    h, w = page.shape
    out = np.full((h, w, 3), 255, dtype=np.uint8)
    guide = mask.pixels & ~page.pixels
    out[guide] = (220, 220, 220)
    ids = labels.ids()
    lut = np.zeros((int(labels.labels.max()) + 1, 3), dtype=np.uint8)
    for i in ids:
        lut[i] = label_color(int(i))
    ink = page.pixels & (labels.labels > 0)
    out[ink] = lut[labels.labels[ink]]
    out[page.pixels & (labels.labels == 0)] = (0, 0, 0)
    Image.fromarray(out, mode="RGB").save(path)


def _extract_job(job: dict) -> dict:
    """One page end to end; runs in a worker process in batch mode."""
    page = load_binary_page(job["page"], job["polarity"])
    if job["blob_mask"] is not None:
        mask = load_binary_page(job["blob_mask"], job["polarity"])
    else:
        size, polygons = read_page_xml(job["page_xml"])
        rings = [ring for rs in polygons.values() for ring in rs]
        h, w = page.shape
        mask = skeleton_labels_from_polygons(rings, (w, h), job["brush_thickness"])
    result = extract_lines(
        page,
        mask,
        k=job["k"],
        smoothness_scale=job["smoothness_scale"],
        connectivity=job["connectivity"],
        split_multiline_components=job["split_touching"],
        max_sweeps=job["max_sweeps"],
        closing_radius=job["closing_radius"],
    )
    outdir = Path(job["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    save_label_raster(result.pixel_labels, outdir / "labels.png", mode="indexed")
    save_label_raster(result.pixel_labels, outdir / "labels_color.png", mode="distinct-colors")
    _overlay_png(page, result.pixel_labels, mask, outdir / "overlay.png")
    h, w = page.shape
    write_page_xml(outdir / "lines.xml", (w, h), result.polygons)
    _write_json(
        outdir / "diagnostics.json",
        {
            "line_count": result.line_count,
            "empty_lines": list(result.empty_lines),
            "energy": result.energy,
            "components": result.diagnostics,
        },
    )
    return {
        "page": job["page"],
        "outdir": str(outdir),
        "lines": result.line_count,
        "energy": result.energy,
    }


def cmd_extract(args) -> int:
    if (args.blob_mask is None) == (args.page_xml is None):
        raise LineSegError("give exactly one blob-line source: --blob-mask or --page-xml")
    page_path = Path(args.page)
    outdir = Path(args.out)
    params = {
        "page": str(args.page),
        "blob_mask": args.blob_mask,
        "page_xml": args.page_xml,
        "polarity": args.polarity,
        "k": args.k,
        "lambda": args.smoothness_scale if args.smoothness_scale is not None else "auto",
        "connectivity": args.connectivity,
        "split_touching": "on" if args.split_touching else "off",
        "max_sweeps": args.max_sweeps,
        "closing_radius": args.closing_radius,
        "brush_thickness": args.brush_thickness,
        "workers": args.workers,
    }
    base_job = {
        "polarity": args.polarity,
        "k": args.k,
        "smoothness_scale": args.smoothness_scale,
        "connectivity": args.connectivity,
        "split_touching": args.split_touching,
        "max_sweeps": args.max_sweeps,
        "closing_radius": args.closing_radius,
        "brush_thickness": args.brush_thickness,
    }
    if page_path.is_dir():
        source_dir = Path(args.blob_mask or args.page_xml)
        if not source_dir.is_dir():
            raise LineSegError("batch mode needs the blob-line source to be a directory too")
        jobs = []
        for p in sorted(page_path.iterdir()):
            if p.suffix.lower() not in (".png", ".pgm"):
                continue
            if args.blob_mask is not None:
                src = source_dir / p.name
                if not src.exists():
                    raise LineSegError(f"no blob mask for {p.name}")
                jobs.append(
                    dict(base_job, page=str(p), blob_mask=str(src), page_xml=None,
                         outdir=str(outdir / p.stem))
                )
            else:
                src = source_dir / (p.stem + ".xml")
                if not src.exists():
                    raise LineSegError(f"no PAGE XML for {p.name}")
                jobs.append(
                    dict(base_job, page=str(p), blob_mask=None, page_xml=str(src),
                         outdir=str(outdir / p.stem))
                )
        if not jobs:
            raise LineSegError(f"no page images found in {page_path}")
        outdir.mkdir(parents=True, exist_ok=True)
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                results = list(pool.map(_extract_job, jobs))
        else:
            results = [_extract_job(j) for j in jobs]
        _write_json(outdir / "batch.json", results)
        _write_manifest(outdir, "extract", params, [r["outdir"] for r in results] + ["batch.json"])
        print(f"extracted {len(results)} pages -> {outdir}")
        return 0
    job = dict(
        base_job,
        page=str(page_path),
        blob_mask=args.blob_mask,
        page_xml=args.page_xml,
        outdir=str(outdir),
    )
    result = _extract_job(job)
    _write_manifest(
        outdir,
        "extract",
        params,
        ["labels.png", "labels_color.png", "overlay.png", "lines.xml", "diagnostics.json"],
    )
    print(f"extracted {result['lines']} lines (energy {result['energy']:.3f}) -> {outdir}")
    return 0


def _load_regions(path: str, page: BinaryPage | None, merge: bool):
    """Regions plus page shape from a label raster PNG or a PAGE XML file."""
    if path.lower().endswith(".xml"):
        if page is None:
            raise LineSegError("PAGE XML input needs --page to rasterize polygons against")
        _, polygons = read_page_xml(path)
        return regions_from_polygons(polygons, page, merge_regions=merge), page.shape
    raster = load_label_raster(path)
    return regions_from_label_raster(raster), raster.shape


def cmd_evaluate(args) -> int:
    page = load_binary_page(args.page, args.polarity) if args.page else None
    gt_regions, gt_shape = _load_regions(args.gt, page, merge=True)
    pred_regions, pred_shape = _load_regions(args.pred, page, merge=args.merge_pred_regions)
    if gt_shape != pred_shape:
        raise DimensionMismatchError(
            f"ground truth {gt_shape} and prediction {pred_shape} differ in size"
        )
    report = evaluate(
        gt_regions,
        pred_regions,
        suite=args.suite,
        match_threshold=args.match_threshold,
        iu_threshold=args.iu_threshold,
    )
    payload = report.to_dict()
    if report.icdar2013 is not None:
        r = report.icdar2013
        print(f"icdar2013: DR={r.dr:.4f} RA={r.ra:.4f} FM={r.fm:.4f} (M={r.m}, N1={r.n1}, N2={r.n2})")
    if report.icdar2017 is not None:
        r = report.icdar2017
        print(
            f"icdar2017: pixel_IU={r.pixel_iu:.4f} line_IU={r.line_iu:.4f} "
            f"(CL={r.cl}, ML={r.ml}, EL={r.el})"
        )
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        _write_json(out, payload)
    return 0


def cmd_genlabels(args) -> int:
    if args.size is not None:
        w, h = args.size
    elif args.page is not None:
        page = load_binary_page(args.page, args.polarity)
        h, w = page.shape
    else:
        size, _ = read_page_xml(args.page_xml)
        if size is None:
            raise LineSegError("PAGE XML lacks image dimensions; pass --size or --page")
        w, h = size
    _, polygons = read_page_xml(args.page_xml)
    rings = [ring for rs in sorted(polygons.items()) for ring in rs[1]]
    mask = skeleton_labels_from_polygons(rings, (w, h), args.brush_thickness)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_binary_page(mask, out)
    _write_manifest(
        out.parent,
        "genlabels",
        {"page_xml": args.page_xml, "size": [w, h], "brush_thickness": args.brush_thickness},
        [out.name],
    )
    print(f"wrote blob-line mask with {len(rings)} strokes -> {out}")
    return 0


def cmd_tile(args) -> int:
    page = load_binary_page(args.page, args.polarity)
    spec = TileSpec(window=args.window, inner=args.inner)
    tiles = tile_page(page, spec)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (tile, (x, y)) in enumerate(tiles):
        name = f"tile_{i:04d}.png"
        save_binary_page(tile, outdir / name)
        entries.append({"file": name, "x": x, "y": y})
    h, w = page.shape
    manifest = {
        "page_size": [w, h],
        "window": spec.window,
        "inner": spec.inner,
        "tiles": entries,
    }
    _write_json(outdir / "manifest.json", manifest)
    _write_manifest(
        outdir,
        "tile",
        {"page": args.page, "window": spec.window, "inner": spec.inner},
        [e["file"] for e in entries] + ["manifest.json"],
    )
    print(f"wrote {len(entries)} tiles -> {outdir}")
    return 0


def cmd_stitch(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = json.loads(manifest_path.read_text())
    spec = TileSpec(window=manifest["window"], inner=manifest["inner"])
    tiles_dir = manifest_path.parent
    tiles = []
    for entry in manifest["tiles"]:
        tile = load_binary_page(tiles_dir / entry["file"], args.polarity)
        tiles.append((tile, (entry["x"], entry["y"])))
    w, h = manifest["page_size"]
    page = stitch_tiles(tiles, (w, h), spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_binary_page(page, out)
    print(f"stitched {len(tiles)} tiles -> {out}")
    return 0


def cmd_augment(args) -> int:
    strip = load_binary_page(args.strip, args.polarity)
    variants = augment_warp(strip)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    names = ["warp.png", "warp_hmirror.png", "warp_vmirror.png", "warp_hvmirror.png"]
    for name, img in zip(names, variants):
        save_binary_page(img, outdir / name)
    _write_manifest(outdir, "augment", {"strip": args.strip}, names)
    print(f"wrote 4 warped variants -> {outdir}")
    return 0


def cmd_synth(args) -> int:
    spec = PageSpec(
        lines=args.lines,
        width=args.width,
        interline_gap=args.gap,
        diacritic_density=args.diacritic_density,
        touching_bridge_probability=args.bridge_probability,
        orientation=args.orientation,
        skew_degrees=args.skew_degrees,
        curve_amplitude=args.curve_amplitude,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    pages = []
    for i in range(args.pages):
        synth = generate_synthetic_page(args.seed + 1000 * i, spec)
        pagedir = outdir / f"page_{i:03d}"
        pagedir.mkdir(exist_ok=True)
        save_binary_page(synth.page, pagedir / "page.png")
        save_label_raster(synth.labels, pagedir / "gt_labels.png", mode="indexed")
        save_binary_page(synth.blob_mask, pagedir / "blob_mask.png")
        h, w = synth.page.shape
        write_page_xml(pagedir / "gt_lines.xml", (w, h), synth.polygons)
        hashes = {}
        for name in ("page.png", "gt_labels.png", "blob_mask.png", "gt_lines.xml"):
            hashes[name] = hashlib.sha256((pagedir / name).read_bytes()).hexdigest()
        pages.append({"dir": pagedir.name, "sha256": hashes})
    _write_json(outdir / "manifest.json", {"seed": args.seed, "pages": pages})
    _write_manifest(
        outdir,
        "synth",
        {
            "seed": args.seed,
            "pages": args.pages,
            "lines": args.lines,
            "width": args.width,
            "gap": args.gap,
            "orientation": args.orientation,
            "diacritic_density": args.diacritic_density,
            "bridge_probability": args.bridge_probability,
        },
        [p["dir"] for p in pages] + ["manifest.json"],
    )
    print(f"generated {args.pages} pages -> {outdir}")
    return 0


def build_parser(defaults: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lineseg",
        description="Blob-line-guided text line extraction and evaluation.",
    )
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="print the effective default parameters as JSON and exit",
    )
    sub = parser.add_subparsers(dest="command")

    def add_polarity(p):
        p.add_argument("--polarity", choices=("ink-dark", "ink-light"),
                       default=defaults["polarity"], help="on-disk ink polarity of inputs")

    p = sub.add_parser("extract", help="extract text lines from a page + blob-line source")
    p.add_argument("--page", required=True, help="binary page PNG/PGM, or a directory of pages")
    p.add_argument("--blob-mask", help="blob-line mask PNG (or directory in batch mode)")
    p.add_argument("--page-xml", help="PAGE XML with line polygons (ground-truth path)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--k", type=int, default=defaults["k"], help="neighbors per component")
    p.add_argument("--lambda", dest="smoothness_scale", type=_parse_lambda,
                   default=_parse_lambda(defaults["lambda"]),
                   help="smoothness scale; 'auto' = mean best/second-best data-cost gap")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=defaults["connectivity"])
    p.add_argument("--split-touching", type=_onoff, default=_onoff(defaults["split_touching"]),
                   help="split components that touch several blob lines (on/off)")
    p.add_argument("--max-sweeps", type=int, default=defaults["max_sweeps"])
    p.add_argument("--closing-radius", type=float, default=defaults["closing_radius"])
    p.add_argument("--brush-thickness", type=float, default=defaults["brush_thickness"])
    p.add_argument("--workers", type=int, default=defaults["workers"],
                   help="worker processes in batch mode")
    add_polarity(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="score a prediction against ground truth")
    p.add_argument("--gt", required=True, help="label raster PNG or PAGE XML")
    p.add_argument("--pred", required=True, help="label raster PNG or PAGE XML")
    p.add_argument("--page", help="page image (required when either input is PAGE XML)")
    p.add_argument("--suite", choices=("icdar2013", "icdar2017", "both"), default="both")
    p.add_argument("--match-threshold", type=float, default=defaults["match_threshold"])
    p.add_argument("--iu-threshold", type=float, default=defaults["iu_threshold"])
    p.add_argument("--merge-pred-regions", type=_onoff,
                   default=_onoff(defaults["merge_pred_regions"]),
                   help="union multi-polygon predictions per line id (on/off)")
    p.add_argument("--out", help="write the report JSON here")
    add_polarity(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("genlabels", help="blob-line mask from PAGE XML line polygons")
    p.add_argument("--page-xml", required=True)
    p.add_argument("--size", type=_parse_size, help="page size WxH when no --page given")
    p.add_argument("--page", help="page image to take dimensions from")
    p.add_argument("--brush-thickness", type=float, default=defaults["brush_thickness"])
    p.add_argument("--out", required=True, help="output mask PNG path")
    add_polarity(p)
    p.set_defaults(func=cmd_genlabels)

    p = sub.add_parser("tile", help="cut a page into overlapping tiles")
    p.add_argument("--page", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--window", type=int, default=defaults["window"])
    p.add_argument("--inner", type=int, default=defaults["inner"])
    add_polarity(p)
    p.set_defaults(func=cmd_tile)

    p = sub.add_parser("stitch", help="reassemble a page from a tile manifest")
    p.add_argument("--manifest", required=True, help="manifest.json written by tile")
    p.add_argument("--out", required=True, help="output page PNG path")
    add_polarity(p)
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("augment", help="90-degree warp augmentation of a line strip")
    p.add_argument("--strip", required=True)
    p.add_argument("--out", required=True, help="output directory")
    add_polarity(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("synth", help="generate synthetic pages with exact ground truth")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pages", type=int, default=1)
    p.add_argument("--seed", type=int, default=defaults["seed"])
    p.add_argument("--lines", type=int, default=6)
    p.add_argument("--width", type=int, default=900)
    p.add_argument("--gap", type=int, default=30)
    p.add_argument("--orientation", choices=("horizontal", "skewed", "curved"),
                   default="horizontal")
    p.add_argument("--skew-degrees", type=float, default=30.0)
    p.add_argument("--curve-amplitude", type=float, default=25.0)
    p.add_argument("--diacritic-density", type=float, default=0.3)
    p.add_argument("--bridge-probability", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    defaults = effective_defaults()
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    if args.print_config:
        print(json.dumps(defaults, indent=2, sort_keys=True))
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except LineSegError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io-error", "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
