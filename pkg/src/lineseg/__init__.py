"""Pixel-accurate text line extraction from binarized handwritten pages.

Connected components of the page are assigned to detected blob lines by
minimizing a distance-plus-smoothness labeling energy with graph-cut
alpha-expansion; the package also ships both standard line-segmentation
evaluation suites, dataset tiling/augmentation utilities, and a synthetic
page generator with exact ground truth.
"""

from .blobline import (
    BlobLineSet,
    build_blob_line_set,
    nearest_blob_distance,
    skeleton_labels_from_polygons,
)
from .components import Component, extract_components, label_components
from .energy import (
    EnergyModel,
    NeighborGraph,
    build_energy_model,
    build_neighbor_graph,
    compute_beta,
    default_smoothness_scale,
    smoothness_cost,
    total_energy,
)
from .errors import (
    BetaUndefinedError,
    DimensionMismatchError,
    InvalidLabelingError,
    LineSegError,
    NoBlobLinesError,
)
from .extract import (
    ExtractionResult,
    extract_lines,
    polygons_from_labels,
    split_multiline_component,
)
from .metrics import (
    EvalRegion,
    EvalReport,
    evaluate,
    evaluate_icdar2013,
    evaluate_icdar2017,
    match_score,
    region_from_mask,
    regions_from_label_raster,
    regions_from_polygons,
)
from .mincut import FlowNetwork, Labeling, alpha_expansion, expansion_move, initial_labeling, max_flow
from .pagexml import read_page_xml, write_page_xml
from .prep import (
    PageSpec,
    SyntheticPage,
    TileSpec,
    augment_warp,
    generate_synthetic_page,
    stitch_tiles,
    tile_page,
)
from .raster import (
    BinaryPage,
    LabelRaster,
    load_binary_page,
    load_label_raster,
    save_binary_page,
    save_label_raster,
)

__version__ = "0.1.0"

__all__ = [
    "BetaUndefinedError",
    "BinaryPage",
    "BlobLineSet",
    "Component",
    "DimensionMismatchError",
    "EnergyModel",
    "EvalRegion",
    "EvalReport",
    "ExtractionResult",
    "FlowNetwork",
    "InvalidLabelingError",
    "LabelRaster",
    "Labeling",
    "LineSegError",
    "NeighborGraph",
    "NoBlobLinesError",
    "PageSpec",
    "SyntheticPage",
    "TileSpec",
    "alpha_expansion",
    "augment_warp",
    "build_blob_line_set",
    "build_energy_model",
    "build_neighbor_graph",
    "compute_beta",
    "default_smoothness_scale",
    "evaluate",
    "evaluate_icdar2013",
    "evaluate_icdar2017",
    "expansion_move",
    "extract_components",
    "extract_lines",
    "generate_synthetic_page",
    "initial_labeling",
    "label_components",
    "load_binary_page",
    "load_label_raster",
    "match_score",
    "max_flow",
    "nearest_blob_distance",
    "polygons_from_labels",
    "read_page_xml",
    "region_from_mask",
    "regions_from_label_raster",
    "regions_from_polygons",
    "save_binary_page",
    "save_label_raster",
    "skeleton_labels_from_polygons",
    "smoothness_cost",
    "split_multiline_component",
    "stitch_tiles",
    "tile_page",
    "total_energy",
    "write_page_xml",
]
