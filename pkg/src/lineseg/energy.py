"""Energy assembly: data costs, neighbor graph, smoothness weights, beta.

The labeling energy is

    E(f) = sum_e D(e, l_e) + sum_{(e,e') in N} w(e,e') * [l_e != l_e']

with D the distance from e's centroid to the nearest pixel of blob line
l_e, and w(e,e') = lambda * exp(-beta * d_e(e,e')) on the neighbor graph N
over centroid distances d_e, beta = 1 / (2 * mean d_e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .blobline import BlobLineSet
from .components import Component
from .errors import BetaUndefinedError, InvalidLabelingError, LineSegError


@dataclass(frozen=True)
class NeighborGraph:
    """Symmetrized k-NN graph over component centroids.

    ``edges[m] = (i, j)`` with i < j, lexicographically sorted, no
    duplicates; ``distances[m]`` is the centroid distance (coincident
    centroids are floored to 1.0 so every edge distance is positive).
    """

    edges: np.ndarray  # (m, 2) int32
    distances: np.ndarray  # (m,) float64

    def __post_init__(self):
        if len(self.edges) != len(self.distances):
            raise LineSegError("edge list and distance list disagree")

    @property
    def edge_count(self) -> int:
        return int(len(self.edges))


@dataclass(frozen=True)
class EnergyModel:
    """Everything the minimizer needs, fully precomputed."""

    data_cost: np.ndarray  # (n_components, n_labels) float64
    edges: np.ndarray  # (m, 2) int32
    edge_distances: np.ndarray  # (m,) float64
    beta: float
    smoothness_scale: float
    smoothness_weights: np.ndarray  # (m,) float64

    @property
    def n_components(self) -> int:
        return int(self.data_cost.shape[0])

    @property
    def n_labels(self) -> int:
        return int(self.data_cost.shape[1])


def build_neighbor_graph(components: list[Component], k: int = 4) -> NeighborGraph:
    """Connect each component to its k nearest centroids, symmetrized."""
    if k < 1:
        raise LineSegError(f"k must be >= 1, got {k}")
    n = len(components)
    if n == 0:
        raise LineSegError("neighbor graph needs at least one component")
    if n == 1:
        return NeighborGraph(np.empty((0, 2), dtype=np.int32), np.empty(0, dtype=np.float64))
    pts = np.array([c.centroid for c in components], dtype=np.float64)
    kk = min(k + 1, n)  # +1: the query point is its own nearest neighbor
    _, idx = cKDTree(pts).query(pts, k=kk)
    pairs = set()
    for i in range(n):
        for j in np.atleast_1d(idx[i]):
            j = int(j)
            if j != i:
                pairs.add((min(i, j), max(i, j)))
    edges = np.array(sorted(pairs), dtype=np.int32).reshape(-1, 2)
    diff = pts[edges[:, 0]] - pts[edges[:, 1]]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    dist[dist == 0.0] = 1.0
    return NeighborGraph(edges, dist)


def compute_beta(graph: NeighborGraph) -> float:
    """beta = 1 / (2 * mean edge distance)."""
    if graph.edge_count == 0:
        raise BetaUndefinedError()
    return 1.0 / (2.0 * float(graph.distances.mean()))


def smoothness_cost(beta: float, d_e: float) -> float:
    """exp(-beta * d_e), the unscaled cost of splitting a neighbor pair."""
    return math.exp(-beta * d_e)


def default_smoothness_scale(data_cost: np.ndarray) -> float:
    """Mean per-component gap between best and second-best data cost.

    Data costs are in pixels while the exponential weights are <= 1; this
    scale makes the two sums commensurate. Zero when only one label exists.
    """
    if data_cost.shape[1] < 2:
        return 0.0
    part = np.partition(data_cost, 1, axis=1)
    return float((part[:, 1] - part[:, 0]).mean())


def data_cost_matrix(components: list[Component], blobs: BlobLineSet) -> np.ndarray:
    """D[e, l] = distance from e's centroid (rounded to pixel) to line l+1."""
    h, w = blobs.shape
    n = len(components)
    rows = np.empty(n, dtype=np.intp)
    cols = np.empty(n, dtype=np.intp)
    for i, c in enumerate(components):
        x, y = c.centroid
        rows[i] = min(max(int(np.rint(y)), 0), h - 1)
        cols[i] = min(max(int(np.rint(x)), 0), w - 1)
    return blobs.distance_fields[:, rows, cols].T.copy()


def build_energy_model(
    components: list[Component],
    blobs: BlobLineSet,
    graph: NeighborGraph,
    smoothness_scale: float | None = None,
) -> EnergyModel:
    """Assemble the full model; ``smoothness_scale=None`` picks the default.

    An edgeless graph leaves beta undefined; the model then degrades to
    data costs only (all smoothness weights zero).
    """
    data = data_cost_matrix(components, blobs)
    lam = default_smoothness_scale(data) if smoothness_scale is None else float(smoothness_scale)
    if lam < 0:
        raise LineSegError("smoothness scale must be non-negative")
    try:
        beta = compute_beta(graph)
    except BetaUndefinedError:
        beta = 0.0
        weights = np.zeros(graph.edge_count, dtype=np.float64)
    else:
        weights = lam * np.exp(-beta * graph.distances)
    return EnergyModel(
        data_cost=data,
        edges=graph.edges,
        edge_distances=graph.distances.copy(),
        beta=beta,
        smoothness_scale=lam,
        smoothness_weights=weights,
    )


def validate_assignment(model: EnergyModel, assignment: np.ndarray) -> np.ndarray:
    a = np.asarray(assignment)
    if a.shape != (model.n_components,):
        raise InvalidLabelingError(
            f"labeling must assign all {model.n_components} components, got shape {a.shape}"
        )
    if not np.issubdtype(a.dtype, np.integer):
        raise InvalidLabelingError("labels must be integers")
    if a.size and (a.min() < 1 or a.max() > model.n_labels):
        raise InvalidLabelingError(f"labels must lie in 1..{model.n_labels}")
    return a


def total_energy(model: EnergyModel, assignment: np.ndarray) -> float:
    """Evaluate E(f) exactly for a total assignment (labels 1..n_labels)."""
    a = validate_assignment(model, assignment)
    e = float(model.data_cost[np.arange(model.n_components), a - 1].sum())
    if model.edges.size:
        differs = a[model.edges[:, 0]] != a[model.edges[:, 1]]
        e += float(model.smoothness_weights[differs].sum())
    return e


def describe(model: EnergyModel) -> str:
    """Plain-text dump of the model for inspection and oracle checks."""
    lines = [
        f"components: {model.n_components}  labels: {model.n_labels}",
        f"beta: {model.beta!r}  lambda: {model.smoothness_scale!r}",
        "data_cost:",
    ]
    for i in range(model.n_components):
        row = " ".join(f"{v:.6f}" for v in model.data_cost[i])
        lines.append(f"  e{i}: {row}")
    lines.append("edges:")
    for m in range(len(model.edges)):
        i, j = model.edges[m]
        lines.append(
            f"  ({i},{j}) d={model.edge_distances[m]:.6f} w={model.smoothness_weights[m]:.6f}"
        )
    return "\n".join(lines)
