"""Shared independent oracles for the test suite.

Everything here recomputes results from first principles (exhaustive
enumeration, brute-force search, ray casting) so tests never validate the
library against itself.
"""

import numpy as np
import pytest


def enumerate_labelings(n_components: int, n_labels: int) -> np.ndarray:
    """All n_labels**n_components total assignments, labels 1-based."""
    grids = np.indices((n_labels,) * n_components)
    return grids.reshape(n_components, -1).T + 1


def energy_by_enumeration(model, assignments: np.ndarray) -> np.ndarray:
    """Evaluate the energy of many assignments at once, independently.

    Uses only the model's raw arrays (data_cost, edges, smoothness_weights)
    and re-derives the sum term by term.
    """
    n = model.data_cost.shape[0]
    e = model.data_cost[np.arange(n), assignments - 1].sum(axis=1)
    for m in range(len(model.edges)):
        i, j = model.edges[m]
        e = e + model.smoothness_weights[m] * (assignments[:, i] != assignments[:, j])
    return e


def brute_force_minimum(model):
    """(argmin assignment, min energy) by exhaustive enumeration."""
    a = enumerate_labelings(model.data_cost.shape[0], model.data_cost.shape[1])
    e = energy_by_enumeration(model, a)
    best = int(np.argmin(e))
    return a[best], float(e[best])


def brute_force_distance_field(on_pixels: np.ndarray) -> np.ndarray:
    """Exact nearest-pixel Euclidean distances by direct minimization.

    Squared distances are integers, so taking the integer minimum before
    the square root reproduces the exact float the library must produce.
    """
    h, w = on_pixels.shape
    pr, pc = np.nonzero(on_pixels)
    rr, cc = np.indices((h, w))
    d2 = (rr[..., None] - pr) ** 2 + (cc[..., None] - pc) ** 2
    return np.sqrt(d2.min(axis=2).astype(np.float64))


def ring_contains(ring: np.ndarray, x: float, y: float) -> bool:
    """Ray-casting point-in-polygon test on an (x, y) vertex ring."""
    inside = False
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if x < xi:
                inside = not inside
    return inside


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
