"""Exact minimum-distance queries against an immutable point set.

The fast path wraps a static k-d tree (scipy.spatial.cKDTree, exact
Euclidean nearest-neighbor queries). min_distance_brute is the reference
linear scan the tree is tested against; both must agree to high
precision on every query.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import ValidationError
from .points import as_point_set, as_vector


class NeighborIndex:
    """Immutable exact nearest-point index over a fixed point set."""

    def __init__(self, points):
        # Copy before freezing so the caller's array is left untouched.
        pts = as_point_set(points).copy()
        pts.setflags(write=False)
        self._points = pts
        self._tree = cKDTree(pts)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self._points.shape[0]

    def min_distance(self, query) -> float:
        """Euclidean distance from `query` to its nearest indexed point."""
        q = as_vector(query, dim=self.dim, name="query")
        dist, _ = self._tree.query(q)
        return float(dist)

    def min_distances(self, queries) -> np.ndarray:
        """Vectorized min_distance over the rows of a (m, dim) array."""
        qs = as_point_set(queries, name="queries")
        if qs.shape[1] != self.dim:
            raise ValidationError(
                f"queries have dim {qs.shape[1]}, index has dim {self.dim}"
            )
        dists, _ = self._tree.query(qs)
        return np.asarray(dists, dtype=float)


def build_index(points) -> NeighborIndex:
    return NeighborIndex(points)


def min_distance_brute(points, query) -> float:
    """Reference scan: exact minimum distance without any index structure."""
    pts = as_point_set(points)
    q = as_vector(query, dim=pts.shape[1], name="query")
    deltas = pts - q
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", deltas, deltas))))
