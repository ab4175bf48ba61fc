"""Linear representation stage: principal-component encode/decode.

Fitted from the sample covariance via a symmetric eigendecomposition.
Components are orthonormal rows ordered by descending explained
variance, with each component's sign canonicalized so its
largest-magnitude coordinate is positive; the fit is therefore fully
deterministic for a fixed input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .points import as_point_set
from .synth import TimeSeriesSet


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray  # (dim,) training mean
    components: np.ndarray  # (k, dim) orthonormal rows, descending variance
    explained_variance: np.ndarray  # (k,) sample variance along each component

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def k(self) -> int:
        return self.components.shape[0]


def _as_matrix(data, name: str = "data") -> np.ndarray:
    if isinstance(data, TimeSeriesSet):
        return data.series
    return as_point_set(data, name=name)


def canonicalize_signs(components: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude coordinate is positive."""
    out = components.copy()
    for row in out:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    return out


def pca_fit(data, k: int) -> PcaModel:
    """Fit a k-component model to (count, dim) data.

    Requires 1 <= k <= rank of the centered data; asking for more
    components than the data supports raises ValidationError naming the
    rank rather than returning noise directions.
    """
    X = _as_matrix(data)
    n, dim = X.shape
    if n < 2:
        raise ValidationError(f"need at least 2 rows to fit, got {n}")
    if k < 1 or k > dim:
        raise ValidationError(f"k must be in [1, {dim}], got {k}")
    mean = X.mean(axis=0)
    centered = X - mean
    rank = int(np.linalg.matrix_rank(centered))
    if k > rank:
        raise ValidationError(f"k={k} exceeds the data rank {rank}")
    cov = (centered.T @ centered) / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.maximum(evals[order], 0.0)
    components = canonicalize_signs(evecs[:, order].T[:k])
    return PcaModel(mean=mean, components=components, explained_variance=evals[:k])


def pca_encode(model: PcaModel, data) -> np.ndarray:
    """Project (count, dim) data onto the model's components."""
    X = _as_matrix(data)
    if X.shape[1] != model.dim:
        raise ValidationError(f"data has dim {X.shape[1]}, model expects {model.dim}")
    return (X - model.mean) @ model.components.T


def pca_decode(model: PcaModel, latent) -> np.ndarray:
    """Map (count, k) latent rows back to the data space."""
    Z = as_point_set(latent, name="latent")
    if Z.shape[1] != model.k:
        raise ValidationError(f"latent has {Z.shape[1]} columns, model has k={model.k}")
    return Z @ model.components + model.mean
