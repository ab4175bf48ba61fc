"""Validation helpers for the array shapes the package passes around.

A point set is a rectangular (count, dim) float array with finite
entries; a sequence set additionally shares one length so rows can be
compared pointwise. Everything downstream assumes these invariants, so
they are checked once at the boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError


def as_point_set(data, name: str = "points") -> np.ndarray:
    """Coerce to a nonempty (count, dim) float array or raise ValidationError."""
    try:
        arr = np.asarray(data, dtype=float)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"{name} must be a rectangular numeric array ({exc})") from None
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional (count, dim), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} must contain at least one row")
    if arr.shape[1] == 0:
        raise ValidationError(f"{name} must have at least one column")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must contain only finite values")
    return arr


def as_vector(data, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-d float array, optionally of fixed length."""
    try:
        arr = np.asarray(data, dtype=float)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"{name} must be a numeric vector ({exc})") from None
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValidationError(f"{name} must have length {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must contain only finite values")
    return arr


def as_labels(data, count: int | None = None, name: str = "labels") -> np.ndarray:
    """Coerce to a 1-d integer 0/1 label array aligned with a data set."""
    arr = np.asarray(data)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if count is not None and arr.shape[0] != count:
        raise ValidationError(f"{name} must have length {count}, got {arr.shape[0]}")
    values = np.unique(arr)
    if not np.all(np.isin(values, (0, 1))):
        raise ValidationError(f"{name} must contain only 0 and 1")
    return arr.astype(int)
