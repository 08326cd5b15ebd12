"""Input validation helpers.

These follow the scikit-learn convention of converting array-likes to
validated ndarrays at the point of use, raising semantic errors from
:mod:`prodtech.errors` instead of bare ValueErrors.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DegenerateTechnology,
    DimensionMismatch,
    NonPositiveInput,
    ParamDomain,
)


def as_quantities(x, name: str = "inputs") -> np.ndarray:
    """Coerce input quantities to a validated 1-D float array.

    Accepts any array-like (including an ``InputBundle``, via its
    ``quantities`` attribute). Every entry must be finite and >= 0.
    """
    if hasattr(x, "quantities"):
        x = x.quantities
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionMismatch(f"{name} must be a 1-D sequence with at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ParamDomain(f"{name} must be finite")
    if np.any(arr < 0):
        raise NonPositiveInput(f"{name} must be non-negative")
    return arr


def as_requirements(tech, name: str = "requirements") -> np.ndarray:
    """Coerce a technology to a validated (K, M) coefficient matrix.

    Accepts a ``TechnologyMatrix``, a 2-D array-like, or a 1-D array-like
    (treated as a single-output technology). Entries must be finite and
    >= 0, and the focal row (row 0) must contain a positive entry.
    """
    if hasattr(tech, "requirements"):
        tech = tech.requirements
    arr = np.asarray(tech, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a K x M matrix with K >= 1, M >= 1")
    if not np.all(np.isfinite(arr)):
        raise ParamDomain(f"{name} must be finite")
    if np.any(arr < 0):
        raise ParamDomain(f"{name} must be non-negative")
    if not np.any(arr[0] > 0):
        raise DegenerateTechnology(
            "focal output row has no positive requirement; output would be unbounded"
        )
    return arr


def check_same_inputs(requirements: np.ndarray, quantities: np.ndarray) -> None:
    if requirements.shape[1] != quantities.shape[0]:
        raise DimensionMismatch(
            f"technology expects {requirements.shape[1]} inputs, got {quantities.shape[0]}"
        )


def as_exogenous(y, n_outputs: int, name: str = "exogenous") -> np.ndarray:
    """Validate the vector of competing output levels (length K - 1)."""
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.shape[0] != n_outputs - 1:
        raise DimensionMismatch(
            f"expected {n_outputs - 1} exogenous output levels, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ParamDomain(f"{name} must be finite")
    if np.any(arr < 0):
        raise ParamDomain(f"{name} must be non-negative")
    return arr


def check_points_matrix(X, n_features: int | None = None) -> np.ndarray:
    """Validate a 2-D matrix of evaluation points (one input bundle per row)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DimensionMismatch("points must form a 2-D (n_points, n_inputs) matrix")
    if n_features is not None and arr.shape[1] != n_features:
        raise DimensionMismatch(
            f"points have {arr.shape[1]} columns, expected {n_features}"
        )
    if not np.all(np.isfinite(arr)):
        raise ParamDomain("points must be finite")
    if np.any(arr < 0):
        raise NonPositiveInput("input quantities must be non-negative")
    return arr


def require_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ParamDomain(f"{name} must be finite and > 0, got {value}")
    return value


def require_in_range(value: float, lo: float, hi: float, name: str,
                     include_lo: bool = True, include_hi: bool = True) -> float:
    value = float(value)
    ok_lo = value >= lo if include_lo else value > lo
    ok_hi = value <= hi if include_hi else value < hi
    if not (np.isfinite(value) and ok_lo and ok_hi):
        lo_b = "[" if include_lo else "("
        hi_b = "]" if include_hi else ")"
        raise ParamDomain(f"{name} must lie in {lo_b}{lo}, {hi}{hi_b}, got {value}")
    return value


def require_int_at_least(value, minimum: int, name: str) -> int:
    try:
        ivalue = int(value)
    except (TypeError, ValueError):
        raise ParamDomain(f"{name} must be an integer, got {value!r}") from None
    if ivalue != value or ivalue < minimum:
        raise ParamDomain(f"{name} must be an integer >= {minimum}, got {value!r}")
    return ivalue
