"""Poincaré-ball primitives.

Points are plain numpy arrays whose last axis holds the coordinates, so every
function broadcasts over leading batch axes. :class:`PoincarePoint` is a thin
validated wrapper for callers that want the curvature carried with the point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

DEFAULT_R_MAX = 1.0 - 1e-5


class DistanceForm(str, enum.Enum):
    ARCTANH_MOBIUS = "arctanh_mobius"
    ARCCOSH_EXACT = "arccosh_exact"


@dataclass(frozen=True)
class GeometryConfig:
    c: float = 1.0
    r_max: float = DEFAULT_R_MAX
    distance_form: DistanceForm = DistanceForm.ARCCOSH_EXACT

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"curvature c must be positive, got {self.c}")
        if not 0.0 < self.r_max < 1.0:
            raise ValueError(f"r_max must lie in (0, 1), got {self.r_max}")
        object.__setattr__(self, "distance_form", DistanceForm(self.distance_form))


@dataclass(frozen=True)
class PoincarePoint:
    """A point of the curvature-``c`` ball."""

    coords: np.ndarray = field(repr=False)
    c: float = 1.0

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 1 or coords.size == 0:
            raise ValueError("coords must be a non-empty 1-d vector")
        if not self.c > 0:
            raise ValueError(f"curvature c must be positive, got {self.c}")
        if self.c * float(coords @ coords) >= 1.0:
            raise ValueError("point lies outside the open ball")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _coords(x, y, c):
    """Unwrap a pair of points, checking dimension and curvature agreement."""
    cx = x.c if isinstance(x, PoincarePoint) else None
    cy = y.c if isinstance(y, PoincarePoint) else None
    if cx is not None and cy is not None and cx != cy:
        raise ValueError(f"curvature mismatch: {cx} vs {cy}")
    known = cx if cx is not None else cy
    if known is not None:
        if c is not None and c != known:
            raise ValueError(f"curvature mismatch: {known} vs {c}")
        c = known
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    return x, y, (1.0 if c is None else float(c))


def _sqnorm(x):
    return np.sum(x * x, axis=-1)


def project(v, r_max: float = DEFAULT_R_MAX, c: float = 1.0) -> np.ndarray:
    """Rescale ``v`` so its norm is at most ``r_max / sqrt(c)``.

    Vectors already inside that radius come back unchanged.
    """
    v = np.asarray(v, dtype=float)
    radius = r_max / np.sqrt(c)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.maximum(1.0, norm / radius)


def conformal_factor(x, c: float = 1.0):
    """lambda_x = 2 / (1 - c |x|^2)."""
    if isinstance(x, PoincarePoint):
        c = x.c
    x = np.asarray(x, dtype=float)
    return 2.0 / (1.0 - c * _sqnorm(x))


def mobius_add(x, y, c: float | None = None, r_max: float = DEFAULT_R_MAX) -> np.ndarray:
    """Möbius addition x (+)_c y.

    Results pushed onto or past the boundary by rounding are pulled back to
    ``r_max``.
    """
    x, y, c = _coords(x, y, c)
    xy = np.sum(x * y, axis=-1, keepdims=True)
    x2 = np.sum(x * x, axis=-1, keepdims=True)
    y2 = np.sum(y * y, axis=-1, keepdims=True)
    num = (1.0 + 2.0 * c * xy + c * y2) * x + (1.0 - c * x2) * y
    den = 1.0 + 2.0 * c * xy + c * c * x2 * y2
    out = num / den
    bad = c * np.sum(out * out, axis=-1, keepdims=True) >= 1.0
    if np.any(bad):
        out = np.where(bad, project(out, r_max, c), out)
    return out


def _acosh1p(z):
    # arccosh(1 + z) without cancellation for small z
    return np.log1p(z + np.sqrt(z * (z + 2.0)))


def distance_arccosh(x, y, c: float | None = None):
    x, y, c = _coords(x, y, c)
    diff2 = _sqnorm(x - y)
    den = (1.0 - c * _sqnorm(x)) * (1.0 - c * _sqnorm(y))
    return _acosh1p(2.0 * c * diff2 / den) / np.sqrt(c)


def distance_arctanh(x, y, c: float | None = None):
    x, y, c = _coords(x, y, c)
    sc = np.sqrt(c)
    # no re-projection here: clipping would bias the distance
    xy = np.sum(-x * y, axis=-1, keepdims=True)
    x2 = np.sum(x * x, axis=-1, keepdims=True)
    y2 = np.sum(y * y, axis=-1, keepdims=True)
    num = (1.0 + 2.0 * c * xy + c * y2) * (-x) + (1.0 - c * x2) * y
    den = 1.0 + 2.0 * c * xy + c * c * x2 * y2
    n = np.linalg.norm(num / den, axis=-1)
    return 2.0 / sc * np.arctanh(np.minimum(sc * n, 1.0 - 1e-16))


def poincare_distance(x, y, cfg: GeometryConfig | None = None):
    """Geodesic distance; ``cfg.distance_form`` picks the formula."""
    cfg = cfg or GeometryConfig()
    if cfg.distance_form is DistanceForm.ARCTANH_MOBIUS:
        return distance_arctanh(x, y, cfg.c)
    return distance_arccosh(x, y, cfg.c)


def pairwise_distances(points, cfg: GeometryConfig | None = None) -> np.ndarray:
    """Distances d(e_i, e_j) for all i < j, in row-major pair order."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array of shape (n, dim)")
    i, j = np.triu_indices(points.shape[0], k=1)
    return np.asarray(poincare_distance(points[i], points[j], cfg), dtype=float)
