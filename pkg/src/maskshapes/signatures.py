"""One-dimensional boundary signatures sampled at equal arc length.

Every signature starts from the same resampling of the closed contour:
n points at arc-length positions k*P/n from the first contour point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DegenerateContourError

SIGNATURE_KINDS = (
    "centroid_distance",
    "tangent_angle",
    "curvature",
    "area_function",
    "chord_length",
    "triangle_area",
)

DEFAULT_N_SAMPLES = 128
SUMMARY_STATS = ("mean", "std", "min", "max")


@dataclass
class ShapeSignature:
    kind: str
    values: np.ndarray
    n_samples: int


def _points(contour) -> np.ndarray:
    return geometry._points(contour)


def resample_equal_arclength(contour, n: int) -> np.ndarray:
    """n points at equal arc-length spacing along the closed polygonal boundary."""
    if n < 8:
        raise ValueError(f"need n >= 8 resample points, got {n}")
    pts = _points(contour)
    closed = np.vstack([pts, pts[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    cumulative = np.concatenate([[0.0], np.cumsum(seg)])
    total = cumulative[-1]
    if total <= 0.0:
        raise DegenerateContourError("zero-perimeter contour cannot be resampled")
    t = np.arange(n) * (total / n)
    x = np.interp(t, cumulative, closed[:, 0])
    y = np.interp(t, cumulative, closed[:, 1])
    return np.column_stack([x, y])


def centroid_distance_function(contour, n: int = DEFAULT_N_SAMPLES) -> ShapeSignature:
    """Distance from the area centroid to each resampled boundary point."""
    cx, cy = geometry.centroid(contour)
    pts = resample_equal_arclength(contour, n)
    values = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
    return ShapeSignature("centroid_distance", values, n)


def _windowed_tangent(pts: np.ndarray, n: int) -> np.ndarray:
    w = max(1, n // 32)
    x, y = pts[:, 0], pts[:, 1]
    angles = np.arctan2(np.roll(y, -w) - np.roll(y, w), np.roll(x, -w) - np.roll(x, w))
    return np.unwrap(angles)


def tangent_angle_function(contour, n: int = DEFAULT_N_SAMPLES) -> ShapeSignature:
    """Unwrapped boundary tangent angle with a symmetric window w = max(1, n/32)."""
    pts = resample_equal_arclength(contour, n)
    return ShapeSignature("tangent_angle", _windowed_tangent(pts, n), n)


def curvature_function(contour, n: int = DEFAULT_N_SAMPLES) -> ShapeSignature:
    """Tangent-angle increment per arc-length step, wrapped to (-pi, pi]; 1/px."""
    pts = _points(contour)
    resampled = resample_equal_arclength(pts, n)
    theta = _windowed_tangent(resampled, n)
    dtheta = np.diff(np.concatenate([theta, theta[:1]]))
    dtheta = (dtheta + np.pi) % (2.0 * np.pi) - np.pi
    step = geometry.polygon_perimeter(pts) / n
    return ShapeSignature("curvature", dtheta / step, n)


def area_function(contour, n: int = DEFAULT_N_SAMPLES) -> ShapeSignature:
    """Area of the triangle (centroid, p[k], p[k+1]); nonnegative."""
    cx, cy = geometry.centroid(contour)
    pts = resample_equal_arclength(contour, n)
    a = pts - (cx, cy)
    b = np.roll(pts, -1, axis=0) - (cx, cy)
    values = 0.5 * np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    return ShapeSignature("area_function", values, n)


def chord_length_function(contour, n: int = DEFAULT_N_SAMPLES) -> ShapeSignature:
    """Distance between arc-length-antipodal sample pairs; n must be even."""
    if n % 2 != 0:
        raise ValueError(f"chord length needs an even n, got {n}")
    pts = resample_equal_arclength(contour, n)
    opposite = np.roll(pts, -(n // 2), axis=0)
    values = np.hypot(*(opposite - pts).T)
    return ShapeSignature("chord_length", values, n)


def triangle_area_signature(contour, n: int = DEFAULT_N_SAMPLES, ts: int | None = None) -> ShapeSignature:
    """Signed area of (p[k-ts], p[k], p[k+ts]); positive on locally convex
    positively-oriented stretches."""
    if ts is None:
        ts = n // 8
    if not 1 <= ts < n / 2:
        raise ValueError(f"triangle offset must satisfy 1 <= ts < n/2, got ts={ts}")
    pts = resample_equal_arclength(contour, n)
    prev = np.roll(pts, ts, axis=0)
    nxt = np.roll(pts, -ts, axis=0)
    d1 = pts - prev
    d2 = nxt - pts
    values = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    return ShapeSignature("triangle_area", values, n)


def summarize_signature(sig: ShapeSignature) -> dict[str, float]:
    """Population statistics {mean, std, min, max} of one signature."""
    if sig.n_samples < 1 or len(sig.values) < 1:
        raise ValueError("cannot summarize an empty signature")
    values = np.asarray(sig.values, dtype=np.float64)
    return {
        "mean": float(values.mean()),
        "std": float(values.std()),
        "min": float(values.min()),
        "max": float(values.max()),
    }


def all_signatures(contour, n: int = DEFAULT_N_SAMPLES) -> dict[str, ShapeSignature]:
    """All six signatures keyed by kind."""
    return {
        "centroid_distance": centroid_distance_function(contour, n),
        "tangent_angle": tangent_angle_function(contour, n),
        "curvature": curvature_function(contour, n),
        "area_function": area_function(contour, n),
        "chord_length": chord_length_function(contour, n),
        "triangle_area": triangle_area_signature(contour, n),
    }
