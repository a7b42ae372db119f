"""Scalar geometric descriptors of closed contours.

All polygon operations treat the input as a closed loop of (x, y) vertices
(the closing segment is implicit).  Angles follow the raw-coordinate
convention described in raster.py: positive shoelace = positive orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateContourError, DegenerateHullError

CIRCULARITY_CAP = 1.05


def _points(contour) -> np.ndarray:
    pts = getattr(contour, "points", contour)
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape {pts.shape}")
    return pts


def signed_area(contour) -> float:
    pts = _points(contour)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_area(contour) -> float:
    return abs(signed_area(contour))


def polygon_perimeter(contour) -> float:
    pts = _points(contour)
    diffs = np.diff(np.vstack([pts, pts[:1]]), axis=0)
    return float(np.hypot(diffs[:, 0], diffs[:, 1]).sum())


def centroid(contour) -> tuple[float, float]:
    """Area-weighted polygon centroid."""
    pts = _points(contour)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area6 = 3.0 * float(cross.sum())  # 6 * signed area
    if area6 == 0.0:
        raise DegenerateContourError("zero-area contour has no centroid")
    cx = float(np.sum((x + xn) * cross)) / area6
    cy = float(np.sum((y + yn) * cross)) / area6
    return cx, cy


def circularity(area: float, perimeter: float) -> float:
    """4*pi*A/P^2, clipped to [0, 1.05] to absorb digitization overshoot."""
    if perimeter <= 0:
        raise ValueError(f"perimeter must be positive, got {perimeter}")
    return float(min(max(4.0 * math.pi * area / perimeter**2, 0.0), CIRCULARITY_CAP))


def eccentricity_principal_axes(coords) -> float:
    """Eccentricity sqrt(1 - l2/l1) of the second-moment ellipse.

    coords: (n, 2) array of (x, y) samples — region pixels preferably,
    contour vertices acceptably.
    """
    pts = _points(coords)
    if len(pts) < 2:
        raise DegenerateContourError("need at least 2 points for moments")
    centered = pts - pts.mean(axis=0)
    mu20 = float(np.mean(centered[:, 0] ** 2))
    mu02 = float(np.mean(centered[:, 1] ** 2))
    mu11 = float(np.mean(centered[:, 0] * centered[:, 1]))
    lam2, lam1 = np.linalg.eigvalsh(np.array([[mu20, mu11], [mu11, mu02]]))
    if lam1 <= 0:
        raise DegenerateContourError("degenerate point distribution (single point)")
    return float(math.sqrt(1.0 - max(lam2, 0.0) / lam1))


def convex_hull(contour) -> np.ndarray:
    """Monotone-chain convex hull, positive orientation, no collinear vertices."""
    pts = _points(contour)
    unique = sorted(set(map(tuple, pts.tolist())))
    if len(unique) < 3:
        raise DegenerateHullError("fewer than 3 distinct points")

    def build(seq):
        chain: list[tuple[float, float]] = []
        for p in seq:
            while len(chain) >= 2:
                ax, ay = chain[-2]
                bx, by = chain[-1]
                if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(unique)
    upper = build(reversed(unique))
    hull = np.asarray(lower[:-1] + upper[:-1], dtype=np.float64)
    if len(hull) < 3:
        raise DegenerateHullError("all points collinear")
    return hull


def solidity(contour, hull) -> float:
    hull_area = polygon_area(hull)
    if hull_area <= 0:
        raise DegenerateHullError("zero hull area")
    return polygon_area(contour) / hull_area


def convexity(contour, hull) -> float:
    perim = polygon_perimeter(contour)
    if perim <= 0:
        raise DegenerateContourError("zero-perimeter contour")
    return polygon_perimeter(hull) / perim


@dataclass
class MbrResult:
    """Minimum-area bounding rectangle, normalized so width >= height and
    angle_deg in [0, 180) is the direction of the longer side."""

    width: float
    height: float
    angle_deg: float
    center: tuple[float, float]

    @property
    def area(self) -> float:
        return self.width * self.height

    def corners(self) -> np.ndarray:
        t = math.radians(self.angle_deg)
        u = np.array([math.cos(t), math.sin(t)])
        v = np.array([-u[1], u[0]])
        c = np.asarray(self.center)
        hw, hh = 0.5 * self.width, 0.5 * self.height
        return np.array([c + hw * u + hh * v, c - hw * u + hh * v,
                         c - hw * u - hh * v, c + hw * u - hh * v])


def min_bounding_rect(hull) -> MbrResult:
    """Rotating calipers over hull edges; ties (equal area) take the smaller angle."""
    pts = _points(hull)
    if len(pts) < 3:
        raise DegenerateHullError("hull with fewer than 3 vertices")
    best: MbrResult | None = None
    best_area = math.inf
    for i in range(len(pts)):
        edge = pts[(i + 1) % len(pts)] - pts[i]
        length = float(np.hypot(edge[0], edge[1]))
        if length == 0:
            continue
        u = edge / length
        v = np.array([-u[1], u[0]])
        pu, pv = pts @ u, pts @ v
        du = float(pu.max() - pu.min())
        dv = float(pv.max() - pv.min())
        area = du * dv
        if du >= dv:
            w, h = du, dv
            angle = math.degrees(math.atan2(u[1], u[0])) % 180.0
        else:
            w, h = dv, du
            angle = math.degrees(math.atan2(v[1], v[0])) % 180.0
        center = 0.5 * (pu.max() + pu.min()) * u + 0.5 * (pv.max() + pv.min()) * v
        tie = abs(area - best_area) <= 1e-9 * max(best_area, 1.0)
        if best is None or (area < best_area and not tie) or (tie and angle < best.angle_deg):
            best = MbrResult(w, h, angle, (float(center[0]), float(center[1])))
            best_area = area
    assert best is not None
    return best


def rectangularity(area: float, mbr: MbrResult) -> float:
    if mbr.width <= 0 or mbr.height <= 0:
        raise ValueError("MBR has empty extent")
    return float(min(area / (mbr.width * mbr.height), 1.0))


def elongation(mbr: MbrResult) -> float:
    if mbr.width <= 0:
        raise ValueError("MBR has empty extent")
    return float(1.0 - mbr.height / mbr.width)


def average_bending_energy(contour, n: int = 128) -> float:
    """Mean squared curvature over the resampled boundary; units 1/px^2."""
    from .signatures import curvature_function  # local import: avoids module cycle

    kappa = curvature_function(contour, n).values
    return float(np.mean(kappa**2))


def euler_and_holes(outer, holes) -> tuple[int, float]:
    """(Euler number, hole-area ratio) for one region's contour set."""
    outer_area = polygon_area(outer)
    if outer_area <= 0:
        raise DegenerateContourError("zero-area outer contour")
    hole_area = sum(polygon_area(h) for h in holes)
    return 1 - len(holes), float(hole_area / outer_area)


@dataclass
class GeomFeatures:
    area: float
    perimeter: float
    centroid: tuple[float, float]
    circularity: float
    eccentricity: float
    solidity: float
    convexity: float
    rectangularity: float
    elongation: float
    mbr_width: float
    mbr_height: float
    mbr_angle: float
    abe: float
    euler_number: int
    hole_area_ratio: float


def compute_geom_features(outer, holes=(), region_coords=None, n_samples: int = 128) -> GeomFeatures:
    """Assemble the full geometric descriptor set for one region.

    `perimeter` is the raw traced path length; `circularity` uses the
    arc-length-resampled boundary length instead, which undoes the staircase
    overshoot of 8-connected digital boundaries (a raw digital circle would
    otherwise never reach circularity ~1).
    """
    from .signatures import curvature_function, resample_equal_arclength

    pts = _points(outer)
    area = polygon_area(pts)
    perimeter = polygon_perimeter(pts)
    cen = centroid(pts)
    smooth_perimeter = polygon_perimeter(resample_equal_arclength(pts, n_samples))
    circ = circularity(area, smooth_perimeter)
    ecc = eccentricity_principal_axes(region_coords if region_coords is not None else pts)
    hull = convex_hull(pts)
    mbr = min_bounding_rect(hull)
    kappa = curvature_function(pts, n_samples).values
    euler, hole_ratio = euler_and_holes(pts, [getattr(h, "points", h) for h in holes])
    return GeomFeatures(
        area=area,
        perimeter=perimeter,
        centroid=cen,
        circularity=circ,
        eccentricity=ecc,
        solidity=solidity(pts, hull),
        convexity=convexity(pts, hull),
        rectangularity=rectangularity(area, mbr),
        elongation=elongation(mbr),
        mbr_width=mbr.width,
        mbr_height=mbr.height,
        mbr_angle=mbr.angle_deg,
        abe=float(np.mean(kappa**2)),
        euler_number=euler,
        hole_area_ratio=hole_ratio,
    )
