"""Polygonal approximation: Douglas-Peucker and the grid-band minimum-perimeter polygon."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DegenerateBandError

DEFAULT_DP_EPSILON = 2.0
DEFAULT_MPP_CELL = 2


@dataclass
class PolyApprox:
    vertices: np.ndarray  # (m, 2) float, closed polygon (closing edge implicit)
    method: str  # "douglas_peucker" | "mpp"
    param: float

    def __len__(self) -> int:
        return len(self.vertices)


def _points(contour) -> np.ndarray:
    return geometry._points(contour)


# --- Douglas-Peucker ---------------------------------------------------------


def _segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from each point to the segment a-b (not the infinite line)."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(*(pts - a).T)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(pts - proj).T)


def _farthest_pair(pts: np.ndarray) -> tuple[int, int]:
    """Indices of the farthest-apart pair; ties take the lexicographically
    first (i, j).  Chunked so memory stays O(n) for long contours."""
    n = len(pts)
    best = (-1.0, 0, 0)
    chunk = 512
    for i0 in range(0, n, chunk):
        block = pts[i0 : i0 + chunk]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        flat = int(np.argmax(d2))
        bi, bj = divmod(flat, n)
        val = float(d2[bi, bj])
        if val > best[0] + 1e-12:
            best = (val, i0 + bi, bj)
    i, j = best[1], best[2]
    return (i, j) if i <= j else (j, i)


def _simplify_chain(pts: np.ndarray, index: np.ndarray, epsilon: float) -> set[int]:
    """Iterative DP on one open chain; returns the kept original indices."""
    kept = {int(index[0]), int(index[-1])}
    stack = [(0, len(index) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        interior = pts[index[lo + 1 : hi]]
        d = _segment_distances(interior, pts[index[lo]], pts[index[hi]])
        k = int(np.argmax(d))  # first max wins ties -> lowest index
        if d[k] > epsilon:
            split = lo + 1 + k
            kept.add(int(index[split]))
            stack.append((lo, split))
            stack.append((split, hi))
    return kept


def douglas_peucker(contour, epsilon: float = DEFAULT_DP_EPSILON) -> PolyApprox:
    """Closed-contour Douglas-Peucker simplification.

    The loop is split at its two farthest-apart points and each half is
    simplified as an open chain; a point is kept when its distance to the
    covering segment exceeds epsilon.  epsilon = 0 keeps every point.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    pts = _points(contour)
    n = len(pts)
    if epsilon == 0.0 or n <= 3:
        return PolyApprox(pts.copy(), "douglas_peucker", 0.0 if epsilon == 0 else epsilon)
    i, j = _farthest_pair(pts)
    first = np.arange(i, j + 1)
    second = np.concatenate([np.arange(j, n), np.arange(0, i + 1)])
    kept = _simplify_chain(pts, first, epsilon) | _simplify_chain(pts, second, epsilon)
    if len(kept) < 3:
        # keep the polygon two-dimensional: add the point farthest from the chord
        others = np.array([k for k in range(n) if k not in kept])
        d = _segment_distances(pts[others], pts[i], pts[j])
        kept.add(int(others[int(np.argmax(d))]))
    order = sorted(kept)
    return PolyApprox(pts[order], "douglas_peucker", float(epsilon))


# --- Minimum-perimeter polygon on the cellular band --------------------------


def _sgn(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _trace_cell_wall(inner: np.ndarray) -> list[tuple[int, int]]:
    """Closed lattice-corner loop around the cell region `inner` (bool, HxW),
    positive shoelace, interior on the algebraic left.  Corners where two
    cells meet diagonally carry two wall edges; the walk takes the sharpest
    left turn there so the loop stays on one wall."""
    h, w = inner.shape
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def add(a, b):
        edges.setdefault(a, []).append(b)

    for i in range(h):
        for j in range(w):
            if not inner[i, j]:
                continue
            if i == 0 or not inner[i - 1, j]:
                add((j, i), (j + 1, i))  # top wall, east
            if i == h - 1 or not inner[i + 1, j]:
                add((j + 1, i + 1), (j, i + 1))  # bottom wall, west
            if j == 0 or not inner[i, j - 1]:
                add((j, i + 1), (j, i))  # left wall, north
            if j == w - 1 or not inner[i, j + 1]:
                add((j + 1, i), (j + 1, i + 1))  # right wall, south
    start = min(edges)
    loop = [start]
    prev = start
    cur = edges[start].pop()
    while cur != start:
        loop.append(cur)
        options = edges[cur]
        if len(options) == 1:
            nxt = options.pop()
        else:
            d_in = (cur[0] - prev[0], cur[1] - prev[1])
            nxt = max(
                options,
                key=lambda q: d_in[0] * (q[1] - cur[1]) - d_in[1] * (q[0] - cur[0]),
            )
            options.remove(nxt)
        prev, cur = cur, nxt
    return loop


def min_perimeter_polygon(contour, cell_size: int = DEFAULT_MPP_CELL) -> PolyApprox:
    """Minimum-perimeter polygon constrained to the grid band of the contour.

    The contour is quantized to grid cells of `cell_size`; the polygon is the
    shortest closed path squeezed between the band's inner and outer walls
    (convex inner-wall corners attract it, mirrored concave corners block it).
    """
    if cell_size < 1:
        raise ValueError(f"cell_size must be >= 1, got {cell_size}")
    g = int(cell_size)
    pts = np.floor(_points(contour)).astype(np.int64)
    cells = set(zip((pts[:, 0] // g).tolist(), (pts[:, 1] // g).tolist()))
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    x0, y0 = min(xs) - 1, min(ys) - 1
    w = max(xs) - x0 + 2
    h = max(ys) - y0 + 2
    band = np.zeros((h, w), dtype=bool)
    for cx, cy in cells:
        band[cy - y0, cx - x0] = True

    # flood the outside (4-connected) from the frame
    outside = np.zeros_like(band)
    queue: deque[tuple[int, int]] = deque()
    for i in range(h):
        for j in (0, w - 1):
            if not band[i, j] and not outside[i, j]:
                outside[i, j] = True
                queue.append((i, j))
    for j in range(w):
        for i in (0, h - 1):
            if not band[i, j] and not outside[i, j]:
                outside[i, j] = True
                queue.append((i, j))
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            if 0 <= ni < h and 0 <= nj < w and not band[ni, nj] and not outside[ni, nj]:
                outside[ni, nj] = True
                queue.append((ni, nj))
    inner = ~band & ~outside
    if not inner.any():
        raise DegenerateBandError(
            f"contour thinner than one grid cell at cell_size={cell_size}"
        )

    # largest 4-connected inner component (first in raster order wins ties)
    comp = np.zeros((h, w), dtype=np.int32)
    n_comp = 0
    best_size, best_id = 0, 0
    for i in range(h):
        for j in range(w):
            if inner[i, j] and comp[i, j] == 0:
                n_comp += 1
                size = 0
                queue.append((i, j))
                comp[i, j] = n_comp
                while queue:
                    a, b = queue.popleft()
                    size += 1
                    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        ni, nj = a + di, b + dj
                        if 0 <= ni < h and 0 <= nj < w and inner[ni, nj] and comp[ni, nj] == 0:
                            comp[ni, nj] = n_comp
                            queue.append((ni, nj))
                if size > best_size:
                    best_size, best_id = size, n_comp
    wall = _trace_cell_wall(comp == best_id)

    # classify wall corners: convex -> candidate vertex at the corner,
    # concave -> barrier vertex mirrored one cell diagonally outward
    length = len(wall)
    tagged: list[tuple[tuple[int, int], str]] = []
    for k in range(length):
        a, b, c = wall[(k - 1) % length], wall[k], wall[(k + 1) % length]
        turn = _sgn(a, b, c)
        if turn > 0:
            tagged.append((b, "W"))
        elif turn < 0:
            d1 = (b[0] - a[0], b[1] - a[1])
            d2 = (c[0] - b[0], c[1] - b[1])
            tagged.append(((b[0] + d2[0] - d1[0], b[1] + d2[1] - d1[1]), "B"))
    start_at = min(
        (k for k, (_, tag) in enumerate(tagged) if tag == "W"),
        key=lambda k: (tagged[k][0][1], tagged[k][0][0]),
    )
    tagged = tagged[start_at:] + tagged[:start_at]
    tagged.append(tagged[0])  # sentinel closes the sweep

    # crawler sweep: emit a vertex whenever the sight line leaves the band
    v0 = tagged[0][0]
    result = [v0]
    last = v0
    white, black = v0, v0
    wi = bi = 0
    k = 1
    while k < len(tagged):
        v, tag = tagged[k]
        if _sgn(last, white, v) > 0:  # crossed outside the white crawler
            last = white
            result.append(last)
            k = wi + 1
            white = black = last
            wi = bi = k - 1
        elif _sgn(last, black, v) < 0:  # crossed inside the black crawler
            last = black
            result.append(last)
            k = bi + 1
            white = black = last
            wi = bi = k - 1
        else:
            if tag == "W":
                white, wi = v, k
            else:
                black, bi = v, k
            k += 1
    if len(result) > 1 and result[-1] == result[0]:
        result.pop()
    vertices = np.array(
        [(g * (x + x0), g * (y + y0)) for x, y in result], dtype=np.float64
    )
    return PolyApprox(vertices, "mpp", float(g))


def polygon_metrics(approx: PolyApprox, contour) -> dict[str, float]:
    """Scalar summary of an approximation against its source contour."""
    pts = _points(contour)
    n_vertices = len(approx.vertices)
    return {
        "n_vertices": n_vertices,
        "perimeter_ratio": geometry.polygon_perimeter(approx.vertices)
        / geometry.polygon_perimeter(pts),
        "area_ratio": geometry.polygon_area(approx.vertices) / geometry.polygon_area(pts),
        "compression": n_vertices / len(pts),
    }
