"""Mask decoding, preprocessing, connected-component labeling, contour tracing.

Pixels are addressed as (x, y) with y growing downward; arrays are stored
(height, width).  Contours are closed loops of pixel-center coordinates.
Orientation convention: a loop is "positive" when its shoelace sum over raw
(x, y) coordinates is positive.  Outer contours are emitted positive, hole
contours negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.ndimage as ndi
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, NoRegionError, UnsupportedFormatError

SUPPORTED_EXTENSIONS = {".png", ".jpg", ".jpeg", ".tif", ".tiff"}

DEFAULT_THRESHOLD = 127
DEFAULT_SIGMA = 1.0
DEFAULT_CLOSE_RADIUS = 1
MIN_CONTOUR_POINTS = 4

_EIGHT = np.ones((3, 3), dtype=int)
_FOUR = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


@dataclass
class BinaryMask:
    """A decoded, thresholded 2-D binary raster."""

    width: int
    height: int
    pixels: np.ndarray  # bool, shape (height, width), True = foreground
    source_name: str = ""

    def __post_init__(self) -> None:
        self.pixels = np.asarray(self.pixels, dtype=bool)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}"
            )

    @property
    def foreground_count(self) -> int:
        return int(self.pixels.sum())


@dataclass
class LabeledMask:
    """Connected-component labels: 0 = background, regions are 1..num_regions."""

    width: int
    height: int
    labels: np.ndarray  # int32, shape (height, width)
    num_regions: int


@dataclass
class Contour:
    """Closed boundary loop of one region (or one of its holes)."""

    points: np.ndarray  # (n, 2) int64 pixel centers, (x, y)
    region_label: int
    is_hole: bool = False

    def __len__(self) -> int:
        return len(self.points)


def iter_mask_files(folder: Path | str) -> list[Path]:
    """Supported image files in a folder, in lexicographic filename order."""
    folder = Path(folder)
    files = [
        p
        for p in folder.iterdir()
        if p.is_file() and p.suffix.lower() in SUPPORTED_EXTENSIONS
    ]
    return sorted(files, key=lambda p: p.name)


def decode_mask(path: Path | str, threshold: int = DEFAULT_THRESHOLD) -> BinaryMask:
    """Decode an image file and binarize it: foreground iff luma > threshold.

    Multi-channel images are reduced with integer luma
    Y = (299 R + 587 G + 114 B) / 1000 before thresholding.
    """
    path = Path(path)
    ext = path.suffix.lower()
    if ext not in SUPPORTED_EXTENSIONS:
        raise UnsupportedFormatError(f"unsupported image format {ext!r}: {path.name}")
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ("L", "I", "I;16", "F"):
                luma = np.asarray(img.convert("L"), dtype=np.int64)
            else:
                rgb = np.asarray(img.convert("RGB"), dtype=np.int64)
                luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]) // 1000
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path.name}: {exc}") from exc
    pixels = luma > threshold
    h, w = pixels.shape
    return BinaryMask(width=w, height=h, pixels=pixels, source_name=path.name)


def gaussian_blur_then_rebinarize(mask: BinaryMask, sigma: float = DEFAULT_SIGMA) -> BinaryMask:
    """Gaussian blur (radius ceil(3*sigma), reflected borders), re-threshold at 0.5."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = int(math.ceil(3.0 * sigma))
    blurred = ndi.gaussian_filter(
        mask.pixels.astype(np.float64), sigma=sigma, mode="reflect", radius=radius
    )
    return BinaryMask(mask.width, mask.height, blurred > 0.5, mask.source_name)


def morphological_close(mask: BinaryMask, kernel_radius: int = DEFAULT_CLOSE_RADIUS) -> BinaryMask:
    """Dilate then erode with a square structuring element; outside is background."""
    if kernel_radius < 1:
        raise ValueError(f"kernel_radius must be >= 1, got {kernel_radius}")
    size = 2 * kernel_radius + 1
    se = np.ones((size, size), dtype=bool)
    dilated = ndi.binary_dilation(mask.pixels, structure=se, border_value=0)
    closed = ndi.binary_erosion(dilated, structure=se, border_value=0)
    return BinaryMask(mask.width, mask.height, closed, mask.source_name)


def label_components(mask: BinaryMask) -> LabeledMask:
    """8-connected components, labeled in raster-scan order of first encounter."""
    raw, count = ndi.label(mask.pixels, structure=_EIGHT)
    if count == 0:
        return LabeledMask(mask.width, mask.height, raw.astype(np.int32), 0)
    flat = raw.ravel()
    values, first_index = np.unique(flat, return_index=True)
    keep = values != 0
    values, first_index = values[keep], first_index[keep]
    order = np.argsort(first_index, kind="stable")
    remap = np.zeros(count + 1, dtype=np.int32)
    remap[values[order]] = np.arange(1, len(values) + 1, dtype=np.int32)
    return LabeledMask(mask.width, mask.height, remap[raw], int(count))


def largest_region(labeled: LabeledMask) -> int:
    """Label of the region with the most pixels; ties go to the smaller label."""
    if labeled.num_regions < 1:
        raise NoRegionError("mask has no foreground regions")
    counts = np.bincount(labeled.labels.ravel(), minlength=labeled.num_regions + 1)
    return int(np.argmax(counts[1:]) + 1)


# --- Moore-neighbor boundary tracing ---------------------------------------

# Neighbor offsets (dx, dy) clockwise on screen (y down), starting West.
_MOORE = ((-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1))
_MOORE_INDEX = {off: k for k, off in enumerate(_MOORE)}


def _moore_trace(region: np.ndarray) -> list[tuple[int, int]]:
    """Trace the outer boundary of a 2-D bool array with Moore-neighbor
    following and Jacob's stopping criterion; returns (x, y) points in the
    array's own coordinates."""
    h, w = region.shape
    grid = np.zeros((h + 2, w + 2), dtype=bool)
    grid[1:-1, 1:-1] = region
    flat_index = int(np.argmax(grid.ravel()))
    if not grid.ravel()[flat_index]:
        return []
    sy, sx = divmod(flat_index, w + 2)
    start = (sx, sy)
    # Backtrack starts one step west of the start pixel, which is background
    # because the start is the first foreground pixel in raster order.
    state0 = (start, (sx - 1, sy))
    p, b = state0
    points: list[tuple[int, int]] = []
    while True:
        points.append(p)
        k0 = _MOORE_INDEX[(b[0] - p[0], b[1] - p[1])]
        step = None
        for k in range(1, 9):
            j = (k0 + k) % 8
            dx, dy = _MOORE[j]
            cand = (p[0] + dx, p[1] + dy)
            if grid[cand[1], cand[0]]:
                pdx, pdy = _MOORE[(j - 1) % 8]
                step = (cand, (p[0] + pdx, p[1] + pdy))
                break
        if step is None:  # isolated single pixel
            break
        p, b = step
        # Jacob's criterion: stop when the start pixel is re-entered from the
        # same backtrack position as the initial state.
        if (p, b) == state0:
            break
    return [(x - 1, y - 1) for x, y in points]


def _signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _oriented(points: np.ndarray, positive: bool) -> np.ndarray:
    area = _signed_area(points.astype(np.float64))
    if area != 0.0 and (area > 0.0) != positive:
        points = np.vstack([points[:1], points[1:][::-1]])
    return points


def _first_encounter_order(labels: np.ndarray) -> list[int]:
    flat = labels.ravel()
    values, first_index = np.unique(flat, return_index=True)
    keep = values != 0
    values, first_index = values[keep], first_index[keep]
    return [int(v) for v in values[np.argsort(first_index, kind="stable")]]


def trace_contours(labeled: LabeledMask) -> list[Contour]:
    """One outer contour per region plus its hole contours.

    Outer contours are positive, holes negative; contours with fewer than
    MIN_CONTOUR_POINTS points are dropped.  Output order: region label
    ascending, outer first, then holes by raster position.
    """
    contours: list[Contour] = []
    if labeled.num_regions == 0:
        return contours
    boxes = ndi.find_objects(labeled.labels)
    for label in range(1, labeled.num_regions + 1):
        box = boxes[label - 1]
        if box is None:
            continue
        ys, xs = box
        region = labeled.labels[box] == label
        outer = _moore_trace(region)
        if len(outer) < MIN_CONTOUR_POINTS:
            continue
        pts = np.asarray(outer, dtype=np.int64) + np.array([xs.start, ys.start])
        contours.append(Contour(_oriented(pts, positive=True), label, is_hole=False))

        # Holes: 4-connected background components of the padded crop that do
        # not reach the pad frame.
        padded = np.zeros((region.shape[0] + 2, region.shape[1] + 2), dtype=bool)
        padded[1:-1, 1:-1] = region
        bg_labels, bg_count = ndi.label(~padded, structure=_FOUR)
        if bg_count <= 1:
            continue
        frame = np.concatenate(
            [bg_labels[0], bg_labels[-1], bg_labels[:, 0], bg_labels[:, -1]]
        )
        border = set(np.unique(frame)) - {0}
        for bg_value in _first_encounter_order(bg_labels):
            if bg_value in border:
                continue
            hole = _moore_trace(bg_labels == bg_value)
            if len(hole) < MIN_CONTOUR_POINTS:
                continue
            # padded crop adds (+1, +1) on top of the bounding-box offset
            pts = np.asarray(hole, dtype=np.int64) + np.array([xs.start - 1, ys.start - 1])
            contours.append(Contour(_oriented(pts, positive=False), label, is_hole=True))
    return contours
