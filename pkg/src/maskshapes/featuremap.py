"""Deterministic per-image feature-map panels rendered with Pillow.

Fixed layout: tiles the size of the source mask arranged in a grid of
PANEL_COLS columns, a caption strip under each tile, fixed palette, the
packaged bitmap font.  Identical inputs produce byte-identical PNGs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from . import geometry, signatures
from .polygons import PolyApprox
from .raster import BinaryMask

OVERLAY_KINDS = (
    "reference",
    "centroid_rays",
    "hull_polygon",
    "mbr_box",
    "mpp_polygon",
    "dp_polygon",
    "curvature_colored_boundary",
    "signature_plot",
)

DEFAULT_PANELS: tuple[tuple[str, str], ...] = (
    ("mask", "reference"),
    ("centroid distance", "centroid_rays"),
    ("centroid distance plot", "signature_plot"),
    ("curvature", "curvature_colored_boundary"),
    ("convex hull", "hull_polygon"),
    ("min bounding rect", "mbr_box"),
    ("douglas-peucker", "dp_polygon"),
    ("min perimeter polygon", "mpp_polygon"),
)

PANEL_COLS = 4
CAPTION_HEIGHT = 14
PANEL_SAMPLES = 128
RAY_STRIDE = 4

_BG = (0, 0, 0)
_FG_REFERENCE = (235, 235, 235)
_FG_DIM = (90, 90, 90)
_CAPTION = (220, 220, 220)
_COLORS = {
    "centroid_rays": (80, 180, 255),
    "hull_polygon": (255, 170, 0),
    "mbr_box": (255, 80, 80),
    "dp_polygon": (120, 255, 120),
    "mpp_polygon": (255, 110, 255),
    "signature_plot": (0, 220, 220),
}
_CURVATURE_BANDS = ((60, 200, 80), (240, 220, 60), (240, 70, 60))


@dataclass
class FeatureMapSpec:
    panels: tuple[tuple[str, str], ...] = DEFAULT_PANELS
    cell_size: int = 2  # grid cell used if an MPP overlay must be recomputed
    output_format: str = "PNG"

    def __post_init__(self) -> None:
        if not self.panels:
            raise ValueError("panel list must be non-empty")
        if self.panels[0][1] != "reference":
            raise ValueError("first panel must be the unannotated reference mask")
        for _, kind in self.panels:
            if kind not in OVERLAY_KINDS:
                raise ValueError(f"unknown overlay kind {kind!r}")


def panel_grid(spec: FeatureMapSpec) -> tuple[int, int]:
    """(columns, rows) of the tile grid for a spec."""
    cols = min(PANEL_COLS, len(spec.panels))
    rows = math.ceil(len(spec.panels) / cols)
    return cols, rows


def _base_tile(mask: BinaryMask, fg: tuple[int, int, int]) -> Image.Image:
    arr = np.zeros((mask.height, mask.width, 3), dtype=np.uint8)
    arr[mask.pixels] = fg
    return Image.fromarray(arr, mode="RGB")


def _draw_closed(draw: ImageDraw.ImageDraw, pts: np.ndarray, color, width: int = 1) -> None:
    seq = [tuple(p) for p in pts] + [tuple(pts[0])]
    draw.line(seq, fill=color, width=width)


def _draw_rays(draw, centroid, pts, color) -> None:
    cx, cy = centroid
    for k in range(0, len(pts), RAY_STRIDE):
        draw.line([(cx, cy), tuple(pts[k])], fill=color, width=1)
    _draw_closed(draw, pts, color)


def _draw_curvature(draw, pts, kappa) -> None:
    mag = np.abs(kappa)
    lo, hi = np.quantile(mag, 1 / 3), np.quantile(mag, 2 / 3)
    n = len(pts)
    for k in range(n):
        if mag[k] <= lo:
            color = _CURVATURE_BANDS[0]
        elif mag[k] <= hi:
            color = _CURVATURE_BANDS[1]
        else:
            color = _CURVATURE_BANDS[2]
        draw.line([tuple(pts[k]), tuple(pts[(k + 1) % n])], fill=color, width=2)


def _draw_signature_plot(draw, values, size, color) -> None:
    w, h = size
    margin = 4
    span_x = max(w - 2 * margin, 1)
    span_y = max(h - 2 * margin, 1)
    vmin, vmax = float(np.min(values)), float(np.max(values))
    scale = vmax - vmin
    n = len(values)
    xs = margin + np.arange(n) * (span_x / max(n - 1, 1))
    if scale <= 0:
        ys = np.full(n, margin + span_y / 2)
    else:
        ys = margin + (1.0 - (values - vmin) / scale) * span_y
    draw.line([(margin, h - margin), (w - margin, h - margin)], fill=(80, 80, 80))
    draw.line(list(zip(xs, ys)), fill=color, width=1)


def render_feature_map(
    mask: BinaryMask,
    contour,
    features,
    approximations: dict[str, PolyApprox | None] | None = None,
    spec: FeatureMapSpec | None = None,
) -> Image.Image:
    """Panel image for one mask: reference tile plus per-feature overlays on
    the supplied (largest-ROI) contour."""
    spec = spec or FeatureMapSpec()
    approximations = approximations or {}
    pts = geometry._points(contour)
    resampled = signatures.resample_equal_arclength(pts, PANEL_SAMPLES)
    font = ImageFont.load_default()
    cols, rows = panel_grid(spec)
    tile_w, tile_h = mask.width, mask.height
    canvas = Image.new("RGB", (cols * tile_w, rows * (tile_h + CAPTION_HEIGHT)), _BG)

    for index, (name, kind) in enumerate(spec.panels):
        caption = name
        if kind == "reference":
            tile = _base_tile(mask, _FG_REFERENCE)
        else:
            tile = _base_tile(mask, _FG_DIM)
            draw = ImageDraw.Draw(tile)
            if kind == "centroid_rays":
                _draw_rays(draw, features.centroid, resampled, _COLORS[kind])
            elif kind == "hull_polygon":
                _draw_closed(draw, geometry.convex_hull(pts), _COLORS[kind])
            elif kind == "mbr_box":
                mbr = geometry.min_bounding_rect(geometry.convex_hull(pts))
                _draw_closed(draw, mbr.corners(), _COLORS[kind])
            elif kind in ("dp_polygon", "mpp_polygon"):
                approx = approximations.get(kind.removesuffix("_polygon"))
                if approx is None:
                    caption = f"{name} (n/a)"
                else:
                    _draw_closed(draw, approx.vertices, _COLORS[kind])
            elif kind == "curvature_colored_boundary":
                kappa = signatures.curvature_function(pts, PANEL_SAMPLES).values
                _draw_curvature(draw, resampled, kappa)
            elif kind == "signature_plot":
                cdf = signatures.centroid_distance_function(pts, PANEL_SAMPLES).values
                tile = Image.new("RGB", (tile_w, tile_h), _BG)
                draw = ImageDraw.Draw(tile)
                _draw_signature_plot(draw, cdf, (tile_w, tile_h), _COLORS[kind])
        col, row = index % cols, index // cols
        x0, y0 = col * tile_w, row * (tile_h + CAPTION_HEIGHT)
        canvas.paste(tile, (x0, y0))
        ImageDraw.Draw(canvas).text(
            (x0 + 3, y0 + tile_h + 1), caption, fill=_CAPTION, font=font
        )
    return canvas


def save_feature_map(image: Image.Image, output_folder: Path | str, stem: str) -> Path:
    folder = Path(output_folder)
    folder.mkdir(parents=True, exist_ok=True)
    path = folder / f"{stem}_featuremap.png"
    image.save(path, format="PNG")
    return path
