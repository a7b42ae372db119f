"""Generate a folder of synthetic binary masks for demos and smoke tests.

Writes a handful of analytic shapes (disc, square, rotated rectangle,
ellipse, L-shape, staircase), a few random blobs, and one three-region
image suitable for the multi-class labeling workflow.
"""

import argparse
from pathlib import Path

import numpy as np
from PIL import Image


def disc(radius=64, size=200, center=80):
    yy, xx = np.mgrid[0:size, 0:size]
    return (xx - center) ** 2 + (yy - center) ** 2 <= radius * radius


def square():
    arr = np.zeros((120, 120), dtype=bool)
    arr[5:105, 5:105] = True
    return arr


def rotated_rect(angle_deg=30.0):
    yy, xx = np.mgrid[0:180, 0:180]
    th = np.deg2rad(angle_deg)
    u = (xx - 90) * np.cos(th) + (yy - 90) * np.sin(th)
    v = -(xx - 90) * np.sin(th) + (yy - 90) * np.cos(th)
    return (np.abs(u) <= 50) & (np.abs(v) <= 25)


def ellipse(a=80, b=40):
    yy, xx = np.mgrid[0:160, 0:160]
    return ((xx - 80) / a) ** 2 + ((yy - 80) / b) ** 2 <= 1.0


def l_shape():
    arr = np.zeros((130, 130), dtype=bool)
    arr[10:110, 10:110] = True
    arr[10:60, 35:85] = False
    return arr


def staircase(n_steps=30, step=8, thickness=24):
    side = n_steps * step + thickness + 20
    arr = np.zeros((side, side), dtype=bool)
    for i in range(n_steps):
        x0 = 10 + i * step
        arr[x0 : x0 + step + thickness, x0 : x0 + step + thickness] = True
    return arr


def blob(rng, size=160):
    arr = np.zeros((size, size), dtype=bool)
    yy, xx = np.mgrid[0:size, 0:size]
    cx, cy = rng.integers(55, size - 55, size=2)
    arr |= (xx - cx) ** 2 + (yy - cy) ** 2 <= rng.integers(18, 28) ** 2
    for _ in range(int(rng.integers(3, 7))):
        dx, dy = rng.integers(-14, 15, size=2)
        r = int(rng.integers(8, 20))
        arr |= (xx - cx - dx) ** 2 + (yy - cy - dy) ** 2 <= r * r
    return arr


def three_regions():
    arr = np.zeros((120, 120), dtype=bool)
    arr[10:40, 10:40] = True
    arr[10:40, 60:100] = True
    arr[70:110, 20:80] = True
    return arr


def save(arr, path):
    Image.fromarray(np.asarray(arr, dtype=bool).astype(np.uint8) * 255).save(path)


def write_demo_masks(folder: Path, seed: int = 7, n_blobs: int = 3) -> list[Path]:
    folder.mkdir(parents=True, exist_ok=True)
    shapes = {
        "disc.png": disc(),
        "square.png": square(),
        "rotated_rect.png": rotated_rect(),
        "ellipse.png": ellipse(),
        "l_shape.png": l_shape(),
        "staircase.png": staircase(),
    }
    rng = np.random.default_rng(seed)
    for i in range(n_blobs):
        shapes[f"blob{i}.png"] = blob(rng)
    written = []
    for name, arr in sorted(shapes.items()):
        path = folder / name
        save(arr, path)
        written.append(path)
    return written


def write_multiclass_mask(folder: Path) -> Path:
    folder.mkdir(parents=True, exist_ok=True)
    path = folder / "cells.png"
    save(three_regions(), path)
    return path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("demo_data"))
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--blobs", type=int, default=3)
    args = parser.parse_args(argv)

    written = write_demo_masks(args.out / "masks", seed=args.seed, n_blobs=args.blobs)
    multi = write_multiclass_mask(args.out / "multiclass")
    for path in written + [multi]:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
