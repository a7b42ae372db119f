"""Batch front-end: `extract`, `create-label`, and `nifti` subcommands.

Exit codes: 0 = success, 1 = at least one per-file failure, 2 = usage error.
Diagnostics go to stderr; the CSV/report outputs are the product.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from . import featuremap, geometry, labels, polygons, raster, signatures
from .errors import DegenerateBandError, MaskShapesError

IDENTITY_COLUMNS = ("image_name", "contour_number")

SIGNATURE_COLUMNS = tuple(
    f"{kind}_{stat}"
    for kind in signatures.SIGNATURE_KINDS
    for stat in signatures.SUMMARY_STATS
)

GEOMETRY_COLUMNS = (
    "area",
    "perimeter",
    "centroid_x",
    "centroid_y",
    "circularity",
    "eccentricity",
    "solidity",
    "convexity",
    "rectangularity",
    "elongation",
    "mbr_width",
    "mbr_height",
    "mbr_angle",
    "abe",
    "euler_number",
    "hole_area_ratio",
)

POLYGON_COLUMNS = tuple(
    f"{method}_{metric}"
    for method in ("dp", "mpp")
    for metric in ("n_vertices", "perimeter_ratio", "area_ratio", "compression")
)

FEATURE_COLUMNS = SIGNATURE_COLUMNS + GEOMETRY_COLUMNS + POLYGON_COLUMNS

_INT_COLUMNS = {"contour_number", "label", "euler_number", "dp_n_vertices", "mpp_n_vertices"}

_PALETTE = (
    (230, 25, 75), (60, 180, 75), (255, 225, 25), (0, 130, 200), (245, 130, 48),
    (145, 30, 180), (70, 240, 240), (240, 50, 230), (210, 245, 60), (250, 190, 212),
)


class MissingCsvError(MaskShapesError):
    """A mask has no stem-matched label table."""


@dataclass
class FeatureRecord:
    image_name: str
    contour_number: int
    features: dict[str, float]
    label: int | None = None


@dataclass
class RunConfig:
    input_folder: Path
    csv_file: Path
    output_folder: Path
    mode: str = "single"  # "single" | "multi"
    nifti_folder: Path | None = None
    sigma: float = raster.DEFAULT_SIGMA
    close_radius: int = raster.DEFAULT_CLOSE_RADIUS
    n_samples: int = signatures.DEFAULT_N_SAMPLES
    dp_epsilon: float = polygons.DEFAULT_DP_EPSILON
    mpp_cell_size: int = polygons.DEFAULT_MPP_CELL
    threshold: int = raster.DEFAULT_THRESHOLD

    def validate(self) -> str | None:
        """Returns a usage-error message, or None when the config is sound."""
        if self.mode not in ("single", "multi"):
            return f"unknown mode {self.mode!r}"
        if self.mode == "multi" and self.nifti_folder is None:
            return "multi-class mode requires --nifti_folder"
        if self.sigma <= 0:
            return "sigma must be positive"
        if self.close_radius < 1:
            return "close_radius must be >= 1"
        if self.n_samples < 8 or self.n_samples % 2:
            return "n_samples must be even and >= 8"
        if self.dp_epsilon < 0:
            return "dp_epsilon must be >= 0"
        if self.mpp_cell_size < 1:
            return "mpp_cell_size must be >= 1"
        if not 0 <= self.threshold <= 255:
            return "threshold must be in 0..255"
        return None


def _usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _format_value(column: str, value) -> str:
    if column in _INT_COLUMNS:
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.6g}"


def _contour_features(
    image_name: str,
    outer: raster.Contour,
    holes: list[raster.Contour],
    region_coords: np.ndarray,
    config: RunConfig,
) -> tuple[dict[str, float], geometry.GeomFeatures, polygons.PolyApprox, polygons.PolyApprox | None]:
    """All CSV feature values for one region, plus the intermediate objects
    the feature-map renderer reuses."""
    n = config.n_samples
    values: dict[str, float] = {}
    for kind, sig in signatures.all_signatures(outer, n).items():
        for stat, stat_value in signatures.summarize_signature(sig).items():
            values[f"{kind}_{stat}"] = stat_value

    geom = geometry.compute_geom_features(outer, holes, region_coords, n)
    values.update(
        area=geom.area,
        perimeter=geom.perimeter,
        centroid_x=geom.centroid[0],
        centroid_y=geom.centroid[1],
        circularity=geom.circularity,
        eccentricity=geom.eccentricity,
        solidity=geom.solidity,
        convexity=geom.convexity,
        rectangularity=geom.rectangularity,
        elongation=geom.elongation,
        mbr_width=geom.mbr_width,
        mbr_height=geom.mbr_height,
        mbr_angle=geom.mbr_angle,
        abe=geom.abe,
        euler_number=geom.euler_number,
        hole_area_ratio=geom.hole_area_ratio,
    )

    dp = polygons.douglas_peucker(outer, config.dp_epsilon)
    for metric, metric_value in polygons.polygon_metrics(dp, outer).items():
        values[f"dp_{metric}"] = metric_value
    try:
        mpp = polygons.min_perimeter_polygon(outer, config.mpp_cell_size)
    except DegenerateBandError as exc:
        _diag(f"notice: {image_name}: region {outer.region_label}: MPP skipped ({exc})")
        mpp = None
        values.update(
            mpp_n_vertices=0,
            mpp_perimeter_ratio=float("nan"),
            mpp_area_ratio=float("nan"),
            mpp_compression=float("nan"),
        )
    else:
        for metric, metric_value in polygons.polygon_metrics(mpp, outer).items():
            values[f"mpp_{metric}"] = metric_value
    return values, geom, dp, mpp


def _majority_label(nifti_image_rows: np.ndarray, region_pixels: np.ndarray) -> int:
    votes = np.bincount(nifti_image_rows[region_pixels].astype(np.int64))
    return int(np.argmax(votes))  # first max -> smallest label on ties


def run_extract(config: RunConfig) -> int:
    problem = config.validate()
    if problem:
        return _usage(problem)
    if not config.input_folder.is_dir():
        return _usage(f"input folder not found: {config.input_folder}")
    files = raster.iter_mask_files(config.input_folder)
    if not files:
        return _usage(f"no mask images in {config.input_folder}")

    records: list[FeatureRecord] = []
    failed_files = 0
    for path in files:
        try:
            mask = raster.decode_mask(path, threshold=config.threshold)
        except MaskShapesError as exc:
            _diag(f"error: {path.name}: {exc}")
            failed_files += 1
            continue
        mask = raster.gaussian_blur_then_rebinarize(mask, config.sigma)
        mask = raster.morphological_close(mask, config.close_radius)
        labeled = raster.label_components(mask)
        contours = raster.trace_contours(labeled)

        nifti_rows = None
        if config.mode == "multi":
            nifti_path = config.nifti_folder / f"{path.stem}.nii"
            try:
                nifti_rows = labels.read_nifti(nifti_path).to_image_rows()
            except (MaskShapesError, OSError) as exc:
                _diag(f"error: {path.name}: cannot read paired labels: {exc}")
                failed_files += 1
                continue
            if nifti_rows.shape != (mask.height, mask.width):
                _diag(
                    f"error: {path.name}: label volume is "
                    f"{nifti_rows.shape[1]}x{nifti_rows.shape[0]}, mask is "
                    f"{mask.width}x{mask.height}"
                )
                failed_files += 1
                continue

        outers = {c.region_label: c for c in contours if not c.is_hole}
        holes_by_region: dict[int, list[raster.Contour]] = {}
        for c in contours:
            if c.is_hole:
                holes_by_region.setdefault(c.region_label, []).append(c)

        # the feature map goes on the largest region that produced a contour
        counts = np.bincount(labeled.labels.ravel(), minlength=labeled.num_regions + 1)
        painted_label = max(outers, key=lambda lab: (counts[lab], -lab), default=None)
        painted = None

        image_records: list[FeatureRecord] = []
        for region_label in sorted(outers):
            outer = outers[region_label]
            region_pixels = labeled.labels == region_label
            ys, xs = np.nonzero(region_pixels)
            coords = np.column_stack([xs, ys])
            try:
                values, geom, dp, mpp = _contour_features(
                    path.name, outer, holes_by_region.get(region_label, []),
                    coords, config,
                )
            except MaskShapesError as exc:
                _diag(f"notice: {path.name}: region {region_label} skipped ({exc})")
                continue
            if region_label == painted_label:
                painted = (outer, geom, dp, mpp)
            if nifti_rows is not None:
                region_label_value = _majority_label(nifti_rows, region_pixels)
                if region_label_value == 0:
                    continue  # background-labeled region: no CSV row
            else:
                region_label_value = None
            image_records.append(
                FeatureRecord(
                    image_name=path.name,
                    contour_number=len(image_records) + 1,
                    features=values,
                    label=region_label_value,
                )
            )
        records.extend(image_records)

        if painted is None:
            _diag(f"notice: {path.name}: no usable ROI, feature map skipped")
            continue
        outer, geom, dp, mpp = painted
        image = featuremap.render_feature_map(mask, outer, geom, {"dp": dp, "mpp": mpp})
        featuremap.save_feature_map(image, config.output_folder, path.stem)

    header = list(IDENTITY_COLUMNS)
    if config.mode == "multi":
        header.append("label")
    header.extend(FEATURE_COLUMNS)
    config.csv_file.parent.mkdir(parents=True, exist_ok=True)
    with open(config.csv_file, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for record in records:
            row = [record.image_name, str(record.contour_number)]
            if config.mode == "multi":
                row.append(str(record.label))
            row.extend(
                _format_value(col, record.features[col]) for col in FEATURE_COLUMNS
            )
            writer.writerow(row)
    return 1 if failed_files else 0


def run_create_label(
    folder_path: Path,
    output_csv_folder: Path,
    output_image_folder: Path,
    threshold: int = raster.DEFAULT_THRESHOLD,
) -> int:
    if not folder_path.is_dir():
        return _usage(f"mask folder not found: {folder_path}")
    if not raster.iter_mask_files(folder_path):
        return _usage(f"no mask images in {folder_path}")
    results = labels.create_label_template(
        folder_path, output_csv_folder, output_image_folder, threshold=threshold
    )
    failures = 0
    for result in results:
        if result.error:
            _diag(f"error: {result.name}: {result.error}")
            failures += 1
        else:
            print(f"{result.name}: {result.num_regions} regions -> {result.csv_path}")
    return 1 if failures else 0


def _labeled_preview(
    mask: raster.BinaryMask, volume: labels.NiftiLabelVolume, table
) -> Image.Image:
    image_rows = volume.to_image_rows()
    arr = np.zeros((mask.height, mask.width, 3), dtype=np.uint8)
    for value in sorted(set(np.unique(image_rows).tolist()) - {0}):
        arr[image_rows == value] = _PALETTE[(value - 1) % len(_PALETTE)]
    img = Image.fromarray(arr, mode="RGB")
    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default()
    for row in sorted(table, key=lambda r: r.cell_id):
        if row.final_label:
            draw.text(
                (round(row.centroid_x), round(row.centroid_y)),
                str(row.final_label),
                fill=(255, 255, 255),
                font=font,
                anchor="mm",
            )
    return img


def run_nifti(
    folder_path: Path,
    input_csv_folder: Path,
    nifti_save_dir: Path,
    label_save_dir: Path,
    threshold: int = raster.DEFAULT_THRESHOLD,
) -> int:
    if not folder_path.is_dir():
        return _usage(f"mask folder not found: {folder_path}")
    files = raster.iter_mask_files(folder_path)
    if not files:
        return _usage(f"no mask images in {folder_path}")
    nifti_save_dir.mkdir(parents=True, exist_ok=True)
    label_save_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for path in files:
        csv_path = input_csv_folder / f"{path.stem}.csv"
        try:
            if not csv_path.is_file():
                raise MissingCsvError(f"no label table {csv_path.name} for {path.name}")
            mask = raster.decode_mask(path, threshold=threshold)
            table = labels.read_label_table(csv_path)
            volume = labels.build_label_volume(mask, table)
        except (MaskShapesError, ValueError) as exc:
            _diag(f"error: {path.name}: {exc}")
            failures += 1
            continue
        labels.write_nifti(volume, nifti_save_dir / f"{path.stem}.nii")
        _labeled_preview(mask, volume, table).save(
            label_save_dir / f"{path.stem}_labeled.png", format="PNG"
        )
        report = labels.verify_labels(volume, table)
        if report.consistent:
            print(f"{path.name}: consistent (labels {sorted(report.found)})")
        else:
            failures += 1
            print(
                f"{path.name}: INCONSISTENT missing={sorted(report.missing)} "
                f"extra={sorted(report.extra)}"
            )
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskshapes",
        description="Shape-feature extraction from folders of binarized masks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extract", help="extract per-ROI shape features to CSV")
    ex.add_argument("--input", required=True, type=Path, help="folder of mask images")
    ex.add_argument("--csv_file", required=True, type=Path, help="output CSV path")
    ex.add_argument("--output", required=True, type=Path, help="feature-map folder")
    ex.add_argument("--label", choices=("s", "m"), default="s",
                    help="s = single-class, m = multi-class")
    ex.add_argument("--nifti_folder", type=Path, default=None,
                    help="folder of stem-matched .nii label volumes (multi-class)")
    ex.add_argument("--sigma", type=float, default=raster.DEFAULT_SIGMA)
    ex.add_argument("--close_radius", type=int, default=raster.DEFAULT_CLOSE_RADIUS)
    ex.add_argument("--n_samples", type=int, default=signatures.DEFAULT_N_SAMPLES)
    ex.add_argument("--dp_epsilon", type=float, default=polygons.DEFAULT_DP_EPSILON)
    ex.add_argument("--mpp_cell_size", type=int, default=polygons.DEFAULT_MPP_CELL)
    ex.add_argument("--threshold", type=int, default=raster.DEFAULT_THRESHOLD)

    cl = sub.add_parser("create-label", help="write label-table templates + overlays")
    cl.add_argument("--folder_path", required=True, type=Path)
    cl.add_argument("--output_csv_folder", required=True, type=Path)
    cl.add_argument("--output_image_folder", required=True, type=Path)
    cl.add_argument("--threshold", type=int, default=raster.DEFAULT_THRESHOLD)

    nf = sub.add_parser("nifti", help="build NIfTI label volumes from filled tables")
    nf.add_argument("--folder_path", required=True, type=Path)
    nf.add_argument("--input_csv_folder", required=True, type=Path)
    nf.add_argument("--nifti_save_dir", required=True, type=Path)
    nf.add_argument("--label_save_dir", required=True, type=Path)
    nf.add_argument("--threshold", type=int, default=raster.DEFAULT_THRESHOLD)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.command == "extract":
        config = RunConfig(
            input_folder=args.input,
            csv_file=args.csv_file,
            output_folder=args.output,
            mode="multi" if args.label == "m" else "single",
            nifti_folder=args.nifti_folder,
            sigma=args.sigma,
            close_radius=args.close_radius,
            n_samples=args.n_samples,
            dp_epsilon=args.dp_epsilon,
            mpp_cell_size=args.mpp_cell_size,
            threshold=args.threshold,
        )
        return run_extract(config)
    if args.command == "create-label":
        return run_create_label(
            args.folder_path, args.output_csv_folder, args.output_image_folder,
            threshold=args.threshold,
        )
    return run_nifti(
        args.folder_path, args.input_csv_folder, args.nifti_save_dir,
        args.label_save_dir, threshold=args.threshold,
    )


if __name__ == "__main__":
    sys.exit(main())
