"""Multi-class labeling workflow: templates, label tables, NIfTI-1 label volumes.

The NIfTI codec is deliberately minimal: single-file .nii, 348-byte header,
little-endian, 2-D volumes only.  Voxel rows are stored bottom-up relative to
image rows ("orientation correction"): image row 0 (top of the picture) lands
at voxel row height-1, so standard NIfTI viewers show the mask upright.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from . import raster
from .errors import (
    DuplicateCellIdError,
    LabelSchemaError,
    LabelValueError,
    MissingLabelError,
    NiftiFormatError,
    UnsupportedDtypeError,
)

LABEL_TABLE_HEADERS = ("cell_id", "centroid_x", "centroid_y", "final_label")

NIFTI_HEADER_SIZE = 348
NIFTI_VOX_OFFSET = 352
NIFTI_MAGIC = b"n+1\x00"
NIFTI_DTYPE_UINT16 = 512
_READABLE_DTYPES = {2: np.uint8, 4: np.int16, 512: np.uint16}
_DESCRIP = b"maskshapes label volume"

# struct layout of the full 348-byte NIfTI-1 header, little-endian
_HEADER_FMT = (
    "<i"      # sizeof_hdr
    "10s18si" # data_type, db_name, extents
    "hbb"     # session_error, regular, dim_info
    "8h"      # dim
    "3f"      # intent_p1..p3
    "hhh"     # intent_code, datatype, bitpix
    "h8f"     # slice_start, pixdim
    "fff"     # vox_offset, scl_slope, scl_inter
    "hbb"     # slice_end, slice_code, xyzt_units
    "ffff"    # cal_max, cal_min, slice_duration, toffset
    "ii"      # glmax, glmin
    "80s24s"  # descrip, aux_file
    "hh"      # qform_code, sform_code
    "3f3f"    # quatern_b/c/d, qoffset_x/y/z
    "12f"     # srow_x, srow_y, srow_z
    "16s4s"   # intent_name, magic
)
assert struct.calcsize(_HEADER_FMT) == NIFTI_HEADER_SIZE


@dataclass
class LabelTableRow:
    cell_id: int
    centroid_x: float
    centroid_y: float
    final_label: int


@dataclass
class NiftiLabelVolume:
    """2-D label raster in NIfTI voxel order (row 0 = bottom of the image)."""

    width: int
    height: int
    voxels: np.ndarray  # uint16, shape (height, width)

    def to_image_rows(self) -> np.ndarray:
        """The label raster flipped back to image row order (row 0 = top)."""
        return self.voxels[::-1, :]


@dataclass
class LabelReport:
    expected: set[int]
    found: set[int]

    @property
    def missing(self) -> set[int]:
        return self.expected - self.found

    @property
    def extra(self) -> set[int]:
        return self.found - self.expected

    @property
    def consistent(self) -> bool:
        return not self.missing and not self.extra


@dataclass
class TemplateResult:
    """Outcome of template generation for one mask file."""

    name: str
    num_regions: int = 0
    csv_path: Path | None = None
    image_path: Path | None = None
    error: str | None = None


def _region_centroids(labeled: raster.LabeledMask) -> dict[int, tuple[float, float]]:
    """Pixel-mean centroid per region label."""
    labels = labeled.labels
    counts = np.bincount(labels.ravel(), minlength=labeled.num_regions + 1)
    ys, xs = np.nonzero(labels)
    vals = labels[ys, xs]
    sx = np.bincount(vals, weights=xs, minlength=labeled.num_regions + 1)
    sy = np.bincount(vals, weights=ys, minlength=labeled.num_regions + 1)
    out = {}
    for lab in range(1, labeled.num_regions + 1):
        if counts[lab]:
            out[lab] = (sx[lab] / counts[lab], sy[lab] / counts[lab])
    return out


def _overlay_image(mask: raster.BinaryMask, centroids: dict[int, tuple[float, float]]) -> Image.Image:
    img = Image.fromarray((mask.pixels.astype(np.uint8)) * 255).convert("RGB")
    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default()
    for lab in sorted(centroids):
        cx, cy = centroids[lab]
        draw.text((round(cx), round(cy)), str(lab), fill=(255, 0, 0), font=font, anchor="mm")
    return img


def create_label_template(
    mask_folder: Path | str,
    csv_out_folder: Path | str,
    image_out_folder: Path | str,
    threshold: int = raster.DEFAULT_THRESHOLD,
) -> list[TemplateResult]:
    """Per mask: CSV template (cell_id, centroids, blank final_label) plus an
    RGB copy of the mask with each cell_id drawn at its centroid."""
    csv_out = Path(csv_out_folder)
    image_out = Path(image_out_folder)
    csv_out.mkdir(parents=True, exist_ok=True)
    image_out.mkdir(parents=True, exist_ok=True)
    results = []
    for path in raster.iter_mask_files(mask_folder):
        try:
            mask = raster.decode_mask(path, threshold=threshold)
        except Exception as exc:  # per-file: report and continue
            results.append(TemplateResult(name=path.name, error=str(exc)))
            continue
        labeled = raster.label_components(mask)
        centroids = _region_centroids(labeled)
        csv_path = csv_out / f"{path.stem}.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(LABEL_TABLE_HEADERS)
            for lab in range(1, labeled.num_regions + 1):
                cx, cy = centroids[lab]
                writer.writerow([lab, f"{cx:.6g}", f"{cy:.6g}", ""])
        image_path = image_out / f"{path.stem}_labels.png"
        _overlay_image(mask, centroids).save(image_path, format="PNG")
        results.append(
            TemplateResult(path.name, labeled.num_regions, csv_path, image_path)
        )
    return results


def read_label_table(csv_path: Path | str) -> list[LabelTableRow]:
    """Parse an annotator-completed label table; strict about the schema."""
    with open(csv_path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise LabelSchemaError(f"{csv_path}: empty file, missing header "
                                   f"{','.join(LABEL_TABLE_HEADERS)}") from None
        header = [h.strip() for h in header]
        if header != list(LABEL_TABLE_HEADERS):
            for name in LABEL_TABLE_HEADERS:
                if name not in header:
                    raise LabelSchemaError(f"{csv_path}: missing header {name!r}")
            raise LabelSchemaError(
                f"{csv_path}: header must be exactly {','.join(LABEL_TABLE_HEADERS)}"
            )
        rows: list[LabelTableRow] = []
        seen: set[int] = set()
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            cell_id_raw, cx_raw, cy_raw, final_raw = (cell.strip() for cell in record[:4])
            try:
                cell_id = int(cell_id_raw)
            except ValueError:
                raise LabelValueError(f"{csv_path}: non-numeric cell_id {cell_id_raw!r}") from None
            if cell_id in seen:
                raise DuplicateCellIdError(f"{csv_path}: duplicate cell_id {cell_id}")
            seen.add(cell_id)
            if not final_raw:
                raise LabelValueError(f"{csv_path}: empty final_label for cell_id {cell_id}")
            try:
                final_label = int(final_raw)
            except ValueError:
                raise LabelValueError(
                    f"{csv_path}: non-numeric final_label {final_raw!r} for cell_id {cell_id}"
                ) from None
            if final_label < 0:
                raise LabelValueError(
                    f"{csv_path}: negative final_label {final_label} for cell_id {cell_id}"
                )
            rows.append(LabelTableRow(cell_id, float(cx_raw), float(cy_raw), final_label))
    return rows


def build_label_volume(mask: raster.BinaryMask, table: list[LabelTableRow]) -> NiftiLabelVolume:
    """Relabel connected regions by the table's final_label values and flip
    rows into NIfTI voxel order.  final_label 0 regions become background."""
    labeled = raster.label_components(mask)
    mapping = {row.cell_id: row.final_label for row in table}
    region_ids = set(range(1, labeled.num_regions + 1))
    unmapped = sorted(region_ids - mapping.keys())
    if unmapped:
        raise MissingLabelError(f"regions without a table row: cell_ids {unmapped}")
    phantom = sorted(mapping.keys() - region_ids)
    if phantom:
        raise MissingLabelError(f"table rows without a mask region: cell_ids {phantom}")
    lut = np.zeros(labeled.num_regions + 1, dtype=np.uint16)
    for cell_id, final_label in mapping.items():
        lut[cell_id] = final_label
    image_rows = lut[labeled.labels]
    return NiftiLabelVolume(mask.width, mask.height, image_rows[::-1, :].copy())


def write_nifti(volume: NiftiLabelVolume, path: Path | str) -> Path:
    """Write a single-file .nii (uint16, little-endian, identity spatial frame)."""
    if not (1 <= volume.width <= 32767 and 1 <= volume.height <= 32767):
        raise ValueError(f"dims {volume.width}x{volume.height} exceed NIfTI-1 header range")
    voxels = np.ascontiguousarray(volume.voxels, dtype="<u2")
    if voxels.shape != (volume.height, volume.width):
        raise ValueError("voxel buffer does not match declared dims")
    header = struct.pack(
        _HEADER_FMT,
        NIFTI_HEADER_SIZE,          # sizeof_hdr
        b"", b"", 0,                # data_type, db_name, extents
        0, 0, 0,                    # session_error, regular, dim_info
        2, volume.width, volume.height, 1, 1, 1, 1, 1,  # dim
        0.0, 0.0, 0.0,              # intent_p1..p3
        0, NIFTI_DTYPE_UINT16, 16,  # intent_code, datatype, bitpix
        0,                          # slice_start
        1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0,  # pixdim
        float(NIFTI_VOX_OFFSET), 1.0, 0.0,       # vox_offset, scl_slope, scl_inter
        0, 0, 0,                    # slice_end, slice_code, xyzt_units
        0.0, 0.0, 0.0, 0.0,         # cal_max, cal_min, slice_duration, toffset
        0, 0,                       # glmax, glmin
        _DESCRIP, b"",              # descrip, aux_file
        0, 1,                       # qform_code, sform_code (identity sform)
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0,            # quatern, qoffset
        1.0, 0.0, 0.0, 0.0,         # srow_x
        0.0, 1.0, 0.0, 0.0,         # srow_y
        0.0, 0.0, 1.0, 0.0,         # srow_z
        b"", NIFTI_MAGIC,           # intent_name, magic
    )
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(b"\x00" * (NIFTI_VOX_OFFSET - NIFTI_HEADER_SIZE))  # extension flag
        fh.write(voxels.tobytes(order="C"))
    return path


def read_nifti(path: Path | str) -> NiftiLabelVolume:
    """Exact inverse of write_nifti; accepts uint8/int16/uint16 payloads."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < NIFTI_HEADER_SIZE:
        raise NiftiFormatError(f"{path.name}: truncated header ({len(blob)} bytes)")
    fields = struct.unpack(_HEADER_FMT, blob[:NIFTI_HEADER_SIZE])
    sizeof_hdr = fields[0]
    if sizeof_hdr != NIFTI_HEADER_SIZE:
        raise NiftiFormatError(f"{path.name}: sizeof_hdr = {sizeof_hdr}, expected 348")
    magic = fields[-1]
    if magic != NIFTI_MAGIC:
        raise NiftiFormatError(f"{path.name}: bad magic {magic!r}")
    dim = fields[7:15]
    ndim = dim[0]
    if not 2 <= ndim <= 7 or any(d != 1 for d in dim[3 : 1 + ndim]):
        raise NiftiFormatError(f"{path.name}: unsupported dim {list(dim)} (2-D only)")
    width, height = dim[1], dim[2]
    if width < 1 or height < 1:
        raise NiftiFormatError(f"{path.name}: bad dims {width}x{height}")
    datatype = fields[19]
    if datatype not in _READABLE_DTYPES:
        raise UnsupportedDtypeError(f"{path.name}: datatype code {datatype} not supported")
    dtype = np.dtype(_READABLE_DTYPES[datatype]).newbyteorder("<")
    vox_offset = int(fields[30])
    if vox_offset < NIFTI_HEADER_SIZE:
        raise NiftiFormatError(f"{path.name}: vox_offset {vox_offset} overlaps header")
    need = width * height * dtype.itemsize
    data = blob[vox_offset : vox_offset + need]
    if len(data) < need:
        raise NiftiFormatError(
            f"{path.name}: truncated voxel data ({len(data)} of {need} bytes)"
        )
    voxels = np.frombuffer(data, dtype=dtype).reshape(height, width)
    if datatype == 4 and voxels.min() < 0:
        raise NiftiFormatError(f"{path.name}: negative labels in int16 payload")
    return NiftiLabelVolume(int(width), int(height), voxels.astype(np.uint16))


def verify_labels(volume: NiftiLabelVolume, table: list[LabelTableRow]) -> LabelReport:
    """Compare nonzero labels present in the volume against the table."""
    expected = {row.final_label for row in table if row.final_label != 0}
    found = set(np.unique(volume.voxels).tolist()) - {0}
    return LabelReport(expected=expected, found={int(v) for v in found})
