"""Exception taxonomy for the mask-shapes pipeline.

Every error raised on purpose by this package derives from MaskShapesError,
so batch drivers can catch one base class per file and keep going.
"""


class MaskShapesError(Exception):
    """Base class for all errors raised by maskshapes."""


class DecodeError(MaskShapesError):
    """An image file exists but cannot be decoded."""


class UnsupportedFormatError(MaskShapesError):
    """The file extension is not one of the supported raster formats."""


class NoRegionError(MaskShapesError):
    """An operation that needs at least one foreground region got none."""


class DegenerateContourError(MaskShapesError):
    """Contour has no usable geometry (zero perimeter, zero area, ...)."""


class DegenerateHullError(MaskShapesError):
    """Convex hull is degenerate (fewer than 3 distinct non-collinear points)."""


class DegenerateBandError(MaskShapesError):
    """Grid band for the minimum-perimeter polygon has no interior."""


class LabelSchemaError(MaskShapesError):
    """A label table is missing (or mangles) a required CSV header."""


class LabelValueError(MaskShapesError):
    """A label table row holds an empty or non-numeric final_label."""


class DuplicateCellIdError(MaskShapesError):
    """A label table repeats a cell_id."""


class MissingLabelError(MaskShapesError):
    """Mask regions and label table rows do not match one-to-one."""


class NiftiFormatError(MaskShapesError):
    """A NIfTI file is structurally invalid (magic, size, truncation...)."""


class UnsupportedDtypeError(MaskShapesError):
    """A NIfTI file uses a datatype code this codec does not read."""
