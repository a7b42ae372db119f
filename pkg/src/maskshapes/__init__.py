"""maskshapes: quantitative shape descriptors for binarized mask images.

Pipeline: decode -> blur/close -> label -> trace -> per-contour features
(1-D signatures, geometric scalars, polygonal approximations) -> CSV +
feature-map renders.  A label-template / NIfTI workflow supports multi-class
extraction.
"""

from .errors import (
    DecodeError,
    DegenerateBandError,
    DegenerateContourError,
    DegenerateHullError,
    DuplicateCellIdError,
    LabelSchemaError,
    LabelValueError,
    MaskShapesError,
    MissingLabelError,
    NiftiFormatError,
    NoRegionError,
    UnsupportedDtypeError,
    UnsupportedFormatError,
)
from .raster import (
    BinaryMask,
    Contour,
    LabeledMask,
    decode_mask,
    gaussian_blur_then_rebinarize,
    label_components,
    largest_region,
    morphological_close,
    trace_contours,
)
from .signatures import (
    ShapeSignature,
    all_signatures,
    area_function,
    centroid_distance_function,
    chord_length_function,
    curvature_function,
    resample_equal_arclength,
    summarize_signature,
    tangent_angle_function,
    triangle_area_signature,
)
from .geometry import (
    GeomFeatures,
    MbrResult,
    average_bending_energy,
    centroid,
    circularity,
    compute_geom_features,
    convex_hull,
    convexity,
    eccentricity_principal_axes,
    elongation,
    euler_and_holes,
    min_bounding_rect,
    polygon_area,
    polygon_perimeter,
    rectangularity,
    signed_area,
    solidity,
)
from .polygons import (
    PolyApprox,
    douglas_peucker,
    min_perimeter_polygon,
    polygon_metrics,
)
from .labels import (
    LabelReport,
    LabelTableRow,
    NiftiLabelVolume,
    build_label_volume,
    create_label_template,
    read_label_table,
    read_nifti,
    verify_labels,
    write_nifti,
)
from .featuremap import FeatureMapSpec, render_feature_map, save_feature_map
from .cli import FeatureRecord, RunConfig, main, run_extract

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
