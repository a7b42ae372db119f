"""Run the whole toolkit once over synthetic data.

Exercises, in order: mask generation, single-class feature extraction with
feature-map renders, label-template creation, programmatic template filling,
NIfTI label-volume building plus verification, and multi-class extraction.
Everything lands under one work directory so the outputs are easy to inspect.
"""

import argparse
import csv
from pathlib import Path

from make_demo_masks import write_demo_masks, write_multiclass_mask

from maskshapes.cli import main as cli


def fill_template(csv_path: Path, mapping) -> None:
    """Append a final_label to each template row, as an annotator would."""
    lines = csv_path.read_text().splitlines()
    filled = [lines[0]]
    for line in lines[1:]:
        cell_id = int(line.split(",")[0])
        filled.append(line + str(mapping(cell_id)))
    csv_path.write_text("\n".join(filled) + "\n")


def show_csv(csv_path: Path, columns, limit=None) -> None:
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows[:limit]:
        cells = ", ".join(f"{c}={row[c]}" for c in columns)
        print(f"  {cells}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", type=Path, default=Path("demo_output"))
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    work = args.workdir

    print("== generating masks ==")
    write_demo_masks(work / "masks", seed=args.seed)
    write_multiclass_mask(work / "multiclass")

    print("== single-class extraction ==")
    code = cli(
        [
            "extract",
            "--input",
            str(work / "masks"),
            "--csv_file",
            str(work / "features.csv"),
            "--output",
            str(work / "featuremaps"),
        ]
    )
    if code != 0:
        return code
    show_csv(work / "features.csv", ("image_name", "area", "circularity", "solidity"))

    print("== label templates ==")
    code = cli(
        [
            "create-label",
            "--folder_path",
            str(work / "multiclass"),
            "--output_csv_folder",
            str(work / "templates"),
            "--output_image_folder",
            str(work / "template_images"),
        ]
    )
    if code != 0:
        return code

    # Stand in for the human annotator: cycle the regions through labels 1..2.
    fill_template(work / "templates" / "cells.csv", lambda cell_id: 1 + (cell_id - 1) % 2)

    print("== NIfTI build + verification ==")
    code = cli(
        [
            "nifti",
            "--folder_path",
            str(work / "multiclass"),
            "--input_csv_folder",
            str(work / "templates"),
            "--nifti_save_dir",
            str(work / "nifti"),
            "--label_save_dir",
            str(work / "label_previews"),
        ]
    )
    if code != 0:
        return code

    print("== multi-class extraction ==")
    code = cli(
        [
            "extract",
            "--input",
            str(work / "multiclass"),
            "--csv_file",
            str(work / "features_multiclass.csv"),
            "--output",
            str(work / "featuremaps_multiclass"),
            "--label",
            "m",
            "--nifti_folder",
            str(work / "nifti"),
        ]
    )
    if code != 0:
        return code
    show_csv(work / "features_multiclass.csv", ("image_name", "label", "area", "centroid_x", "centroid_y"))

    print(f"done; outputs under {work}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
