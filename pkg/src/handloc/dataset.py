"""Manifest and prediction files, and the seeded train/val/test split.

Both files carry boxes as ``[x, y, w, h]``; in memory boxes are corner-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import InputValidationError
from .geometry import BBox

SPLITS = ("train", "val", "test")
DEFAULT_COUNTS = (600, 198, 200)


@dataclass(frozen=True)
class ManifestEntry:
    image_id: str
    file: str
    width: int
    height: int
    split: Optional[str] = None
    ocr: Optional[str] = None
    gt_boxes: tuple = ()


@dataclass
class DatasetManifest:
    entries: List[ManifestEntry]
    root: Path = field(default_factory=Path)

    def __post_init__(self):
        self._index = {e.image_id: e for e in self.entries}

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, image_id: str) -> ManifestEntry:
        return self._index[image_id]

    def __contains__(self, image_id) -> bool:
        return image_id in self._index

    def image_path(self, entry: ManifestEntry) -> Path:
        return self.root / entry.file

    def ocr_path(self, entry: ManifestEntry) -> Optional[Path]:
        return self.root / entry.ocr if entry.ocr else None

    def to_dict(self) -> dict:
        images, annotations = [], []
        for e in self.entries:
            rec = {"id": e.image_id, "file": e.file, "width": e.width, "height": e.height}
            if e.split is not None:
                rec["split"] = e.split
            if e.ocr is not None:
                rec["ocr"] = e.ocr
            images.append(rec)
            annotations.extend({"image_id": e.image_id, "bbox": b.to_xywh()} for b in e.gt_boxes)
        return {"images": images, "annotations": annotations}


@dataclass(frozen=True)
class PredictionRecord:
    image_id: str
    bbox: BBox
    score: float

    def to_dict(self) -> dict:
        return {"image_id": self.image_id, "bbox": self.bbox.to_xywh(), "score": self.score}


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputValidationError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def write_json(path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=False)
        fh.write("\n")


def parse_xywh(raw, where: str) -> BBox:
    """Validate an ``[x, y, w, h]`` list and return the corner box."""
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise InputValidationError(f"{where}: bbox must be a list [x, y, w, h]")
    try:
        x, y, w, h = (float(v) for v in raw)
    except (TypeError, ValueError):
        raise InputValidationError(f"{where}: bbox values must be numbers") from None
    if not all(math.isfinite(v) for v in (x, y, w, h)):
        raise InputValidationError(f"{where}: bbox values must be finite")
    if w <= 0 or h <= 0:
        raise InputValidationError(f"{where}: degenerate box (w={w:g}, h={h:g})")
    return BBox.from_xywh(x, y, w, h)


def manifest_from_dict(doc, root=Path(".")) -> DatasetManifest:
    if not isinstance(doc, dict) or not isinstance(doc.get("images"), list):
        raise InputValidationError("manifest: expected an object with an 'images' list")
    boxes: Dict[str, list] = {}
    images = []
    for i, rec in enumerate(doc["images"]):
        where = f"manifest images[{i}]"
        try:
            image_id = str(rec["id"])
            file = str(rec["file"])
            width, height = int(rec["width"]), int(rec["height"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputValidationError(f"{where}: missing or invalid field ({exc})") from None
        if width <= 0 or height <= 0:
            raise InputValidationError(f"{where}: width and height must be positive")
        if image_id in boxes:
            raise InputValidationError(f"{where}: duplicate image id {image_id!r}")
        split = rec.get("split")
        if split is not None and split not in SPLITS:
            raise InputValidationError(f"{where}: split must be one of {SPLITS}, got {split!r}")
        boxes[image_id] = []
        images.append((image_id, file, width, height, split, rec.get("ocr")))
    for i, ann in enumerate(doc.get("annotations", [])):
        where = f"manifest annotations[{i}]"
        if not isinstance(ann, dict) or "image_id" not in ann:
            raise InputValidationError(f"{where}: missing image_id")
        image_id = str(ann["image_id"])
        if image_id not in boxes:
            raise InputValidationError(f"{where}: unknown image_id {image_id!r}")
        boxes[image_id].append(parse_xywh(ann.get("bbox"), where))
    entries = [
        ManifestEntry(image_id, file, w, h, split, ocr, tuple(boxes[image_id]))
        for image_id, file, w, h, split, ocr in images
    ]
    return DatasetManifest(entries, Path(root))


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    return manifest_from_dict(_read_json(path), root=path.parent)


def predictions_from_list(doc, manifest: DatasetManifest = None) -> List[PredictionRecord]:
    if not isinstance(doc, list):
        raise InputValidationError("predictions: expected a JSON list of records")
    records = []
    for i, rec in enumerate(doc):
        where = f"predictions[{i}]"
        if not isinstance(rec, dict) or "image_id" not in rec:
            raise InputValidationError(f"{where}: missing image_id")
        image_id = str(rec["image_id"])
        if manifest is not None and image_id not in manifest:
            raise InputValidationError(f"{where}: unknown image_id {image_id!r}")
        bbox = parse_xywh(rec.get("bbox"), where)
        try:
            score = float(rec["score"])
        except (KeyError, TypeError, ValueError):
            raise InputValidationError(f"{where}: missing or non-numeric score") from None
        if not 0 <= score <= 1:
            raise InputValidationError(f"{where}: score {score} outside [0, 1]")
        records.append(PredictionRecord(image_id, bbox, score))
    return records


def load_predictions(path, manifest: DatasetManifest = None) -> List[PredictionRecord]:
    return predictions_from_list(_read_json(path), manifest)


def predictions_to_list(records: Sequence[PredictionRecord]) -> list:
    return [r.to_dict() for r in records]


def group_predictions(records: Sequence[PredictionRecord]) -> Dict[str, List[PredictionRecord]]:
    grouped: Dict[str, List[PredictionRecord]] = {}
    for r in records:
        grouped.setdefault(r.image_id, []).append(r)
    return grouped


def seeded_permutation(n: int, seed: int) -> List[int]:
    """Fisher-Yates shuffle of ``range(n)`` driven by NumPy's PCG64 generator.

    Step ``i`` (from ``n - 1`` down to 1) swaps position ``i`` with
    ``j = rng.integers(0, i + 1)``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def split_dataset(manifest: DatasetManifest, seed: int,
                  counts: Sequence[int] = DEFAULT_COUNTS) -> DatasetManifest:
    """Assign train/val/test splits to a seeded shuffle of the entries.

    Entries are ordered by image id before shuffling, so the assignment does
    not depend on manifest order.  Entries beyond ``sum(counts)`` get no split.
    """
    counts = tuple(int(c) for c in counts)
    if len(counts) != 3 or any(c < 0 for c in counts):
        raise InputValidationError(f"split counts must be three non-negative integers, got {counts}")
    if sum(counts) > len(manifest):
        raise InputValidationError(
            f"split counts {counts} need {sum(counts)} images, manifest has {len(manifest)}")
    ids = sorted(e.image_id for e in manifest.entries)
    perm = seeded_permutation(len(ids), seed)
    assignment = {}
    pos = 0
    for split, c in zip(SPLITS, counts):
        for k in perm[pos:pos + c]:
            assignment[ids[k]] = split
        pos += c
    entries = [replace(e, split=assignment.get(e.image_id)) for e in manifest.entries]
    return DatasetManifest(entries, manifest.root)
