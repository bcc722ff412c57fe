"""Heuristic handwriting detector and detection postprocessing."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import List, Sequence

import numpy as np
from scipy import ndimage

from .errors import ConfigError
from .geometry import BBox, area, intersect
from .imageops import median_filter, morphology, negate, otsu_threshold
from .imageops.edges import EIGHT_CONNECTED
from .preprocess import OCR_CONFIDENCE, HoughConfig, OcrWord, confident_words, remove_rulings


@dataclass(frozen=True)
class Detection:
    bbox: BBox
    confidence: float


@dataclass(frozen=True)
class RegionCandidate:
    bbox: BBox
    pixel_count: int
    fill_ratio: float
    height: float
    width: float
    ocr_overlap: float
    height_variability: float = 0.0


@dataclass
class DetectorConfig:
    min_area: int = 80
    ocr_overlap_max: float = 0.5
    ocr_confidence: float = OCR_CONFIDENCE
    irregularity_gain: float = 3.5
    conf_threshold: float = 0.8
    containment: float = 0.9
    median_radius: int = 1
    # (height, width) of the structuring elements at the reference page width
    close_size: tuple = (1, 5)
    dilate_size: tuple = (3, 9)
    reference_width: int = 1000
    hough: HoughConfig = field(default_factory=HoughConfig)

    @classmethod
    def from_dict(cls, data: dict) -> "DetectorConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown detector config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "hough" in kwargs:
            try:
                kwargs["hough"] = HoughConfig(**kwargs["hough"])
            except TypeError as exc:
                raise ConfigError(f"bad hough config: {exc}") from None
        for key in ("close_size", "dilate_size"):
            if key in kwargs:
                kwargs[key] = tuple(int(v) for v in kwargs[key])
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "DetectorConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        for name in ("ocr_overlap_max", "ocr_confidence", "conf_threshold", "containment"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        for name in ("close_size", "dilate_size"):
            v = getattr(self, name)
            if len(v) != 2 or any(s < 1 or s % 2 == 0 for s in v):
                raise ConfigError(f"{name} must be two odd sizes >= 1, got {v}")
        if self.reference_width <= 0 or self.min_area < 0 or self.irregularity_gain < 0:
            raise ConfigError("reference_width must be positive; min_area and irregularity_gain non-negative")

    def scaled(self, size: tuple, image_width: int) -> tuple:
        """Structuring element ``(height, width)`` with the width scaled to the page."""
        h, w = size
        w = max(1, int(round(w * image_width / self.reference_width)))
        if w % 2 == 0:
            w += 1
        return h, w


def column_span_variability(ink: np.ndarray) -> float:
    """Coefficient of variation of the vertical ink extent over inked columns."""
    cols = np.flatnonzero(ink.any(axis=0))
    if len(cols) == 0:
        return 0.0
    sub = ink[:, cols]
    top = sub.argmax(axis=0)
    bottom = sub.shape[0] - 1 - sub[::-1].argmax(axis=0)
    spans = (bottom - top + 1).astype(np.float64)
    return float(spans.std() / spans.mean())


def ink_mask(img, words: Sequence[OcrWord] = (), cfg: DetectorConfig = None) -> np.ndarray:
    """Binary ink mask after ruling removal and denoising."""
    cfg = cfg or DetectorConfig()
    clean = remove_rulings(img, cfg.hough, words, cfg.ocr_confidence)
    clean = median_filter(clean, cfg.median_radius)
    _, mask = otsu_threshold(negate(clean))
    return mask > 0.5


def extract_components(img, words: Sequence[OcrWord], cfg: DetectorConfig = None) -> List[RegionCandidate]:
    """Group ink into word/region blobs and measure each one."""
    cfg = cfg or DetectorConfig()
    ink = ink_mask(img, words, cfg)
    if not ink.any():
        return []
    width = ink.shape[1]
    ch, cw = cfg.scaled(cfg.close_size, width)
    dh, dw = cfg.scaled(cfg.dilate_size, width)
    blobs = morphology(ink, "close", se_width=cw, se_height=ch)
    blobs = morphology(blobs, "dilate", se_width=dw, se_height=dh) > 0.5
    labels, _ = ndimage.label(blobs, structure=EIGHT_CONNECTED)
    ink_labels = np.where(ink, labels, 0)
    word_boxes = [wd.bbox for wd in confident_words(words, cfg.ocr_confidence)]
    cands = []
    for sl_index, sl in enumerate(ndimage.find_objects(ink_labels), start=1):
        if sl is None:
            continue
        comp = ink_labels[sl] == sl_index
        rows = np.flatnonzero(comp.any(axis=1))
        cols = np.flatnonzero(comp.any(axis=0))
        y0, y1 = sl[0].start + rows[0], sl[0].start + rows[-1] + 1
        x0, x1 = sl[1].start + cols[0], sl[1].start + cols[-1] + 1
        bbox = BBox(float(x0), float(y0), float(x1), float(y1))
        count = int(comp.sum())
        overlap = 0.0
        for wb in word_boxes:
            inter = intersect(bbox, wb)
            if inter is not None:
                overlap = max(overlap, inter.area / bbox.area)
        cands.append(RegionCandidate(
            bbox=bbox,
            pixel_count=count,
            fill_ratio=count / bbox.area,
            height=bbox.height,
            width=bbox.width,
            ocr_overlap=min(overlap, 1.0),
            height_variability=column_span_variability(comp),
        ))
    return cands


def classify_candidates(cands: Sequence[RegionCandidate], cfg: DetectorConfig = None) -> List[Detection]:
    """Score candidates as handwriting; printed-looking and tiny blobs are dropped."""
    cfg = cfg or DetectorConfig()
    dets = []
    for c in cands:
        if c.pixel_count < cfg.min_area or c.ocr_overlap > cfg.ocr_overlap_max:
            continue
        irregular = min(max(cfg.irregularity_gain * c.height_variability, 0.0), 1.0)
        dets.append(Detection(c.bbox, (1.0 - c.ocr_overlap) * irregular))
    return dets


def detect(img, words: Sequence[OcrWord] = (), cfg: DetectorConfig = None) -> List[Detection]:
    """Raw (not yet postprocessed) handwriting detections for one page."""
    cfg = cfg or DetectorConfig()
    return classify_candidates(extract_components(img, words, cfg), cfg)


def postprocess_detections(dets: Sequence[Detection], conf_threshold: float = 0.8,
                           containment: float = 0.9) -> List[Detection]:
    """Confidence filter followed by suppression of boxes contained in larger ones.

    Boxes are visited from the smallest; a box is dropped when more than
    ``containment`` of its area lies inside some larger box.  Equal areas
    count the earlier input as the larger one.  Survivors keep input order.
    """
    kept = [i for i, d in enumerate(dets) if d.confidence >= conf_threshold]
    order = sorted(kept, key=lambda i: (area(dets[i].bbox), -i))
    dropped = set()
    for pos, i in enumerate(order):
        small = dets[i].bbox
        a_small = small.area
        for j in order[pos + 1:]:
            inter = intersect(small, dets[j].bbox)
            if a_small > 0:
                ratio = inter.area / a_small if inter is not None else 0.0
            else:
                ratio = 1.0 if _inside(small, dets[j].bbox) else 0.0
            if ratio > containment:
                dropped.add(i)
                break
    return [dets[i] for i in kept if i not in dropped]


def _inside(a: BBox, b: BBox) -> bool:
    return b.x_min <= a.x_min and b.y_min <= a.y_min and a.x_max <= b.x_max and a.y_max <= b.y_max
