"""Model-input construction: OCR masking, ruling removal, resizing, fusion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ConfigError, InputValidationError
from .geometry import BBox
from .imageops import canny, erase_lines, hough_lines, negate
from .imageops.filters import as_gray

OCR_CONFIDENCE = 0.7
MODEL_SIDE = 768

VARIANTS = ("o", "o-", "pre", "pre-", "o/pre", "o-/pre-", "o/o-/pre", "o/o-/pre-")


@dataclass(frozen=True)
class OcrWord:
    bbox: BBox
    text: str
    confidence: float


@dataclass
class HoughConfig:
    canny_low: float = 0.1
    canny_high: float = 0.2
    min_votes: int = 215
    angle_tolerance: float = 2.0
    thickness: float = 3.0
    dtheta: float = 1.0
    dr: float = 1.0


@dataclass(frozen=True)
class ChannelStack:
    planes: Tuple[np.ndarray, ...]
    variant: str

    def as_array(self) -> np.ndarray:
        """Planes stacked along a trailing channel axis, shape ``(H, W, C)``."""
        return np.stack(self.planes, axis=-1)


def load_ocr_sidecar(path) -> List[OcrWord]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return parse_ocr_words(doc.get("words", []))


def parse_ocr_words(records) -> List[OcrWord]:
    words = []
    for i, rec in enumerate(records):
        try:
            x, y, w, h = (float(v) for v in rec["bbox"])
            conf = float(rec["conf"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputValidationError(f"OCR word {i}: malformed record ({exc})") from None
        if w < 0 or h < 0:
            raise InputValidationError(f"OCR word {i}: negative box size")
        if not 0 <= conf <= 1:
            raise InputValidationError(f"OCR word {i}: confidence {conf} outside [0, 1]")
        words.append(OcrWord(BBox.from_xywh(x, y, w, h), str(rec.get("text", "")), conf))
    return words


def box_pixel_slices(b: BBox, shape) -> Tuple[slice, slice]:
    """Row/column slices of pixels whose unit square overlaps ``b``."""
    h, w = shape
    r0 = min(max(math.floor(b.y_min), 0), h)
    r1 = min(max(math.ceil(b.y_max), 0), h)
    c0 = min(max(math.floor(b.x_min), 0), w)
    c1 = min(max(math.ceil(b.x_max), 0), w)
    return slice(r0, r1), slice(c0, c1)


def confident_words(words: Sequence[OcrWord], conf_threshold: float = OCR_CONFIDENCE):
    return [wd for wd in words if wd.confidence > conf_threshold]


def mask_ocr_words(img, words: Sequence[OcrWord], conf_threshold: float = OCR_CONFIDENCE) -> np.ndarray:
    """Whiten the boxes of words recognised with confidence above the threshold."""
    out = as_gray(img).copy()
    for wd in confident_words(words, conf_threshold):
        out[box_pixel_slices(wd.bbox, out.shape)] = 1.0
    return out


def _near_axis(theta: float, tol: float) -> bool:
    return min(theta, 180.0 - theta) <= tol or abs(theta - 90.0) <= tol


def find_rulings(img, cfg: HoughConfig = None):
    """Near-horizontal and near-vertical straight lines of ``img``."""
    cfg = cfg or HoughConfig()
    edges = canny(img, cfg.canny_low, cfg.canny_high)
    lines = hough_lines(edges, cfg.min_votes, cfg.dtheta, cfg.dr)
    return [ln for ln in lines if _near_axis(ln.theta, cfg.angle_tolerance)]


def remove_rulings(img, cfg: HoughConfig = None, words: Sequence[OcrWord] = (),
                   conf_threshold: float = OCR_CONFIDENCE) -> np.ndarray:
    """Erase table rulings from ``img``.

    Rulings are searched with confident OCR words blanked out, so aligned
    rows of printed text cannot pose as lines; the erasure itself applies to
    ``img`` unchanged otherwise.
    """
    cfg = cfg or HoughConfig()
    probe = mask_ocr_words(img, words, conf_threshold) if words else img
    return erase_lines(img, find_rulings(probe, cfg), cfg.thickness)


def make_pre_plane(img, words: Sequence[OcrWord], cfg: HoughConfig = None,
                   conf_threshold: float = OCR_CONFIDENCE) -> np.ndarray:
    """The "pre" plane: confident OCR words and table rulings painted white."""
    return remove_rulings(mask_ocr_words(img, words, conf_threshold), cfg)


def resize_to_model(img, side: int = MODEL_SIDE) -> np.ndarray:
    """Bilinear resampling to ``side x side`` with corner pixels aligned."""
    img = as_gray(img)
    if img.size == 0:
        raise InputValidationError("cannot resize an empty image")
    h, w = img.shape
    if (h, w) == (side, side):
        return img.copy()
    ys = np.linspace(0.0, h - 1, side) if side > 1 else np.zeros(1)
    xs = np.linspace(0.0, w - 1, side) if side > 1 else np.zeros(1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bottom = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    return np.clip(top * (1 - fy) + bottom * fy, 0.0, 1.0)


def box_to_model(b: BBox, orig_w: float, orig_h: float, side: int = MODEL_SIDE) -> BBox:
    if orig_w <= 0 or orig_h <= 0:
        raise InputValidationError("image dimensions must be positive")
    sx, sy = side / orig_w, side / orig_h
    return BBox(b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy)


def box_from_model(b: BBox, orig_w: float, orig_h: float, side: int = MODEL_SIDE) -> BBox:
    if orig_w <= 0 or orig_h <= 0:
        raise InputValidationError("image dimensions must be positive")
    sx, sy = orig_w / side, orig_h / side
    return BBox(b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy)


def parse_variant(variant: str) -> Tuple[str, ...]:
    terms = tuple(variant.split("/"))
    if "/".join(terms) not in VARIANTS:
        raise ConfigError(f"unknown input variant {variant!r}; choose from {', '.join(VARIANTS)}")
    return terms


def fuse_channels(img, pre, variant: str) -> ChannelStack:
    """Stack original/negated/preprocessed planes in the order ``variant`` names them."""
    terms = parse_variant(variant)
    img = as_gray(img)
    pre = as_gray(pre)
    if img.shape != pre.shape:
        raise InputValidationError(f"plane shapes differ: {img.shape} vs {pre.shape}")
    sources = {"o": img, "o-": negate(img), "pre": pre, "pre-": negate(pre)}
    return ChannelStack(tuple(sources[t] for t in terms), "/".join(terms))
