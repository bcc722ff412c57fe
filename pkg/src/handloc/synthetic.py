"""Synthetic scanned-document generator for tests and demos.

Pages mix ruled tables, rows of printed-like glyphs (with an OCR sidecar
listing every word) and smooth pen scribbles that serve as the handwriting
ground truth.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple

import numpy as np

from .geometry import BBox
from .imageops.hough import HoughLine
from .imageops.io import write_image
from .preprocess import OcrWord

PAGE_W, PAGE_H = 700, 1000
MARGIN = 40
X_HEIGHT = 10
ASCENT = 6
DESCENT = 4
ADVANCE = 8
STROKE = 2
ROW_PITCH = 26
WORD_GAP = 16


@dataclass
class SyntheticDoc:
    image: np.ndarray
    words: List[OcrWord]
    gt_boxes: List[BBox]
    rulings: List[HoughLine]
    ruling_boxes: List[BBox] = field(default_factory=list)
    scribble_mask: np.ndarray = None


def _glyph(rng, canvas, x, baseline, ink):
    """Draw one printed-looking glyph; returns its pixel box (x0, y0, x1, y1)."""
    top = baseline - X_HEIGHT
    kind = rng.integers(0, 6)
    yb = baseline
    y_top = top
    if kind == 0:  # ascender bar
        y_top = top - ASCENT
        canvas[y_top:yb, x:x + STROKE] = ink
    elif kind == 1:  # ring
        canvas[top:yb, x:x + 6] = ink
        canvas[top + STROKE:yb - STROKE, x + STROKE:x + 6 - STROKE] = 1.0
    elif kind == 2:  # arch
        canvas[top:top + STROKE, x:x + 6] = ink
        canvas[top:yb, x:x + STROKE] = ink
        canvas[top:yb, x + 4:x + 6] = ink
    elif kind == 3:  # descender bowl
        yb = baseline + DESCENT
        canvas[top:yb, x:x + STROKE] = ink
        canvas[top:top + STROKE, x:x + 6] = ink
        canvas[top:baseline - 4, x + 4:x + 6] = ink
        canvas[baseline - 5:baseline - 3, x:x + 6] = ink
    elif kind == 4:  # dotted stem
        y_top = top - 4
        canvas[top:yb, x + 2:x + 4] = ink
        canvas[top - 4:top - 2, x + 2:x + 4] = ink
    else:  # half-open bowl
        canvas[top:top + STROKE, x:x + 6] = ink
        canvas[top:yb, x:x + STROKE] = ink
        canvas[yb - STROKE:yb, x:x + 6] = ink
        canvas[top + 4:top + 6, x:x + 6] = ink
    return x, y_top, x + 6, yb


def _word(rng, canvas, x, baseline, n_glyphs, ink):
    boxes = []
    for _ in range(n_glyphs):
        jitter = int(rng.integers(-2, 3))
        boxes.append(_glyph(rng, canvas, x, baseline + jitter, ink))
        x += ADVANCE
    x0 = min(b[0] for b in boxes)
    y0 = min(b[1] for b in boxes)
    x1 = max(b[2] for b in boxes)
    y1 = max(b[3] for b in boxes)
    return x0, y0, x1, y1


def _ocr_entry(rng, box, n_glyphs, pad=2, low_conf_rate=0.1):
    x0, y0, x1, y1 = box
    text = "".join(rng.choice(list(string.ascii_lowercase), size=n_glyphs))
    if rng.random() < low_conf_rate:
        conf = float(rng.uniform(0.3, 0.65))
    else:
        conf = float(rng.uniform(0.75, 0.99))
    bbox = BBox(float(x0 - pad), float(y0 - pad), float(x1 + pad), float(y1 + pad))
    return OcrWord(bbox, text, round(conf, 3))


def _text_row(rng, canvas, words, baseline, x_start, x_end, ink, low_conf_rate):
    x = x_start
    while True:
        n = int(rng.integers(3, 9))
        if x + n * ADVANCE > x_end:
            break
        box = _word(rng, canvas, x, baseline, n, ink)
        words.append(_ocr_entry(rng, box, n, low_conf_rate=low_conf_rate))
        x = box[2] + WORD_GAP + int(rng.integers(0, 8))


def _disc_offsets(radius):
    r = int(np.ceil(radius))
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    keep = dy ** 2 + dx ** 2 <= radius ** 2
    return dy[keep], dx[keep]


def _scribble(rng, shape, x0, y0, w, h, pen=1.5):
    """Boolean mask of a looping pen stroke confined to the given box."""
    t = np.linspace(0.0, 1.0, 4000)
    loops = rng.uniform(6.0, 12.0)
    amp_x = rng.uniform(0.05, 0.12) * w
    ph = rng.uniform(0, 2 * np.pi, size=3)
    xs = t * (w - 2 * amp_x) + amp_x + amp_x * np.cos(2 * np.pi * loops * t + ph[0])
    # each loop gets its own height, like letters of a signature
    n_loops = int(np.ceil(loops)) + 1
    heights = rng.uniform(0.15, 1.0, size=n_loops)
    env = np.interp(t * loops, np.arange(n_loops), heights)
    ys = h / 2 + (h / 2 - pen - 1) * env * np.sin(2 * np.pi * loops * t + ph[2])
    px = np.rint(x0 + xs).astype(int)
    py = np.rint(y0 + ys).astype(int)
    mask = np.zeros(shape, dtype=bool)
    dy, dx = _disc_offsets(pen)
    yy = np.clip((py[:, None] + dy[None, :]).ravel(), 0, shape[0] - 1)
    xx = np.clip((px[:, None] + dx[None, :]).ravel(), 0, shape[1] - 1)
    mask[yy, xx] = True
    return mask


def _mask_box(mask) -> BBox:
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return BBox(float(cols[0]), float(rows[0]), float(cols[-1] + 1), float(rows[-1] + 1))


def _free_spans(lo, hi, blocked, pad):
    """Sub-intervals of [lo, hi) avoiding every blocked coordinate by ``pad``."""
    spans = []
    cur = lo
    for b in sorted(blocked):
        if b - pad > cur:
            spans.append((cur, min(b - pad, hi)))
        cur = max(cur, b + pad)
    if cur < hi:
        spans.append((cur, hi))
    return [(a, b) for a, b in spans if b > a]


def generate_document(rng, width: int = PAGE_W, height: int = PAGE_H,
                      noise: float = 0.0005, low_conf_rate: float = 0.1) -> SyntheticDoc:
    canvas = np.ones((height, width))
    words: List[OcrWord] = []
    gt: List[BBox] = []
    scribble_mask = np.zeros((height, width), dtype=bool)
    rulings: List[HoughLine] = []
    ruling_boxes: List[BBox] = []
    text_ink = float(rng.uniform(0.0, 0.15))

    n_cols = int(rng.integers(3, 5))
    col_x = np.linspace(MARGIN, width - MARGIN - STROKE, n_cols + 1).astype(int)
    blocks = ["text", "table", "scribble", "text", "scribble"]
    if rng.random() < 0.5:
        blocks = ["text", "scribble", "table", "text", "scribble"]
    y = MARGIN
    for kind in blocks:
        if kind == "text":
            for _ in range(int(rng.integers(2, 5))):
                y += ROW_PITCH
                if y + DESCENT + MARGIN > height:
                    break
                _text_row(rng, canvas, words, y, MARGIN + int(rng.integers(0, 24)),
                          width - MARGIN, text_ink, low_conf_rate)
            y += 20
        elif kind == "table":
            n_rows = int(rng.integers(9, 13))
            row_h = 32
            if y + n_rows * row_h + MARGIN > height:
                continue
            top = y
            line_ink = float(rng.uniform(0.0, 0.2))
            for k in range(n_rows + 1):
                yy = top + k * row_h
                canvas[yy:yy + STROKE, col_x[0]:col_x[-1] + STROKE] = line_ink
                rulings.append(HoughLine(yy + (STROKE - 1) / 2, 90.0, 0))
                ruling_boxes.append(BBox(col_x[0], yy, col_x[-1] + STROKE, yy + STROKE))
            bottom = top + n_rows * row_h + STROKE
            for xx in col_x:
                canvas[top:bottom, xx:xx + STROKE] = line_ink
                rulings.append(HoughLine(xx + (STROKE - 1) / 2, 0.0, 0))
                ruling_boxes.append(BBox(xx, top, xx + STROKE, bottom))
            for k in range(n_rows):
                baseline = top + k * row_h + 21
                for c in range(n_cols):
                    cell_w = col_x[c + 1] - col_x[c]
                    n = int(rng.integers(2, max(3, min(8, (cell_w - 24) // ADVANCE))))
                    if rng.random() < 0.8:
                        box = _word(rng, canvas, col_x[c] + 8, baseline, n, text_ink)
                        words.append(_ocr_entry(rng, box, n, low_conf_rate=0.0))
            y = bottom + 24
        else:
            band_h = int(rng.integers(60, 90))
            if y + band_h + MARGIN > height:
                continue
            y += 10
            spans = _free_spans(MARGIN, width - MARGIN, [x + STROKE / 2 for x in col_x], pad=10)
            label_end = MARGIN
            if rng.random() < 0.5:
                n = int(rng.integers(4, 9))
                box = _word(rng, canvas, MARGIN + 4, y + band_h // 2 + 5, n, text_ink)
                words.append(_ocr_entry(rng, box, n, low_conf_rate=0.0))
                label_end = box[2] + 30
            spans = [(max(a, label_end), b) for a, b in spans if b - max(a, label_end) >= 110]
            n_scribbles = min(len(spans), int(rng.integers(1, 3)))
            picks = rng.choice(len(spans), size=n_scribbles, replace=False) if n_scribbles else []
            for idx in sorted(picks):
                a, b = spans[idx]
                w = int(rng.integers(100, min(240, b - a) + 1))
                x0 = int(rng.integers(a, b - w + 1))
                h = int(rng.integers(max(36, band_h - 30), band_h))
                m = _scribble(rng, canvas.shape, x0, y, w, h)
                canvas[m] = np.minimum(canvas[m], float(rng.uniform(0.05, 0.3)))
                scribble_mask |= m
                box = _mask_box(m)
                gt.append(box)
                if rng.random() < 0.3:
                    words.append(OcrWord(box, "~", round(float(rng.uniform(0.1, 0.5)), 3)))
            y += band_h + 20

    if noise > 0:
        hits = rng.random(canvas.shape) < noise
        canvas[hits] = rng.uniform(0.0, 0.3, size=int(hits.sum()))
    return SyntheticDoc(canvas, words, gt, rulings, ruling_boxes, scribble_mask)


def ocr_sidecar(image_id: str, words) -> dict:
    return {
        "image_id": image_id,
        "words": [{"bbox": w.bbox.to_xywh(), "text": w.text, "conf": w.confidence} for w in words],
    }


def write_corpus(out_dir, n: int = 20, seed: int = 0, width: int = PAGE_W, height: int = PAGE_H) -> Path:
    """Write ``n`` synthetic pages with OCR sidecars and a manifest; returns the manifest path."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "ocr").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    images, annotations = [], []
    for i in range(n):
        image_id = f"doc_{i:04d}"
        doc = generate_document(rng, width, height)
        write_image(out / "images" / f"{image_id}.png", doc.image)
        with open(out / "ocr" / f"{image_id}.json", "w", encoding="utf-8") as fh:
            json.dump(ocr_sidecar(image_id, doc.words), fh, indent=1)
            fh.write("\n")
        images.append({
            "id": image_id,
            "file": f"images/{image_id}.png",
            "width": width,
            "height": height,
            "ocr": f"ocr/{image_id}.json",
        })
        annotations.extend({"image_id": image_id, "bbox": b.to_xywh()} for b in doc.gt_boxes)
    manifest = out / "manifest.json"
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump({"images": images, "annotations": annotations}, fh, indent=2)
        fh.write("\n")
    return manifest


def line_edge_map(shape: Tuple[int, int], lines, half_width: float = 0.5) -> np.ndarray:
    """Rasterise infinite lines ``(r, theta_deg)`` into a binary edge map."""
    h, w = shape
    ys, xs = np.mgrid[0:h, 0:w]
    out = np.zeros(shape)
    for r, theta in lines:
        t = np.deg2rad(theta)
        out[np.abs(xs * np.cos(t) + ys * np.sin(t) - r) <= half_width] = 1.0
    return out
