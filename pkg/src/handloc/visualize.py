"""Overlay rendering: ground truth in green, predictions in red."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from PIL import Image

from .geometry import BoxLike, as_box
from .imageops.io import to_uint8

GREEN = (0, 255, 0)
RED = (255, 0, 0)


def border_mask(shape, box: BoxLike, width: int = 2) -> np.ndarray:
    """Pixels of a ``width``-pixel frame drawn on the inside of ``box``."""
    b = as_box(box)
    h, w = shape
    x0 = min(max(int(math.floor(b.x_min)), 0), w)
    y0 = min(max(int(math.floor(b.y_min)), 0), h)
    x1 = min(max(int(math.ceil(b.x_max)), 0), w)
    y1 = min(max(int(math.ceil(b.y_max)), 0), h)
    mask = np.zeros(shape, dtype=bool)
    if x1 <= x0 or y1 <= y0:
        return mask
    mask[y0:y1, x0:x1] = True
    mask[y0 + width:y1 - width, x0 + width:x1 - width] = False
    return mask


def overlay(img, gt: Sequence[BoxLike], pred: Sequence[BoxLike], width: int = 2) -> np.ndarray:
    """RGB uint8 array; predictions are drawn last so they win on overlap."""
    gray = to_uint8(img)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    for boxes, colour in ((gt, GREEN), (pred, RED)):
        for b in boxes:
            rgb[border_mask(gray.shape, b, width)] = colour
    return rgb


def render_overlay(img, gt: Sequence[BoxLike], pred: Sequence[BoxLike], out_path, width: int = 2) -> None:
    Image.fromarray(overlay(img, gt, pred, width)).save(out_path, format="PNG")
