"""Axis-aligned rectangle geometry.

Boxes use continuous corner coordinates ``(x_min, y_min, x_max, y_max)``.
Region operations treat a list of boxes as the union of its members and
compute areas exactly with a coordinate-compressed sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

__all__ = [
    "BBox",
    "area",
    "intersect",
    "iou",
    "union_area",
    "region_iou",
    "as_box",
]


@dataclass(frozen=True)
class BBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite box coordinates: {coords}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted box: {coords}")

    @classmethod
    def from_xywh(cls, x: float, y: float, w: float, h: float) -> "BBox":
        return cls(float(x), float(y), float(x) + float(w), float(y) + float(h))

    def to_xywh(self) -> list:
        return [self.x_min, self.y_min, self.x_max - self.x_min, self.y_max - self.y_min]

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def is_degenerate(self) -> bool:
        return self.width <= 0 or self.height <= 0

    def __iter__(self):
        return iter((self.x_min, self.y_min, self.x_max, self.y_max))


BoxLike = Union[BBox, Sequence[float]]


def as_box(b: BoxLike) -> BBox:
    """Coerce a ``BBox`` or a 4-sequence of corners into a ``BBox``."""
    if isinstance(b, BBox):
        return b
    x0, y0, x1, y1 = b
    return BBox(float(x0), float(y0), float(x1), float(y1))


def area(b: BoxLike) -> float:
    return as_box(b).area


def intersect(a: BoxLike, b: BoxLike) -> Optional[BBox]:
    """Overlap rectangle of two boxes, or ``None`` if the overlap has zero area."""
    a, b = as_box(a), as_box(b)
    x0 = max(a.x_min, b.x_min)
    y0 = max(a.y_min, b.y_min)
    x1 = min(a.x_max, b.x_max)
    y1 = min(a.y_max, b.y_max)
    if x1 <= x0 or y1 <= y0:
        return None
    return BBox(x0, y0, x1, y1)


def _inter_area(a: BBox, b: BBox) -> float:
    w = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    h = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def iou(a: BoxLike, b: BoxLike) -> float:
    """Intersection over union of two boxes.

    Returns 0 when the union is empty (both boxes degenerate).
    """
    a, b = as_box(a), as_box(b)
    inter = _inter_area(a, b)
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


def union_area(boxes: Iterable[BoxLike]) -> float:
    """Exact area of the union of ``boxes``.

    Sweeps over the compressed x coordinates; inside each slab the covered
    y intervals are merged and measured.
    """
    rects = [as_box(b) for b in boxes]
    rects = [r for r in rects if not r.is_degenerate]
    if not rects:
        return 0.0
    xs = sorted({r.x_min for r in rects} | {r.x_max for r in rects})
    total = 0.0
    for left, right in zip(xs[:-1], xs[1:]):
        spans = sorted(
            (r.y_min, r.y_max) for r in rects if r.x_min <= left and r.x_max >= right
        )
        if not spans:
            continue
        covered = 0.0
        cur_lo, cur_hi = spans[0]
        for lo, hi in spans[1:]:
            if lo > cur_hi:
                covered += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
            elif hi > cur_hi:
                cur_hi = hi
        covered += cur_hi - cur_lo
        total += (right - left) * covered
    return total


def region_iou(pred: Iterable[BoxLike], gt: Iterable[BoxLike]) -> float:
    """IoU between the union region of ``pred`` and the union region of ``gt``.

    Either region being empty gives 0.
    """
    p = [as_box(b) for b in pred]
    g = [as_box(b) for b in gt]
    union = union_area(p + g)
    if union <= 0 or not p or not g:
        return 0.0
    overlaps = [r for r in (intersect(a, b) for a in p for b in g) if r is not None]
    return union_area(overlaps) / union
