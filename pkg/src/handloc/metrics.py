"""Image-level and dataset-level scores for handwriting localization.

AP^FP rewards the fraction of ground-truth boxes that are matched and
multiplies by 0.75 for every unmatched prediction.  A box is matched when
*some* box on the other side overlaps it with IoU strictly above the
threshold; no one-to-one assignment is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

from .errors import ConfigError, InputValidationError
from .geometry import BoxLike, as_box, iou, region_iou

FP_PENALTY = 0.75
BQ_SCORE = 0.35
STRICT_THRESHOLD = 0.8
LOOSE_THRESHOLD = 0.5


@dataclass(frozen=True)
class MatchResult:
    matched_gt: frozenset
    matched_pred: frozenset
    threshold: float


@dataclass(frozen=True)
class ImageScore:
    image_id: str
    ap_fp_80: float
    ap_fp_50: float
    giou: float
    n_pred: int
    n_gt: int
    bad_quality: bool = False


@dataclass(frozen=True)
class AggregateReport:
    ap_fp_80: float
    ap_fp_80_star: float
    ap_fp_80_plus: Optional[float]
    ap_fp_50: float
    giou: float
    n_images: int
    n_bad_quality: int


def match_sets(pred: Sequence[BoxLike], gt: Sequence[BoxLike], threshold: float) -> MatchResult:
    """Indices of GT and predicted boxes that have a partner with IoU > threshold."""
    p = [as_box(b) for b in pred]
    g = [as_box(b) for b in gt]
    matched_gt, matched_pred = set(), set()
    for i, pb in enumerate(p):
        for j, gb in enumerate(g):
            if iou(pb, gb) > threshold:
                matched_pred.add(i)
                matched_gt.add(j)
    return MatchResult(frozenset(matched_gt), frozenset(matched_pred), threshold)


def ap_fp(pred: Sequence[BoxLike], gt: Sequence[BoxLike], threshold: float) -> float:
    m = match_sets(pred, gt, threshold)
    penalty = FP_PENALTY ** (len(pred) - len(m.matched_pred))
    if len(gt) == 0:
        return penalty
    return len(m.matched_gt) / len(gt) * penalty


def evaluate_image(pred: Sequence[BoxLike], gt: Sequence[BoxLike], image_id: str = "",
                   strict: float = STRICT_THRESHOLD, loose: float = LOOSE_THRESHOLD) -> ImageScore:
    """Score one image at the strict (0.8) and loose (0.5) IoU thresholds."""
    return ImageScore(
        image_id=image_id,
        ap_fp_80=ap_fp(pred, gt, strict),
        ap_fp_50=ap_fp(pred, gt, loose),
        giou=region_iou(pred, gt),
        n_pred=len(pred),
        n_gt=len(gt),
    )


def mark_bad_quality(
    scores: Sequence[ImageScore], max_boxes: int = 3, cap: float = 0.5
) -> List[ImageScore]:
    """Flag images with more than ``max_boxes`` predictions as Bad-Quality.

    At most ``floor(cap * n)`` images stay flagged; when the candidates exceed
    that, the ones with the most predictions win, ties going to the smaller
    image id.
    """
    if not 0 < cap <= 1:
        raise ConfigError(f"bad-quality cap must lie in (0, 1], got {cap}")
    limit = math.floor(cap * len(scores) + 1e-12)
    candidates = [i for i, s in enumerate(scores) if s.n_pred > max_boxes]
    candidates.sort(key=lambda i: (-scores[i].n_pred, scores[i].image_id))
    flagged = set(candidates[:limit])
    return [replace(s, bad_quality=i in flagged) for i, s in enumerate(scores)]


def _mean(values):
    return math.fsum(values) / len(values)


def aggregate(scores: Sequence[ImageScore]) -> AggregateReport:
    if not scores:
        raise InputValidationError("cannot aggregate an empty list of image scores")
    ap80 = [s.ap_fp_80 for s in scores]
    star = [BQ_SCORE if s.bad_quality else s.ap_fp_80 for s in scores]
    plus = [s.ap_fp_80 for s in scores if not s.bad_quality]
    return AggregateReport(
        ap_fp_80=_mean(ap80),
        ap_fp_80_star=_mean(star),
        ap_fp_80_plus=_mean(plus) if plus else None,
        ap_fp_50=_mean([s.ap_fp_50 for s in scores]),
        giou=_mean([s.giou for s in scores]),
        n_images=len(scores),
        n_bad_quality=sum(s.bad_quality for s in scores),
    )
