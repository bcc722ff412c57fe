"""Dataset evaluation and report rendering."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from typing import List, Sequence

from .dataset import DatasetManifest, PredictionRecord, group_predictions
from .metrics import (
    LOOSE_THRESHOLD,
    STRICT_THRESHOLD,
    AggregateReport,
    ImageScore,
    aggregate,
    evaluate_image,
    mark_bad_quality,
)

COLUMNS = (
    ("AP_FP_80", "ap_fp_80"),
    ("AP_FP_80*", "ap_fp_80_star"),
    ("AP_FP_80+", "ap_fp_80_plus"),
    ("AP_FP_50", "ap_fp_50"),
    ("GIoU", "giou"),
)


def percent(value) -> float:
    """A fraction as a percentage rounded to one decimal, as in result tables."""
    if value is None:
        return None
    return float(f"{value * 100:.1f}")


def _score_one(job):
    image_id, pred, gt, strict, loose = job
    return evaluate_image(pred, gt, image_id, strict, loose)


def score_images(manifest: DatasetManifest, predictions: Sequence[PredictionRecord],
                 strict: float = STRICT_THRESHOLD, loose: float = LOOSE_THRESHOLD,
                 split: str = None, workers: int = 1) -> List[ImageScore]:
    grouped = group_predictions(predictions)
    jobs = [
        (e.image_id, [r.bbox for r in grouped.get(e.image_id, [])], list(e.gt_boxes), strict, loose)
        for e in manifest.entries
        if split is None or e.split == split
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_score_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_score_one(j) for j in jobs]


def run_evaluate(manifest: DatasetManifest, predictions: Sequence[PredictionRecord],
                 bq_max_boxes: int = 3, bq_cap: float = 0.5,
                 strict: float = STRICT_THRESHOLD, loose: float = LOOSE_THRESHOLD,
                 split: str = None, workers: int = 1) -> dict:
    """Per-image scores plus the aggregate, as a JSON-ready dict."""
    scores = score_images(manifest, predictions, strict, loose, split, workers)
    scores = mark_bad_quality(scores, bq_max_boxes, bq_cap)
    agg = aggregate(scores)
    return {
        "settings": {
            "strict_threshold": strict,
            "loose_threshold": loose,
            "bq_max_boxes": bq_max_boxes,
            "bq_cap": bq_cap,
            "split": split,
        },
        "aggregate": {label: percent(getattr(agg, key)) for label, key in COLUMNS}
        | {"n_images": agg.n_images, "n_bad_quality": agg.n_bad_quality},
        "aggregate_fraction": asdict(agg),
        "images": [asdict(s) for s in scores],
    }


def report_scores(report: dict) -> List[ImageScore]:
    return [ImageScore(**rec) for rec in report["images"]]


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def format_table(report: dict) -> str:
    """Fixed-width text rendering of a report (percentages, one decimal)."""
    agg = report["aggregate"]
    lines = []
    head = f"{'image':<24}" + "".join(f"{label:>11}" for label, _ in COLUMNS[:1] + COLUMNS[3:]) + f"{'#pred':>7}{'#gt':>5}{'BQ':>4}"
    lines.append(head)
    lines.append("-" * len(head))
    for rec in report["images"]:
        vals = (rec["ap_fp_80"], rec["ap_fp_50"], rec["giou"])
        lines.append(
            f"{rec['image_id']:<24}"
            + "".join(f"{percent(v):>11.1f}" for v in vals)
            + f"{rec['n_pred']:>7}{rec['n_gt']:>5}{'*' if rec['bad_quality'] else '':>4}"
        )
    lines.append("")
    lines.append("".join(f"{label:>11}" for label, _ in COLUMNS))
    lines.append("".join(f"{'n/a' if agg[label] is None else format(agg[label], '.1f'):>11}" for label, _ in COLUMNS))
    lines.append(f"images: {agg['n_images']}  bad-quality: {agg['n_bad_quality']}")
    return "\n".join(lines) + "\n"
