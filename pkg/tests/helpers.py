"""File fixtures shared by the CLI and acceptance tests."""

import json

import numpy as np

from handloc.imageops import write_image


def write_manifest(tmp_path, gt, sizes=None, images=False):
    """``gt`` maps image id to a list of [x, y, w, h] boxes."""
    recs, anns = [], []
    for image_id, boxes in gt.items():
        w, h = (sizes or {}).get(image_id, (200, 200))
        recs.append({"id": image_id, "file": f"{image_id}.png", "width": w, "height": h})
        anns.extend({"image_id": image_id, "bbox": b} for b in boxes)
        if images:
            write_image(tmp_path / f"{image_id}.png", np.ones((h, w)))
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"images": recs, "annotations": anns}))
    return path


def write_predictions(tmp_path, preds, name="preds.json"):
    path = tmp_path / name
    path.write_text(json.dumps(preds))
    return path


def bq_fixture(tmp_path):
    """Four images scoring AP80 = 0, 0, 1, 1 where the first two carry 4 boxes."""
    gt = {f"im{i}": [[10, 10, 40, 40]] for i in range(4)}
    preds = []
    for i in range(2):
        preds += [{"image_id": f"im{i}", "bbox": [100 + 20 * k, 150, 10, 10], "score": 0.9} for k in range(4)]
    for i in (2, 3):
        preds.append({"image_id": f"im{i}", "bbox": [10, 10, 40, 40], "score": 0.9})
    return write_manifest(tmp_path, gt), write_predictions(tmp_path, preds)
