"""Command-line entry point: ``handloc <subcommand> ...``.

Exit codes: 0 success, 2 input validation, 3 I/O, 4 configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import report as report_mod
from .dataset import (
    PredictionRecord,
    load_manifest,
    load_predictions,
    predictions_to_list,
    split_dataset,
    write_json,
)
from .detector import Detection, DetectorConfig, detect, postprocess_detections
from .errors import ConfigError, HandlocError, InputValidationError
from .imageops import read_image, write_image
from .preprocess import (
    HoughConfig,
    box_to_model,
    fuse_channels,
    load_ocr_sidecar,
    make_pre_plane,
    parse_variant,
    resize_to_model,
)
from .synthetic import write_corpus
from .visualize import render_overlay

log = logging.getLogger("handloc")


def _words_for(manifest, entry):
    path = manifest.ocr_path(entry)
    return load_ocr_sidecar(path) if path is not None else []


def _check_size(entry, img):
    h, w = img.shape
    if (w, h) != (entry.width, entry.height):
        raise InputValidationError(
            f"image {entry.image_id!r}: file is {w}x{h}, manifest says {entry.width}x{entry.height}")


def _plane_name(term: str) -> str:
    return term.replace("-", "_neg")


def cmd_preprocess(args) -> int:
    terms = parse_variant(args.variant)
    manifest = load_manifest(args.manifest)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    index = {"variant": "/".join(terms), "size": args.size, "images": []}
    for entry in manifest.entries:
        img = read_image(manifest.image_path(entry))
        _check_size(entry, img)
        pre = img
        if any(t.startswith("pre") for t in terms):
            pre = make_pre_plane(img, _words_for(manifest, entry))
        stack = fuse_channels(img, pre, args.variant)
        files = []
        for term, plane in zip(terms, stack.planes):
            name = f"{entry.image_id}.{_plane_name(term)}.png"
            write_image(out / name, resize_to_model(plane, args.size))
            files.append(name)
        index["images"].append({
            "id": entry.image_id,
            "planes": files,
            "boxes": [box_to_model(b, entry.width, entry.height, args.size).to_xywh() for b in entry.gt_boxes],
        })
        log.info("preprocessed %s", entry.image_id)
    write_json(out / "index.json", index)
    return 0


def _detect_one(job):
    image_path, ocr_path, cfg_dict, image_id = job
    cfg = DetectorConfig.from_dict(cfg_dict)
    img = read_image(image_path)
    words = load_ocr_sidecar(ocr_path) if ocr_path else []
    return [PredictionRecord(image_id, d.bbox, d.confidence) for d in detect(img, words, cfg)]


def cmd_detect(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = DetectorConfig.load(args.config) if args.config else DetectorConfig()
    cfg_dict = cfg.to_dict()
    jobs = [
        (str(manifest.image_path(e)), manifest.ocr_path(e) and str(manifest.ocr_path(e)), cfg_dict, e.image_id)
        for e in manifest.entries
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            per_image = list(pool.map(_detect_one, jobs))
    else:
        per_image = [_detect_one(j) for j in jobs]
    records = [r for recs in per_image for r in recs]
    write_json(args.out, predictions_to_list(records))
    log.info("wrote %d detections for %d images", len(records), len(jobs))
    return 0


def cmd_postprocess(args) -> int:
    records = load_predictions(args.inp)
    by_image = {}
    for r in records:
        by_image.setdefault(r.image_id, []).append(Detection(r.bbox, r.score))
    kept = []
    for image_id, dets in by_image.items():
        for d in postprocess_detections(dets, args.conf, args.containment):
            kept.append(PredictionRecord(image_id, d.bbox, d.confidence))
    write_json(args.out, predictions_to_list(kept))
    return 0


def cmd_evaluate(args) -> int:
    if not 0 < args.bq_cap <= 1:
        raise ConfigError(f"--bq-cap must lie in (0, 1], got {args.bq_cap}")
    manifest = load_manifest(args.manifest)
    preds = load_predictions(args.pred, manifest)
    rep = report_mod.run_evaluate(
        manifest, preds, args.bq_max_boxes, args.bq_cap,
        strict=args.strict, loose=args.loose, split=args.split, workers=args.workers,
    )
    text = report_mod.dumps(rep)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.table:
        sys.stdout.write(report_mod.format_table(rep))
    elif not args.out:
        sys.stdout.write(text)
    return 0


def cmd_visualize(args) -> int:
    manifest = load_manifest(args.manifest)
    preds = load_predictions(args.pred, manifest) if args.pred else []
    grouped = {}
    for r in preds:
        grouped.setdefault(r.image_id, []).append(r.bbox)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for entry in manifest.entries:
        img = read_image(manifest.image_path(entry))
        render_overlay(img, entry.gt_boxes, grouped.get(entry.image_id, []), out / f"{entry.image_id}.png")
    return 0


def cmd_split(args) -> int:
    try:
        counts = tuple(int(c) for c in args.counts.split(","))
    except ValueError:
        raise ConfigError(f"--counts must be comma-separated integers, got {args.counts!r}") from None
    manifest = load_manifest(args.manifest)
    result = split_dataset(manifest, args.seed, counts)
    out = Path(args.out)
    doc = result.to_dict()
    # rebase file references onto the new manifest's directory
    base = out.resolve().parent
    for rec in doc["images"]:
        for key in ("file", "ocr"):
            if key in rec:
                rec[key] = os.path.relpath((manifest.root / rec[key]).resolve(), base)
    write_json(out, doc)
    return 0


def cmd_gen_synthetic(args) -> int:
    path = write_corpus(args.out, n=args.n, seed=args.seed)
    log.info("wrote %s", path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="handloc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("preprocess", help="build fused model-input planes")
    s.add_argument("--variant", required=True)
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--size", type=int, default=768)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("detect", help="run the heuristic handwriting detector")
    s.add_argument("--manifest", required=True)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("postprocess", help="confidence filter and containment suppression")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--conf", type=float, default=0.8)
    s.add_argument("--containment", type=float, default=0.9)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_postprocess)

    s = sub.add_parser("evaluate", help="score predictions against ground truth")
    s.add_argument("--manifest", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--bq-max-boxes", type=int, default=3)
    s.add_argument("--bq-cap", type=float, default=0.5)
    s.add_argument("--strict", type=float, default=0.8)
    s.add_argument("--loose", type=float, default=0.5)
    s.add_argument("--split", choices=("train", "val", "test"))
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.add_argument("--table", action="store_true")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("visualize", help="draw ground truth and predictions")
    s.add_argument("--manifest", required=True)
    s.add_argument("--pred")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_visualize)

    s = sub.add_parser("split", help="seeded train/val/test assignment")
    s.add_argument("--manifest", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--counts", default="600,198,200")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("gen-synthetic", help="write a synthetic test corpus")
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_gen_synthetic)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except HandlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
