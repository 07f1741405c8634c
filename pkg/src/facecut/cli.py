"""Command line entry points.

Subcommands:
    mask     build SSIM difference masks for every fake frame
    augment  run the cutout augmentation over a manifest
    cluster  cluster face encodings and propagate to fakes
    split    produce a leak-free train/val/test plan or k folds
    audit    check an existing plan for cluster leaks
    eval     score frame predictions at the video level
    preview  render a one-image before/after composite

Exit codes: 0 on success, 2 when some items failed but the run
completed, 1 on fatal configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import clustering, io, metrics, pipeline, split
from .cutout import CutoutConfig, FillMode
from .errors import FaceCutError
from .simmask import DEFAULT_SSIM_THRESHOLD

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


def _add_cutout_flags(p: argparse.ArgumentParser, default_p: float = 0.5) -> None:
    p.add_argument("--p", type=float, default=default_p,
                   help="probability a cutout is applied per image")
    p.add_argument("--gamma-h", type=float, default=0.3,
                   help="max tolerated overlap with the difference mask")
    p.add_argument("--fill", choices=[m.value for m in FillMode], default="random",
                   help="what replaces removed pixels")
    p.add_argument("--max-attempts", type=int, default=5,
                   help="random polygon draws for the subset strategy")
    p.add_argument("--seed", type=int, default=0)


def _cutout_config(args) -> CutoutConfig:
    return CutoutConfig(
        p=args.p,
        gamma_h=args.gamma_h,
        fill=FillMode(args.fill),
        max_attempts=args.max_attempts,
        seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facecut",
        description="Occlusion augmentation and identity-aware splits "
                    "for deepfake detection datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="build difference masks from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="mask output directory")
    p.add_argument("--ssim-threshold", type=float, default=DEFAULT_SSIM_THRESHOLD)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("augment", help="apply cutout augmentation over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="augmented image directory")
    p.add_argument("--landmarks-dir", default=None,
                   help="sidecar directory; defaults to next to each image")
    p.add_argument("--masks-dir", default=None,
                   help="difference mask directory with index.json")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resize", type=int, default=0,
                   help="pad-resize outputs to this square size (0 = off)")
    _add_cutout_flags(p)

    p = sub.add_parser("cluster", help="cluster face encodings into identities")
    p.add_argument("--embeddings", required=True, help="JSONL of frame encodings")
    p.add_argument("--out", required=True, help="clusters CSV path")
    p.add_argument("--manifest", default=None,
                   help="frame manifest; fakes inherit their source's cluster")
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--min-pts", type=int, default=5)
    p.add_argument("--pca-out", default=None,
                   help="optional CSV of 2-d projections per frame")

    p = sub.add_parser("split", help="cluster-level dataset split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--clusters", required=True, help="clusters CSV from 'cluster'")
    p.add_argument("--out", required=True, help="plan CSV path")
    p.add_argument("--ratios", default="0.8,0.1,0.1",
                   help="train,val,test fractions, must sum to 1")
    p.add_argument("--kfold", type=int, default=0,
                   help="emit fold indices instead of a ratio split")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("audit", help="flag clusters spanning multiple splits")
    p.add_argument("--manifest", required=True)
    p.add_argument("--clusters", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--out", default=None, help="optional JSON report path")

    p = sub.add_parser("eval", help="video-level metrics from frame predictions")
    p.add_argument("--predictions", required=True, help="CSV video_id,frame_id,prob")
    p.add_argument("--labels", required=True, help="CSV video_id,label")
    p.add_argument("--out", default=None, help="optional JSON report path")

    p = sub.add_parser("preview", help="before/after composite for one image")
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", default=None,
                   help="sidecar JSON; defaults to <image>.landmarks.json")
    p.add_argument("--mask", default=None, help="difference mask PNG")
    p.add_argument("--out", required=True)
    _add_cutout_flags(p, default_p=1.0)

    return parser


# ---------- command bodies ----------


def _cmd_mask(args) -> int:
    frames = io.read_frame_manifest(args.manifest)
    jobs, unmatched = pipeline.mask_jobs_from_manifest(frames)
    for image_id in unmatched:
        print(f"[WARN] no source frame for {image_id}", file=sys.stderr)
    report = pipeline.build_masks(
        jobs, args.out, ssim_threshold=args.ssim_threshold, workers=args.workers
    )
    print(f"[INFO] wrote {report['written']}/{report['total']} masks to {args.out}")
    for failure in report["failures"]:
        print(f"[WARN] {failure['video_id']}:{failure['frame_id']} "
              f"{failure['error']}", file=sys.stderr)
    return EXIT_PARTIAL if (report["failed"] or unmatched) else EXIT_OK


def _cmd_augment(args) -> int:
    job = pipeline.JobConfig(
        manifest=args.manifest,
        output_dir=args.out,
        landmarks_dir=args.landmarks_dir,
        masks_dir=args.masks_dir,
        cutout=_cutout_config(args),
        workers=args.workers,
        resize_to=args.resize,
    )
    report = pipeline.run_augment(job)
    print(f"[INFO] {report['applied']}/{report['processed']} images augmented, "
          f"{report['failed']} failed")
    for failure in report["failures"]:
        print(f"[WARN] {failure['image_id']}: {failure['error']}", file=sys.stderr)
    return EXIT_PARTIAL if report["failed"] else EXIT_OK


def _cmd_cluster(args) -> int:
    embeddings = io.read_embeddings(args.embeddings)
    params = clustering.DbscanParams(eps=args.eps, min_pts=args.min_pts)
    assignment = clustering.video_clusters(embeddings, params)
    if args.manifest:
        frames = io.read_frame_manifest(args.manifest)
        manifest = io.manifest_from_frames(frames)
        assignment = clustering.propagate_to_fakes(assignment, manifest.records)
    io.write_clusters(args.out, assignment)
    n_clusters = len({c for c in assignment.values() if c != clustering.NOISE})
    n_noise = sum(1 for c in assignment.values() if c == clustering.NOISE)
    print(f"[INFO] {len(assignment)} videos in {n_clusters} clusters "
          f"({n_noise} noise)")
    if args.pca_out:
        vectors = np.stack([e.vector for e in embeddings])
        coords = clustering.pca_2d(vectors)
        rows = [
            (e.video_id, float(c[0]), float(c[1]))
            for e, c in zip(embeddings, coords)
        ]
        io.write_pca(args.pca_out, rows)
        print(f"[INFO] wrote projections to {args.pca_out}")
    return EXIT_OK


def _cmd_split(args) -> int:
    frames = io.read_frame_manifest(args.manifest)
    clusters = io.read_clusters(args.clusters)
    manifest = io.manifest_from_frames(frames, clusters)
    if args.kfold:
        folds = split.fold_index(manifest, args.kfold, seed=args.seed)
        io.write_plan(args.out, {vid: f"fold:{i}" for vid, i in folds.items()})
        print(f"[INFO] wrote {args.kfold}-fold plan for {len(folds)} videos")
    else:
        ratios = tuple(float(r) for r in args.ratios.split(","))
        plan = split.cluster_split(manifest, ratios, seed=args.seed)
        io.write_plan(args.out, plan.assignment)
        counts = {name: 0 for name in split.SPLIT_NAMES}
        for target in plan.assignment.values():
            counts[target] += 1
        print(f"[INFO] split sizes: {counts}")
    return EXIT_OK


def _cmd_audit(args) -> int:
    frames = io.read_frame_manifest(args.manifest)
    clusters = io.read_clusters(args.clusters)
    manifest = io.manifest_from_frames(frames, clusters)
    plan = io.read_plan(args.plan)
    if any(v.startswith("fold:") for v in plan.assignment.values()):
        # audit each fold's validation side against the rest
        report = {"folds": {}, "ok": True}
        fold_ids = sorted({v for v in plan.assignment.values()})
        for fold in fold_ids:
            view = split.SplitPlan(
                assignment={
                    vid: (split.VAL if v == fold else split.TRAIN)
                    for vid, v in plan.assignment.items()
                }
            )
            audit = split.leak_audit(view, manifest)
            report["folds"][fold] = list(audit.leaks)
            report["ok"] = report["ok"] and audit.ok
    else:
        audit = split.leak_audit(plan, manifest)
        report = {"ok": audit.ok, "leaks": list(audit.leaks)}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"[INFO] leak audit: {'clean' if report['ok'] else 'LEAKS FOUND'}")
    return EXIT_OK if report["ok"] else EXIT_PARTIAL


def _cmd_eval(args) -> int:
    frames = io.read_predictions(args.predictions)
    labels = io.read_labels(args.labels)
    per_video = metrics.aggregate_by_video(frames)
    missing = sorted(set(per_video) - set(labels))
    if missing:
        print(f"[ERR] no labels for videos: {missing[:5]}", file=sys.stderr)
        return EXIT_FATAL
    scores = [
        metrics.VideoScore(vid, prob, labels[vid])
        for vid, prob in sorted(per_video.items())
    ]
    report = {
        "n_videos": len(scores),
        "log_loss": metrics.log_loss(scores),
        "roc_auc": metrics.roc_auc(scores),
        "average_precision": metrics.average_precision(scores),
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_preview(args) -> int:
    image = io.read_image(args.image)
    lm_path = args.landmarks or io.landmark_sidecar_path(args.image)
    landmarks = io.read_landmarks(lm_path)
    diff = io.read_mask(args.mask) if args.mask else None
    composite = pipeline.preview(
        image, landmarks, diff, _cutout_config(args), image_id=Path(args.image).name
    )
    io.write_image(args.out, composite)
    print(f"[INFO] wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "mask": _cmd_mask,
    "augment": _cmd_augment,
    "cluster": _cmd_cluster,
    "split": _cmd_split,
    "audit": _cmd_audit,
    "eval": _cmd_eval,
    "preview": _cmd_preview,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FaceCutError, ValueError, OSError, KeyError) as exc:
        print(f"[ERR] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
