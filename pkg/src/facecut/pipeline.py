"""Batch orchestration: mask building, augmentation runs and previews.

Every per-image job draws its randomness from a generator seeded by
(seed, image_id), so a run's outputs are byte-identical regardless of
worker count or scheduling order. Failures are isolated per image and
collected into the run report instead of aborting the batch.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from . import io
from .cutout import (
    AugmentOutcome,
    CutoutConfig,
    face_cutout,
)
from .errors import DimMismatchError
from .simmask import DEFAULT_SSIM_THRESHOLD, difference_mask
from .split import FAKE

RESIZE_DEFAULT = 224


@dataclass(frozen=True)
class MaskJob:
    video_id: str
    frame_id: int
    real_path: str
    fake_path: str


@dataclass(frozen=True)
class JobConfig:
    manifest: str
    output_dir: str
    landmarks_dir: str | None = None
    masks_dir: str | None = None
    cutout: CutoutConfig = field(default_factory=CutoutConfig)
    workers: int = 1
    ssim_threshold: float = DEFAULT_SSIM_THRESHOLD
    resize_to: int = 0

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _map_jobs(fn, items, workers: int):
    """Run fn over items, preserving input order in the results."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------- difference masks ----------


def mask_filename(video_id: str, frame_id: int) -> str:
    return f"{video_id}_{frame_id}.png"


def build_masks(
    jobs: list[MaskJob],
    out_dir,
    ssim_threshold: float = DEFAULT_SSIM_THRESHOLD,
    workers: int = 1,
) -> dict:
    """Write one 0/255 PNG difference mask per (real, fake) frame pair.

    Pairs whose frames disagree in size are skipped and reported; the
    surviving masks are listed in index.json. Output bytes do not depend
    on the worker count.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run(job: MaskJob):
        try:
            real = io.read_image(job.real_path)
            fake = io.read_image(job.fake_path)
            mask = difference_mask(real, fake, ssim_threshold=ssim_threshold)
        except (DimMismatchError, OSError, ValueError) as exc:
            return job, None, f"{type(exc).__name__}: {exc}"
        name = mask_filename(job.video_id, job.frame_id)
        io.write_mask(out_dir / name, mask)
        return job, name, None

    results = _map_jobs(run, jobs, workers)
    index = {}
    failures = []
    for job, name, error in results:
        if error is None:
            index[io.mask_key(job.video_id, job.frame_id)] = name
        else:
            failures.append(
                {"video_id": job.video_id, "frame_id": job.frame_id, "error": error}
            )
    io.write_mask_index(out_dir, index)
    return {
        "total": len(jobs),
        "written": len(index),
        "failed": len(failures),
        "failures": failures,
    }


def mask_jobs_from_manifest(frames: list[io.FrameRecord]) -> tuple[list[MaskJob], list[str]]:
    """Pair each fake frame with the same frame of its source video."""
    real_paths = {
        (rec.video_id, rec.frame_id): rec.path for rec in frames if rec.label != FAKE
    }
    jobs = []
    unmatched = []
    for rec in frames:
        if rec.label != FAKE:
            continue
        key = (rec.source_video_id, rec.frame_id)
        if key in real_paths:
            jobs.append(
                MaskJob(rec.video_id, rec.frame_id, real_paths[key], rec.path)
            )
        else:
            unmatched.append(rec.image_id)
    return jobs, unmatched


# ---------- preprocessing ----------


def resize_pad(image, target: int = RESIZE_DEFAULT) -> np.ndarray:
    """Isotropic resize onto a target x target canvas with zero padding.

    The scale is min(target/w, target/h) with bilinear resampling; the
    scaled content is centered and the margins stay black.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    img = np.asarray(image, dtype=np.uint8)
    h, w = img.shape[:2]
    if h == 0 or w == 0:
        raise ValueError("empty image")
    scale = min(target / w, target / h)
    nw, nh = int(round(w * scale)), int(round(h * scale))
    if (nw, nh) != (w, h):
        pil = Image.fromarray(img).resize((nw, nh), Image.BILINEAR)
        content = np.asarray(pil)
    else:
        content = img
    canvas = np.zeros((target, target) + img.shape[2:], dtype=np.uint8)
    x0 = (target - nw) // 2
    y0 = (target - nh) // 2
    canvas[y0 : y0 + nh, x0 : x0 + nw] = content
    return canvas


# ---------- augmentation runs ----------


def _augment_one(
    rec: io.FrameRecord,
    job: JobConfig,
    mask_index: dict[str, str] | None,
) -> dict:
    result = {
        "image_id": rec.image_id,
        "applied": False,
        "strategy": None,
        "rho": None,
        "warning": None,
        "error": None,
    }
    try:
        image = io.read_image(rec.path)
        lm_path = io.landmark_sidecar_path(rec.path, job.landmarks_dir)
        if not lm_path.exists():
            result["error"] = f"MissingLandmarks: {lm_path}"
            return result
        landmarks = io.read_landmarks(lm_path)

        diff = None
        if rec.label == FAKE and mask_index is not None:
            name = mask_index.get(io.mask_key(rec.video_id, rec.frame_id))
            if name is None:
                result["warning"] = "MissingMask: augmenting without diff gate"
            else:
                diff = io.read_mask(Path(job.masks_dir) / name)

        outcome: AugmentOutcome = face_cutout(
            image, landmarks, diff, job.cutout, rec.image_id
        )
        out_image = outcome.image
        if job.resize_to:
            out_image = resize_pad(out_image, job.resize_to)
        io.write_image(Path(job.output_dir) / Path(rec.path).name, out_image)
        result["applied"] = outcome.applied
        if outcome.region is not None:
            result["strategy"] = outcome.region.strategy.value
            result["rho"] = outcome.region.rho
    except Exception as exc:  # isolate per-image crashes into the report
        result["error"] = f"{type(exc).__name__}: {exc}"
    return result


def run_augment(job: JobConfig) -> dict:
    """Augment every manifest frame and write a deterministic report.

    Returns the report dict; the same content is written to
    report.json in the output directory. Images that fail (missing
    landmarks, unreadable files) are skipped and listed under failures.
    """
    frames = io.read_frame_manifest(job.manifest)
    mask_index = None
    if job.masks_dir is not None:
        mask_index = io.read_mask_index(job.masks_dir)
    Path(job.output_dir).mkdir(parents=True, exist_ok=True)

    results = _map_jobs(
        lambda rec: _augment_one(rec, job, mask_index), frames, job.workers
    )

    strategy_counts: dict[str, int] = {}
    rhos = []
    failures = []
    warnings = []
    applied = 0
    for res in results:
        if res["error"] is not None:
            failures.append({"image_id": res["image_id"], "error": res["error"]})
            continue
        if res["warning"] is not None:
            warnings.append({"image_id": res["image_id"], "warning": res["warning"]})
        if res["applied"]:
            applied += 1
            strategy_counts[res["strategy"]] = (
                strategy_counts.get(res["strategy"], 0) + 1
            )
            if res["rho"] is not None:
                rhos.append(res["rho"])

    processed = len(frames) - len(failures)
    report = {
        "total": len(frames),
        "processed": processed,
        "applied": applied,
        "passthrough": processed - applied,
        "failed": len(failures),
        "applied_fraction": applied / processed if processed else 0.0,
        "strategy_counts": dict(sorted(strategy_counts.items())),
        "mean_rho": float(np.mean(rhos)) if rhos else None,
        "warnings": warnings,
        "failures": failures,
        "seed": job.cutout.seed,
    }
    report_path = Path(job.output_dir) / "report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


# ---------- previews ----------


def _outline(mask: np.ndarray) -> np.ndarray:
    eroded = ndimage.binary_erosion(mask, structure=np.ones((3, 3), dtype=bool))
    return mask & ~eroded


def preview(
    image,
    landmarks,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
    image_id: str = "preview",
) -> np.ndarray:
    """Three-panel composite: original, mask overlay, augmented.

    The middle panel tints difference pixels red and traces the chosen
    region's outline in green; with no difference mask it stays an
    untouched copy of the original.
    """
    img = np.asarray(image, dtype=np.uint8)
    outcome = face_cutout(img, landmarks, diff, cfg, image_id)

    overlay = img.copy()
    if diff is not None:
        d = np.asarray(diff, dtype=bool)
        tint = overlay[d].astype(np.float64)
        tint = 0.5 * tint + 0.5 * np.array([255.0, 0.0, 0.0])
        overlay[d] = np.round(tint).astype(np.uint8)
        if outcome.region is not None:
            overlay[_outline(outcome.region.raster)] = (0, 255, 0)

    gap = np.full((img.shape[0], 4, 3), 32, dtype=np.uint8)
    return np.concatenate([img, gap, overlay, gap, outcome.image], axis=1)
