"""File formats shared by the CLI and the batch pipeline.

Formats:
* frame manifest CSV: video_id,frame_id,path,label,source_video_id
* landmark sidecar JSON next to each image (or mirrored into a
  landmarks dir): <image name>.landmarks.json with {"points": [[x, y] * 68]}
* difference masks: 8-bit grayscale PNG, 0/255, plus an index.json
  mapping "video_id:frame_id" to the mask path
* embeddings JSONL: one {"video_id", "frame_id", "embedding"} per line
* clusters CSV: video_id,cluster_id (-1 marks noise)
* split plan CSV: video_id,split
* predictions CSV: video_id,frame_id,prob; labels CSV: video_id,label
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .clustering import FaceEmbedding
from .metrics import FramePrediction
from .split import FAKE, REAL, DatasetManifest, SplitPlan, VideoRecord

MASK_INDEX_NAME = "index.json"


@dataclass(frozen=True)
class FrameRecord:
    video_id: str
    frame_id: int
    path: str
    label: str
    source_video_id: str | None = None

    def __post_init__(self):
        if self.label not in (REAL, FAKE):
            raise ValueError(f"label must be '{REAL}' or '{FAKE}', got {self.label!r}")
        if self.label == FAKE and not self.source_video_id:
            raise ValueError(f"fake frame {self.video_id}/{self.frame_id} has no source")

    @property
    def image_id(self) -> str:
        return f"{self.video_id}:{self.frame_id}"


def mask_key(video_id: str, frame_id: int) -> str:
    return f"{video_id}:{frame_id}"


# ---------- images and masks ----------


def read_image(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def write_image(path, image: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="RGB").save(path)


def read_mask(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("L")) > 127


def write_mask(path, mask: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    data = np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path)


def read_mask_index(masks_dir) -> dict[str, str]:
    index_path = Path(masks_dir) / MASK_INDEX_NAME
    with open(index_path, encoding="utf-8") as fh:
        return json.load(fh)


def write_mask_index(masks_dir, index: dict[str, str]) -> None:
    masks_dir = Path(masks_dir)
    masks_dir.mkdir(parents=True, exist_ok=True)
    with open(masks_dir / MASK_INDEX_NAME, "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------- landmarks ----------


def landmark_sidecar_path(image_path, landmarks_dir=None) -> Path:
    image_path = Path(image_path)
    name = image_path.name + ".landmarks.json"
    if landmarks_dir is not None:
        return Path(landmarks_dir) / name
    return image_path.with_name(name)


def read_landmarks(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    pts = np.asarray(payload["points"], dtype=np.float64)
    if pts.shape != (68, 2):
        raise ValueError(f"{path}: expected 68 [x, y] pairs, got shape {pts.shape}")
    return pts


def write_landmarks(path, points: np.ndarray) -> None:
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape != (68, 2):
        raise ValueError(f"expected (68, 2) landmarks, got {pts.shape}")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"points": pts.tolist()}, fh)
        fh.write("\n")


# ---------- manifests ----------


def read_frame_manifest(path) -> list[FrameRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            source = (row.get("source_video_id") or "").strip() or None
            records.append(
                FrameRecord(
                    video_id=row["video_id"].strip(),
                    frame_id=int(row["frame_id"]),
                    path=row["path"].strip(),
                    label=row["label"].strip().lower(),
                    source_video_id=source,
                )
            )
    return records


def write_frame_manifest(path, records: list[FrameRecord]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "frame_id", "path", "label", "source_video_id"])
        for rec in records:
            writer.writerow(
                [rec.video_id, rec.frame_id, rec.path, rec.label,
                 rec.source_video_id or ""]
            )


def manifest_from_frames(
    frames: list[FrameRecord], clusters: dict[str, int] | None = None
) -> DatasetManifest:
    """Collapse frame rows into per-video records, attaching cluster ids."""
    by_video: dict[str, list[FrameRecord]] = {}
    for rec in frames:
        by_video.setdefault(rec.video_id, []).append(rec)
    records = []
    for video_id, recs in by_video.items():
        labels = {r.label for r in recs}
        if len(labels) != 1:
            raise ValueError(f"video {video_id} mixes labels {sorted(labels)}")
        sources = {r.source_video_id for r in recs}
        if len(sources) != 1:
            raise ValueError(f"video {video_id} mixes source ids")
        cluster_id = -1 if clusters is None else clusters.get(video_id, -1)
        records.append(
            VideoRecord(
                video_id=video_id,
                label=recs[0].label,
                source_video_id=recs[0].source_video_id,
                cluster_id=cluster_id,
                n_frames=len(recs),
            )
        )
    return DatasetManifest(records=records)


# ---------- embeddings, clusters, plans ----------


def read_embeddings(path) -> list[FaceEmbedding]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(
                FaceEmbedding(
                    video_id=str(obj["video_id"]),
                    frame_id=int(obj["frame_id"]),
                    vector=np.asarray(obj["embedding"], dtype=np.float64),
                )
            )
    return out


def write_embeddings(path, embeddings: list[FaceEmbedding]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for emb in embeddings:
            fh.write(
                json.dumps(
                    {
                        "video_id": emb.video_id,
                        "frame_id": emb.frame_id,
                        "embedding": np.asarray(emb.vector, dtype=float).tolist(),
                    }
                )
            )
            fh.write("\n")


def read_clusters(path) -> dict[str, int]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["video_id"].strip()] = int(row["cluster_id"])
    return out


def write_clusters(path, assignment: dict[str, int]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "cluster_id"])
        for video_id in sorted(assignment):
            writer.writerow([video_id, assignment[video_id]])


def write_pca(path, rows: list[tuple[str, float, float]]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "pc1", "pc2"])
        for video_id, pc1, pc2 in rows:
            writer.writerow([video_id, f"{pc1:.10g}", f"{pc2:.10g}"])


def read_plan(path) -> SplitPlan:
    assignment = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            assignment[row["video_id"].strip()] = row["split"].strip()
    return SplitPlan(assignment=assignment)


def write_plan(path, assignment: dict[str, str]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "split"])
        for video_id in sorted(assignment):
            writer.writerow([video_id, assignment[video_id]])


# ---------- predictions and labels ----------


def read_predictions(path) -> list[FramePrediction]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(
                FramePrediction(
                    video_id=row["video_id"].strip(),
                    frame_id=int(row["frame_id"]),
                    prob_fake=float(row["prob"]),
                )
            )
    return out


def read_labels(path) -> dict[str, int]:
    """Video labels: accepts 0/1 as well as real/fake strings."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            raw = row["label"].strip().lower()
            if raw in ("1", FAKE):
                label = 1
            elif raw in ("0", REAL):
                label = 0
            else:
                raise ValueError(f"bad label {raw!r} for {row['video_id']}")
            out[row["video_id"].strip()] = label
    return out
