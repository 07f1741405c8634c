"""Synthetic faces, landmarks and corpora for demos and tests.

Nothing here touches a real dataset: faces are procedural cartoons laid
out to match the 68-point landmark scheme closely enough to exercise
every code path (sensory bands, outline polygons, difference masks,
identity clusters).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import io
from .clustering import FaceEmbedding
from .split import FAKE, REAL


def landmark_template(
    width: int, height: int, jitter: float = 0.0, rng: np.random.Generator | None = None
) -> np.ndarray:
    """A frontal 68-point layout scaled to the given image size.

    Indices follow the usual scheme: 0-16 jaw, 17-26 brows, 27-35 nose,
    36-47 eyes, 48-67 mouth. jitter adds uniform noise of up to that
    many pixels to every coordinate.
    """
    pts = np.zeros((68, 2), dtype=np.float64)
    # jaw: arc from the left temple through the chin to the right temple
    for t in range(17):
        theta = math.pi * (1.0 - t / 16.0)
        pts[t] = (0.5 - 0.40 * math.cos(math.pi - theta), 0.38 + 0.55 * math.sin(theta))
    # brows
    for i, t in enumerate(np.linspace(0.16, 0.42, 5)):
        pts[17 + i] = (t, 0.22 - 0.02 * math.sin(math.pi * i / 4))
    for i, t in enumerate(np.linspace(0.58, 0.84, 5)):
        pts[22 + i] = (t, 0.22 - 0.02 * math.sin(math.pi * i / 4))
    # nose bridge and base
    for i, t in enumerate(np.linspace(0.30, 0.52, 4)):
        pts[27 + i] = (0.5, t)
    for i, t in enumerate(np.linspace(0.42, 0.58, 5)):
        pts[31 + i] = (t, 0.60 if i != 2 else 0.62)
    # eyes: hexagons, outer corners at 36 and 45
    left = [(0.22, 0.33), (0.27, 0.31), (0.33, 0.31), (0.38, 0.33), (0.33, 0.35), (0.27, 0.35)]
    right = [(0.62, 0.33), (0.67, 0.31), (0.73, 0.31), (0.78, 0.33), (0.73, 0.35), (0.67, 0.35)]
    pts[36:42] = left
    pts[42:48] = right
    # mouth: outer ring of 12, inner ring of 8, corners at 48 and 54
    for i in range(12):
        ang = math.pi * (1.0 + i / 6.0)
        pts[48 + i] = (0.5 - 0.18 * math.cos(ang - math.pi), 0.78 + 0.08 * math.sin(ang - math.pi))
    for i in range(8):
        ang = math.pi * (1.0 + i / 4.0)
        pts[60 + i] = (0.5 - 0.11 * math.cos(ang - math.pi), 0.78 + 0.035 * math.sin(ang - math.pi))

    pts[:, 0] *= width - 1
    pts[:, 1] *= height - 1
    if jitter > 0:
        if rng is None:
            rng = np.random.default_rng(0)
        pts = pts + rng.uniform(-jitter, jitter, size=pts.shape)
        pts[:, 0] = np.clip(pts[:, 0], 0, width - 1)
        pts[:, 1] = np.clip(pts[:, 1], 0, height - 1)
    return pts


def render_face(landmarks: np.ndarray, width: int, height: int) -> np.ndarray:
    """Paint a cartoon face that roughly matches the landmarks."""
    img = np.full((height, width, 3), (24, 28, 40), dtype=np.uint8)
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    cx, cy = width * 0.5, height * 0.52
    rx, ry = width * 0.42, height * 0.46
    head = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0
    img[head] = (196, 160, 130)

    def blob(center, radius, color):
        m = (xs - center[0]) ** 2 + (ys - center[1]) ** 2 <= radius**2
        img[m & head] = color

    left_eye = landmarks[36:42].mean(axis=0)
    right_eye = landmarks[42:48].mean(axis=0)
    blob(left_eye, max(2.0, width * 0.045), (62, 48, 40))
    blob(right_eye, max(2.0, width * 0.045), (62, 48, 40))
    nose_tip = landmarks[33]
    blob(nose_tip, max(1.5, width * 0.03), (150, 110, 92))
    mouth = landmarks[48:60].mean(axis=0)
    mw, mh = width * 0.14, height * 0.04
    lips = ((xs - mouth[0]) / max(mw, 1.0)) ** 2 + ((ys - mouth[1]) / max(mh, 1.0)) ** 2 <= 1.0
    img[lips & head] = (140, 60, 58)
    return img


def plant_manipulation(
    image: np.ndarray, rng: np.random.Generator, patch: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Corrupt a block of the face, returning the fake and its true extent."""
    h, w = image.shape[:2]
    if patch is None:
        # keep the block large next to the SSIM window so the recovered
        # mask is not dominated by border smear
        patch = max(8, min(h, w) // 3)
    x0 = int(rng.integers(w // 4, w - w // 4 - patch))
    y0 = int(rng.integers(h // 4, h - h // 4 - patch))
    fake = image.copy()
    noise = rng.integers(0, 256, size=(patch, patch, 3), dtype=np.uint8)
    fake[y0 : y0 + patch, x0 : x0 + patch] = noise
    truth = np.zeros((h, w), dtype=bool)
    truth[y0 : y0 + patch, x0 : x0 + patch] = True
    return fake, truth


def make_corpus(
    root,
    n_videos: int = 10,
    frames_per_video: int = 5,
    size: int = 96,
    seed: int = 0,
    fake_fraction: float = 0.5,
) -> Path:
    """Write a self-contained corpus: frames, sidecars and manifest.

    Every fake video mirrors a real source video frame by frame, so
    difference masks can be built for all of them. Returns the manifest
    path.
    """
    root = Path(root)
    frames_dir = root / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    n_fake_sources = int(round(n_videos * fake_fraction))
    records: list[io.FrameRecord] = []

    for v in range(n_videos):
        video_id = f"real_{v:03d}"
        jitter = rng.uniform(0.0, size * 0.01)
        base = landmark_template(size, size, jitter=jitter, rng=rng)
        fakes = []
        if v < n_fake_sources:
            fakes.append(f"fake_{v:03d}")
        for f in range(frames_per_video):
            drift = rng.normal(0.0, size * 0.004, size=(1, 2))
            pts = np.clip(base + drift, 0, size - 1)
            image = render_face(pts, size, size)
            name = f"{video_id}_{f}.png"
            io.write_image(frames_dir / name, image)
            io.write_landmarks(frames_dir / f"{name}.landmarks.json", pts)
            records.append(io.FrameRecord(video_id, f, str(frames_dir / name), REAL))
            for fake_id in fakes:
                fake_img, _ = plant_manipulation(image, rng)
                fname = f"{fake_id}_{f}.png"
                io.write_image(frames_dir / fname, fake_img)
                io.write_landmarks(frames_dir / f"{fname}.landmarks.json", pts)
                records.append(
                    io.FrameRecord(fake_id, f, str(frames_dir / fname), FAKE, video_id)
                )

    manifest_path = root / "manifest.csv"
    io.write_frame_manifest(manifest_path, records)
    return manifest_path


def make_identity_embeddings(
    video_ids: list[str],
    frames_per_video: int = 5,
    n_identities: int = 3,
    dim: int = 128,
    seed: int = 0,
    noise: float = 0.02,
    outlier_videos: int = 0,
) -> list[FaceEmbedding]:
    """Frame encodings drawn around per-identity centers.

    Videos are assigned to identities round-robin; the final
    outlier_videos videos get isolated far-away frames instead so they
    land in noise under default clustering settings.
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 1.0, size=(n_identities, dim))
    centers = centers / np.linalg.norm(centers, axis=1, keepdims=True) * 4.0
    out = []
    n_regular = len(video_ids) - outlier_videos
    for i, video_id in enumerate(video_ids):
        if i < n_regular:
            center = centers[i % n_identities]
            for f in range(frames_per_video):
                vec = center + rng.normal(0.0, noise, size=dim)
                out.append(FaceEmbedding(video_id, f, vec))
        else:
            # isolated frames: each far from everything, including its
            # own video's other frames, so the video votes to noise
            for f in range(frames_per_video):
                vec = rng.normal(0.0, 1.0, size=dim)
                vec = vec / np.linalg.norm(vec) * (40.0 + 10.0 * i + f)
                out.append(FaceEmbedding(video_id, f, vec))
    return out
