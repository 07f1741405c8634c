"""Video-level evaluation metrics for deepfake detectors.

Frame probabilities are averaged into one score per video; log loss,
ROC AUC and average precision are then computed over videos. Labels use
1 for fake and 0 for real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (
    EmptyInputError,
    NoFramesError,
    NoPositivesError,
    SingleClassError,
)

LOG_LOSS_EPS = 1e-7


@dataclass(frozen=True)
class FramePrediction:
    video_id: str
    frame_id: int
    prob_fake: float


@dataclass(frozen=True)
class VideoScore:
    video_id: str
    prob_fake: float
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


def aggregate_video(frames: list[FramePrediction]) -> float:
    """Mean frame probability for one video."""
    if not frames:
        raise NoFramesError("video has no frame predictions")
    ids = {f.video_id for f in frames}
    if len(ids) != 1:
        raise ValueError(f"frames span multiple videos: {sorted(ids)}")
    return float(np.mean([f.prob_fake for f in frames]))


def aggregate_by_video(frames: list[FramePrediction]) -> dict[str, float]:
    """Mean frame probability per video, for a mixed frame list."""
    if not frames:
        raise EmptyInputError("no frame predictions")
    groups: dict[str, list[float]] = {}
    for f in frames:
        groups.setdefault(f.video_id, []).append(f.prob_fake)
    return {vid: float(np.mean(ps)) for vid, ps in groups.items()}


def _split_scores(scores: list[VideoScore]):
    if not scores:
        raise EmptyInputError("no video scores")
    y = np.array([s.label for s in scores], dtype=np.float64)
    p = np.array([s.prob_fake for s in scores], dtype=np.float64)
    return y, p


def log_loss(scores: list[VideoScore], eps: float = LOG_LOSS_EPS) -> float:
    """Mean negative log likelihood with probabilities clipped to
    [eps, 1 - eps]."""
    y, p = _split_scores(scores)
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def roc_auc(scores: list[VideoScore]) -> float:
    """Exact ROC AUC: the probability a fake outranks a real, ties
    counted half. Computed from midranks, which equals the full
    pairwise comparison."""
    y, p = _split_scores(scores)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("need at least one fake and one real video")
    ranks = stats.rankdata(p, method="average")
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def average_precision(scores: list[VideoScore]) -> float:
    """Area under the precision-recall curve by rank walk.

    Videos are visited in descending probability order with ties broken
    by video_id; AP sums precision at each positive hit weighted by the
    recall step.
    """
    if not scores:
        raise EmptyInputError("no video scores")
    n_pos = sum(s.label for s in scores)
    if n_pos == 0:
        raise NoPositivesError("no positive videos")
    ranked = sorted(scores, key=lambda s: (-s.prob_fake, s.video_id))
    tp = 0
    ap = 0.0
    for n, s in enumerate(ranked, start=1):
        if s.label == 1:
            tp += 1
            ap += tp / n
    return ap / n_pos
