"""Identity-aware dataset splitting.

Videos are never assigned individually: whole face clusters move into a
split together, so the same person cannot appear on both sides of a
train/test boundary. Noise videos (cluster id -1) travel as one atomic
pseudo-cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewClustersError, UnassignedVideoError

REAL = "real"
FAKE = "fake"

TRAIN = "train"
VAL = "val"
TEST = "test"
SPLIT_NAMES = (TRAIN, VAL, TEST)

NOISE_CLUSTER = -1


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    label: str
    source_video_id: str | None = None
    cluster_id: int = NOISE_CLUSTER
    n_frames: int = 0

    def __post_init__(self):
        if self.label not in (REAL, FAKE):
            raise ValueError(f"label must be '{REAL}' or '{FAKE}', got {self.label!r}")
        if self.label == FAKE and not self.source_video_id:
            raise ValueError(f"fake video {self.video_id} has no source_video_id")


@dataclass
class DatasetManifest:
    records: list[VideoRecord] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.video_id in seen:
                raise ValueError(f"duplicate video_id {rec.video_id}")
            seen.add(rec.video_id)

    def clusters(self) -> dict[int, list[VideoRecord]]:
        out: dict[int, list[VideoRecord]] = {}
        for rec in self.records:
            out.setdefault(rec.cluster_id, []).append(rec)
        return out


@dataclass
class SplitPlan:
    """Maps each video id to a split name ('train'/'val'/'test', or
    'train'/'val' for a single cross-validation fold)."""

    assignment: dict[str, str]
    ratios: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class AuditReport:
    ok: bool
    leaks: tuple[int, ...]


def _shuffled_cluster_keys(
    clusters: dict[int, list[VideoRecord]], seed: int
) -> list[int]:
    keys = sorted(clusters)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(keys))
    return [keys[i] for i in order]


def cluster_split(
    manifest: DatasetManifest,
    ratios: tuple[float, float, float],
    seed: int = 0,
) -> SplitPlan:
    """Greedy cluster-level train/val/test split.

    Clusters are visited in seeded shuffle order and each one goes to
    the split whose current video-count fraction is furthest below its
    target ratio (ties resolve in train, val, test order). Because
    assignment is per cluster, realized fractions can miss the targets
    by at most the largest cluster's share.
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    clusters = manifest.clusters()
    if len(clusters) < len(SPLIT_NAMES):
        raise TooFewClustersError(
            f"{len(clusters)} clusters cannot fill {len(SPLIT_NAMES)} splits"
        )
    total = len(manifest.records)
    counts = [0, 0, 0]
    assignment: dict[str, str] = {}
    for key in _shuffled_cluster_keys(clusters, seed):
        deficits = [ratios[i] - counts[i] / total for i in range(3)]
        target = int(np.argmax(deficits))
        for rec in clusters[key]:
            assignment[rec.video_id] = SPLIT_NAMES[target]
        counts[target] += len(clusters[key])
    return SplitPlan(assignment=assignment, ratios=ratios)


def kfold_by_cluster(
    manifest: DatasetManifest, k: int, seed: int = 0
) -> list[SplitPlan]:
    """K cross-validation plans with cluster-level fold membership.

    Clusters are shuffled once and dealt round-robin into k folds; plan
    i marks fold i's videos as validation and everything else as train,
    so every cluster validates exactly once across the k plans.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    clusters = manifest.clusters()
    if len(clusters) < k:
        raise TooFewClustersError(f"{len(clusters)} clusters for {k} folds")
    order = _shuffled_cluster_keys(clusters, seed)
    fold_of = {key: pos % k for pos, key in enumerate(order)}
    plans = []
    for i in range(k):
        assignment = {
            rec.video_id: (VAL if fold_of[rec.cluster_id] == i else TRAIN)
            for rec in manifest.records
        }
        plans.append(SplitPlan(assignment=assignment))
    return plans


def fold_index(manifest: DatasetManifest, k: int, seed: int = 0) -> dict[str, int]:
    """Validation fold index per video for the same deal as kfold_by_cluster."""
    if k < 2:
        raise ValueError("k must be >= 2")
    clusters = manifest.clusters()
    if len(clusters) < k:
        raise TooFewClustersError(f"{len(clusters)} clusters for {k} folds")
    order = _shuffled_cluster_keys(clusters, seed)
    fold_of = {key: pos % k for pos, key in enumerate(order)}
    return {rec.video_id: fold_of[rec.cluster_id] for rec in manifest.records}


def leak_audit(plan: SplitPlan, manifest: DatasetManifest) -> AuditReport:
    """Flag clusters whose videos landed in more than one split.

    Raises UnassignedVideoError when a manifest video is missing from
    the plan.
    """
    leaks = []
    for cluster_id, recs in manifest.clusters().items():
        targets = set()
        for rec in recs:
            if rec.video_id not in plan.assignment:
                raise UnassignedVideoError(f"video {rec.video_id} not in plan")
            targets.add(plan.assignment[rec.video_id])
        if len(targets) > 1:
            leaks.append(cluster_id)
    leaks.sort()
    return AuditReport(ok=not leaks, leaks=tuple(leaks))
