"""Face-identity clustering over frame embeddings.

Real videos are clustered by the identities their face encodings form
under density-based clustering; fake videos then inherit the cluster of
their source video. The resulting assignment is what the split module
consumes to keep one person from leaking across splits.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DanglingSourceError, EmptyInputError, RankDeficientError
from .split import FAKE, REAL, VideoRecord

NOISE = -1

_VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class DbscanParams:
    eps: float = 0.5
    min_pts: int = 5

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")


@dataclass(frozen=True)
class FaceEmbedding:
    video_id: str
    frame_id: int
    vector: np.ndarray


def _pairwise_distances(x: np.ndarray) -> np.ndarray:
    n = len(x)
    out = np.empty((n, n), dtype=np.float64)
    # row blocks keep the (n, n, d) broadcast from ballooning on big inputs
    block = max(1, int(2**24 // max(1, x.shape[1] * n)))
    for start in range(0, n, block):
        stop = min(n, start + block)
        d = x[start:stop, None, :] - x[None, :, :]
        out[start:stop] = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
    return out


def dbscan(points, params: DbscanParams = DbscanParams()) -> np.ndarray:
    """Deterministic DBSCAN with exhaustive neighbor search.

    A point is core when it has at least min_pts neighbors within eps
    (inclusive, itself counted). Clusters are the connected components
    of core points; each border point joins the cluster of its
    lowest-index core neighbor. Labels are renumbered so that clusters
    appear in order of their smallest member index; noise stays NOISE.

    Args:
        points: (n, d) array of encodings.
        params: eps / min_pts settings.

    Returns:
        (n,) int array of cluster labels, NOISE (-1) for outliers.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyInputError("need a non-empty (n, d) point array")
    n = len(x)
    adj = _pairwise_distances(x) <= params.eps
    core = adj.sum(axis=1) >= params.min_pts

    labels = np.full(n, NOISE, dtype=np.int64)
    current = 0
    for i in range(n):
        if not core[i] or labels[i] != NOISE:
            continue
        labels[i] = current
        stack = [i]
        while stack:
            j = stack.pop()
            reach = np.nonzero(adj[j] & core & (labels == NOISE))[0]
            labels[reach] = current
            stack.extend(reach.tolist())
        current += 1

    for i in range(n):
        if core[i] or not adj[i].any():
            continue
        core_neighbors = np.nonzero(adj[i] & core)[0]
        if len(core_neighbors):
            labels[i] = labels[core_neighbors[0]]

    # canonical numbering: first occurrence along the index order equals
    # ordering clusters by smallest member index
    remap: dict[int, int] = {}
    for lab in labels:
        if lab != NOISE and lab not in remap:
            remap[lab] = len(remap)
    return np.array([remap[lab] if lab != NOISE else NOISE for lab in labels])


def video_clusters(
    embeddings: list[FaceEmbedding], params: DbscanParams = DbscanParams()
) -> dict[str, int]:
    """Cluster all frame embeddings, then vote per video.

    Each video takes the majority cluster over its frames' non-noise
    labels, with ties going to the smallest cluster id. A video whose
    frames are all noise stays NOISE.
    """
    if not embeddings:
        raise EmptyInputError("no embeddings")
    x = np.stack([np.asarray(e.vector, dtype=np.float64) for e in embeddings])
    labels = dbscan(x, params)
    by_video: dict[str, list[int]] = {}
    for emb, lab in zip(embeddings, labels):
        by_video.setdefault(emb.video_id, []).append(int(lab))
    out = {}
    for video_id, labs in by_video.items():
        counts = Counter(lab for lab in labs if lab != NOISE)
        if not counts:
            out[video_id] = NOISE
        else:
            out[video_id] = min(counts, key=lambda c: (-counts[c], c))
    return out


def propagate_to_fakes(
    assignment: dict[str, int], manifest: list[VideoRecord]
) -> dict[str, int]:
    """Extend a real-video cluster assignment to the fake videos.

    Every fake inherits the cluster of its source video. Raises
    DanglingSourceError when a fake references a source with no entry.
    """
    out = dict(assignment)
    for rec in manifest:
        if rec.label == REAL:
            if rec.video_id not in out:
                raise DanglingSourceError(
                    f"real video {rec.video_id} has no cluster assignment"
                )
        elif rec.label == FAKE:
            if rec.source_video_id not in assignment:
                raise DanglingSourceError(
                    f"fake {rec.video_id} references unknown source "
                    f"{rec.source_video_id}"
                )
            out[rec.video_id] = assignment[rec.source_video_id]
    return out


def pca_2d(points) -> np.ndarray:
    """Project points onto their top two principal components.

    Components are the leading eigenvectors of the sample covariance;
    each is sign-fixed so its largest-magnitude coordinate is positive,
    making the projection deterministic.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 3:
        raise ValueError("need an (n, d) array with n >= 3")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (len(x) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals[-1] < _VARIANCE_FLOOR:
        raise RankDeficientError("no direction with usable variance")
    comps = eigvecs[:, ::-1][:, :2]
    for c in range(comps.shape[1]):
        peak = np.argmax(np.abs(comps[:, c]))
        if comps[peak, c] < 0:
            comps[:, c] = -comps[:, c]
    return centered @ comps
