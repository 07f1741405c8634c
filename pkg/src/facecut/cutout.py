"""Landmark-driven occlusion augmentation for face crops.

Each call either leaves the image untouched (probability gate) or
removes one region: a dilated band over a sensory group (eyes, nose or
mouth) or a polygon built from the 27 face-outline points. When a
difference mask from the source frame is available, a candidate region
is only accepted while the fraction of difference pixels it covers,

    rho = |region & diff| / |diff|,

stays at or below the threshold gamma_h. This keeps the augmentation
from erasing the very evidence a detector is supposed to learn.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import geometry
from .errors import (
    DimMismatchError,
    EmptyAfterClampError,
    EmptyDiffMaskError,
    LandmarkImageMismatchError,
)

DEFAULT_GAMMA_H = 0.3
DEFAULT_MAX_ATTEMPTS = 5

# dilation schedule: iteration count j is max(1, ceil(d * f_j)) for the
# terminal-line length d in pixels
DILATION_FRACTIONS = (0.05, 0.10, 0.15, 0.20, 0.25)

# landmark index pairs spanning each sensory group
EYE_TERMINALS = (36, 45)
NOSE_TERMINALS = (27, 33)
MOUTH_TERMINALS = (48, 54)

SUBSET_SIZE_RANGE = (8, 15)  # inclusive bounds for hull subset / window sizes
N_OUTLINE = 27


class FillMode(Enum):
    RANDOM = "random"
    ZERO = "zero"
    MAX = "max"


class Strategy(Enum):
    EYES = "eyes"
    NOSE = "nose"
    MOUTH = "mouth"
    HULL_RANDOM_SUBSET = "hull_random_subset"
    HULL_CONSECUTIVE = "hull_consecutive"
    HULL_QUADRANT = "hull_quadrant"


SENSORY_TERMINALS = {
    Strategy.EYES: EYE_TERMINALS,
    Strategy.NOSE: NOSE_TERMINALS,
    Strategy.MOUTH: MOUTH_TERMINALS,
}

_HULL_STRATEGIES = (
    Strategy.HULL_RANDOM_SUBSET,
    Strategy.HULL_CONSECUTIVE,
    Strategy.HULL_QUADRANT,
)


@dataclass(frozen=True)
class CutoutConfig:
    """Knobs for the augmentation engine.

    p is the probability that a call applies any cutout at all; gamma_h
    bounds the tolerated overlap with the difference mask; fill selects
    what replaces the removed pixels; max_attempts bounds the random
    polygon draws of the subset strategy; seed anchors all derived
    per-image RNG streams.
    """

    p: float = 0.5
    gamma_h: float = DEFAULT_GAMMA_H
    fill: FillMode = FillMode.RANDOM
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        if not 0.0 <= self.gamma_h <= 1.0:
            raise ValueError("gamma_h must be in [0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class CutoutRegion:
    """A selected cutout: its raster, the strategy that produced it and
    the overlap ratio rho (None when no difference mask applied)."""

    raster: np.ndarray
    strategy: Strategy
    rho: float | None


@dataclass(frozen=True)
class AugmentOutcome:
    image: np.ndarray
    applied: bool
    region: CutoutRegion | None


def rng_for_image(seed: int, image_id: str) -> np.random.Generator:
    """Per-image RNG derived from (seed, image_id).

    The stream depends only on the two arguments, so batch runs produce
    identical results no matter how images are ordered or sharded
    across workers.
    """
    digest = hashlib.blake2b(
        f"{seed}|{image_id}".encode("utf-8"), digest_size=8
    ).digest()
    return np.random.default_rng(int.from_bytes(digest, "big"))


def overlap_ratio(region: np.ndarray, diff: np.ndarray) -> float:
    """rho = |region & diff| / |diff|.

    Raises EmptyDiffMaskError when the difference mask has no set
    pixels, and DimMismatchError when shapes differ.
    """
    r = np.asarray(region, dtype=bool)
    d = np.asarray(diff, dtype=bool)
    if r.shape != d.shape:
        raise DimMismatchError(f"shape {r.shape} vs {d.shape}")
    total = int(np.count_nonzero(d))
    if total == 0:
        raise EmptyDiffMaskError("difference mask is empty")
    return int(np.count_nonzero(r & d)) / total


def dilation_schedule(d: float) -> list[int]:
    """Iteration counts max(1, ceil(d * f)) for the five band fractions."""
    return [max(1, math.ceil(d * f)) for f in DILATION_FRACTIONS]


def sensory_candidates(
    landmarks, group: Strategy, width: int, height: int
) -> list[np.ndarray]:
    """Five nested band masks over a sensory group.

    The band is the straight line between the group's terminal
    landmarks, dilated by an increasing number of 3x3 iterations. The
    line length d sets the scale: candidate j uses max(1, ceil(d * f_j))
    iterations with f in {0.05, 0.10, 0.15, 0.20, 0.25}. Candidates are
    nested, each a superset of the previous one.
    """
    pts = geometry.validate_landmarks(landmarks)
    if group not in SENSORY_TERMINALS:
        raise ValueError(f"{group} is not a sensory group")
    i, j = SENSORY_TERMINALS[group]
    a, b = pts[i], pts[j]
    d = math.hypot(b[0] - a[0], b[1] - a[1])
    line = geometry.draw_line(a, b, width, height)
    counts = dilation_schedule(d)
    masks = []
    current = line
    prev = 0
    for k in counts:
        current = geometry.binary_dilate(current, k - prev)
        prev = k
        masks.append(current)
    return masks


def _effective_diff(diff: np.ndarray | None) -> np.ndarray | None:
    """Treat a missing or all-zero difference mask as absent."""
    if diff is None:
        return None
    d = np.asarray(diff, dtype=bool)
    return d if d.any() else None


def _pick_sensory(
    landmarks,
    group: Strategy,
    width: int,
    height: int,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
) -> CutoutRegion | None:
    candidates = sensory_candidates(landmarks, group, width, height)
    candidates = [c for c in candidates if c.any()]
    if not candidates:
        return None
    if diff is None:
        # no mask to respect: take the middle of the five bands
        mid = candidates[min(2, len(candidates) - 1)]
        return CutoutRegion(mid, group, None)
    best = None
    best_rho = None
    for cand in candidates:
        rho = overlap_ratio(cand, diff)
        if rho <= cfg.gamma_h and (best_rho is None or rho < best_rho):
            best, best_rho = cand, rho
    if best is None:
        return None
    return CutoutRegion(best, group, best_rho)


def _pick_max_area(
    polys: list[np.ndarray],
    strategy: Strategy,
    width: int,
    height: int,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
) -> CutoutRegion | None:
    """Shared selector for the polygon strategies: among candidates that
    rasterize to something and pass the rho gate, keep the largest
    shoelace area. Ties keep the earliest candidate."""
    best = None
    best_area = -1.0
    for poly in polys:
        try:
            raster = geometry.rasterize_polygon(poly, width, height)
        except EmptyAfterClampError:
            continue
        rho = None
        if diff is not None:
            rho = overlap_ratio(raster, diff)
            if rho > cfg.gamma_h:
                continue
        area = geometry.polygon_area(poly)
        if area > best_area:
            best = CutoutRegion(raster, strategy, rho)
            best_area = area
    return best


def hull_random_subset(
    landmarks,
    width: int,
    height: int,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
    rng: np.random.Generator,
) -> CutoutRegion | None:
    """Random polygons over the face outline.

    Draws a subset size s in [8, 15], then max_attempts random
    s-subsets of the 27 outline points; each subset is used in sampled
    order, so the polygon shape itself is random. The largest qualifying
    polygon by shoelace area wins.
    """
    pts = geometry.validate_landmarks(landmarks)[geometry.JAW_AND_BROWS]
    diff = _effective_diff(diff)
    lo, hi = SUBSET_SIZE_RANGE
    s = int(rng.integers(lo, hi + 1))
    polys = [
        pts[rng.choice(N_OUTLINE, size=s, replace=False)]
        for _ in range(cfg.max_attempts)
    ]
    return _pick_max_area(polys, Strategy.HULL_RANDOM_SUBSET, width, height, diff, cfg)


def consecutive_windows(size: int, n_points: int = N_OUTLINE) -> list[np.ndarray]:
    """Index windows [s, s + size - 1] for s in 0 .. n_points - size.

    Windows never wrap past the last outline index, so a size of 11
    yields 17 windows over the 27 outline points.
    """
    if not 1 <= size <= n_points:
        raise ValueError(f"window size {size} out of range")
    return [np.arange(s, s + size) for s in range(n_points - size + 1)]


def hull_consecutive(
    landmarks,
    width: int,
    height: int,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
    rng: np.random.Generator,
) -> CutoutRegion | None:
    """Contiguous runs of the face outline.

    Draws a window size i in [8, 15] and scans every consecutive window
    of that size over outline indices 0..26. The largest qualifying
    window by shoelace area wins; ties keep the lowest start index.
    """
    pts = geometry.validate_landmarks(landmarks)[geometry.JAW_AND_BROWS]
    diff = _effective_diff(diff)
    lo, hi = SUBSET_SIZE_RANGE
    size = int(rng.integers(lo, hi + 1))
    polys = [pts[w] for w in consecutive_windows(size)]
    return _pick_max_area(polys, Strategy.HULL_CONSECUTIVE, width, height, diff, cfg)


def hull_quadrant(
    landmarks,
    width: int,
    height: int,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
    rng: np.random.Generator,
) -> CutoutRegion | None:
    """One quadrant of the full face outline polygon.

    The outline raster is split into four quadrants around its
    centroid. With a difference mask the minimum-rho quadrant is taken
    (ties keep the smallest quadrant index in row-major order) and must
    still pass the rho gate; otherwise a uniformly random non-empty
    quadrant is returned.
    """
    pts = geometry.validate_landmarks(landmarks)[geometry.JAW_AND_BROWS]
    diff = _effective_diff(diff)
    quadrants = geometry.centroid_quadrants(pts, width, height)
    nonempty = [q for q in quadrants if q.any()]
    if not nonempty:
        return None
    if diff is None:
        pick = nonempty[int(rng.integers(0, len(nonempty)))]
        return CutoutRegion(pick, Strategy.HULL_QUADRANT, None)
    rhos = [overlap_ratio(q, diff) for q in nonempty]
    k = int(np.argmin(rhos))
    if rhos[k] > cfg.gamma_h:
        return None
    return CutoutRegion(nonempty[k], Strategy.HULL_QUADRANT, rhos[k])


def fill_region(
    image, region: np.ndarray, fill: FillMode, rng: np.random.Generator
) -> np.ndarray:
    """Replace the region's pixels and leave everything else untouched.

    RANDOM draws each channel of each pixel iid from the full 8-bit
    range; ZERO and MAX write the two extremes.
    """
    img = np.asarray(image)
    mask = np.asarray(region, dtype=bool)
    if img.shape[:2] != mask.shape:
        raise DimMismatchError(f"image {img.shape[:2]} vs region {mask.shape}")
    out = img.copy()
    n = int(np.count_nonzero(mask))
    if n == 0:
        return out
    if fill is FillMode.RANDOM:
        values = rng.integers(0, 256, size=(n,) + img.shape[2:], dtype=np.uint8)
        out[mask] = values
    elif fill is FillMode.ZERO:
        out[mask] = 0
    else:
        out[mask] = 255
    return out


def _check_landmark_scale(pts: np.ndarray, width: int, height: int) -> None:
    if pts[:, 0].max() >= 2 * width or pts[:, 1].max() >= 2 * height:
        raise LandmarkImageMismatchError(
            "landmark coordinates exceed twice the image extent"
        )


def face_cutout(
    image,
    landmarks,
    diff: np.ndarray | None,
    cfg: CutoutConfig,
    image_id: str,
) -> AugmentOutcome:
    """Apply at most one cutout to a face crop.

    The per-image RNG is derived from (cfg.seed, image_id). A first draw
    gates application with probability cfg.p; a second picks uniformly
    among eyes, mouth, nose and outline polygon; the polygon branch then
    picks one of its three variants uniformly. When the chosen strategy
    yields no region that passes the rho gate, the image is returned
    unchanged with applied=False.
    """
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) image, got shape {img.shape}")
    height, width = img.shape[:2]
    pts = geometry.validate_landmarks(landmarks)
    _check_landmark_scale(pts, width, height)
    if diff is not None and np.asarray(diff).shape != (height, width):
        raise DimMismatchError(
            f"diff {np.asarray(diff).shape} vs image {(height, width)}"
        )

    rng = rng_for_image(cfg.seed, image_id)
    if rng.random() >= cfg.p:
        return AugmentOutcome(img, False, None)

    diff_eff = _effective_diff(diff)
    choice = int(rng.integers(0, 4))
    if choice == 0:
        region = _pick_sensory(pts, Strategy.EYES, width, height, diff_eff, cfg)
    elif choice == 1:
        region = _pick_sensory(pts, Strategy.MOUTH, width, height, diff_eff, cfg)
    elif choice == 2:
        region = _pick_sensory(pts, Strategy.NOSE, width, height, diff_eff, cfg)
    else:
        strategy = _HULL_STRATEGIES[int(rng.integers(0, 3))]
        if strategy is Strategy.HULL_RANDOM_SUBSET:
            region = hull_random_subset(pts, width, height, diff_eff, cfg, rng)
        elif strategy is Strategy.HULL_CONSECUTIVE:
            region = hull_consecutive(pts, width, height, diff_eff, cfg, rng)
        else:
            region = hull_quadrant(pts, width, height, diff_eff, cfg, rng)

    if region is None:
        return AugmentOutcome(img, False, None)
    filled = fill_region(img, region.raster, cfg.fill, rng)
    return AugmentOutcome(filled, True, region)
