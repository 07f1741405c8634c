"""Structural-similarity maps and difference masks between frame pairs.

The difference mask marks pixels where a manipulated frame disagrees
with its source frame, and later gates which cutout candidates are
allowed to remove. SSIM is computed on [0, 1] luma with a uniform box
window and reflective border padding, so the map has the same shape as
the input.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import BadWindowError, DimMismatchError, EmptyImageError

DEFAULT_WINDOW = 11
DEFAULT_SSIM_THRESHOLD = 0.5

# stabilizers (0.01 * L)^2 and (0.03 * L)^2 for dynamic range L = 1
_C1 = 0.01**2
_C2 = 0.03**2


def to_gray(image) -> np.ndarray:
    """Convert an 8-bit RGB image to luma in [0, 1].

    Uses the BT.601 weights: (0.299 R + 0.587 G + 0.114 B) / 255.
    """
    img = np.asarray(image)
    if img.size == 0:
        raise EmptyImageError("image has no pixels")
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) image, got shape {img.shape}")
    r = img[:, :, 0].astype(np.float64)
    g = img[:, :, 1].astype(np.float64)
    b = img[:, :, 2].astype(np.float64)
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0


def _box(a: np.ndarray, window: int) -> np.ndarray:
    return ndimage.uniform_filter(a, size=window, mode="reflect")


def ssim_map(a, b, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Per-pixel SSIM between two gray images in [0, 1].

    Local means, variances and covariance are taken over a uniform
    window x window box with reflective padding, so the output matches
    the input shape. Values are clipped to [-1, 1].
    """
    ga = np.asarray(a, dtype=np.float64)
    gb = np.asarray(b, dtype=np.float64)
    if ga.shape != gb.shape:
        raise DimMismatchError(f"shape {ga.shape} vs {gb.shape}")
    if ga.ndim != 2:
        raise ValueError("ssim_map expects 2-d gray images")
    if ga.size == 0:
        raise EmptyImageError("image has no pixels")
    if window % 2 == 0 or window < 3 or window > min(ga.shape):
        raise BadWindowError(f"window {window} invalid for shape {ga.shape}")

    mu_a = _box(ga, window)
    mu_b = _box(gb, window)
    var_a = _box(ga * ga, window) - mu_a * mu_a
    var_b = _box(gb * gb, window) - mu_b * mu_b
    cov = _box(ga * gb, window) - mu_a * mu_b

    num = (2.0 * mu_a * mu_b + _C1) * (2.0 * cov + _C2)
    den = (mu_a * mu_a + mu_b * mu_b + _C1) * (var_a + var_b + _C2)
    return np.clip(num / den, -1.0, 1.0)


def difference_mask(
    real,
    fake,
    ssim_threshold: float = DEFAULT_SSIM_THRESHOLD,
    window: int = DEFAULT_WINDOW,
) -> np.ndarray:
    """Boolean mask of structurally dissimilar pixels between a frame pair.

    A pixel is set exactly when SSIM(real, fake) at that pixel is
    strictly below ssim_threshold, computed on luma. Identical frames
    yield an all-zero mask; a threshold of -1 disables everything.
    """
    ra = np.asarray(real)
    fa = np.asarray(fake)
    if ra.shape != fa.shape:
        raise DimMismatchError(f"shape {ra.shape} vs {fa.shape}")
    return ssim_map(to_gray(ra), to_gray(fa), window=window) < ssim_threshold
