"""Raster geometry for landmark-driven cutout regions.

Conventions used throughout the package:

* a point is (x, y) in pixel units, x rightward and y downward
* a polygon is an (n, 2) float array of vertices in drawing order
* a mask is a boolean array of shape (height, width) indexed mask[y, x]
* pixel (x, y) has its center on the integer lattice; a rasterized
  polygon contains a pixel when that center lies inside the polygon
  under the even-odd rule or exactly on its boundary
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import (
    AllCollinearError,
    DegenerateLineError,
    DegenerateZeroAreaError,
    EmptyAfterClampError,
    FewerThanThreePointsError,
)

# Index layout of the 68-point facial landmark scheme. Points 0-16 trace
# the jaw, 17-26 the two eyebrows; together they outline the face.
JAW_AND_BROWS = slice(0, 27)
NOSE = slice(27, 36)
EYES = slice(36, 48)
LEFT_EYE = slice(36, 42)
RIGHT_EYE = slice(42, 48)
MOUTH = slice(48, 68)

_ON_EDGE_TOL = 1e-9


def as_points(points) -> np.ndarray:
    """Coerce to an (n, 2) float64 array of finite (x, y) points."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


def _dedup_consecutive(pts: np.ndarray) -> np.ndarray:
    """Drop vertices identical to their predecessor, wrapping around."""
    if len(pts) == 0:
        return pts
    keep = np.any(pts != np.roll(pts, 1, axis=0), axis=1)
    if not keep.any():
        return pts[:1]
    return pts[keep]


def as_polygon(vertices) -> np.ndarray:
    """Validate a polygon: at least 3 vertices after removing consecutive duplicates."""
    pts = _dedup_consecutive(as_points(vertices))
    if len(pts) < 3:
        raise ValueError("polygon needs at least 3 distinct consecutive vertices")
    return pts


def validate_landmarks(landmarks) -> np.ndarray:
    """Coerce to a (68, 2) float64 landmark array with finite coordinates."""
    pts = as_points(landmarks)
    if pts.shape[0] != 68:
        raise ValueError(f"expected 68 landmarks, got {pts.shape[0]}")
    return pts


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Convex hull via Andrew's monotone chain.

    Returns hull vertices in counter-clockwise order (positive shoelace
    sum), starting at the lexicographically smallest vertex. Interior
    and edge-interior points are dropped.
    """
    pts = as_points(points)
    uniq = np.unique(pts, axis=0)  # lexicographic sort on (x, y)
    if len(uniq) < 3:
        raise FewerThanThreePointsError(
            f"need at least 3 distinct points, got {len(uniq)}"
        )

    def half(iterable):
        chain: list[np.ndarray] = []
        for p in iterable:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(uniq)
    upper = half(uniq[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise AllCollinearError("all points are collinear")
    return np.array(hull)


def _signed_area2(poly: np.ndarray) -> float:
    """Twice the signed shoelace area."""
    x, y = poly[:, 0], poly[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_area(vertices) -> float:
    """Absolute shoelace area, |sum x_i y_{i+1} - x_{i+1} y_i| / 2."""
    return abs(_signed_area2(as_polygon(vertices))) / 2.0


def polygon_centroid(vertices) -> np.ndarray:
    """Area-weighted centroid of a polygon.

    Raises DegenerateZeroAreaError when the signed area vanishes.
    """
    poly = as_polygon(vertices)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    w = x * yn - xn * y
    a2 = w.sum()
    if abs(a2) < 1e-12:
        raise DegenerateZeroAreaError("polygon has zero area")
    cx = float(((x + xn) * w).sum() / (3.0 * a2))
    cy = float(((y + yn) * w).sum() / (3.0 * a2))
    return np.array([cx, cy])


def _fill_interior(poly: np.ndarray, width: int, height: int) -> np.ndarray:
    """Even-odd scanline fill over pixel centers.

    Edges are counted on the half-open span [min(y), max(y)) so every
    scanline sees an even crossing count; pixels whose center falls on a
    horizontal edge are recovered by the boundary pass.
    """
    n = len(poly)
    x1, y1 = poly[:, 0], poly[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    rows = np.arange(height, dtype=np.float64)
    crossings = np.full((n, height), np.inf)
    for j in range(n):
        if y1[j] == y2[j]:
            continue
        lo, hi = (y1[j], y2[j]) if y1[j] < y2[j] else (y2[j], y1[j])
        sel = (rows >= lo) & (rows < hi)
        if not sel.any():
            continue
        t = (rows[sel] - y1[j]) / (y2[j] - y1[j])
        crossings[j, sel] = x1[j] + t * (x2[j] - x1[j])

    crossings.sort(axis=0)
    if len(crossings) % 2:
        # every scanline has an even crossing count, so a padding row of
        # inf keeps the (left, right) pairing aligned for odd edge counts
        crossings = np.vstack([crossings, np.full((1, height), np.inf)])
    lefts = crossings[0::2, :]
    rights = crossings[1::2, :]
    pair_ok = np.isfinite(rights)
    a = np.ceil(lefts - _ON_EDGE_TOL)
    b = np.floor(rights + _ON_EDGE_TOL)
    a = np.clip(a, 0, width - 1)
    b = np.clip(b, 0, width - 1)
    valid = pair_ok & (a <= b)
    if not valid.any():
        return np.zeros((height, width), dtype=bool)

    ys = np.broadcast_to(np.arange(height), lefts.shape)[valid]
    delta = np.zeros((height, width + 1), dtype=np.int64)
    np.add.at(delta, (ys, a[valid].astype(np.int64)), 1)
    np.add.at(delta, (ys, b[valid].astype(np.int64) + 1), -1)
    return np.cumsum(delta, axis=1)[:, :width] > 0


def _edge_pixels(poly: np.ndarray, width: int, height: int) -> np.ndarray:
    """Pixels whose center lies exactly on a polygon edge."""
    mask = np.zeros((height, width), dtype=bool)
    n = len(poly)
    for j in range(n):
        ax, ay = poly[j]
        bx, by = poly[(j + 1) % n]
        dx, dy = bx - ax, by - ay
        if dx == 0.0 and dy == 0.0:
            continue
        if dx != 0.0:
            lo, hi = (ax, bx) if ax < bx else (bx, ax)
            xs = np.arange(
                max(0, np.ceil(lo - _ON_EDGE_TOL)),
                min(width - 1, np.floor(hi + _ON_EDGE_TOL)) + 1,
                dtype=np.float64,
            )
            if len(xs):
                yv = ay + (xs - ax) * dy / dx
                iy = np.rint(yv)
                ok = (np.abs(yv - iy) <= _ON_EDGE_TOL) & (iy >= 0) & (iy < height)
                mask[iy[ok].astype(np.int64), xs[ok].astype(np.int64)] = True
        if dy != 0.0:
            lo, hi = (ay, by) if ay < by else (by, ay)
            ys = np.arange(
                max(0, np.ceil(lo - _ON_EDGE_TOL)),
                min(height - 1, np.floor(hi + _ON_EDGE_TOL)) + 1,
                dtype=np.float64,
            )
            if len(ys):
                xv = ax + (ys - ay) * dx / dy
                ix = np.rint(xv)
                ok = (np.abs(xv - ix) <= _ON_EDGE_TOL) & (ix >= 0) & (ix < width)
                mask[ys[ok].astype(np.int64), ix[ok].astype(np.int64)] = True
    return mask


def rasterize_polygon(vertices, width: int, height: int) -> np.ndarray:
    """Rasterize a polygon onto a (height, width) boolean mask.

    Vertices outside the image are clamped to [0, width-1] x
    [0, height-1] before filling. A pixel is set when its center is
    inside the (possibly self-intersecting) polygon under the even-odd
    rule, or exactly on its boundary.

    Raises EmptyAfterClampError when the polygon lies entirely outside
    the image or covers no pixel center.
    """
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    poly = as_polygon(vertices)
    xs, ys = poly[:, 0], poly[:, 1]
    if xs.max() < 0 or xs.min() > width - 1 or ys.max() < 0 or ys.min() > height - 1:
        raise EmptyAfterClampError("polygon lies entirely outside the image")
    clamped = np.column_stack(
        [np.clip(xs, 0, width - 1), np.clip(ys, 0, height - 1)]
    )
    clamped = _dedup_consecutive(clamped)
    if len(clamped) >= 3:
        mask = _fill_interior(clamped, width, height) | _edge_pixels(
            clamped, width, height
        )
    else:
        mask = _edge_pixels(clamped, width, height)
    if not mask.any():
        raise EmptyAfterClampError("polygon covers no pixel center")
    return mask


def draw_line(a, b, width: int, height: int) -> np.ndarray:
    """Bresenham segment between a and b on a (height, width) mask.

    Endpoints are rounded to the pixel grid first; pixels falling
    outside the image are dropped. Raises DegenerateLineError when the
    rounded endpoints coincide.
    """
    if width <= 0 or height <= 0:
        raise ValueError("image dimensions must be positive")
    x0, y0 = int(np.rint(a[0])), int(np.rint(a[1]))
    x1, y1 = int(np.rint(b[0])), int(np.rint(b[1]))
    if (x0, y0) == (x1, y1):
        raise DegenerateLineError("line endpoints coincide after rounding")
    mask = np.zeros((height, width), dtype=bool)
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        if 0 <= x0 < width and 0 <= y0 < height:
            mask[y0, x0] = True
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
    return mask


_STRUCT_3X3 = np.ones((3, 3), dtype=bool)


def binary_dilate(mask: np.ndarray, iterations: int) -> np.ndarray:
    """Iterated binary dilation with the full 3x3 structuring element."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    m = np.asarray(mask, dtype=bool)
    if iterations == 0:
        return m.copy()
    # scipy treats iterations<=0 as "repeat until stable", hence the guard above
    return ndimage.binary_dilation(m, structure=_STRUCT_3X3, iterations=iterations)


def centroid_quadrants(vertices, width: int, height: int) -> list[np.ndarray]:
    """Split a rasterized polygon into four quadrants around its centroid.

    Quadrants are returned in row-major order: (y <= cy, x <= cx),
    (y <= cy, x > cx), (y > cy, x <= cx), (y > cy, x > cx). They are
    pairwise disjoint and their union is the full raster.
    """
    raster = rasterize_polygon(vertices, width, height)
    cx, cy = polygon_centroid(vertices)
    xs = np.arange(width)[None, :]
    ys = np.arange(height)[:, None]
    left = xs <= cx
    top = ys <= cy
    return [
        raster & top & left,
        raster & top & ~left,
        raster & ~top & left,
        raster & ~top & ~left,
    ]
