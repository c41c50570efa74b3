"""Oriented bounding-box geometry: conversions, overlap, Gaussian forms.

Image coordinates are used throughout: y grows downward, so the "top" of a
box is its minimal-y extent. Angles are radians in [0, pi), measured from
the x-axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OrientedBox",
    "GaussianBox",
    "AxisRect",
    "box_to_vertices",
    "convex_intersection_area",
    "rotated_iou",
    "box_to_aabb",
    "box_to_gaussian",
    "gaussian_to_box",
    "canonicalize",
    "normalize_angle",
]

# Points closer than this (in distance units, scaled by edge length) to a
# clip edge count as lying on it, so touching boxes behave deterministically.
_EDGE_EPS = 1e-12

# Below this eigenvalue spread a covariance counts as isotropic and the
# caller-supplied angle hint is used instead of an eigenvector direction.
_ISO_EPS = 1e-9


def normalize_angle(theta: float) -> float:
    """Map an angle into [0, pi)."""
    t = math.fmod(theta, math.pi)
    if t < 0.0:
        t += math.pi
    if t >= math.pi:  # fmod rounding can land exactly on pi
        t -= math.pi
    return t


@dataclass(frozen=True)
class OrientedBox:
    """Rotated rectangle (cx, cy, w, h, theta) with theta in [0, pi)."""

    cx: float
    cy: float
    w: float
    h: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("cx", "cy", "w", "h", "theta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"OrientedBox.{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.w <= 0.0 or self.h <= 0.0:
            raise ValueError(f"box size must be positive, got w={self.w}, h={self.h}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class AxisRect:
    """Axis-aligned rectangle as center plus full width/height."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("cx", "cy", "w", "h"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"AxisRect.{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.w <= 0.0 or self.h <= 0.0:
            raise ValueError(f"rect size must be positive, got w={self.w}, h={self.h}")

    @property
    def x_min(self) -> float:
        return self.cx - 0.5 * self.w

    @property
    def x_max(self) -> float:
        return self.cx + 0.5 * self.w

    @property
    def y_min(self) -> float:
        return self.cy - 0.5 * self.h

    @property
    def y_max(self) -> float:
        return self.cy + 0.5 * self.h


@dataclass(frozen=True, eq=False)
class GaussianBox:
    """2-D Gaussian stand-in for a box: mean (2,) and SPD covariance (2, 2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if not (np.isfinite(mean).all() and np.isfinite(cov).all()):
            raise ValueError("GaussianBox fields must be finite")
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12:
            raise ValueError(f"covariance must be symmetric, got {cov!r}")
        # symmetric 2x2 is SPD iff trace > 0 and det > 0
        if cov[0, 0] + cov[1, 1] <= 0.0 or cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0] <= 0.0:
            raise ValueError("covariance must be positive-definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


def canonicalize(b: OrientedBox) -> OrientedBox:
    """Long-edge parameterization of the same rectangle (w >= h).

    Every rectangle admits two (w, h, theta) encodings that differ by a
    width/height swap and a 90-degree angle shift; this picks the one with
    w >= h, which is what decode/reconstruction routines return.
    """
    if b.w >= b.h:
        return b
    return OrientedBox(b.cx, b.cy, b.h, b.w, b.theta + 0.5 * math.pi)


def box_to_vertices(b: OrientedBox) -> np.ndarray:
    """Four corners as a (4, 2) array, one row per sign pair (++, +-, -+, --)."""
    cos_t = math.cos(b.theta)
    sin_t = math.sin(b.theta)
    ux = 0.5 * b.w * cos_t
    uy = 0.5 * b.w * sin_t
    vx = -0.5 * b.h * sin_t
    vy = 0.5 * b.h * cos_t
    return np.array(
        [
            [b.cx + ux + vx, b.cy + uy + vy],
            [b.cx + ux - vx, b.cy + uy - vy],
            [b.cx - ux + vx, b.cy - uy + vy],
            [b.cx - ux - vx, b.cy - uy - vy],
        ]
    )


def _cyclic_vertices(b: OrientedBox) -> list[tuple[float, float]]:
    """Corners in polygon (cyclic) order for clipping."""
    v = box_to_vertices(b)
    return [
        (v[0, 0], v[0, 1]),
        (v[1, 0], v[1, 1]),
        (v[3, 0], v[3, 1]),
        (v[2, 0], v[2, 1]),
    ]


def _signed_area2(poly) -> float:
    """Twice the signed shoelace area."""
    total = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total


def convex_intersection_area(a, b) -> float:
    """Area of the intersection of two convex polygons.

    Sutherland-Hodgman clipping of `a` against `b`, then the shoelace
    formula. Each input must be consistently wound; either orientation is
    accepted. Results with area below 1e-12 are reported as 0.
    """
    subject = [(float(p[0]), float(p[1])) for p in a]
    clip = [(float(p[0]), float(p[1])) for p in b]
    if len(subject) < 3 or len(clip) < 3:
        raise ValueError("polygons need at least 3 vertices")
    if _signed_area2(clip) < 0.0:
        clip = clip[::-1]

    output = subject
    for i in range(len(clip)):
        if not output:
            return 0.0
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % len(clip)]
        ex, ey = bx - ax, by - ay
        tol = _EDGE_EPS * max(math.hypot(ex, ey), 1e-300)

        points = output
        output = []
        px, py = points[-1]
        prev_side = ex * (py - ay) - ey * (px - ax)
        for cx, cy in points:
            cur_side = ex * (cy - ay) - ey * (cx - ax)
            cur_in = cur_side >= -tol
            prev_in = prev_side >= -tol
            if cur_in != prev_in:
                den = prev_side - cur_side
                if den != 0.0:
                    t = prev_side / den
                    output.append((px + t * (cx - px), py + t * (cy - py)))
            if cur_in:
                output.append((cx, cy))
            px, py, prev_side = cx, cy, cur_side

    if len(output) < 3:
        return 0.0
    area = 0.5 * abs(_signed_area2(output))
    return area if area >= 1e-12 else 0.0


def rotated_iou(a: OrientedBox, b: OrientedBox) -> float:
    """Intersection-over-union of two oriented boxes, in [0, 1]."""
    inter = convex_intersection_area(_cyclic_vertices(a), _cyclic_vertices(b))
    union = a.area + b.area - inter
    return min(max(inter / union, 0.0), 1.0)


def box_to_aabb(b: OrientedBox) -> AxisRect:
    """Tight axis-aligned bound of a rotated box (same center)."""
    c = abs(math.cos(b.theta))
    s = abs(math.sin(b.theta))
    return AxisRect(b.cx, b.cy, b.w * c + b.h * s, b.w * s + b.h * c)


def box_to_gaussian(b: OrientedBox, normalize: bool = False) -> GaussianBox:
    """Gaussian form of a box: mean at the center, covariance from size/angle.

    Unnormalized (default) uses axis variances (w/2)^2 and (h/2)^2 for the
    matching costs. With ``normalize`` the extents are divided by max(w, h)
    and the mean is forced to the origin, the form used by probability-mode
    noise injection.
    """
    if normalize:
        s = max(b.w, b.h)
        lx = (b.w / s) ** 2 / 4.0
        ly = (b.h / s) ** 2 / 4.0
        mean = (0.0, 0.0)
    else:
        lx = b.w * b.w / 4.0
        ly = b.h * b.h / 4.0
        mean = (b.cx, b.cy)
    cos_t = math.cos(b.theta)
    sin_t = math.sin(b.theta)
    s11 = lx * cos_t * cos_t + ly * sin_t * sin_t
    s22 = lx * sin_t * sin_t + ly * cos_t * cos_t
    s12 = (lx - ly) * cos_t * sin_t
    return GaussianBox(np.array(mean), np.array([[s11, s12], [s12, s22]]))


def gaussian_to_box(g: GaussianBox, scale: float, theta_hint: float = 0.0) -> OrientedBox:
    """Rebuild an oriented box from a Gaussian via eigendecomposition.

    The principal eigenvalue maps to the width, so the result always has
    w >= h (the long-edge parameterization). Isotropic covariances carry no
    direction, so ``theta_hint`` supplies the angle when the eigenvalues
    agree within 1e-9.

    Args:
        g: Gaussian with positive-definite covariance.
        scale: multiplies the reconstructed extents (2 * sqrt(eigenvalue)).
        theta_hint: angle to use for (near-)isotropic covariances.

    Raises:
        ValueError: if the covariance is not positive-definite.
    """
    if scale <= 0.0 or not math.isfinite(scale):
        raise ValueError(f"scale must be positive, got {scale}")
    s11 = float(g.cov[0, 0])
    s12 = float(g.cov[0, 1])
    s22 = float(g.cov[1, 1])
    half_tr = 0.5 * (s11 + s22)
    disc = math.sqrt(max((0.5 * (s11 - s22)) ** 2 + s12 * s12, 0.0))
    e1 = half_tr + disc
    e2 = half_tr - disc
    if e2 <= 0.0:
        raise ValueError("covariance is not positive-definite")
    if e1 - e2 <= _ISO_EPS:
        theta = normalize_angle(theta_hint)
    else:
        # eigenvector of e1; pick the candidate with the larger norm
        v1 = (e1 - s22, s12)
        v2 = (s12, e1 - s11)
        vx, vy = v1 if v1[0] * v1[0] + v1[1] * v1[1] >= v2[0] * v2[0] + v2[1] * v2[1] else v2
        theta = normalize_angle(math.atan2(vy, vx))
    w = 2.0 * math.sqrt(e1) * scale
    h = 2.0 * math.sqrt(e2) * scale
    return OrientedBox(float(g.mean[0]), float(g.mean[1]), w, h, theta)
