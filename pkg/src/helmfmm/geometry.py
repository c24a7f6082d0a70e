"""Boxes, cell frames and Morton keys for the octree.

All geometry is expressed in "computational box" units: the root box is a
cube and every cell at depth ``k`` is an axis-aligned cube of side
``side(root) / 2**k`` addressed by integer coordinates in ``[0, 2**k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "BoundingBox",
    "CellFrame",
    "MortonKey",
    "compute_root_box",
    "morton_encode",
    "morton_decode",
    "morton_encode_many",
    "sort_particles_morton",
    "cell_frame",
]

# 21 levels of 3 bits each fit in a uint64 with room to spare.
MAX_MORTON_DEPTH = 21


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned cube given by its center and half side length."""

    center: np.ndarray  # shape (3,)
    half_width: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not np.all(np.isfinite(self.center)):
            raise ValueError("box center must be finite")
        if not (self.half_width > 0):
            raise ValueError("half_width must be positive")

    @property
    def side(self) -> float:
        return 2.0 * self.half_width

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half_width

    def contains(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        return np.all((p >= self.lower) & (p <= self.lower + self.side), axis=1)


@dataclass(frozen=True)
class CellFrame:
    """Affine correspondence ``cell = alpha + beta * [0,1]^3``."""

    alpha: np.ndarray  # lower corner, shape (3,)
    beta: float  # cell side length

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        if not (self.beta > 0):
            raise ValueError("beta must be positive")

    @property
    def center(self) -> np.ndarray:
        return self.alpha + 0.5 * self.beta


class MortonKey(NamedTuple):
    """Bit-interleaved cell address: 3 bits per level, depth kept alongside."""

    code: int
    depth: int


def compute_root_box(points: np.ndarray, margin: float = 1e-6) -> BoundingBox:
    """Smallest cube centered on the centroid containing all points.

    The cube is inflated by a relative margin so that boundary particles fall
    strictly inside.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
        raise ValueError("points must have shape (n, 3) with n >= 1")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    center = pts.mean(axis=0)
    half = np.max(np.abs(pts - center)) if pts.shape[0] > 1 else 0.5
    if half == 0.0:
        half = 0.5  # all particles coincident
    return BoundingBox(center=center, half_width=half * (1.0 + margin))


def _part_bits(v: np.ndarray) -> np.ndarray:
    """Spread the low 21 bits of each entry so consecutive bits are 3 apart."""
    v = v.astype(np.uint64)
    v = (v | (v << np.uint64(32))) & np.uint64(0x1F00000000FFFF)
    v = (v | (v << np.uint64(16))) & np.uint64(0x1F0000FF0000FF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x100F00F00F00F00F)
    v = (v | (v << np.uint64(4))) & np.uint64(0x10C30C30C30C30C3)
    v = (v | (v << np.uint64(2))) & np.uint64(0x1249249249249249)
    return v


def morton_encode_many(coords: np.ndarray, depth: int) -> np.ndarray:
    """Vectorized Morton codes for an (n, 3) array of integer coordinates."""
    coords = np.asarray(coords)
    if depth < 0 or depth > MAX_MORTON_DEPTH:
        raise ValueError(f"depth must be in [0, {MAX_MORTON_DEPTH}]")
    if coords.size and (coords.min() < 0 or coords.max() >= (1 << depth) + (depth == 0)):
        if depth == 0:
            if not np.all(coords == 0):
                raise ValueError("coordinates out of range for depth 0")
        else:
            raise ValueError("coordinates out of range for depth")
    x, y, z = (coords[:, k].astype(np.uint64) for k in range(3))
    # axis 0 occupies the most significant bit of each 3-bit group
    return (_part_bits(x) << np.uint64(2)) | (_part_bits(y) << np.uint64(1)) | _part_bits(z)


def morton_encode(coords, depth: int) -> MortonKey:
    """Morton key of a single cell; lexicographic key order is Morton order."""
    arr = np.asarray(coords, dtype=np.int64).reshape(1, 3)
    code = int(morton_encode_many(arr, depth)[0])
    return MortonKey(code=code, depth=depth)


def morton_decode(key: MortonKey) -> np.ndarray:
    """Inverse of :func:`morton_encode`, returning integer coordinates."""
    coords = np.zeros(3, dtype=np.int64)
    code = key.code
    for bit in range(key.depth):
        for axis in range(3):
            coords[2 - axis] |= ((code >> (3 * bit + axis)) & 1) << bit
    return coords


def point_cell_coords(points: np.ndarray, box: BoundingBox, depth: int) -> np.ndarray:
    """Integer cell coordinates at ``depth`` of each point inside ``box``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    inside = box.contains(pts)
    if not np.all(inside):
        raise ValueError("point outside the root bounding box")
    n_cells = 1 << depth
    scaled = (pts - box.lower) / box.side * n_cells
    return np.clip(scaled.astype(np.int64), 0, n_cells - 1)


def sort_particles_morton(points: np.ndarray, box: BoundingBox, depth: int) -> np.ndarray:
    """Permutation putting points in nondecreasing Morton order at ``depth``.

    Stable: coincident points keep their input order.
    """
    coords = point_cell_coords(points, box, depth)
    codes = morton_encode_many(coords, depth)
    return np.argsort(codes, kind="stable")


def cell_frame(root: BoundingBox, key: MortonKey) -> CellFrame:
    """Frame (lower corner, side) of the cell addressed by ``key``."""
    coords = morton_decode(key)
    beta = root.side / (1 << key.depth)
    alpha = root.lower + coords * beta
    return CellFrame(alpha=alpha, beta=beta)
