"""Nested unit-direction sets built from subdivided cube faces.

Refinement 0 holds the 6 projected cube-face centers (the +-axis unit
vectors).  Each refinement splits every face into 4 equal sub-faces and
projects the sub-face centers onto the unit sphere, giving 6 * 4**e
directions at refinement e.  Father links follow the face subdivision:
every direction at refinement e+1 has a unique father at refinement e.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DirectionTree",
    "generate_direction_tree",
    "nearest_direction",
    "father_direction",
]

# (axis held fixed, sign) for the 6 faces of the cube [-1,1]^3
_FACES = [(0, +1), (0, -1), (1, +1), (1, -1), (2, +1), (2, -1)]


@dataclass(frozen=True)
class DirectionTree:
    """levels[e]: (6*4**e, 3) unit vectors; fathers[e][i] indexes levels[e-1]."""

    levels: list
    fathers: list

    @property
    def max_refinement(self) -> int:
        return len(self.levels) - 1

    def count(self, refinement: int) -> int:
        return self.levels[refinement].shape[0]


def _face_center(axis: int, sign: int, u: float, v: float) -> np.ndarray:
    """Point on the cube surface with in-face coordinates (u, v) in [-1,1]."""
    p = np.empty(3)
    p[axis] = float(sign)
    others = [a for a in range(3) if a != axis]
    p[others[0]] = u
    p[others[1]] = v
    return p


def generate_direction_tree(max_refinement: int) -> DirectionTree:
    if max_refinement < 0:
        raise ValueError("max_refinement must be >= 0")
    levels = []
    fathers = []
    for e in range(max_refinement + 1):
        m = 1 << e  # sub-faces per face edge
        dirs = np.empty((6 * m * m, 3))
        fa = np.empty(6 * m * m, dtype=np.int64)
        idx = 0
        for f, (axis, sign) in enumerate(_FACES):
            for i in range(m):
                for j in range(m):
                    # sub-face center = mean of its corners, then projected
                    u = -1.0 + (2.0 * i + 1.0) / m
                    v = -1.0 + (2.0 * j + 1.0) / m
                    p = _face_center(axis, sign, u, v)
                    dirs[idx] = p / np.linalg.norm(p)
                    # containing sub-face one refinement coarser
                    fa[idx] = (f * (m // 2) + i // 2) * (m // 2) + j // 2 if e else -1
                    idx += 1
        levels.append(dirs)
        fathers.append(fa if e else None)
    return DirectionTree(levels=levels, fathers=fathers)


def nearest_direction(tree: DirectionTree, refinement: int, v: np.ndarray) -> int:
    """Index of the refinement-level direction closest to the unit vector v.

    Ties are broken by smallest index (argmin semantics).
    """
    if refinement < 0 or refinement > tree.max_refinement:
        raise ValueError("refinement out of range")
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("v must be a unit vector")
    d2 = np.sum((tree.levels[refinement] - v) ** 2, axis=1)
    return int(np.argmin(d2))


def father_direction(tree: DirectionTree, refinement: int, index: int) -> int:
    """Father (refinement-1) index of a direction under face subdivision."""
    if refinement <= 0:
        raise ValueError("directions at the coarsest refinement have no father")
    return int(tree.fathers[refinement][index])
