"""Tensor-product lattices on a box."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """``points[k]`` equispaced nodes on ``box[k]``, endpoints included.

    The interior consists of the nodes at least one cell away from the
    boundary; finite-difference operators act on interior values with zero
    extension outside.
    """

    box: tuple
    points: tuple

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        pts = self.points
        if isinstance(pts, int):
            pts = (pts,) * len(box)
        pts = tuple(int(p) for p in pts)
        if len(pts) != len(box):
            raise ValueError("points per axis and box dimension differ")
        if any(p < 2 for p in pts):
            raise ValueError("need at least 2 points per axis")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "points", pts)

    @property
    def ndim(self) -> int:
        return len(self.box)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((hi - lo) / (p - 1) for (lo, hi), p in zip(self.box, self.points))

    @property
    def axes(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, p) for (lo, hi), p in zip(self.box, self.points)]

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(p - 2 for p in self.points)

    @property
    def n_interior(self) -> int:
        return int(np.prod(self.interior_shape))

    def nodes(self) -> np.ndarray:
        """All nodes as an ``(M, n)`` array in C (lexicographic index) order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def interior_nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*[a[1:-1] for a in self.axes], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.points, dtype=bool)
        mask[tuple(slice(1, -1) for _ in self.points)] = True
        return mask

    def subgrid(self, lo_idx, hi_idx) -> Grid:
        """Sub-box on the same lattice between node indices (inclusive)."""
        axes = self.axes
        box = tuple((axes[k][lo_idx[k]], axes[k][hi_idx[k]]) for k in range(self.ndim))
        pts = tuple(hi_idx[k] - lo_idx[k] + 1 for k in range(self.ndim))
        return Grid(box, pts)

    def shrink_levels(self, center, levels: int) -> list[Grid]:
        """Nested boxes around ``center`` on this lattice.

        Level 0 is the grid itself; level ``s`` keeps ``r / 2^s`` cells on each
        side of the node nearest ``center`` (at least one), so every level is a
        sub-lattice of the previous one.
        """
        idx = [int(np.argmin(np.abs(a - float(c)))) for a, c in zip(self.axes, center)]
        out = [self]
        radius = max(max(i, p - 1 - i) for i, p in zip(idx, self.points))
        for s in range(1, levels + 1):
            r = max(1, radius >> s)
            lo = [max(0, i - r) for i in idx]
            hi = [min(p - 1, i + r) for i, p in zip(idx, self.points)]
            out.append(self.subgrid(lo, hi))
        return out
