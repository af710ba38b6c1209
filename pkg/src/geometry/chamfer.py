"""Chamfer distance between 2-D point clouds (numpy, exact)."""

from typing import Dict, Iterator, List, Tuple

import numpy as np

from src.patterns.error_handling import EmptyCloud

_CHUNK = 512


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    dx = a[:, None, 0] - b[None, :, 0]
    dy = a[:, None, 1] - b[None, :, 1]
    return dx * dx + dy * dy


def _nearest_brute(query: np.ndarray, ref: np.ndarray) -> np.ndarray:
    out = np.empty(len(query))
    for lo in range(0, len(query), _CHUNK):
        out[lo:lo + _CHUNK] = _sq_dists(query[lo:lo + _CHUNK], ref).min(axis=1)
    return out


class GridIndex:
    """Uniform bucket grid over a reference cloud for exact nearest-neighbour search."""

    def __init__(self, ref: np.ndarray, cell: float = 0.0):
        self.ref = ref
        lo = ref.min(axis=0)
        hi = ref.max(axis=0)
        if cell <= 0.0:
            extent = float((hi - lo).max())
            # a single-location cloud fits in one cell of any size
            cell = extent / max(np.sqrt(len(ref)), 1.0) if extent > 0.0 else 1.0
        self.cell = cell
        self.origin = lo
        keys = np.floor((ref - lo) / cell).astype(np.int64)
        self.buckets: Dict[Tuple[int, int], List[int]] = {}
        for idx, (i, j) in enumerate(keys):
            self.buckets.setdefault((int(i), int(j)), []).append(idx)
        self.shape = (int(keys[:, 0].max()) + 1, int(keys[:, 1].max()) + 1)

    def _ring_cells(self, ci: int, cj: int, ring: int) -> Iterator[Tuple[int, int]]:
        """Cells at Chebyshev distance `ring` from (ci, cj), clipped to the grid."""
        ni, nj = self.shape
        j_lo, j_hi = max(cj - ring, 0), min(cj + ring, nj - 1)
        for i in range(max(ci - ring, 0), min(ci + ring, ni - 1) + 1):
            if abs(i - ci) == ring:
                for j in range(j_lo, j_hi + 1):
                    yield i, j
            else:
                for j in {cj - ring, cj + ring}:
                    if 0 <= j < nj:
                        yield i, j

    def nearest_sq(self, q: np.ndarray) -> float:
        ci, cj = (int(v) for v in np.floor((q - self.origin) / self.cell))
        ni, nj = self.shape
        # rings closer than the grid box are empty; rings past the far corner cover nothing new
        first = max(0, -ci, ci - (ni - 1), -cj, cj - (nj - 1))
        last = max(abs(ci), abs(ci - (ni - 1)), abs(cj), abs(cj - (nj - 1)))
        best = np.inf
        for ring in range(first, last + 1):
            candidates: List[int] = []
            for key in self._ring_cells(ci, cj, ring):
                candidates.extend(self.buckets.get(key, ()))
            if candidates:
                best = min(best, _sq_dists(q[None, :], self.ref[candidates])[0].min())
            # cells beyond this ring are more than ring * cell away along one axis
            reach = ring * self.cell
            if best <= reach * reach:
                break
        return float(best)


def _nearest_grid(query: np.ndarray, ref: np.ndarray) -> np.ndarray:
    index = GridIndex(ref)
    return np.array([index.nearest_sq(q) for q in query])


def chamfer_distance(q1: np.ndarray, q2: np.ndarray, index: str = "brute") -> float:
    """
    Mean squared nearest-neighbour distance from q1 to q2 plus the same from q2 to q1.

    ``index="grid"`` uses a bucket grid; the per-pair arithmetic is shared with the
    brute-force path, so both return the same value.
    """
    q1 = np.asarray(q1, dtype=np.float64).reshape(-1, 2)
    q2 = np.asarray(q2, dtype=np.float64).reshape(-1, 2)
    if len(q1) == 0:
        raise EmptyCloud("first cloud")
    if len(q2) == 0:
        raise EmptyCloud("second cloud")
    if index not in ("brute", "grid"):
        raise ValueError(f"unknown nearest-neighbour index '{index}'")
    nearest = _nearest_grid if index == "grid" else _nearest_brute
    return float(nearest(q1, q2).mean() + nearest(q2, q1).mean())
