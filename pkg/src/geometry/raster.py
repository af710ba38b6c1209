"""Even-odd scanline rasterizer and raster image utilities."""

from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.geometry.curves import path_polylines
from src.patterns.error_handling import DegenerateViewbox, ResolutionMismatch
from src.svg.glyph import Glyph, Path

FLATTEN_TOLERANCE_PX = 0.25
DEFAULT_RESOLUTION = (128, 128)


@dataclass
class RasterImage:
    """pixels[r, c] in [0, 1]; 1 is ink."""
    pixels: np.ndarray

    @property
    def resolution(self) -> Tuple[int, int]:
        return tuple(self.pixels.shape)

    @classmethod
    def blank(cls, resolution: Tuple[int, int]) -> "RasterImage":
        return cls(np.zeros(resolution, dtype=np.float64))

    def to_gray8(self) -> np.ndarray:
        """White paper, black ink."""
        return np.round((1.0 - np.clip(self.pixels, 0.0, 1.0)) * 255.0).astype(np.uint8)

    def to_pgm(self) -> bytes:
        h, w = self.resolution
        return f"P5\n{w} {h}\n255\n".encode("ascii") + self.to_gray8().tobytes()

    def save(self, path: Union[str, FsPath]) -> None:
        path = FsPath(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix.lower() == ".png":
            from PIL import Image

            Image.fromarray(self.to_gray8()).save(path)
        else:
            path.write_bytes(self.to_pgm())


def _edges(glyph: Glyph, resolution: Tuple[int, int]) -> np.ndarray:
    h, w = resolution
    vw, vh = glyph.viewbox
    if not (vw > 0 and vh > 0):
        raise DegenerateViewbox(vw, vh)
    sx, sy = w / vw, h / vh
    edges = []
    for path in glyph.visible_paths:
        pixel_path = Path(tuple(c.map_points(lambda x, y: (x * sx, y * sy)) for c in path.commands))
        for poly in path_polylines(pixel_path, FLATTEN_TOLERANCE_PX):
            nxt = np.roll(poly, -1, axis=0)
            edges.append(np.concatenate([poly, nxt], axis=1))
    if not edges:
        return np.zeros((0, 4))
    return np.concatenate(edges, axis=0)


def rasterize(glyph: Glyph, resolution: Tuple[int, int] = DEFAULT_RESOLUTION) -> RasterImage:
    """A pixel centre is ink iff a ray to its left crosses the outlines an odd number of times."""
    h, w = resolution
    image = np.zeros((h, w), dtype=np.float64)
    edges = _edges(glyph, resolution)
    if len(edges) == 0:
        return RasterImage(image)
    x0, y0, x1, y1 = edges.T
    horizontal = y0 == y1
    centers = np.arange(w) + 0.5
    for r in range(h):
        yc = r + 0.5
        hit = ~horizontal & (((y0 <= yc) & (yc < y1)) | ((y1 <= yc) & (yc < y0)))
        if not hit.any():
            continue
        xs = x0[hit] + (yc - y0[hit]) * (x1[hit] - x0[hit]) / (y1[hit] - y0[hit])
        xs.sort()
        crossings = np.searchsorted(xs, centers, side="left")
        image[r] = crossings % 2
    return RasterImage(image)


def pixel_distance(a: RasterImage, b: RasterImage) -> float:
    if a.resolution != b.resolution:
        raise ResolutionMismatch(a.resolution, b.resolution)
    return float(np.abs(a.pixels - b.pixels).mean())


def tile_images(rows: Sequence[Sequence[RasterImage]], gap: int = 2) -> RasterImage:
    """Grid sheet; every image must share one resolution. Gaps are left blank."""
    cells: List[RasterImage] = [img for row in rows for img in row]
    if not cells:
        return RasterImage.blank((1, 1))
    h, w = cells[0].resolution
    n_rows = len(rows)
    n_cols = max(len(row) for row in rows)
    sheet = np.zeros((n_rows * (h + gap) - gap, n_cols * (w + gap) - gap))
    for i, row in enumerate(rows):
        for j, img in enumerate(row):
            if img.resolution != (h, w):
                raise ResolutionMismatch(img.resolution, (h, w))
            sheet[i * (h + gap):i * (h + gap) + h, j * (w + gap):j * (w + gap) + w] = img.pixels
    return RasterImage(sheet)
