"""Geometric kernel shared by the Chamfer loss and the evaluation metrics."""

from src.geometry.chamfer import GridIndex, chamfer_distance
from src.geometry.curves import (
    Point,
    eval_curve,
    flatten_cubic,
    glyph_point_cloud,
    path_point_cloud,
    sample_command,
)
from src.geometry.raster import (
    DEFAULT_RESOLUTION,
    RasterImage,
    pixel_distance,
    rasterize,
    tile_images,
)

__all__ = [
    "DEFAULT_RESOLUTION",
    "GridIndex",
    "Point",
    "RasterImage",
    "chamfer_distance",
    "eval_curve",
    "flatten_cubic",
    "glyph_point_cloud",
    "path_point_cloud",
    "pixel_distance",
    "rasterize",
    "sample_command",
    "tile_images",
]
