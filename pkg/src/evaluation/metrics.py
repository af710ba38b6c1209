"""
Quantitative evaluation: rasterized pixel L1 and whole-glyph Chamfer distance
over the (style, content) pairs of a split.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch

from src.geometry.chamfer import chamfer_distance
from src.geometry.curves import glyph_point_cloud
from src.geometry.raster import DEFAULT_RESOLUTION, RasterImage, pixel_distance, rasterize, tile_images
from src.logger import get_logger
from src.model.batch import GlyphBatch
from src.model.network import FontStyleTransfer, generate_batch
from src.patterns.error_handling import EmptyCloud
from src.svg.glyph import Glyph, PaddedGlyph
from src.svg.transforms import DEFAULT_N_CMDS, DEFAULT_N_PATHS, normalize, prepare_glyph
from src.training.dataset import DatasetSplit

logger = get_logger(__name__)

N_P_EVAL = 99
REPORT_HEADER = ("style_id", "content_id", "pixel_l1", "chamfer")

# (style_id, content_id, content reference, style reference) -> predicted glyph
Request = Tuple[str, str, PaddedGlyph, PaddedGlyph]
Generator = Callable[[Sequence[Request]], List[Glyph]]


def eval_chamfer(pred: Glyph, target: Glyph, n_p: int = N_P_EVAL, index: str = "brute") -> float:
    """All visible paths of each glyph merged into one cloud; no per-path pairing."""
    return chamfer_distance(glyph_point_cloud(pred, n_p), glyph_point_cloud(target, n_p), index=index)


def eval_pixel(pred: Glyph, target: Glyph, resolution: Tuple[int, int] = DEFAULT_RESOLUTION) -> float:
    return pixel_distance(rasterize(pred, resolution), rasterize(target, resolution))


@dataclass
class EvalRow:
    style_id: str
    content_id: str
    pixel_l1: float
    chamfer: float

    def to_row(self) -> List[str]:
        return [self.style_id, self.content_id, repr(self.pixel_l1), repr(self.chamfer)]


@dataclass
class EvalReport:
    rows: List[EvalRow]
    n_p: int = N_P_EVAL
    resolution: Tuple[int, int] = DEFAULT_RESOLUTION
    images: Dict[Tuple[str, str], Tuple[RasterImage, RasterImage]] = field(default_factory=dict, repr=False)

    @property
    def mean_pixel(self) -> float:
        if not self.rows:
            return math.nan
        return math.fsum(r.pixel_l1 for r in self.rows) / len(self.rows)

    @property
    def mean_chamfer(self) -> float:
        values = [r.chamfer for r in self.rows if not math.isnan(r.chamfer)]
        return math.fsum(values) / len(values) if values else math.nan

    @property
    def n_empty(self) -> int:
        return sum(1 for r in self.rows if math.isnan(r.chamfer))

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for row in self.rows:
            writer.writerow(row.to_row())
        writer.writerow(["MEAN", "ALL", repr(self.mean_pixel), repr(self.mean_chamfer)])
        return buffer.getvalue()

    def summary(self) -> Dict[str, float]:
        return {
            "pairs": len(self.rows),
            "pixel_l1": self.mean_pixel,
            "chamfer": self.mean_chamfer,
            "n_empty": self.n_empty,
        }

    def write_sheet(self, path: Union[str, Path], styles: Sequence[str], contents: Sequence[str]) -> None:
        """Two rows per style (prediction above target), one column per content."""
        rows = []
        for s in styles:
            pairs = [self.images[(s, c)] for c in contents if (s, c) in self.images]
            if pairs:
                rows.append([p for p, _ in pairs])
                rows.append([t for _, t in pairs])
        tile_images(rows).save(path)

    def dump_images(self, out_dir: Union[str, Path]) -> int:
        out_dir = Path(out_dir)
        for (s, c), (pred, target) in sorted(self.images.items()):
            pred.save(out_dir / f"{s}_{c}_pred.pgm")
            target.save(out_dir / f"{s}_{c}_target.pgm")
        return len(self.images)


def _score(pred: Glyph, target: Glyph, n_p: int, resolution: Tuple[int, int], index: str = "brute"):
    pred_img = rasterize(pred, resolution)
    target_img = rasterize(target, resolution)
    try:
        chamfer = eval_chamfer(pred, target, n_p, index)
    except EmptyCloud:
        chamfer = math.nan
    return pixel_distance(pred_img, target_img), chamfer, pred_img, target_img


def style_reference_for(split: DatasetSplit, content_id: str, seed: int = 0) -> str:
    """Deterministic choice of another content of the same style."""
    others = [c for c in split.contents if c != content_id]
    if not others:
        return content_id
    rng = np.random.default_rng([seed, split.contents.index(content_id)])
    return others[int(rng.integers(len(others)))]


def build_requests(split: DatasetSplit, n_paths: int, n_cmds: int, seed: int = 0) -> List[Request]:
    padded: Dict[Tuple[str, str], PaddedGlyph] = {}

    def pad(style_id: str, content_id: str) -> PaddedGlyph:
        key = (style_id, content_id)
        if key not in padded:
            padded[key] = prepare_glyph(split.glyphs[style_id][content_id], n_paths, n_cmds)
        return padded[key]

    requests = []
    for s in split.styles:
        for c in split.contents:
            ref = style_reference_for(split, c, seed)
            requests.append((s, c, pad(split.content_style, c), pad(s, ref)))
    return requests


class ModelGenerator:
    """Batched argmax generation with a trained model."""

    def __init__(self, model: FontStyleTransfer, batch_size: int = 32):
        self.model = model
        self.batch_size = batch_size

    def __call__(self, requests: Sequence[Request]) -> List[Glyph]:
        dtype = next(self.model.parameters()).dtype
        out: List[Glyph] = []
        for lo in range(0, len(requests), self.batch_size):
            chunk = requests[lo:lo + self.batch_size]
            content = GlyphBatch.from_padded([r[2] for r in chunk], dtype=dtype)
            style = GlyphBatch.from_padded([r[3] for r in chunk], dtype=dtype)
            out.extend(generate_batch(self.model, content, style))
        return out


class IdentityOracle:
    """Returns the ground-truth target; a self-test of the evaluation harness."""

    def __init__(self, split: DatasetSplit):
        self.split = split

    def __call__(self, requests: Sequence[Request]) -> List[Glyph]:
        return [normalize(self.split.target(s, c)) for s, c, _, _ in requests]


def eval_split(generator: Generator, split: DatasetSplit, n_p: int = N_P_EVAL,
               resolution: Tuple[int, int] = DEFAULT_RESOLUTION, n_paths: int = DEFAULT_N_PATHS,
               n_cmds: int = DEFAULT_N_CMDS,
               threads: Optional[int] = None, seed: int = 0, keep_images: bool = False,
               index: str = "brute") -> EvalReport:
    """
    Generate every (style, content) pair of the split and score it. Scoring runs
    on a thread pool; rows come back in split order whatever the thread count.
    """
    requests = build_requests(split, n_paths, n_cmds, seed)
    with torch.no_grad():
        predictions = generator(requests)
    targets = [normalize(split.target(s, c)) for s, c, _, _ in requests]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        scores = list(pool.map(lambda pt: _score(pt[0], pt[1], n_p, resolution, index), zip(predictions, targets)))
    report = EvalReport([], n_p, resolution)
    for (s, c, _, _), (pixel, chamfer, pred_img, target_img) in zip(requests, scores):
        report.rows.append(EvalRow(s, c, pixel, chamfer))
        if keep_images:
            report.images[(s, c)] = (pred_img, target_img)
    logger.info(
        f"evaluated {len(report.rows)} pairs: pixel_l1 {report.mean_pixel:.5f}, "
        f"chamfer {report.mean_chamfer:.4f}, {report.n_empty} empty predictions"
    )
    return report
