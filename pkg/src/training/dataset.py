"""
Datasets of (style, content) glyphs.

On disk a dataset is one directory per style, one ``<content_id>.path`` file
per glyph, and a ``manifest.json`` naming the content-reference style and the
train/eval style split.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path as FsPath
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from src.logger import get_logger
from src.model.batch import GlyphBatch
from src.patterns.error_handling import DatasetError, error_context
from src.svg.glyph import Glyph, PaddedGlyph
from src.svg.io import GLYPH_SUFFIX, read_glyph_file, write_glyph_file
from src.svg.transforms import DEFAULT_N_CMDS, DEFAULT_N_PATHS, prepare_glyph
from src.training.synth import synth_glyphs

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"
CONTENT_STYLE = "s00"
EVAL_FRACTION = 7 / 66


@dataclass
class DatasetSplit:
    """
    styles are target styles; the content-reference style is kept apart and
    never plays the target role.
    """
    styles: List[str]
    contents: List[str]
    glyphs: Dict[str, Dict[str, Glyph]]
    content_style: str = CONTENT_STYLE
    metadata: Dict[str, Any] = field(default_factory=dict)

    def content_reference(self, content_id: str) -> Glyph:
        return self.glyphs[self.content_style][content_id]

    def target(self, style_id: str, content_id: str) -> Glyph:
        return self.glyphs[style_id][content_id]

    @property
    def pairs(self) -> List[Tuple[str, str, Glyph]]:
        return [(s, c, self.target(s, c)) for s in self.styles for c in self.contents]

    def __len__(self) -> int:
        return len(self.styles) * len(self.contents)

    def subset(self, styles: List[str]) -> "DatasetSplit":
        keep = {self.content_style: self.glyphs[self.content_style]}
        keep.update({s: self.glyphs[s] for s in styles})
        return DatasetSplit(list(styles), list(self.contents), keep, self.content_style, dict(self.metadata))


def synth_dataset(seed: int, n_styles: int, n_contents: int, n_paths: int = DEFAULT_N_PATHS,
                  n_cmds: int = DEFAULT_N_CMDS) -> DatasetSplit:
    """n_styles counts the content-reference style, so n_styles - 1 target styles result."""
    params, glyphs = synth_glyphs(seed, n_styles, n_contents, n_paths, n_cmds)
    styles = sorted(glyphs)
    contents = sorted(glyphs[CONTENT_STYLE])
    logger.info(f"synthesized {len(styles)} styles x {len(contents)} contents (seed {seed})")
    return DatasetSplit(
        styles=[s for s in styles if s != CONTENT_STYLE],
        contents=contents,
        glyphs=glyphs,
        metadata={"seed": seed, "n_paths": n_paths, "n_cmds": n_cmds,
                  "style_params": {sid: asdict(p) for sid, p in params.items()}},
    )


def split_styles(split: DatasetSplit, eval_fraction: float = EVAL_FRACTION) -> Tuple[DatasetSplit, DatasetSplit]:
    """
    Hold out the last ceil(fraction * n) target styles (at least one). With a
    single target style, train and eval share it.
    """
    styles = sorted(split.styles)
    if len(styles) <= 1:
        return split.subset(styles), split.subset(styles)
    n_eval = min(max(1, math.ceil(eval_fraction * len(styles))), len(styles) - 1)
    return split.subset(styles[:-n_eval]), split.subset(styles[-n_eval:])


def write_dataset(split: DatasetSplit, out_dir: Union[str, FsPath], eval_fraction: float = EVAL_FRACTION) -> FsPath:
    out_dir = FsPath(out_dir)
    train, held_out = split_styles(split, eval_fraction)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for style_id, by_content in sorted(split.glyphs.items()):
            for content_id in split.contents:
                write_glyph_file(out_dir / style_id / f"{content_id}{GLYPH_SUFFIX}", by_content[content_id])
        manifest = {
            "styles": sorted(split.glyphs),
            "contents": list(split.contents),
            "content_style": split.content_style,
            "train_styles": train.styles,
            "eval_styles": held_out.styles,
            "seed": split.metadata.get("seed"),
            "n_paths": split.metadata.get("n_paths", DEFAULT_N_PATHS),
            "n_cmds": split.metadata.get("n_cmds", DEFAULT_N_CMDS),
            "style_params": split.metadata.get("style_params", {}),
        }
        (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"Cannot write dataset to {out_dir}: {e}") from e
    logger.info(f"wrote {len(split.glyphs) * len(split.contents)} glyph files to {out_dir}")
    return out_dir


def read_manifest(data_dir: Union[str, FsPath]) -> Dict[str, Any]:
    path = FsPath(data_dir) / MANIFEST_NAME
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise DatasetError(f"Malformed manifest {path}: {e}") from e
    for key in ("styles", "contents", "content_style"):
        if key not in manifest:
            raise DatasetError(f"Manifest {path} lacks '{key}'")
    return manifest


def read_dataset(data_dir: Union[str, FsPath], role: Optional[str] = None) -> DatasetSplit:
    """
    Load a dataset directory. role "train"/"eval" restricts target styles to
    that manifest split; None keeps every non-reference style.
    """
    data_dir = FsPath(data_dir)
    manifest = read_manifest(data_dir)
    content_style = manifest["content_style"]
    styles = [s for s in manifest["styles"] if s != content_style]
    if role is not None:
        styles = list(manifest.get(f"{role}_styles", styles))
    glyphs: Dict[str, Dict[str, Glyph]] = {}
    for style_id in [content_style] + styles:
        glyphs[style_id] = {}
        for content_id in manifest["contents"]:
            path = data_dir / style_id / f"{content_id}{GLYPH_SUFFIX}"
            with error_context("read_dataset", file=str(path)):
                glyphs[style_id][content_id] = read_glyph_file(path)
    return DatasetSplit(styles, list(manifest["contents"]), glyphs, content_style, manifest)


@dataclass
class TrainingBatch:
    style: GlyphBatch
    content: GlyphBatch
    target: GlyphBatch
    keys: List[Tuple[str, str, str]]  # (style_id, content_id, style-reference content_id)


class TrainingPairs:
    """
    Padded arrays for every (target style, content) pair, plus epoch iteration.

    Each epoch draws its order and style references from
    default_rng([seed, epoch]); the style reference for (s, c) is another
    content of style s.
    """

    def __init__(self, split: DatasetSplit, n_paths: int = DEFAULT_N_PATHS, n_cmds: int = DEFAULT_N_CMDS,
                 seed: int = 0):
        if not split.styles or not split.contents:
            raise DatasetError("Training split has no (style, content) pairs")
        self.split = split
        self.seed = seed
        self.padded: Dict[str, Dict[str, PaddedGlyph]] = {}
        for style_id in [split.content_style] + list(split.styles):
            self.padded[style_id] = {}
            for content_id in split.contents:
                with error_context("prepare_glyph", style=style_id, content=content_id):
                    self.padded[style_id][content_id] = prepare_glyph(
                        split.glyphs[style_id][content_id], n_paths, n_cmds
                    )
        self.pairs = [(s, c) for s in split.styles for c in split.contents]

    def __len__(self) -> int:
        return len(self.pairs)

    def batches_per_epoch(self, batch_size: int) -> int:
        return math.ceil(len(self.pairs) / batch_size)

    def _style_reference(self, rng: np.random.Generator, content_id: str) -> str:
        others = [c for c in self.split.contents if c != content_id]
        if not others:
            return content_id
        return others[int(rng.integers(len(others)))]

    def epoch(self, epoch: int, batch_size: int, dtype=None) -> Iterator[TrainingBatch]:
        rng = np.random.default_rng([self.seed, epoch])
        order = rng.permutation(len(self.pairs))
        refs = [self._style_reference(rng, self.pairs[i][1]) for i in order]
        for lo in range(0, len(order), batch_size):
            keys = [(*self.pairs[i], r) for i, r in zip(order[lo:lo + batch_size], refs[lo:lo + batch_size])]
            yield self._collate(keys, dtype)

    def _collate(self, keys: List[Tuple[str, str, str]], dtype=None) -> TrainingBatch:
        kw = {} if dtype is None else {"dtype": dtype}
        return TrainingBatch(
            style=GlyphBatch.from_padded([self.padded[s][r] for s, _, r in keys], **kw),
            content=GlyphBatch.from_padded([self.padded[self.split.content_style][c] for _, c, _ in keys], **kw),
            target=GlyphBatch.from_padded([self.padded[s][c] for s, c, _ in keys], **kw),
            keys=keys,
        )
