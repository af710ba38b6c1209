"""
Hierarchical encoder/decoder.

Encoder: E1 runs over the commands of each path, its outputs are mean-pooled
into one vector per path; E2 runs over those path vectors and is mean-pooled
into the style feature z. No sampling happens anywhere.

Decoder: D2 turns the mean command embedding of each content path into w_i and
a visibility prediction; D1 re-reads the content commands of each path, adds
an affine image of w_i partway up the stack and emits command logits and
arguments. Every normalization site in D1 and D2 is AdaIN conditioned on z.
"""

from typing import List, Optional, Sequence

import numpy as np
import torch
import torch.nn as nn

from src.config import ModelConfig
from src.logger import get_logger
from src.model.batch import GlyphBatch, Prediction
from src.model.blocks import TransformerStack
from src.model.embedding import CommandEmbedding
from src.svg.glyph import (
    ARG_MASK,
    N_COMMAND_TYPES,
    NORMALIZED_EXTENT,
    PAD_ARG,
    Command,
    CommandType,
    Glyph,
    PaddedGlyph,
    Path,
)
from src.svg.transforms import DEFAULT_N_CMDS, DEFAULT_N_PATHS

logger = get_logger(__name__)


class StyleEncoder(nn.Module):
    def __init__(self, cfg: ModelConfig, n_paths: int, n_cmds: int):
        super().__init__()
        self.embedding = CommandEmbedding(cfg.d_model, n_paths, n_cmds)
        self.e1 = TransformerStack(cfg.n_layers, cfg.d_model, cfg.n_heads, cfg.ff_dim, cfg.dropout)
        self.e2 = TransformerStack(cfg.n_layers, cfg.d_model, cfg.n_heads, cfg.ff_dim, cfg.dropout)
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.norm2 = nn.LayerNorm(cfg.d_model)

    def forward(self, style: GlyphBatch) -> torch.Tensor:
        b, p, c = style.command_types.shape
        e = self.embedding.embed_path_sequence(style.command_types, style.args)  # (B, P, C, D)
        h = self.norm1(self.e1(e.reshape(b * p, c, -1)))
        u = h.mean(dim=1).reshape(b, p, -1)
        u = self.embedding.add_path_index(u)
        return self.norm2(self.e2(u)).mean(dim=1)


class ContentDecoder(nn.Module):
    def __init__(self, cfg: ModelConfig, n_paths: int, n_cmds: int):
        super().__init__()
        self.inject_layer = cfg.inject_layer
        self.embedding = CommandEmbedding(cfg.d_model, n_paths, n_cmds)
        self.d2 = TransformerStack(cfg.n_layers, cfg.d_model, cfg.n_heads, cfg.ff_dim, cfg.dropout, conditional=True)
        self.d1 = TransformerStack(cfg.n_layers, cfg.d_model, cfg.n_heads, cfg.ff_dim, cfg.dropout, conditional=True)
        self.norm2 = nn.LayerNorm(cfg.d_model)
        self.norm1 = nn.LayerNorm(cfg.d_model)
        self.path_inject = nn.Linear(cfg.d_model, cfg.d_model)
        self.visibility_head = nn.Linear(cfg.d_model, 2)
        self.command_head = nn.Linear(cfg.d_model, N_COMMAND_TYPES)
        self.args_head = nn.Linear(cfg.d_model, 6)

    def forward(self, content: GlyphBatch, z: torch.Tensor) -> Prediction:
        b, p, c = content.command_types.shape
        e = self.embedding.embed_command(content.command_types, content.args)  # (B, P, C, D)

        path_vectors = self.embedding.add_path_index(e.mean(dim=2))
        w = self.norm2(self.d2(path_vectors, z))  # (B, P, D)
        visibility_logits = self.visibility_head(w)

        z_rows = z.repeat_interleave(p, dim=0)
        x = (e + self.embedding.index_table_cmd.weight[:c]).reshape(b * p, c, -1)
        x = self.d1.run(x, z_rows, stop=self.inject_layer)
        x = x + self.path_inject(w).reshape(b * p, 1, -1)
        x = self.norm1(self.d1.run(x, z_rows, start=self.inject_layer))

        command_logits = self.command_head(x).reshape(b, p, c, N_COMMAND_TYPES)
        args = NORMALIZED_EXTENT * torch.sigmoid(self.args_head(x)).reshape(b, p, c, 6)
        return Prediction(visibility_logits, command_logits, args)


class FontStyleTransfer(nn.Module):
    """Encoder + decoder. forward(content, style) is decode(content, encode(style))."""

    def __init__(self, cfg: Optional[ModelConfig] = None, n_paths: int = DEFAULT_N_PATHS,
                 n_cmds: int = DEFAULT_N_CMDS):
        super().__init__()
        self.cfg = cfg or ModelConfig()
        self.n_paths = n_paths
        self.n_cmds = n_cmds
        self.encoder = StyleEncoder(self.cfg, n_paths, n_cmds)
        self.decoder = ContentDecoder(self.cfg, n_paths, n_cmds)

    def encode(self, style: GlyphBatch) -> torch.Tensor:
        return self.encoder(style)

    def decode(self, content: GlyphBatch, z: torch.Tensor) -> Prediction:
        return self.decoder(content, z)

    def forward(self, content: GlyphBatch, style: GlyphBatch) -> Prediction:
        return self.decode(content, self.encode(style))

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def _assemble_paths(kinds: Sequence[int], args: np.ndarray, max_cmds: int) -> List[Path]:
    """
    Turn one predicted row into re-parseable paths.

    Stops at the first EOS, skips SOS, drops commands before the first M and
    starts a new path at any M that follows a drawing command or Z. An M right
    after an M replaces it, and a path left with only its M is dropped.
    """
    paths: List[Path] = []
    current: List[Command] = []

    def flush() -> None:
        if len(current) > 1:
            paths.append(Path(tuple(current)))

    for j, kind in enumerate(kinds[:max_cmds]):
        kind = CommandType(int(kind))
        if kind == CommandType.EOS:
            break
        if kind == CommandType.SOS:
            continue
        if not current and kind != CommandType.M:
            continue
        if kind == CommandType.M and current:
            if current[-1].kind == CommandType.M:
                current.pop()
            else:
                flush()
                current.clear()
        used = ARG_MASK[kind].astype(bool)
        row = np.where(used, np.clip(args[j], 0.0, NORMALIZED_EXTENT), PAD_ARG)
        current.append(Command(kind, tuple(float(v) for v in row)))
    flush()
    return paths


def assemble_glyph(visibility_logits: np.ndarray, command_logits: np.ndarray, args: np.ndarray) -> Glyph:
    """Argmax decoding of one item: (P, 2), (P, C, 6), (P, C, 6) -> Glyph on the 255 viewbox."""
    visible = visibility_logits.argmax(axis=-1)
    kinds = command_logits.argmax(axis=-1)
    n_cmds = kinds.shape[-1]
    paths: List[Path] = []
    for i in np.flatnonzero(visible):
        paths.extend(_assemble_paths(kinds[i], args[i], n_cmds - 1))
    return Glyph(tuple(paths), (NORMALIZED_EXTENT, NORMALIZED_EXTENT))


@torch.no_grad()
def generate_batch(model: FontStyleTransfer, content: GlyphBatch, style: GlyphBatch) -> List[Glyph]:
    was_training = model.training
    model.eval()
    try:
        pred = model(content, style)
    finally:
        model.train(was_training)
    vis = pred.visibility_logits.cpu().numpy()
    cmd = pred.command_logits.cpu().numpy()
    args = pred.args.double().cpu().numpy()
    return [assemble_glyph(vis[k], cmd[k], args[k]) for k in range(len(content))]


def generate(model: FontStyleTransfer, content: PaddedGlyph, style: PaddedGlyph) -> Glyph:
    """decode(content, encode(style)) followed by argmax decoding; may return an empty glyph."""
    dtype = next(model.parameters()).dtype
    glyph = generate_batch(
        model,
        GlyphBatch.from_padded([content], dtype=dtype),
        GlyphBatch.from_padded([style], dtype=dtype),
    )[0]
    if not glyph.paths:
        logger.debug("generated glyph has no visible paths")
    return glyph
