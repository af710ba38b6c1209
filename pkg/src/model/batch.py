"""Batched torch view of PaddedGlyph and the decoder's Prediction."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch

from src.svg.glyph import PaddedGlyph


@dataclass
class GlyphBatch:
    command_types: torch.Tensor  # (B, N_P, N_C) long
    args: torch.Tensor           # (B, N_P, N_C, 6) float
    visibility: torch.Tensor     # (B, N_P) long
    arg_mask: torch.Tensor       # (B, N_P, N_C, 6) bool

    @classmethod
    def from_padded(cls, glyphs: Sequence[PaddedGlyph], dtype=torch.float32) -> "GlyphBatch":
        return cls(
            command_types=torch.from_numpy(np.stack([g.command_types for g in glyphs])).long(),
            args=torch.from_numpy(np.stack([g.args for g in glyphs])).to(dtype),
            visibility=torch.from_numpy(np.stack([g.visibility for g in glyphs])).long(),
            arg_mask=torch.from_numpy(np.stack([g.arg_mask for g in glyphs])).bool(),
        )

    @classmethod
    def from_arrays(cls, command_types, args, visibility, arg_mask, dtype=torch.float32) -> "GlyphBatch":
        return cls(
            command_types=torch.as_tensor(command_types).long(),
            args=torch.as_tensor(args).to(dtype),
            visibility=torch.as_tensor(visibility).long(),
            arg_mask=torch.as_tensor(arg_mask).bool(),
        )

    def __len__(self) -> int:
        return self.command_types.shape[0]

    @property
    def n_paths(self) -> int:
        return self.command_types.shape[1]

    @property
    def n_cmds(self) -> int:
        return self.command_types.shape[2]


@dataclass
class Prediction:
    visibility_logits: torch.Tensor  # (B, N_P, 2)
    command_logits: torch.Tensor     # (B, N_P, N_C, 6)
    args: torch.Tensor               # (B, N_P, N_C, 6), in [0, 255]
