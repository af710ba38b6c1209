"""
Command embedding: e = e_cmd + e_coord, plus learnable command- and path-index
embeddings.
"""

import torch
import torch.nn as nn

from src.svg.glyph import N_ARGS, N_COMMAND_TYPES, NORMALIZED_EXTENT, PAD_ARG


class CommandEmbedding(nn.Module):
    """
    Type lookup plus a linear projection of the arguments.

    Arguments are scaled by 1/255; -1 slots become (value 0, presence 0) so the
    sentinel never reaches the projection as a magnitude. The projection input is
    the 6 scaled values followed by the 6 presence bits.
    """

    def __init__(self, d_model: int, n_paths: int, n_cmds: int):
        super().__init__()
        self.d_model = d_model
        self.type_table = nn.Embedding(N_COMMAND_TYPES, d_model)
        self.coord_proj = nn.Linear(2 * N_ARGS, d_model)
        self.index_table_cmd = nn.Embedding(n_cmds, d_model)
        self.index_table_path = nn.Embedding(n_paths, d_model)
        for table in (self.type_table, self.index_table_cmd, self.index_table_path):
            nn.init.normal_(table.weight, std=0.02)

    def embed_command(self, command_types: torch.Tensor, args: torch.Tensor) -> torch.Tensor:
        """(...,) types and (..., 6) args -> (..., d_model)."""
        present = args != PAD_ARG
        values = torch.where(present, args / NORMALIZED_EXTENT, torch.zeros_like(args))
        features = torch.cat([values, present.to(args.dtype)], dim=-1)
        return self.type_table(command_types) + self.coord_proj(features)

    def embed_path_sequence(self, command_types: torch.Tensor, args: torch.Tensor) -> torch.Tensor:
        """(..., N_C) row(s) -> (..., N_C, d_model) with command-index embeddings added."""
        n_cmds = command_types.shape[-1]
        return self.embed_command(command_types, args) + self.index_table_cmd.weight[:n_cmds]

    def add_path_index(self, path_features: torch.Tensor) -> torch.Tensor:
        """(..., N_P, d_model) -> same shape with path-index embeddings added."""
        n_paths = path_features.shape[-2]
        return path_features + self.index_table_path.weight[:n_paths]
