"""Command embedding, hierarchical Transformer encoder/decoder and the training losses."""

from src.model.batch import GlyphBatch, Prediction
from src.model.blocks import AdaIN, TransformerBlock, TransformerStack, adain
from src.model.embedding import CommandEmbedding
from src.model.losses import (
    LossBreakdown,
    argument_loss,
    chamfer_loss,
    command_loss,
    total_loss,
    visibility_loss,
)
from src.model.network import FontStyleTransfer, assemble_glyph, generate, generate_batch

__all__ = [
    "AdaIN",
    "CommandEmbedding",
    "FontStyleTransfer",
    "GlyphBatch",
    "LossBreakdown",
    "Prediction",
    "TransformerBlock",
    "TransformerStack",
    "adain",
    "argument_loss",
    "assemble_glyph",
    "chamfer_loss",
    "command_loss",
    "generate",
    "generate_batch",
    "total_loss",
    "visibility_loss",
]
