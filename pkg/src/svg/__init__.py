"""SVG subset data model (M, L, C, Z) and its fixed-length tensor form."""

from src.svg.glyph import (
    ARG_MASK,
    ARITY,
    N_ARGS,
    N_COMMAND_TYPES,
    NORMALIZED_EXTENT,
    PAD_ARG,
    Command,
    CommandType,
    Glyph,
    PaddedGlyph,
    Path,
)
from src.svg.parser import parse_svg_path, serialize_svg
from src.svg.transforms import (
    DEFAULT_N_CMDS,
    DEFAULT_N_PATHS,
    canonical_path_order,
    normalize,
    pad_to_fixed,
    prepare_glyph,
    unpad,
    validate_glyph,
)

__all__ = [
    "ARG_MASK",
    "ARITY",
    "N_ARGS",
    "N_COMMAND_TYPES",
    "NORMALIZED_EXTENT",
    "PAD_ARG",
    "DEFAULT_N_CMDS",
    "DEFAULT_N_PATHS",
    "Command",
    "CommandType",
    "Glyph",
    "PaddedGlyph",
    "Path",
    "parse_svg_path",
    "serialize_svg",
    "canonical_path_order",
    "normalize",
    "pad_to_fixed",
    "prepare_glyph",
    "unpad",
    "validate_glyph",
]
