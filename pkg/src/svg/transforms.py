"""
Glyph transforms: normalization into the 256-grid, canonical path order,
validation, and conversion to and from the fixed-size padded form.
"""

import math
from typing import Tuple

import numpy as np

from src.patterns.error_handling import (
    DegenerateViewbox,
    InvalidGlyph,
    TooManyCommands,
    TooManyPaths,
)
from src.svg.glyph import (
    ARG_MASK,
    N_ARGS,
    NORMALIZED_EXTENT,
    PAD_ARG,
    Command,
    CommandType,
    Glyph,
    PaddedGlyph,
    Path,
)

DEFAULT_N_PATHS = 12
DEFAULT_N_CMDS = 100


def normalize(glyph: Glyph) -> Glyph:
    """Map used coordinates into [0, 255], keeping aspect ratio and centering the short axis."""
    width, height = glyph.viewbox
    if not (width > 0 and height > 0):
        raise DegenerateViewbox(width, height)
    scale = NORMALIZED_EXTENT / max(width, height)
    dx = (NORMALIZED_EXTENT - width * scale) / 2.0
    dy = (NORMALIZED_EXTENT - height * scale) / 2.0
    if scale == 1.0 and dx == 0.0 and dy == 0.0:
        return glyph
    return glyph.map_points(
        lambda x, y: (x * scale + dx, y * scale + dy),
        viewbox=(NORMALIZED_EXTENT, NORMALIZED_EXTENT),
    )


def _order_key(path: Path) -> Tuple[float, float, int]:
    start = path.first_move
    if start is None:
        return (math.inf, math.inf, len(path))
    return (start[1], start[0], len(path))


def canonical_path_order(glyph: Glyph) -> Glyph:
    """Sort paths by (first-M y, first-M x, command count); sorted() is stable."""
    return Glyph(tuple(sorted(glyph.paths, key=_order_key)), glyph.viewbox)


def validate_glyph(glyph: Glyph, normalized: bool = True) -> Glyph:
    """Raise InvalidGlyph on the first violated invariant; returns the glyph unchanged."""
    for i, path in enumerate(glyph.paths):
        if not path.commands:
            continue
        if path.commands[0].kind != CommandType.M:
            raise InvalidGlyph("path does not begin with M", path_index=i)
        if all(cmd.kind == CommandType.M for cmd in path.commands):
            raise InvalidGlyph("path has no command after its moveto", path_index=i)
        for cmd in path.commands:
            if cmd.kind in (CommandType.SOS, CommandType.EOS):
                raise InvalidGlyph(f"{cmd.kind.name} token inside a path", path_index=i)
            mask = ARG_MASK[cmd.kind]
            for value, used in zip(cmd.args, mask):
                if not used:
                    if value != PAD_ARG:
                        raise InvalidGlyph(f"unused argument of {cmd.kind.name} is {value}, not -1", path_index=i)
                    continue
                if not math.isfinite(value):
                    raise InvalidGlyph(f"non-finite coordinate in {cmd.kind.name}", path_index=i)
                if normalized and not (0.0 <= value <= NORMALIZED_EXTENT):
                    raise InvalidGlyph(f"coordinate {value} outside [0, 255]", path_index=i)
    return glyph


def pad_to_fixed(glyph: Glyph, n_paths: int = DEFAULT_N_PATHS, n_cmds: int = DEFAULT_N_CMDS) -> PaddedGlyph:
    if len(glyph.paths) > n_paths:
        raise TooManyPaths(n_paths, n_paths)
    command_types = np.full((n_paths, n_cmds), int(CommandType.EOS), dtype=np.int64)
    args = np.full((n_paths, n_cmds, N_ARGS), PAD_ARG, dtype=np.float64)
    visibility = np.zeros(n_paths, dtype=np.int64)
    for i, path in enumerate(glyph.paths):
        if len(path) > n_cmds - 1:
            raise TooManyCommands(i, len(path), n_cmds - 1)
        visibility[i] = int(path.visible)
        for j, cmd in enumerate(path.commands):
            command_types[i, j] = int(cmd.kind)
            args[i, j] = cmd.args
    arg_mask = ARG_MASK[command_types]
    return PaddedGlyph(command_types, args, visibility, arg_mask, glyph.viewbox)


def unpad(padded: PaddedGlyph) -> Glyph:
    """Inverse of pad_to_fixed: visible rows, each cut at its first EOS, SOS dropped."""
    paths = []
    for i in range(padded.n_paths):
        if not padded.visibility[i]:
            continue
        commands = []
        for j in range(padded.n_cmds):
            kind = CommandType(int(padded.command_types[i, j]))
            if kind == CommandType.EOS:
                break
            if kind == CommandType.SOS:
                continue
            commands.append(Command(kind, tuple(float(v) for v in padded.args[i, j])))
        paths.append(Path(tuple(commands)))
    return Glyph(tuple(paths), padded.viewbox)


def prepare_glyph(glyph: Glyph, n_paths: int = DEFAULT_N_PATHS, n_cmds: int = DEFAULT_N_CMDS) -> PaddedGlyph:
    """normalize -> canonical order -> validate -> pad."""
    glyph = canonical_path_order(normalize(glyph))
    validate_glyph(glyph)
    return pad_to_fixed(glyph, n_paths, n_cmds)
