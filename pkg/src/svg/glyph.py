"""
Glyph data model: the four-command SVG subset plus the SOS/EOS tokens used in
fixed-length tensors.
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional, Tuple

import numpy as np

N_ARGS = 6
PAD_ARG = -1.0
NORMALIZED_EXTENT = 255.0


class CommandType(IntEnum):
    SOS = 0
    M = 1
    L = 2
    C = 3
    Z = 4
    EOS = 5

    @property
    def is_drawing(self) -> bool:
        return self in (CommandType.L, CommandType.C)


N_COMMAND_TYPES = len(CommandType)

# Rows indexed by CommandType: which of (x1, y1, x2, y2, x, y) are used.
ARG_MASK = np.array(
    [
        [0, 0, 0, 0, 0, 0],  # SOS
        [0, 0, 0, 0, 1, 1],  # M
        [0, 0, 0, 0, 1, 1],  # L
        [1, 1, 1, 1, 1, 1],  # C
        [0, 0, 0, 0, 0, 0],  # Z
        [0, 0, 0, 0, 0, 0],  # EOS
    ],
    dtype=np.int64,
)

ARITY = {kind: int(ARG_MASK[kind].sum()) for kind in CommandType}

_EMPTY_ARGS = (PAD_ARG,) * N_ARGS


@dataclass(frozen=True)
class Command:
    kind: CommandType
    args: Tuple[float, ...] = _EMPTY_ARGS

    def __post_init__(self):
        object.__setattr__(self, "kind", CommandType(self.kind))
        object.__setattr__(self, "args", tuple(float(a) for a in self.args))
        if len(self.args) != N_ARGS:
            raise ValueError(f"Command args must have {N_ARGS} slots, got {len(self.args)}")

    @classmethod
    def move(cls, x: float, y: float) -> "Command":
        return cls(CommandType.M, (PAD_ARG,) * 4 + (x, y))

    @classmethod
    def line(cls, x: float, y: float) -> "Command":
        return cls(CommandType.L, (PAD_ARG,) * 4 + (x, y))

    @classmethod
    def cubic(cls, x1, y1, x2, y2, x, y) -> "Command":
        return cls(CommandType.C, (x1, y1, x2, y2, x, y))

    @classmethod
    def close(cls) -> "Command":
        return cls(CommandType.Z)

    @property
    def used_args(self) -> Tuple[float, ...]:
        """Arguments in SVG order, unused slots dropped."""
        return tuple(a for a, m in zip(self.args, ARG_MASK[self.kind]) if m)

    @property
    def end(self) -> Tuple[float, float]:
        return self.args[4], self.args[5]

    def map_points(self, fn) -> "Command":
        """Apply fn(x, y) -> (x, y) to every used coordinate pair."""
        args = list(self.args)
        mask = ARG_MASK[self.kind]
        for i in (0, 2, 4):
            if mask[i]:
                args[i], args[i + 1] = fn(args[i], args[i + 1])
        return Command(self.kind, tuple(args))


@dataclass(frozen=True)
class Path:
    commands: Tuple[Command, ...] = ()
    visible: bool = True

    def __post_init__(self):
        object.__setattr__(self, "commands", tuple(self.commands))

    def __len__(self) -> int:
        return len(self.commands)

    @property
    def first_move(self) -> Optional[Tuple[float, float]]:
        if self.commands and self.commands[0].kind == CommandType.M:
            return self.commands[0].end
        return None

    @property
    def drawing_count(self) -> int:
        return sum(1 for c in self.commands if c.kind.is_drawing)


@dataclass(frozen=True)
class Glyph:
    paths: Tuple[Path, ...] = ()
    viewbox: Tuple[float, float] = (NORMALIZED_EXTENT, NORMALIZED_EXTENT)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(self, "viewbox", (float(self.viewbox[0]), float(self.viewbox[1])))

    def __len__(self) -> int:
        return len(self.paths)

    @property
    def visible_paths(self) -> Tuple[Path, ...]:
        return tuple(p for p in self.paths if p.visible)

    def map_points(self, fn, viewbox=None) -> "Glyph":
        paths = tuple(
            Path(tuple(c.map_points(fn) for c in p.commands), p.visible) for p in self.paths
        )
        return Glyph(paths, self.viewbox if viewbox is None else viewbox)

    def allclose(self, other: "Glyph", tol: float = 1e-6) -> bool:
        """Structural equality with coordinates compared within tol."""
        if len(self.paths) != len(other.paths):
            return False
        for p, q in zip(self.paths, other.paths):
            if p.visible != q.visible or len(p) != len(q):
                return False
            for a, b in zip(p.commands, q.commands):
                if a.kind != b.kind:
                    return False
                if any(not math.isclose(u, v, rel_tol=0.0, abs_tol=tol) for u, v in zip(a.args, b.args)):
                    return False
        return True


@dataclass(frozen=True)
class PaddedGlyph:
    """Fixed-size tensor form. Arrays are numpy; batching lives in the model package."""
    command_types: np.ndarray  # (N_P, N_C) int64
    args: np.ndarray           # (N_P, N_C, 6) float64
    visibility: np.ndarray     # (N_P,) int64
    arg_mask: np.ndarray       # (N_P, N_C, 6) int64
    viewbox: Tuple[float, float] = field(default=(NORMALIZED_EXTENT, NORMALIZED_EXTENT))

    @property
    def n_paths(self) -> int:
        return self.command_types.shape[0]

    @property
    def n_cmds(self) -> int:
        return self.command_types.shape[1]
