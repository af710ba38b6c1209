"""Path-data tokenizer, parser and serializer for the absolute M/L/C/Z subset."""

import math
import re
from typing import Iterator, List, Tuple

from src.patterns.error_handling import (
    ArityMismatch,
    InvalidGlyph,
    MalformedNumber,
    UnsupportedCommand,
)
from src.svg.glyph import ARITY, NORMALIZED_EXTENT, Command, CommandType, Glyph, Path

_TOKEN_RE = re.compile(
    r"(?P<sep>[\s,]+)"
    r"|(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<cmd>[A-Za-z])"
    r"|(?P<bad>[^\s,A-Za-z]+)"
)

_LETTERS = {"M": CommandType.M, "L": CommandType.L, "C": CommandType.C, "Z": CommandType.Z}


def _tokenize(text: str) -> Iterator[Tuple[str, str, int]]:
    prev = None
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        token = m.group()
        if kind == "sep":
            prev = None
            continue
        if kind == "bad":
            raise MalformedNumber(token, m.start())
        if kind == "cmd":
            if token in "eE" and prev == "num":
                raise MalformedNumber(text[:m.end()].split()[-1], m.start())
            if token not in _LETTERS:
                raise UnsupportedCommand(token, m.start())
        prev = kind
        yield kind, token, m.start()


def _build(letter: str, values: List[float]) -> Command:
    kind = _LETTERS[letter]
    if len(values) != ARITY[kind]:
        raise ArityMismatch(letter, ARITY[kind], len(values))
    if kind == CommandType.M:
        return Command.move(*values)
    if kind == CommandType.L:
        return Command.line(*values)
    if kind == CommandType.C:
        return Command.cubic(*values)
    return Command.close()


def parse_commands(text: str) -> List[Command]:
    """Flat command list, no path splitting."""
    commands: List[Command] = []
    letter = None
    values: List[float] = []
    for kind, token, pos in _tokenize(text):
        if kind == "num":
            if letter is None:
                raise InvalidGlyph(f"number '{token}' at offset {pos} precedes any command")
            value = float(token)
            if not math.isfinite(value):
                raise MalformedNumber(token, pos)
            values.append(value)
            continue
        if letter is not None:
            commands.append(_build(letter, values))
        letter, values = token, []
    if letter is not None:
        commands.append(_build(letter, values))
    return commands


def split_paths(commands: List[Command]) -> List[Path]:
    """New path at every M that follows Z or a drawing command."""
    paths: List[List[Command]] = []
    current: List[Command] = []
    for cmd in commands:
        if cmd.kind == CommandType.M and current and current[-1].kind != CommandType.M:
            paths.append(current)
            current = []
        current.append(cmd)
    if current:
        paths.append(current)
    for i, cmds in enumerate(paths):
        if cmds[0].kind != CommandType.M:
            raise InvalidGlyph("path does not begin with M", path_index=i)
    return [Path(tuple(cmds)) for cmds in paths]


def parse_svg_path(text: str, viewbox: Tuple[float, float] = (NORMALIZED_EXTENT, NORMALIZED_EXTENT)) -> Glyph:
    return Glyph(tuple(split_paths(parse_commands(text))), viewbox)


def format_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def serialize_commands(commands) -> List[str]:
    parts = []
    for cmd in commands:
        parts.append(cmd.kind.name)
        parts.extend(format_number(v) for v in cmd.used_args)
    return parts


def serialize_svg(glyph: Glyph) -> str:
    parts: List[str] = []
    for path in glyph.visible_paths:
        parts.extend(serialize_commands(path.commands))
    return " ".join(parts)
