"""
Glyph file formats.

Dataset files hold a header line ``viewbox W H`` followed by one line of path
data. Full ``<svg>`` documents are accepted on input (viewBox plus the ``d``
attribute of every ``<path>``) and written on output for generated glyphs.
"""

import xml.etree.ElementTree as ET
from pathlib import Path as FsPath
from typing import Tuple, Union

from src.patterns.error_handling import DatasetError, InvalidGlyph
from src.svg.glyph import NORMALIZED_EXTENT, Glyph
from src.svg.parser import format_number, parse_commands, serialize_svg, split_paths

GLYPH_SUFFIX = ".path"
SVG_NS = "http://www.w3.org/2000/svg"

PathLike = Union[str, FsPath]


def format_glyph_text(glyph: Glyph) -> str:
    w, h = glyph.viewbox
    return f"viewbox {format_number(w)} {format_number(h)}\n{serialize_svg(glyph)}\n"


def parse_glyph_text(text: str) -> Glyph:
    lines = text.strip().splitlines()
    viewbox: Tuple[float, float] = (NORMALIZED_EXTENT, NORMALIZED_EXTENT)
    if lines and lines[0].lower().startswith("viewbox"):
        fields = lines[0].split()
        if len(fields) != 3:
            raise InvalidGlyph(f"malformed header '{lines[0]}'")
        try:
            viewbox = (float(fields[1]), float(fields[2]))
        except ValueError:
            raise InvalidGlyph(f"malformed header '{lines[0]}'") from None
        lines = lines[1:]
    return Glyph(tuple(split_paths(parse_commands(" ".join(lines)))), viewbox)


def _parse_svg_document(text: str) -> Glyph:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise InvalidGlyph(f"not well-formed SVG: {e}") from None
    viewbox: Tuple[float, float] = (NORMALIZED_EXTENT, NORMALIZED_EXTENT)
    vb = root.get("viewBox")
    if vb:
        parts = vb.replace(",", " ").split()
        if len(parts) != 4:
            raise InvalidGlyph(f"malformed viewBox '{vb}'")
        viewbox = (float(parts[2]), float(parts[3]))
    commands = []
    for element in root.iter():
        if element.tag.split("}")[-1] == "path":
            commands.extend(parse_commands(element.get("d", "")))
    return Glyph(tuple(split_paths(commands)), viewbox)


def read_glyph_file(path: PathLike) -> Glyph:
    """Read a dataset glyph file or an SVG document; an empty file is an empty glyph."""
    path = FsPath(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetError(f"Cannot read glyph file {path}: {e}") from e
    if text.lstrip().startswith("<"):
        return _parse_svg_document(text)
    return parse_glyph_text(text)


def write_glyph_file(path: PathLike, glyph: Glyph) -> None:
    path = FsPath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_glyph_text(glyph), encoding="utf-8")


def svg_document(glyph: Glyph) -> str:
    w, h = glyph.viewbox
    ET.register_namespace("", SVG_NS)
    root = ET.Element(f"{{{SVG_NS}}}svg", {"viewBox": f"0 0 {format_number(w)} {format_number(h)}", "width": format_number(w), "height": format_number(h)})
    ET.SubElement(root, f"{{{SVG_NS}}}path", {"d": serialize_svg(glyph), "fill-rule": "evenodd"})
    return ET.tostring(root, encoding="unicode") + "\n"


def write_svg_document(path: PathLike, glyph: Glyph) -> None:
    path = FsPath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg_document(glyph), encoding="utf-8")


__all__ = [
    "GLYPH_SUFFIX",
    "format_glyph_text",
    "parse_glyph_text",
    "read_glyph_file",
    "write_glyph_file",
    "svg_document",
    "write_svg_document",
]
