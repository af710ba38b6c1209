"""
Procedural glyph families for desk-scale training.

A content is a skeleton: 2-6 strokes (straight bars, L-bends, hooked strokes
ending in a cubic tail), each placed in its own cell of a 3x3 grid. A style
renders every skeleton into closed outlines with its own stroke thickness,
corner rounding (L-L corners replaced by a short cubic), slant and scale.
Style "s00" is the content-reference font and uses the identity parameters.
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from src.logger import get_logger
from src.patterns.error_handling import ApplicationError, GenerationFailed
from src.svg.glyph import Command, Glyph, Path
from src.svg.transforms import DEFAULT_N_CMDS, DEFAULT_N_PATHS, canonical_path_order, pad_to_fixed, validate_glyph

logger = get_logger(__name__)

MAX_RETRIES = 100
GRID_LO, GRID_HI = 40.0, 215.0
CELL_MARGIN = 12.0
CENTER = 127.5
KAPPA = 0.5523

Point = Tuple[float, float]
# ("L", [end]) or ("C", [c1, c2, end])
Piece = Tuple[str, List[np.ndarray]]


@dataclass(frozen=True)
class StyleParams:
    thickness: float = 14.0
    rounding: float = 0.0
    slant: float = 0.0
    scale: float = 1.0

    @classmethod
    def sample(cls, rng: np.random.Generator) -> "StyleParams":
        return cls(
            thickness=float(rng.uniform(8.0, 22.0)),
            rounding=float(rng.uniform(0.0, 0.8)),
            slant=float(rng.uniform(-0.2, 0.2)),
            scale=float(rng.uniform(0.8, 1.0)),
        )


IDENTITY_STYLE = StyleParams()


@dataclass(frozen=True)
class Stroke:
    """Centerline: a start point followed by L/C pieces."""
    start: Tuple[float, float]
    pieces: Tuple[Tuple[str, Tuple[Point, ...]], ...]


Skeleton = Tuple[Stroke, ...]


def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    return v / n if n > 0 else np.zeros(2)


def _normal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = _unit(b - a)
    return np.array([-d[1], d[0]])


def _offset_points(points: List[np.ndarray], half: float) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Miter offset of a polyline to both sides; zero-length legs are skipped."""
    legs = [_normal(points[i], points[i + 1]) for i in range(len(points) - 1)]
    legs = [n if n.any() else None for n in legs]
    left, right = [], []
    for i, p in enumerate(points):
        before = next((legs[k] for k in range(i - 1, -1, -1) if legs[k] is not None), None)
        after = next((legs[k] for k in range(i, len(legs)) if legs[k] is not None), None)
        n_in = before if before is not None else after
        n_out = after if after is not None else before
        m = _unit(n_in + n_out)
        if not m.any():
            m = n_in
        cos_half = max(float(m @ n_in), 0.5)
        offset = m * (half / cos_half)
        left.append(p + offset)
        right.append(p - offset)
    return left, right


def stroke_outline(stroke: Stroke, thickness: float) -> Tuple[np.ndarray, List[Piece]]:
    """Closed outline as (start, pieces); the last piece returns to start."""
    points = [np.asarray(stroke.start, dtype=np.float64)]
    spans = []
    for kind, ctrl in stroke.pieces:
        lo = len(points)
        points.extend(np.asarray(c, dtype=np.float64) for c in ctrl)
        spans.append((kind, lo, len(points)))
    left, right = _offset_points(points, thickness / 2.0)

    pieces: List[Piece] = []
    for kind, lo, hi in spans:
        pieces.append((kind, left[lo:hi]))
    pieces.append(("L", [right[-1]]))
    for kind, lo, hi in reversed(spans):
        # walk the same span backwards on the right side
        pieces.append((kind, [right[k] for k in range(hi - 2, lo - 2, -1)]))
    pieces.append(("L", [left[0]]))
    return left[0], pieces


def round_corners(start: np.ndarray, pieces: List[Piece], rounding: float) -> Tuple[np.ndarray, List[Piece]]:
    """Replace every corner between two line pieces with a cubic of radius rounding * half the shorter leg."""
    if rounding <= 0.0:
        return start, pieces
    n = len(pieces)
    starts = [pieces[k - 1][1][-1] for k in range(n)]
    starts[0] = start
    radius = np.zeros(n)
    for k in range(n):
        nxt = (k + 1) % n
        if pieces[k][0] == "L" and pieces[nxt][0] == "L":
            len_in = float(np.hypot(*(pieces[k][1][-1] - starts[k])))
            len_out = float(np.hypot(*(pieces[nxt][1][-1] - starts[nxt])))
            radius[k] = rounding * 0.5 * min(len_in, len_out)

    def trimmed_start(k: int) -> np.ndarray:
        if pieces[k][0] != "L":
            return starts[k]
        return starts[k] + radius[k - 1] * _unit(pieces[k][1][-1] - starts[k])

    out: List[Piece] = []
    for k in range(n):
        kind, ctrl = pieces[k]
        end = ctrl[-1]
        if kind == "L":
            out.append(("L", [end - radius[k] * _unit(end - starts[k])]))
        else:
            out.append((kind, list(ctrl)))
        if radius[k] > 0.0:
            a = out[-1][1][-1]
            b = trimmed_start((k + 1) % n)
            out.append(("C", [a + KAPPA * (end - a), b + KAPPA * (end - b), b]))
    return trimmed_start(0), out


def render_content(skeleton: Skeleton, style: StyleParams) -> Glyph:
    def place(p: np.ndarray) -> Tuple[float, float]:
        x = CENTER + style.scale * ((p[0] - CENTER) + style.slant * (CENTER - p[1]))
        y = CENTER + style.scale * (p[1] - CENTER)
        return float(x), float(y)

    paths = []
    for stroke in skeleton:
        start, pieces = stroke_outline(stroke, style.thickness)
        start, pieces = round_corners(start, pieces, style.rounding)
        commands = [Command.move(*place(start))]
        for kind, ctrl in pieces:
            if kind == "L":
                commands.append(Command.line(*place(ctrl[-1])))
            else:
                c1, c2, end = (place(c) for c in ctrl)
                commands.append(Command.cubic(*c1, *c2, *end))
        commands.append(Command.close())
        paths.append(Path(tuple(commands)))
    return canonical_path_order(Glyph(tuple(paths)))


def _cell_box(cell: int) -> Tuple[float, float, float, float]:
    size = (GRID_HI - GRID_LO) / 3.0
    row, col = divmod(cell, 3)
    x0 = GRID_LO + col * size + CELL_MARGIN
    y0 = GRID_LO + row * size + CELL_MARGIN
    return x0, y0, x0 + size - 2 * CELL_MARGIN, y0 + size - 2 * CELL_MARGIN


def _random_stroke(rng: np.random.Generator, box: Tuple[float, float, float, float]) -> Stroke:
    x0, y0, x1, y1 = box
    xm, ym = (x0 + x1) / 2.0, (y0 + y1) / 2.0

    def jitter() -> float:
        return float(rng.uniform(-4.0, 4.0))

    kind = rng.integers(3)
    if kind == 0:
        if rng.integers(2):
            return Stroke((x0, ym + jitter()), (("L", ((x1, ym + jitter()),)),))
        return Stroke((xm + jitter(), y0), (("L", ((xm + jitter(), y1),)),))
    if kind == 1:
        corner = [(x0, y1), (x1, y1), (x0, y0), (x1, y0)][rng.integers(4)]
        a = (corner[0], y0 if corner[1] == y1 else y1)
        b = (x1 if corner[0] == x0 else x0, corner[1])
        return Stroke(a, (("L", (corner,)), ("L", (b,))))
    side = 1.0 if rng.integers(2) else -1.0
    half_w = (x1 - x0) / 2.0
    knee = (xm, y0 + 0.6 * (y1 - y0))
    tail = ((xm, y1), (xm + side * 0.5 * half_w, y1), (xm + side * half_w, y1 - 0.15 * (y1 - y0)))
    return Stroke((xm, y0), (("L", (knee,)), ("C", tail)))


def random_skeleton(rng: np.random.Generator) -> Skeleton:
    n_strokes = int(rng.integers(2, 7))
    cells = sorted(rng.choice(9, size=n_strokes, replace=False).tolist())
    return tuple(_random_stroke(rng, _cell_box(c)) for c in cells)


def _check(glyph: Glyph, n_paths: int, n_cmds: int) -> None:
    validate_glyph(glyph)
    pad_to_fixed(glyph, n_paths, n_cmds)


def style_ids(n_styles: int) -> List[str]:
    return [f"s{i:02d}" for i in range(n_styles)]


def content_ids(n_contents: int) -> List[str]:
    return [f"c{i:03d}" for i in range(n_contents)]


def synth_glyphs(seed: int, n_styles: int, n_contents: int, n_paths: int = DEFAULT_N_PATHS,
                 n_cmds: int = DEFAULT_N_CMDS) -> Tuple[Dict[str, StyleParams], Dict[str, Dict[str, Glyph]]]:
    """
    Returns (style params, glyphs[style][content]). n_styles includes the
    identity style s00. A content is redrawn until every style renders it into a
    valid, paddable glyph distinct from the contents drawn so far.
    """
    if n_styles < 2 or n_contents < 2:
        raise ValueError(f"need at least 2 styles and 2 contents, got {n_styles} and {n_contents}")
    rng = np.random.default_rng(seed)
    sids = style_ids(n_styles)
    params = {sids[0]: IDENTITY_STYLE}
    for sid in sids[1:]:
        params[sid] = StyleParams.sample(rng)

    glyphs: Dict[str, Dict[str, Glyph]] = {sid: {} for sid in sids}
    seen = set()
    for cid in content_ids(n_contents):
        for attempt in range(1, MAX_RETRIES + 1):
            skeleton = random_skeleton(rng)
            if skeleton in seen:
                continue
            try:
                rendered = {sid: render_content(skeleton, p) for sid, p in params.items()}
                for g in rendered.values():
                    _check(g, n_paths, n_cmds)
            except ApplicationError as e:
                logger.debug(f"{cid}: attempt {attempt} rejected ({e.message})")
                continue
            seen.add(skeleton)
            for sid, g in rendered.items():
                glyphs[sid][cid] = g
            if attempt > 1:
                logger.info(f"{cid} needed {attempt} attempts")
            break
        else:
            raise GenerationFailed(f"content {cid}", MAX_RETRIES)
    return params, glyphs
