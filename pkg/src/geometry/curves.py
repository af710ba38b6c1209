"""
Parametric evaluation and point sampling of L / C commands, with pen threading
through M and Z.
"""

from typing import Iterator, NamedTuple, Tuple

import numpy as np

from src.patterns.error_handling import InvalidPenSequence, NonDrawingCommand
from src.svg.glyph import Command, CommandType, Glyph, Path


class Point(NamedTuple):
    x: float
    y: float


def _control_points(cmd: Command, start) -> np.ndarray:
    p0 = np.asarray(start, dtype=np.float64)
    a = cmd.args
    if cmd.kind == CommandType.L:
        return np.stack([p0, np.array([a[4], a[5]])])
    return np.stack([p0, np.array([a[0], a[1]]), np.array([a[2], a[3]]), np.array([a[4], a[5]])])


def bezier_points(ctrl: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Bernstein-form evaluation; ctrl is (2, 2) for a line or (4, 2) for a cubic."""
    t = np.asarray(t, dtype=np.float64)[:, None]
    if len(ctrl) == 2:
        return ctrl[0] + t * (ctrl[1] - ctrl[0])
    s = 1.0 - t
    return (s ** 3) * ctrl[0] + 3.0 * (s ** 2) * t * ctrl[1] + 3.0 * s * (t ** 2) * ctrl[2] + (t ** 3) * ctrl[3]


def eval_curve(cmd: Command, start, t: float) -> Point:
    if not cmd.kind.is_drawing:
        raise NonDrawingCommand(cmd.kind.name)
    x, y = bezier_points(_control_points(cmd, start), np.array([t]))[0]
    return Point(float(x), float(y))


def sample_command(cmd: Command, start, n_p: int) -> np.ndarray:
    """n_p points at t = k / n_p, k = 0 .. n_p - 1; empty for non-drawing commands."""
    if n_p < 1:
        raise ValueError(f"n_p must be >= 1, got {n_p}")
    if not cmd.kind.is_drawing:
        return np.zeros((0, 2))
    t = np.arange(n_p, dtype=np.float64) / n_p
    return bezier_points(_control_points(cmd, start), t)


def iter_pen(path: Path) -> Iterator[Tuple[Command, Tuple[float, float]]]:
    """Yield (command, pen position before it) for each drawing command."""
    pen = None
    subpath_start = None
    for j, cmd in enumerate(path.commands):
        if cmd.kind == CommandType.M:
            pen = subpath_start = cmd.end
        elif cmd.kind.is_drawing:
            if pen is None:
                raise InvalidPenSequence(j)
            yield cmd, pen
            pen = cmd.end
        elif cmd.kind == CommandType.Z:
            pen = subpath_start


def path_point_cloud(path: Path, n_p: int) -> np.ndarray:
    clouds = [sample_command(cmd, start, n_p) for cmd, start in iter_pen(path)]
    if not clouds:
        return np.zeros((0, 2))
    return np.concatenate(clouds, axis=0)


def glyph_point_cloud(glyph: Glyph, n_p: int) -> np.ndarray:
    """All visible paths merged into one cloud."""
    clouds = [path_point_cloud(p, n_p) for p in glyph.visible_paths]
    clouds = [c for c in clouds if len(c)]
    if not clouds:
        return np.zeros((0, 2))
    return np.concatenate(clouds, axis=0)


def flatten_cubic(ctrl: np.ndarray, tolerance: float) -> np.ndarray:
    """
    Polyline through a cubic with chordal error <= tolerance.

    Uniform subdivision into n segments deviates by at most M / (8 n^2), where M
    bounds the second derivative (6 * max second difference of the control polygon).
    """
    d1 = ctrl[0] - 2.0 * ctrl[1] + ctrl[2]
    d2 = ctrl[1] - 2.0 * ctrl[2] + ctrl[3]
    m = 6.0 * max(np.hypot(*d1), np.hypot(*d2))
    n = max(1, int(np.ceil(np.sqrt(m / (8.0 * tolerance))))) if m > 0 else 1
    return bezier_points(ctrl, np.linspace(0.0, 1.0, n + 1))


def path_polylines(path: Path, tolerance: float):
    """Closed polylines, one per subpath; open subpaths close back to their start."""
    polylines = []
    current = None
    pen = None
    for j, cmd in enumerate(path.commands):
        if cmd.kind == CommandType.M:
            if current is not None and len(current) > 1:
                polylines.append(np.array(current))
            pen = cmd.end
            current = [pen]
        elif cmd.kind == CommandType.L:
            if pen is None:
                raise InvalidPenSequence(j)
            pen = cmd.end
            current.append(pen)
        elif cmd.kind == CommandType.C:
            if pen is None:
                raise InvalidPenSequence(j)
            pts = flatten_cubic(_control_points(cmd, pen), tolerance)
            current.extend(map(tuple, pts[1:]))
            pen = cmd.end
        elif cmd.kind == CommandType.Z and current:
            if len(current) > 1:
                polylines.append(np.array(current))
            pen = current[0]
            current = [pen]
    if current is not None and len(current) > 1:
        polylines.append(np.array(current))
    return polylines
