# Tests for curve sampling, Chamfer distance and the even-odd rasterizer

import os
import sys
import tempfile
import unittest

import numpy as np

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.geometry import (
    RasterImage,
    chamfer_distance,
    eval_curve,
    flatten_cubic,
    glyph_point_cloud,
    path_point_cloud,
    pixel_distance,
    rasterize,
    sample_command,
    tile_images,
)
from src.patterns.error_handling import EmptyCloud, InvalidPenSequence, NonDrawingCommand, ResolutionMismatch
from src.svg import Command, Glyph, Path, parse_svg_path


def brute_chamfer(a, b):
    def one_way(p, q):
        total = 0.0
        for x in p:
            best = min((x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2 for y in q)
            total += best
        return total / len(p)
    return one_way(a, b) + one_way(b, a)


def de_casteljau(points, t):
    pts = [np.asarray(p, dtype=float) for p in points]
    while len(pts) > 1:
        pts = [(1 - t) * a + t * b for a, b in zip(pts[:-1], pts[1:])]
    return pts[0]


def inside_polygon(x, y, poly):
    inside = False
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        if (y0 <= y < y1) or (y1 <= y < y0):
            xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xc < x:
                inside = not inside
    return inside


class TestCurves(unittest.TestCase):
    def test_line_midpoint(self):
        p = eval_curve(Command.line(8, 8), (0, 0), 0.5)
        self.assertAlmostEqual(p.x, 4.0)
        self.assertAlmostEqual(p.y, 4.0)

    def test_cubic_midpoint(self):
        p = eval_curve(Command.cubic(0, 8, 8, 8, 8, 0), (0, 0), 0.5)
        self.assertAlmostEqual(p.x, 4.0)
        self.assertAlmostEqual(p.y, 6.0)

    def test_cubic_matches_de_casteljau(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            start = rng.uniform(0, 255, 2)
            ctrl = rng.uniform(0, 255, 6)
            t = float(rng.uniform(0, 1))
            p = eval_curve(Command.cubic(*ctrl), tuple(start), t)
            expected = de_casteljau([start, ctrl[0:2], ctrl[2:4], ctrl[4:6]], t)
            np.testing.assert_allclose([p.x, p.y], expected, rtol=0, atol=1e-9)

    def test_t_zero_is_start(self):
        for cmd in (Command.line(30, 40), Command.cubic(1, 2, 3, 4, 5, 6)):
            p = eval_curve(cmd, (17, 23), 0.0)
            self.assertEqual((p.x, p.y), (17.0, 23.0))

    def test_non_drawing_command(self):
        with self.assertRaises(NonDrawingCommand):
            eval_curve(Command.close(), (0, 0), 0.5)

    def test_sampling_excludes_t_one(self):
        pts = sample_command(Command.line(8, 8), (0, 0), 4)
        np.testing.assert_allclose(pts, [[0, 0], [2, 2], [4, 4], [6, 6]])

    def test_sampling_close_is_empty(self):
        self.assertEqual(sample_command(Command.close(), (0, 0), 9).shape, (0, 2))
        self.assertEqual(sample_command(Command.move(1, 1), (0, 0), 9).shape, (0, 2))

    def test_sampling_count(self):
        self.assertEqual(len(sample_command(Command.line(1, 1), (0, 0), 9)), 9)
        self.assertEqual(len(sample_command(Command.cubic(1, 2, 3, 4, 5, 6), (0, 0), 9)), 9)

    def test_path_cloud_counts(self):
        one = parse_svg_path("M 0 0 L 8 8 Z").paths[0]
        self.assertEqual(len(path_point_cloud(one, 9)), 9)
        two = parse_svg_path("M 0 0 C 1 1 2 2 3 3 C 4 4 5 5 6 6 Z").paths[0]
        self.assertEqual(len(path_point_cloud(two, 9)), 18)

    def test_pen_threading_on_square(self):
        square = parse_svg_path("M 0 0 L 8 0 L 8 8 L 0 8 Z").paths[0]
        cloud = path_point_cloud(square, 2)
        np.testing.assert_allclose(cloud, [[0, 0], [4, 0], [8, 0], [8, 4], [8, 8], [4, 8]])

    def test_pen_returns_to_subpath_start_after_close(self):
        path = parse_svg_path("M 0 0 L 8 0 Z L 0 8").paths[0]
        cloud = path_point_cloud(path, 2)
        np.testing.assert_allclose(cloud[2:], [[0, 0], [0, 4]])

    def test_drawing_before_move(self):
        with self.assertRaises(InvalidPenSequence):
            path_point_cloud(Path((Command.line(1, 1),)), 2)

    def test_glyph_cloud_skips_hidden_paths(self):
        shown = Path((Command.move(0, 0), Command.line(4, 0), Command.close()))
        hidden = Path((Command.move(9, 9), Command.line(5, 5), Command.close()), visible=False)
        self.assertEqual(len(glyph_point_cloud(Glyph((shown, hidden)), 5)), 5)

    def test_flatten_cubic_keeps_endpoints_and_tolerance(self):
        ctrl = np.array([[0.0, 0.0], [0.0, 100.0], [100.0, 100.0], [100.0, 0.0]])
        poly = flatten_cubic(ctrl, 0.25)
        np.testing.assert_allclose(poly[0], ctrl[0])
        np.testing.assert_allclose(poly[-1], ctrl[-1])
        dense = sample_command(Command.cubic(0, 100, 100, 100, 100, 0), (0, 0), 2000)
        # every dense point lies within tolerance of some polyline vertex or segment
        seg_a, seg_b = poly[:-1], poly[1:]
        d = seg_b - seg_a
        t = np.clip(((dense[:, None, :] - seg_a) * d).sum(-1) / (d * d).sum(-1), 0, 1)
        nearest = seg_a + t[..., None] * d
        err = np.sqrt(((dense[:, None, :] - nearest) ** 2).sum(-1)).min(axis=1)
        self.assertLessEqual(err.max(), 0.25 + 1e-9)


class TestChamfer(unittest.TestCase):
    def test_identical_clouds(self):
        cloud = np.random.default_rng(0).uniform(0, 255, (30, 2))
        self.assertEqual(chamfer_distance(cloud, cloud), 0.0)

    def test_two_points(self):
        self.assertAlmostEqual(chamfer_distance([[0, 0]], [[3, 4]]), 50.0)

    def test_matches_double_loop(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            a = rng.uniform(0, 255, (int(rng.integers(1, 21)), 2))
            b = rng.uniform(0, 255, (int(rng.integers(1, 21)), 2))
            self.assertAlmostEqual(chamfer_distance(a, b), brute_chamfer(a, b), delta=1e-9)

    def test_grid_index_agrees_with_brute(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a = rng.uniform(0, 255, (200, 2))
            b = rng.uniform(0, 255, (150, 2))
            self.assertAlmostEqual(chamfer_distance(a, b, index="grid"), chamfer_distance(a, b), delta=1e-9)

    def test_grid_index_is_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.uniform(0, 255, (int(rng.integers(1, 60)), 2))
            b = rng.uniform(0, 255, (int(rng.integers(1, 60)), 2))
            self.assertEqual(chamfer_distance(a, b, index="grid"), chamfer_distance(a, b))

    def test_grid_index_on_single_location_cloud(self):
        same = [[0.0, 0.0], [0.0, 0.0]]
        self.assertEqual(chamfer_distance([[100.0, 100.0]], same, index="grid"), 40000.0)
        self.assertEqual(chamfer_distance(same, [[100.0, 100.0]], index="grid"), 40000.0)
        self.assertEqual(chamfer_distance(same, same, index="grid"), 0.0)

    def test_grid_index_with_far_query(self):
        ref = np.random.default_rng(6).uniform(0, 1, (50, 2))
        query = np.array([[1e6, -1e6], [0.5, 0.5]])
        self.assertEqual(chamfer_distance(query, ref, index="grid"), chamfer_distance(query, ref))

    def test_unknown_index(self):
        with self.assertRaises(ValueError):
            chamfer_distance([[0, 0]], [[1, 1]], index="kd")

    def test_empty_cloud(self):
        with self.assertRaises(EmptyCloud) as ctx:
            chamfer_distance(np.zeros((0, 2)), [[1, 1]])
        self.assertEqual(ctx.exception.exit_code, 4)
        with self.assertRaises(EmptyCloud):
            chamfer_distance([[1, 1]], [])


class TestRaster(unittest.TestCase):
    def test_full_square(self):
        glyph = parse_svg_path("M 0 0 L 255 0 L 255 255 L 0 255 Z")
        image = rasterize(glyph, (128, 128))
        self.assertEqual(image.resolution, (128, 128))
        self.assertTrue((image.pixels == 1.0).all())

    def test_empty_glyph(self):
        self.assertTrue((rasterize(Glyph(), (64, 64)).pixels == 0.0).all())

    def test_hidden_paths_are_not_drawn(self):
        hidden = Path(parse_svg_path("M 0 0 L 255 0 L 255 255 L 0 255 Z").paths[0].commands, visible=False)
        self.assertEqual(rasterize(Glyph((hidden,)), (32, 32)).pixels.sum(), 0.0)

    def test_even_odd_ring(self):
        outer = [(0, 0), (255, 0), (255, 255), (0, 255)]
        inner = [(64, 64), (192, 64), (192, 192), (64, 192)]
        text = " ".join(
            "M {} {} ".format(*poly[0]) + " ".join("L {} {}".format(*p) for p in poly[1:]) + " Z"
            for poly in (outer, inner)
        )
        image = rasterize(parse_svg_path(text), (128, 128))
        rng = np.random.default_rng(4)
        for r, c in rng.integers(0, 128, (100, 2)):
            x, y = (c + 0.5) * 255 / 128, (r + 0.5) * 255 / 128
            expected = inside_polygon(x, y, outer) != inside_polygon(x, y, inner)
            self.assertEqual(image.pixels[r, c], float(expected), msg=(r, c))
        self.assertEqual(image.pixels[64, 64], 0.0)

    def test_curved_outline_fills_interior(self):
        image = rasterize(parse_svg_path("M 27 127 C 27 -6 227 -6 227 127 C 227 260 27 260 27 127 Z"), (64, 64))
        self.assertEqual(image.pixels[32, 32], 1.0)
        self.assertEqual(image.pixels[0, 0], 0.0)

    def test_pixel_distance(self):
        white = RasterImage.blank((8, 8))
        black = RasterImage(np.ones((8, 8)))
        half = RasterImage(np.concatenate([np.ones((4, 8)), np.zeros((4, 8))]))
        self.assertEqual(pixel_distance(white, white), 0.0)
        self.assertEqual(pixel_distance(white, black), 1.0)
        self.assertEqual(pixel_distance(half, white), 0.5)
        with self.assertRaises(ResolutionMismatch):
            pixel_distance(white, RasterImage.blank((4, 4)))

    def test_pixel_distance_is_a_metric(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            a, b, c = (RasterImage((rng.random((16, 16)) < rng.random()).astype(float)) for _ in range(3))
            self.assertEqual(pixel_distance(a, b), pixel_distance(b, a))
            self.assertEqual(pixel_distance(a, a), 0.0)
            self.assertLessEqual(pixel_distance(a, c), pixel_distance(a, b) + pixel_distance(b, c) + 1e-12)

    def test_save_pgm_and_png(self):
        image = rasterize(parse_svg_path("M 0 0 L 255 0 L 255 128 L 0 128 Z"), (16, 8))
        with tempfile.TemporaryDirectory() as tmp:
            pgm = os.path.join(tmp, "a.pgm")
            image.save(pgm)
            with open(pgm, "rb") as f:
                self.assertTrue(f.read().startswith(b"P5\n8 16\n255\n"))
            png = os.path.join(tmp, "a.png")
            image.save(png)
            from PIL import Image
            with Image.open(png) as im:
                self.assertEqual(im.size, (8, 16))

    def test_tile_images(self):
        a = RasterImage.blank((4, 5))
        sheet = tile_images([[a, a, a], [a]], gap=1)
        self.assertEqual(sheet.resolution, (2 * 4 + 1, 3 * 5 + 2))
        with self.assertRaises(ResolutionMismatch):
            tile_images([[a, RasterImage.blank((2, 2))]])


if __name__ == '__main__':
    unittest.main()
