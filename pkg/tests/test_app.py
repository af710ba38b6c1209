# Test file for the vecfont application facade
# Covers command registration, configuration resolution and argument helpers

import argparse
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import MagicMock

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.commands import CommandProcessor
from src.config import TrainConfig, resolve_config
from src.core import VecFontApp
from src.patterns.error_handling import ConfigError
from src.utils import format_output, parse_overrides, positive_int, resolution

ROOT = Path(__file__).resolve().parent.parent


class TestVecFontApp(unittest.TestCase):
    def setUp(self):
        """Set up test fixtures before each test method."""
        self.app = VecFontApp()

    def test_app_initialization(self):
        self.assertIsInstance(self.app, VecFontApp)
        self.assertIsNotNone(self.app.logger)
        self.assertIsNotNone(self.app.command_processor)
        self.assertEqual(self.app.state.commands_run, [])

    def test_registered_commands(self):
        commands = set(self.app.command_processor.commands)
        self.assertEqual(commands, {"synth", "train", "generate", "eval", "render", "validate"})
        self.assertEqual(self.app.command_processor.resolve("gen"), "generate")

    def test_build_parser(self):
        parser = self.app.build_parser()
        args = parser.parse_args(["--log-level", "DEBUG", "render", "--in", "a.path", "--res", "64x32",
                                  "--out", "a.png"])
        self.assertEqual(args.command, "render")
        self.assertEqual(args.log_level, "DEBUG")
        self.assertEqual(args.input, "a.path")
        self.assertEqual(args.res, (32, 64))

    def test_run_command_records_history(self):
        handler = MagicMock(return_value={"ok": True})
        self.app.command_processor.register_command("noop", handler)
        result = self.app.run_command("noop", argparse.Namespace())
        self.assertEqual(result, {"ok": True})
        self.assertEqual(self.app.state.commands_run, ["noop"])

    def test_unknown_command(self):
        with self.assertRaises(ValueError):
            self.app.run_command("missing", argparse.Namespace())


class TestCommandProcessor(unittest.TestCase):
    def test_alias_dispatch(self):
        cp = CommandProcessor(MagicMock())
        handler = MagicMock(return_value=7)
        cp.register_command("generate", handler, alias=["gen"])
        self.assertEqual(cp.execute_command("gen", argparse.Namespace()), 7)
        handler.assert_called_once()


class TestConfig(unittest.TestCase):
    def test_shipped_file_matches_defaults(self):
        from_file = resolve_config(ROOT / "config" / "train_config.yaml")
        defaults = TrainConfig()
        self.assertAlmostEqual(from_file.loss.chamfer_scale, defaults.loss.chamfer_scale, places=15)
        self.assertEqual(from_file.model_dump(exclude={"loss"}), defaults.model_dump(exclude={"loss"}))

    def test_overrides_win_over_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cfg.yaml"
            path.write_text("batch_size: 8\nmodel:\n  d_model: 64\n  n_heads: 4\n")
            cfg = resolve_config(path, {"model.d_model": 32, "epochs": None, "peak_lr": 0.001})
        self.assertEqual(cfg.batch_size, 8)
        self.assertEqual(cfg.model.d_model, 32)
        self.assertEqual(cfg.model.n_heads, 4)
        self.assertEqual(cfg.epochs, 1500)
        self.assertEqual(cfg.peak_lr, 0.001)

    def test_invalid_values(self):
        with self.assertRaises(ConfigError) as ctx:
            resolve_config(overrides={"model.n_heads": 3})
        self.assertEqual(ctx.exception.exit_code, 2)
        with self.assertRaises(ConfigError):
            resolve_config(overrides={"no_such_key": 1})
        with self.assertRaises(ConfigError):
            resolve_config(overrides={"adam_betas": [0.9, 1.5]})
        with self.assertRaises(ConfigError):
            resolve_config(overrides={"model.n_layers": 2, "model.inject_layer": 5})

    def test_bad_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            broken = Path(tmp) / "broken.yaml"
            broken.write_text("batch_size: [1, 2\n")
            with self.assertRaises(ConfigError):
                resolve_config(broken)
            listing = Path(tmp) / "list.yaml"
            listing.write_text("- 1\n- 2\n")
            with self.assertRaises(ConfigError):
                resolve_config(listing)
            with self.assertRaises(ConfigError):
                resolve_config(Path(tmp) / "missing.yaml")

    def test_save_and_hash(self):
        cfg = resolve_config(overrides={"seed": 5})
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "saved.yaml"
            cfg.save(path)
            again = resolve_config(path)
        self.assertEqual(again.config_hash(), cfg.config_hash())
        self.assertNotEqual(cfg.config_hash(), TrainConfig().config_hash())


class TestUtils(unittest.TestCase):
    def test_positive_int(self):
        self.assertEqual(positive_int("3"), 3)
        for bad in ("0", "-1", "x"):
            with self.assertRaises(argparse.ArgumentTypeError):
                positive_int(bad)

    def test_resolution(self):
        self.assertEqual(resolution("128"), (128, 128))
        self.assertEqual(resolution("96x128"), (128, 96))
        for bad in ("0", "1x2x3", "axb"):
            with self.assertRaises(argparse.ArgumentTypeError):
                resolution(bad)

    def test_parse_overrides(self):
        self.assertEqual(parse_overrides(["model.d_model=64", "peak_lr=0.001", "max_steps=null"]),
                         {"model.d_model": 64, "peak_lr": 0.001, "max_steps": None})
        self.assertEqual(parse_overrides(None), {})
        with self.assertRaises(ConfigError):
            parse_overrides(["d_model"])

    def test_format_output(self):
        self.assertIn('"out": "a"', format_output({"out": Path("a")}))


if __name__ == '__main__':
    unittest.main()
