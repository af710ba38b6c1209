# Tests for the LR schedule, synthetic data, datasets, checkpoints and the training loop

import json
import math
import os
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
import torch

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.config import ModelConfig, TrainConfig, resolve_config
from src.model import FontStyleTransfer
from src.model.losses import LossBreakdown
from src.patterns.error_handling import (
    CheckpointError,
    ConfigError,
    CorruptFile,
    DatasetError,
    GenerationFailed,
    NonFiniteLoss,
    ShapeMismatch,
    VersionMismatch,
)
from src.patterns.logging_monitoring import MetricsLog
from src.svg import CommandType, pad_to_fixed, validate_glyph
from src.training import (
    Trainer,
    TrainingPairs,
    load_checkpoint,
    lr_schedule,
    read_dataset,
    save_checkpoint,
    split_styles,
    synth_dataset,
    write_dataset,
)
from src.training.checkpoint import MAGIC, read_manifest
from src.training.synth import IDENTITY_STYLE, StyleParams, random_skeleton, render_content, stroke_outline, synth_glyphs
from src.training.trainer import CHECKPOINT_NAME, METRICS_NAME, build_model, load_model

TINY_MODEL = ModelConfig(d_model=16, n_heads=2, ff_dim=32, n_layers=2, dropout=0.1, inject_layer=1)


def tiny_config(**overrides):
    values = dict(batch_size=4, epochs=2, warmup_iters=5, checkpoint_every=1, log_every=1, seed=3,
                  model=TINY_MODEL)
    values.update(overrides)
    return TrainConfig(**values)


class TestSchedule(unittest.TestCase):
    def setUp(self):
        self.cfg = TrainConfig()

    def test_warmup_points(self):
        self.assertEqual(lr_schedule(0, self.cfg), 0.0)
        self.assertAlmostEqual(lr_schedule(250, self.cfg), 0.001, places=12)
        self.assertAlmostEqual(lr_schedule(500, self.cfg), 0.002, places=12)

    def test_decay(self):
        self.assertAlmostEqual(lr_schedule(501, self.cfg), 0.002 * 0.9999, places=12)
        self.assertAlmostEqual(lr_schedule(1500, self.cfg), 0.002 * 0.9999 ** 1000, places=12)

    def test_continuous_at_end_of_warmup(self):
        self.assertAlmostEqual(lr_schedule(500, self.cfg), lr_schedule(501, self.cfg) / 0.9999, places=12)

    def test_negative_step(self):
        with self.assertRaises(ValueError):
            lr_schedule(-1, self.cfg)

    def test_config_invariants(self):
        for key, value in (("warmup_iters", 0), ("decay_rate", 0.0), ("decay_rate", 1.5), ("batch_size", 0)):
            with self.assertRaises(ConfigError, msg=key):
                resolve_config(None, {key: value})


class TestSynth(unittest.TestCase):
    def test_same_seed_same_glyphs(self):
        a = synth_glyphs(5, 3, 4)
        b = synth_glyphs(5, 3, 4)
        self.assertEqual(a, b)
        self.assertNotEqual(a[1], synth_glyphs(6, 3, 4)[1])

    def test_every_glyph_is_valid_and_paddable(self):
        _, glyphs = synth_glyphs(1, 4, 6)
        for by_content in glyphs.values():
            for glyph in by_content.values():
                validate_glyph(glyph)
                padded = pad_to_fixed(glyph, 12, 100)
                self.assertTrue(2 <= len(glyph.paths) <= 6)
                self.assertTrue((padded.command_types[:, 0][padded.visibility == 1] == CommandType.M).all())

    def test_identity_style_keeps_outline(self):
        skeleton = random_skeleton(np.random.default_rng(0))
        glyph = render_content(skeleton, IDENTITY_STYLE)
        starts = sorted(tuple(stroke_outline(s, IDENTITY_STYLE.thickness)[0]) for s in skeleton)
        moves = sorted(p.first_move for p in glyph.paths)
        np.testing.assert_allclose(moves, starts)

    def test_content_reference_is_identity_style(self):
        params, glyphs = synth_glyphs(2, 3, 2)
        self.assertEqual(params["s00"], IDENTITY_STYLE)
        self.assertNotEqual(params["s01"], IDENTITY_STYLE)
        self.assertEqual(set(glyphs), {"s00", "s01", "s02"})
        self.assertEqual(set(glyphs["s00"]), {"c000", "c001"})

    def test_styles_change_the_drawing(self):
        skeleton = random_skeleton(np.random.default_rng(1))
        plain = render_content(skeleton, IDENTITY_STYLE)
        rounded = render_content(skeleton, StyleParams(thickness=20.0, rounding=0.5, slant=0.1, scale=0.9))
        self.assertFalse(plain.allclose(rounded, 1e-3))
        self.assertTrue(any(c.kind == CommandType.C for p in rounded.paths for c in p.commands))

    def test_too_few_styles_or_contents(self):
        with self.assertRaises(ValueError):
            synth_glyphs(0, 1, 4)
        with self.assertRaises(ValueError):
            synth_glyphs(0, 3, 1)

    def test_generation_gives_up(self):
        skeleton = random_skeleton(np.random.default_rng(2))
        with patch("src.training.synth.random_skeleton", return_value=skeleton):
            with self.assertRaises(GenerationFailed) as ctx:
                synth_glyphs(0, 2, 3)
        self.assertEqual(ctx.exception.attempts, 100)


class TestDataset(unittest.TestCase):
    def setUp(self):
        self.split = synth_dataset(0, 4, 5)
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_content_style_is_not_a_target(self):
        self.assertEqual(self.split.styles, ["s01", "s02", "s03"])
        self.assertNotIn(self.split.content_style, self.split.styles)
        self.assertEqual(len(self.split), 15)
        for style_id, content_id, target in self.split.pairs:
            self.assertIs(target, self.split.glyphs[style_id][content_id])

    def test_split_styles(self):
        train, held_out = split_styles(self.split)
        self.assertEqual(train.styles, ["s01", "s02"])
        self.assertEqual(held_out.styles, ["s03"])
        self.assertIn("s00", held_out.glyphs)
        one = self.split.subset(["s01"])
        a, b = split_styles(one)
        self.assertEqual(a.styles, b.styles)

    def test_write_and_read_back(self):
        write_dataset(self.split, self.dir)
        manifest = json.loads((self.dir / "manifest.json").read_text())
        self.assertEqual(manifest["eval_styles"], ["s03"])
        self.assertIn("s02", manifest["style_params"])
        self.assertTrue((self.dir / "s00" / "c004.path").exists())
        every = read_dataset(self.dir)
        self.assertEqual(every.styles, ["s01", "s02", "s03"])
        for s, c, target in every.pairs:
            self.assertTrue(target.allclose(self.split.target(s, c), 1e-9))
        self.assertEqual(read_dataset(self.dir, role="train").styles, ["s01", "s02"])
        self.assertEqual(read_dataset(self.dir, role="eval").styles, ["s03"])

    def test_missing_manifest(self):
        with self.assertRaises(DatasetError) as ctx:
            read_dataset(self.dir)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_missing_glyph_file_names_the_file(self):
        write_dataset(self.split, self.dir)
        os.remove(self.dir / "s01" / "c002.path")
        with self.assertRaises(DatasetError) as ctx:
            read_dataset(self.dir)
        self.assertIn("c002.path", ctx.exception.context.additional_data["file"])

    def test_batches_share_ids(self):
        pairs = TrainingPairs(self.split, seed=1)
        seen = []
        for batch in pairs.epoch(0, batch_size=4):
            self.assertLessEqual(len(batch.keys), 4)
            for k, (style_id, content_id, ref_id) in enumerate(batch.keys):
                self.assertNotEqual(ref_id, content_id)
                expected = pairs.padded[style_id][ref_id]
                self.assertTrue(np.array_equal(batch.style.command_types[k].numpy(), expected.command_types))
                content = pairs.padded["s00"][content_id]
                self.assertTrue(np.array_equal(batch.content.args[k].numpy(), content.args.astype(np.float32)))
                target = pairs.padded[style_id][content_id]
                self.assertTrue(np.array_equal(batch.target.visibility[k].numpy(), target.visibility))
                seen.append((style_id, content_id))
        self.assertEqual(sorted(seen), sorted(pairs.pairs))
        self.assertEqual(pairs.batches_per_epoch(4), 4)

    def test_epochs_are_reproducible(self):
        pairs = TrainingPairs(self.split, seed=1)
        first = [b.keys for b in pairs.epoch(3, 4)]
        again = [b.keys for b in TrainingPairs(self.split, seed=1).epoch(3, 4)]
        other = [b.keys for b in pairs.epoch(4, 4)]
        self.assertEqual(first, again)
        self.assertNotEqual(first, other)


class TestCheckpoint(unittest.TestCase):
    def setUp(self):
        torch.manual_seed(0)
        self.cfg = tiny_config()
        self.model = build_model(self.cfg)
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "model.ckpt"

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip_is_bitwise(self):
        save_checkpoint(self.path, self.model, self.cfg, step=7, epoch=2)
        torch.manual_seed(1)
        other = build_model(self.cfg)
        ckpt = load_checkpoint(self.path, other)
        self.assertEqual((ckpt.step, ckpt.epoch), (7, 2))
        self.assertEqual(ckpt.config, self.cfg)
        for name, tensor in self.model.state_dict().items():
            self.assertTrue(torch.equal(tensor, other.state_dict()[name]), msg=name)

    def test_manifest_records_tensors(self):
        save_checkpoint(self.path, self.model, self.cfg)
        manifest = read_manifest(self.path)
        self.assertEqual(manifest["format_version"], 1)
        self.assertEqual(manifest["config_hash"], self.cfg.config_hash())
        name = "encoder.embedding.index_table_path.weight"
        self.assertEqual(manifest["tensors"][name], {"shape": [12, 16], "dtype": "float32"})

    def test_truncated_file(self):
        save_checkpoint(self.path, self.model, self.cfg)
        data = self.path.read_bytes()
        for cut in (5, len(data) // 2, len(data) - 1):
            self.path.write_bytes(data[:cut])
            with self.assertRaises(CorruptFile):
                load_checkpoint(self.path)

    def test_flipped_payload_byte(self):
        save_checkpoint(self.path, self.model, self.cfg)
        data = bytearray(self.path.read_bytes())
        data[-10] ^= 0xFF
        self.path.write_bytes(bytes(data))
        with self.assertRaises(CorruptFile):
            load_checkpoint(self.path)

    def test_not_a_checkpoint(self):
        self.path.write_bytes(b"PK\x03\x04" + b"\x00" * 64)
        with self.assertRaises(CorruptFile):
            load_checkpoint(self.path)

    def test_version_mismatch(self):
        save_checkpoint(self.path, self.model, self.cfg)
        data = bytearray(self.path.read_bytes())
        self.assertEqual(bytes(data[:4]), MAGIC)
        data[4:8] = (2).to_bytes(4, "big")
        self.path.write_bytes(bytes(data))
        with self.assertRaises(VersionMismatch):
            load_checkpoint(self.path)

    def test_different_path_count(self):
        save_checkpoint(self.path, self.model, self.cfg)
        with self.assertRaises(ShapeMismatch) as ctx:
            load_checkpoint(self.path, FontStyleTransfer(TINY_MODEL, n_paths=10))
        self.assertIn("index_table_path", ctx.exception.name)

    def test_missing_file(self):
        with self.assertRaises(CheckpointError) as ctx:
            load_checkpoint(self.path)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_load_model_rebuilds_from_config(self):
        save_checkpoint(self.path, self.model, self.cfg)
        model, ckpt = load_model(self.path)
        self.assertFalse(model.training)
        self.assertEqual(model.cfg, TINY_MODEL)
        self.assertEqual(ckpt.config.n_paths, 12)


class TestTrainer(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.data = synth_dataset(0, 3, 4)

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_first_batch_loss_is_finite(self):
        trainer = Trainer(tiny_config(), self.data, self.dir / "run")
        record = trainer.train_step(next(trainer.pairs.epoch(0, 4)))
        self.assertTrue(record.is_finite())
        self.assertEqual(record.step, 0)
        self.assertEqual(record.lr, 0.0)
        self.assertEqual(trainer.step, 1)

    def test_run_writes_metrics_and_checkpoint(self):
        result = Trainer(tiny_config(), self.data, self.dir / "run").train()
        self.assertEqual(result.step, 4)
        self.assertEqual(result.epoch, 2)
        rows = MetricsLog.read(result.metrics)
        self.assertEqual([r.step for r in rows], [0, 1, 2, 3])
        self.assertTrue(all(r.loss_total > 0 for r in rows))
        self.assertEqual(result.checkpoint.name, CHECKPOINT_NAME)
        self.assertEqual(load_checkpoint(result.checkpoint).step, 4)
        self.assertTrue((self.dir / "run" / "config.resolved.yaml").exists())

    def test_result_summarizes_the_run(self):
        result = Trainer(tiny_config(), self.data, self.dir / "run").train()
        rows = MetricsLog.read(result.metrics)
        total = result.summary["loss_total"]
        self.assertEqual(total["count"], 4)
        self.assertEqual(total["last"], rows[-1].loss_total)
        self.assertEqual(total["min"], min(r.loss_total for r in rows))
        self.assertEqual(set(result.summary), {"loss_vis", "loss_cmd", "loss_args", "loss_cfr", "loss_total"})

    def test_identical_runs_identical_metrics(self):
        Trainer(tiny_config(), self.data, self.dir / "a").train()
        Trainer(tiny_config(), self.data, self.dir / "b").train()
        a = (self.dir / "a" / METRICS_NAME).read_text()
        b = (self.dir / "b" / METRICS_NAME).read_text()
        self.assertEqual(a, b)

    def test_resume_reproduces_metrics(self):
        Trainer(tiny_config(), self.data, self.dir / "full").train()
        Trainer(tiny_config(epochs=1), self.data, self.dir / "split").train()
        Trainer(tiny_config(), self.data, self.dir / "split",
                resume=self.dir / "split" / CHECKPOINT_NAME).train()
        full = MetricsLog.read(self.dir / "full" / METRICS_NAME)
        split = MetricsLog.read(self.dir / "split" / METRICS_NAME)
        self.assertEqual(full, split)

    def test_resume_mid_epoch(self):
        Trainer(tiny_config(), self.data, self.dir / "full").train()
        first = Trainer(tiny_config(max_steps=3), self.data, self.dir / "mid").train()
        self.assertEqual((first.step, first.epoch), (3, 1))
        Trainer(tiny_config(), self.data, self.dir / "mid", resume=first.checkpoint).train()
        self.assertEqual(MetricsLog.read(self.dir / "full" / METRICS_NAME),
                         MetricsLog.read(self.dir / "mid" / METRICS_NAME))

    def test_non_finite_loss_aborts(self):
        def broken(pred, target, weights=None, n_p=9):
            nan = pred.args.sum() * math.nan
            return LossBreakdown(nan, nan, nan, nan, nan)

        trainer = Trainer(tiny_config(), self.data, self.dir / "nan")
        with patch("src.training.trainer.total_loss", side_effect=broken):
            with self.assertRaises(NonFiniteLoss) as ctx:
                trainer.train()
        self.assertEqual(ctx.exception.step, 0)
        self.assertEqual(ctx.exception.exit_code, 4)


if __name__ == '__main__':
    unittest.main()
