#!/usr/bin/env python3
"""
Core module for vecfont.
VecFontApp wires the library into the subcommands: synth, train, generate,
eval, render and validate.
"""

import argparse
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.commands import CommandProcessor
from src.config import resolve_config
from src.logger import configure_logging, get_logger
from src.patterns.error_handling import ConfigError, InvalidGlyph, SvgError, error_context
from src.svg.glyph import Glyph
from src.svg.io import GLYPH_SUFFIX, read_glyph_file, write_svg_document
from src.svg.parser import parse_svg_path, serialize_svg
from src.svg.transforms import DEFAULT_N_CMDS, DEFAULT_N_PATHS, canonical_path_order, normalize, pad_to_fixed, validate_glyph
from src.utils import parse_overrides, positive_int, resolution, write_output

ROUND_TRIP_TOL = 1e-6


@dataclass
class ApplicationState:
    """Represents the application state."""
    start_time: datetime = field(default_factory=datetime.now)
    version: str = "1.0.0"
    commands_run: List[str] = field(default_factory=list)


def _read_input(path: str) -> Glyph:
    """Read a glyph file; parse failures name the file."""
    with error_context("read", file=path):
        try:
            return read_glyph_file(path)
        except SvgError as e:
            e.message = f"{path}: {e.message}"
            raise


class VecFontApp:
    """Main application class."""

    def __init__(self):
        self.logger = get_logger("vecfont.app")
        self.command_processor = CommandProcessor(self.logger)
        self.register_commands()
        self.state = ApplicationState()

    def register_commands(self):
        cp = self.command_processor
        cp.register_command("synth", self.cmd_synth, self._synth_args, "generate a synthetic glyph dataset")
        cp.register_command("train", self.cmd_train, self._train_args, "train the style-transfer model")
        cp.register_command("generate", self.cmd_generate, self._generate_args,
                            "generate a glyph from a content and a style reference", alias=["gen"])
        cp.register_command("eval", self.cmd_eval, self._eval_args, "pixel-L1 and Chamfer evaluation")
        cp.register_command("render", self.cmd_render, self._render_args, "rasterize a glyph with the even-odd rule")
        cp.register_command("validate", self.cmd_validate, self._validate_args,
                            "round-trip and padding check of glyph files")

    @staticmethod
    def global_options(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--log-level", default="INFO",
                            choices=["TRACE", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
        parser.add_argument("--threads", type=positive_int, default=None,
                            help="worker threads (default: all cores)")

    def build_parser(self, prog: str = "vecfont") -> argparse.ArgumentParser:
        return self.command_processor.build_parser(prog, self.global_options)

    def run_command(self, command: str, args: argparse.Namespace):
        self.logger.debug(f"Executing command: {command}")
        result = self.command_processor.execute_command(command, args)
        self.state.commands_run.append(command)
        return result

    # synth -------------------------------------------------------------

    @staticmethod
    def _synth_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--styles", type=int, default=4, help="number of styles, including the content reference")
        p.add_argument("--contents", type=int, default=16)
        p.add_argument("--eval-fraction", type=float, default=7 / 66)
        p.add_argument("--n-paths", type=positive_int, default=DEFAULT_N_PATHS)
        p.add_argument("--n-cmds", type=positive_int, default=DEFAULT_N_CMDS)
        p.add_argument("--out", required=True)

    def cmd_synth(self, args: argparse.Namespace) -> Dict[str, Any]:
        from src.training.dataset import synth_dataset, write_dataset

        if args.styles < 2:
            raise ConfigError("styles", "need at least 2 (the content reference plus one target style)")
        if args.contents < 2:
            raise ConfigError("contents", "need at least 2")
        if not 0.0 < args.eval_fraction < 1.0:
            raise ConfigError("eval_fraction", "must be in (0, 1)")
        split = synth_dataset(args.seed, args.styles, args.contents, args.n_paths, args.n_cmds)
        out = write_dataset(split, args.out, args.eval_fraction)
        return {"out": str(out), "styles": args.styles, "contents": args.contents,
                "files": args.styles * args.contents}

    # train -------------------------------------------------------------

    @staticmethod
    def _train_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="key-value YAML file mirroring TrainConfig")
        p.add_argument("--data", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--resume", default=None, help="checkpoint to continue from")
        p.add_argument("--batch-size", type=positive_int, dest="batch_size")
        p.add_argument("--epochs", type=positive_int)
        p.add_argument("--max-steps", type=positive_int, dest="max_steps")
        p.add_argument("--seed", type=int)
        p.add_argument("--peak-lr", type=float, dest="peak_lr")
        p.add_argument("--set", action="append", dest="overrides", metavar="KEY=VALUE",
                       help="any config key, dotted for nested (model.d_model=64)")

    def cmd_train(self, args: argparse.Namespace) -> Dict[str, Any]:
        from src.training.dataset import read_dataset
        from src.training.trainer import Trainer

        overrides = parse_overrides(args.overrides)
        overrides.update({k: getattr(args, k) for k in ("batch_size", "epochs", "max_steps", "seed", "peak_lr")})
        if args.threads:
            overrides["threads"] = args.threads
        cfg = resolve_config(args.config, overrides)
        data = read_dataset(args.data, role="train")
        out = Path(args.out)
        configure_logging(args.log_level, out / "train.log")
        result = Trainer(cfg, data, out, resume=args.resume).train()
        summary = {"step": result.step, "epoch": result.epoch, "checkpoint": str(result.checkpoint),
                   "metrics": str(result.metrics)}
        if result.last is not None:
            summary["loss_total"] = result.last.loss_total
        return summary

    # generate ----------------------------------------------------------

    @staticmethod
    def _generate_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--checkpoint", required=True)
        p.add_argument("--content", required=True)
        p.add_argument("--style", required=True)
        p.add_argument("--out", required=True)

    def cmd_generate(self, args: argparse.Namespace) -> Dict[str, Any]:
        from src.model.network import generate
        from src.svg.transforms import prepare_glyph
        from src.training.trainer import load_model

        content = _read_input(args.content)
        style = _read_input(args.style)
        model, ckpt = load_model(args.checkpoint)
        n_paths, n_cmds = ckpt.config.n_paths, ckpt.config.n_cmds
        with error_context("prepare", file=args.content):
            content_padded = prepare_glyph(content, n_paths, n_cmds)
        with error_context("prepare", file=args.style):
            style_padded = prepare_glyph(style, n_paths, n_cmds)
        glyph = validate_glyph(generate(model, content_padded, style_padded))
        write_svg_document(args.out, glyph)
        return {"out": args.out, "paths": len(glyph.paths)}

    # eval --------------------------------------------------------------

    @staticmethod
    def _eval_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--checkpoint", default=None)
        p.add_argument("--identity", action="store_true", help="oracle that copies the target")
        p.add_argument("--data", required=True)
        p.add_argument("--split", choices=["eval", "train", "all"], default="eval")
        p.add_argument("--np", type=positive_int, default=99, dest="n_p")
        p.add_argument("--res", type=resolution, default=(128, 128))
        p.add_argument("--index", choices=["brute", "grid"], default="brute",
                       help="nearest-neighbour search for the Chamfer metric")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="report CSV (default: stdout)")
        p.add_argument("--sheet", default=None, help="image sheet of predictions over targets")
        p.add_argument("--dump-dir", default=None, help="directory for PGM prediction/target pairs")

    def cmd_eval(self, args: argparse.Namespace) -> Dict[str, Any]:
        from src.evaluation.metrics import IdentityOracle, ModelGenerator, eval_split
        from src.training.dataset import read_dataset
        from src.training.trainer import load_model

        if not args.identity and not args.checkpoint:
            raise ConfigError("checkpoint", "required unless --identity is given")
        split = read_dataset(args.data, role=None if args.split == "all" else args.split)
        n_paths = split.metadata.get("n_paths", DEFAULT_N_PATHS)
        n_cmds = split.metadata.get("n_cmds", DEFAULT_N_CMDS)
        if args.identity:
            generator = IdentityOracle(split)
        else:
            model, ckpt = load_model(args.checkpoint)
            n_paths, n_cmds = ckpt.config.n_paths, ckpt.config.n_cmds
            generator = ModelGenerator(model)
        keep_images = bool(args.sheet or args.dump_dir)
        report = eval_split(generator, split, n_p=args.n_p, resolution=args.res, n_paths=n_paths,
                            n_cmds=n_cmds, threads=args.threads, seed=args.seed, keep_images=keep_images,
                            index=args.index)
        write_output(report.to_csv(), args.out)
        if args.sheet:
            report.write_sheet(args.sheet, split.styles, split.contents)
        if args.dump_dir:
            report.dump_images(args.dump_dir)
        return report.summary()

    # render ------------------------------------------------------------

    @staticmethod
    def _render_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--res", type=resolution, default=(256, 256))
        p.add_argument("--out", required=True, help=".png or .pgm")

    def cmd_render(self, args: argparse.Namespace) -> Dict[str, Any]:
        from src.geometry.raster import rasterize

        glyph = _read_input(args.input)
        with error_context("render", file=args.input):
            image = rasterize(normalize(glyph), args.res)
        image.save(args.out)
        return {"out": args.out, "resolution": list(image.resolution), "ink": float(image.pixels.mean())}

    # validate ----------------------------------------------------------

    @staticmethod
    def _validate_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--in", dest="input", required=True, help="glyph file, SVG document or dataset directory")
        p.add_argument("--n-paths", type=positive_int, default=DEFAULT_N_PATHS)
        p.add_argument("--n-cmds", type=positive_int, default=DEFAULT_N_CMDS)

    def _check_file(self, path: Path, n_paths: int, n_cmds: int) -> Optional[str]:
        try:
            glyph = read_glyph_file(path)
            again = parse_svg_path(serialize_svg(glyph), glyph.viewbox)
            if not again.allclose(Glyph(glyph.visible_paths, glyph.viewbox), ROUND_TRIP_TOL):
                return "parse(serialize(g)) differs from g"
            prepared = canonical_path_order(normalize(glyph))
            validate_glyph(prepared)
            pad_to_fixed(prepared, n_paths, n_cmds)
        except SvgError as e:
            return e.message
        return None

    def cmd_validate(self, args: argparse.Namespace) -> Dict[str, Any]:
        root = Path(args.input)
        files = sorted(root.rglob(f"*{GLYPH_SUFFIX}")) + sorted(root.rglob("*.svg")) if root.is_dir() else [root]
        failures = {}
        for path in files:
            problem = self._check_file(path, args.n_paths, args.n_cmds)
            if problem:
                self.logger.warning(f"{path}: {problem}")
                failures[str(path)] = problem
        summary = {"files": len(files), "failed": len(failures), "failures": failures}
        if failures:
            first = next(iter(failures))
            raise InvalidGlyph(f"{len(failures)} of {len(files)} files failed validation; first: {first}: "
                               f"{failures[first]}")
        return summary
