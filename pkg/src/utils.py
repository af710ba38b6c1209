#!/usr/bin/env python3
"""
Utility module for vecfont.
Argument types and small output helpers shared by the subcommands.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from src.patterns.error_handling import ConfigError


def format_output(data: Any, format_type: str = "json") -> str:
    """Format output in a specific format."""
    if format_type == "json":
        return json.dumps(data, indent=2, default=_json_default)
    return str(data)


def _json_default(value: Any):
    return str(value)


def write_output(content: str, path: Optional[Union[str, Path]] = None) -> None:
    """Write to a file, or to stdout when no path is given."""
    if path is None or str(path) == "-":
        sys.stdout.write(content)
        sys.stdout.flush()
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def resolution(text: str) -> Tuple[int, int]:
    """'128' -> (128, 128); '96x128' -> (rows 128, cols 96), i.e. WxH."""
    parts = text.lower().split("x")
    try:
        dims = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad resolution '{text}'") from None
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2 or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"bad resolution '{text}'")
    width, height = dims
    return height, width


def parse_overrides(pairs: Optional[List[str]]) -> Dict[str, Any]:
    """['model.d_model=64', 'peak_lr=1e-3'] -> dotted-key dict with YAML-typed values."""
    overrides: Dict[str, Any] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(pair, "override is not KEY=VALUE")
        key, raw = pair.split("=", 1)
        overrides[key.strip()] = yaml.safe_load(raw)
    return overrides
