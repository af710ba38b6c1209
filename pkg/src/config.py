#!/usr/bin/env python3
"""
Configuration module for vecfont.
Typed training/model configuration loaded from a key-value YAML file, with
command-line overrides applied on top.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.patterns.error_handling import ConfigError


class ModelConfig(BaseModel):
    """Hierarchical Transformer dimensions."""
    model_config = ConfigDict(extra="forbid")

    d_model: int = Field(256, ge=8)
    n_heads: int = Field(8, ge=1)
    ff_dim: int = Field(512, ge=1)
    n_layers: int = Field(6, ge=1)
    dropout: float = Field(0.1, ge=0.0, lt=1.0)
    inject_layer: int = Field(3, ge=0)

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.inject_layer > self.n_layers:
            raise ValueError(f"inject_layer {self.inject_layer} beyond n_layers {self.n_layers}")
        return self


class LossWeights(BaseModel):
    model_config = ConfigDict(extra="forbid")

    w_vis: float = Field(1.0, ge=0.0, allow_inf_nan=False)
    w_cmd: float = Field(1.0, ge=0.0, allow_inf_nan=False)
    w_args: float = Field(1.0, ge=0.0, allow_inf_nan=False)
    w_cfr: float = Field(1.0, ge=0.0, allow_inf_nan=False)
    chamfer_scale: float = Field(1.0 / 255.0 ** 2, gt=0.0, allow_inf_nan=False)


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    batch_size: int = Field(96, ge=1)
    epochs: int = Field(1500, ge=1)
    max_steps: Optional[int] = Field(None, ge=1)
    warmup_iters: int = Field(500, ge=1)
    peak_lr: float = Field(0.002, gt=0.0)
    decay_rate: float = Field(0.9999, gt=0.0, le=1.0)
    n_p_train: int = Field(9, ge=1)
    seed: int = 0
    n_paths: int = Field(12, ge=1)
    n_cmds: int = Field(100, ge=2)
    checkpoint_every: int = Field(50, ge=1)
    grad_clip: float = Field(1.0, gt=0.0)
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    log_every: int = Field(50, ge=1)
    threads: Optional[int] = Field(None, ge=1)
    model: ModelConfig = Field(default_factory=ModelConfig)
    loss: LossWeights = Field(default_factory=LossWeights)

    @field_validator("adam_betas")
    @classmethod
    def _betas_in_range(cls, v):
        if not all(0.0 <= b < 1.0 for b in v):
            raise ValueError("adam betas must be in [0, 1)")
        return v

    @classmethod
    def from_file(cls, config_path: Union[str, Path]) -> "TrainConfig":
        return resolve_config(config_path)

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.model_dump(mode="json"), f, sort_keys=False)


def _nest(flat: Dict[str, Any]) -> Dict[str, Any]:
    """Expand dotted keys ('model.d_model') into nested dicts."""
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        node = nested
        *parents, leaf = key.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        if isinstance(value, dict) and isinstance(node.get(leaf), dict):
            node[leaf].update(value)
        else:
            node[leaf] = value
    return nested


def _merge(base: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config_file(config_path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(str(config_path), f"cannot read config file: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(str(config_path), f"not a key-value file: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(str(config_path), "top level must be key: value pairs")
    return _nest(data)


def resolve_config(config_path: Optional[Union[str, Path]] = None,
                   overrides: Optional[Dict[str, Any]] = None) -> TrainConfig:
    """Defaults <- file values <- overrides (None-valued overrides are ignored)."""
    data: Dict[str, Any] = load_config_file(config_path) if config_path else {}
    if overrides:
        data = _merge(data, _nest({k: v for k, v in overrides.items() if v is not None}))
    try:
        return TrainConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "config"
        raise ConfigError(key, first["msg"]) from e
