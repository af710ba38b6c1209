"""
Checkpoint file format.

    b"VFCK" | uint32 format version | uint64 manifest length | manifest (JSON) | payload

The manifest lists every model tensor's shape and dtype, the format version,
the config hash and the sha256 of the payload. The payload is a torch.save
archive holding the model and optimizer state, the torch RNG state and the
training position.
"""

import hashlib
import io
import json
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import torch
import torch.nn as nn

from src.config import TrainConfig
from src.logger import get_logger
from src.patterns.error_handling import CheckpointError, CorruptFile, ShapeMismatch, VersionMismatch

logger = get_logger(__name__)

MAGIC = b"VFCK"
FORMAT_VERSION = 1
_HEADER = struct.Struct(">4sIQ")


@dataclass
class Checkpoint:
    model_state: Dict[str, torch.Tensor]
    config: TrainConfig
    optimizer_state: Optional[Dict[str, Any]] = None
    rng_state: Optional[torch.Tensor] = None
    step: int = 0
    epoch: int = 0
    batch_in_epoch: int = 0
    manifest: Dict[str, Any] = field(default_factory=dict)


def _tensor_manifest(state: Dict[str, torch.Tensor]) -> Dict[str, Dict[str, Any]]:
    return {name: {"shape": list(t.shape), "dtype": str(t.dtype).replace("torch.", "")} for name, t in state.items()}


def save_checkpoint(path: Union[str, Path], model: nn.Module, config: TrainConfig,
                    optimizer: Optional[torch.optim.Optimizer] = None, step: int = 0, epoch: int = 0,
                    batch_in_epoch: int = 0) -> Path:
    """Write atomically (temp file + rename)."""
    path = Path(path)
    state = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}
    buffer = io.BytesIO()
    torch.save(
        {
            "model": state,
            "optimizer": optimizer.state_dict() if optimizer is not None else None,
            "rng": torch.get_rng_state(),
            "step": step,
            "epoch": epoch,
            "batch_in_epoch": batch_in_epoch,
        },
        buffer,
    )
    payload = buffer.getvalue()
    manifest = {
        "format_version": FORMAT_VERSION,
        "config_hash": config.config_hash(),
        "config": config.model_dump(mode="json"),
        "payload_bytes": len(payload),
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
        "tensors": _tensor_manifest(state),
        "step": step,
        "epoch": epoch,
    }
    manifest_bytes = json.dumps(manifest, sort_keys=True).encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(manifest_bytes)))
        f.write(manifest_bytes)
        f.write(payload)
    os.replace(tmp, path)
    logger.info(f"checkpoint written: {path} (step {step}, epoch {epoch})")
    return path


def read_manifest(path: Union[str, Path]) -> Dict[str, Any]:
    manifest, _ = _read(Path(path))
    return manifest


def _read(path: Path):
    try:
        data = path.read_bytes()
    except FileNotFoundError as e:
        raise CheckpointError(f"Checkpoint not found: {path}") from e
    except OSError as e:
        raise CorruptFile(str(path), f"unreadable: {e}") from e
    if len(data) < _HEADER.size:
        raise CorruptFile(str(path), "truncated header")
    magic, version, manifest_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFile(str(path), "not a checkpoint file")
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    start = _HEADER.size
    if len(data) < start + manifest_len:
        raise CorruptFile(str(path), "truncated manifest")
    try:
        manifest = json.loads(data[start:start + manifest_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptFile(str(path), f"manifest is not JSON: {e}") from e
    payload = data[start + manifest_len:]
    if len(payload) != manifest.get("payload_bytes"):
        raise CorruptFile(str(path), f"payload is {len(payload)} bytes, manifest says {manifest.get('payload_bytes')}")
    if hashlib.sha256(payload).hexdigest() != manifest.get("payload_sha256"):
        raise CorruptFile(str(path), "payload checksum mismatch")
    return manifest, payload


def check_shapes(state: Dict[str, torch.Tensor], model: nn.Module) -> None:
    expected = model.state_dict()
    for name, tensor in expected.items():
        if name not in state:
            raise ShapeMismatch(name, (), tensor.shape)
        if tuple(state[name].shape) != tuple(tensor.shape):
            raise ShapeMismatch(name, state[name].shape, tensor.shape)
    for name in state:
        if name not in expected:
            raise ShapeMismatch(name, state[name].shape, ())


def load_checkpoint(path: Union[str, Path], model: Optional[nn.Module] = None,
                    optimizer: Optional[torch.optim.Optimizer] = None, restore_rng: bool = False) -> Checkpoint:
    """
    Read and verify a checkpoint. With a model given, shapes are checked and
    the weights loaded; likewise for the optimizer state.
    """
    path = Path(path)
    manifest, payload = _read(path)
    try:
        blob = torch.load(io.BytesIO(payload), map_location="cpu", weights_only=True)
    except Exception as e:
        raise CorruptFile(str(path), f"payload does not deserialize: {e}") from e
    config = TrainConfig.model_validate(manifest["config"])
    ckpt = Checkpoint(
        model_state=blob["model"],
        config=config,
        optimizer_state=blob.get("optimizer"),
        rng_state=blob.get("rng"),
        step=int(blob.get("step", 0)),
        epoch=int(blob.get("epoch", 0)),
        batch_in_epoch=int(blob.get("batch_in_epoch", 0)),
        manifest=manifest,
    )
    if model is not None:
        check_shapes(ckpt.model_state, model)
        model.load_state_dict(ckpt.model_state)
    if optimizer is not None and ckpt.optimizer_state is not None:
        optimizer.load_state_dict(ckpt.optimizer_state)
    if restore_rng and ckpt.rng_state is not None:
        torch.set_rng_state(ckpt.rng_state)
    return ckpt
