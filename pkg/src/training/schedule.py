"""Learning-rate schedule: linear warmup from 0, then per-step exponential decay."""

import torch

from src.config import TrainConfig


def lr_schedule(step: int, cfg: TrainConfig) -> float:
    if step < 0:
        raise ValueError(f"step must be >= 0, got {step}")
    if step <= cfg.warmup_iters:
        return cfg.peak_lr * step / cfg.warmup_iters
    return cfg.peak_lr * cfg.decay_rate ** (step - cfg.warmup_iters)


def set_learning_rate(optimizer: torch.optim.Optimizer, lr: float) -> None:
    for group in optimizer.param_groups:
        group["lr"] = lr
