"""Optimization loop: Adam, warmup + exponential decay, gradient clipping, metrics and checkpoints."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import torch

from src.config import TrainConfig
from src.logger import get_logger
from src.model.losses import LossBreakdown, total_loss
from src.model.network import FontStyleTransfer
from src.patterns.error_handling import NonFiniteLoss
from src.patterns.logging_monitoring import LossRecord, MetricsLog, timed
from src.training.checkpoint import Checkpoint, check_shapes, load_checkpoint, save_checkpoint
from src.training.dataset import DatasetSplit, TrainingBatch, TrainingPairs
from src.training.schedule import lr_schedule, set_learning_rate

logger = get_logger(__name__)

CHECKPOINT_NAME = "checkpoint.ckpt"
METRICS_NAME = "metrics.csv"
RESOLVED_CONFIG_NAME = "config.resolved.yaml"


def build_model(cfg: TrainConfig) -> FontStyleTransfer:
    return FontStyleTransfer(cfg.model, n_paths=cfg.n_paths, n_cmds=cfg.n_cmds)


def seed_everything(seed: int, threads: Optional[int] = None) -> None:
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    if threads:
        torch.set_num_threads(threads)


@dataclass
class TrainResult:
    step: int
    epoch: int
    last: Optional[LossRecord]
    checkpoint: Path
    metrics: Path
    summary: Dict[str, Dict[str, float]] = field(default_factory=dict)


class Trainer:
    """
    Single-owner training loop. Given the same config, data and seed, two runs
    write identical metrics files; a run resumed from a checkpoint continues
    the same sequence of batches.
    """

    def __init__(self, cfg: TrainConfig, data: DatasetSplit, out_dir: Union[str, Path],
                 resume: Optional[Union[str, Path]] = None):
        self.cfg = cfg
        self.out_dir = Path(out_dir)
        seed_everything(cfg.seed, cfg.threads)
        self.pairs = TrainingPairs(data, cfg.n_paths, cfg.n_cmds, seed=cfg.seed)
        self.model = build_model(cfg)
        self.optimizer = torch.optim.Adam(
            self.model.parameters(), lr=0.0, betas=tuple(cfg.adam_betas), eps=cfg.adam_eps
        )
        self.step = 0
        self.epoch = 0
        self.batch_in_epoch = 0
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.metrics = MetricsLog(self.out_dir / METRICS_NAME)
        if resume is not None:
            self._resume(Path(resume))
        cfg.save(self.out_dir / RESOLVED_CONFIG_NAME)
        logger.info(
            f"model has {self.model.parameter_count()} parameters; "
            f"{len(self.pairs)} training pairs, {self.pairs.batches_per_epoch(cfg.batch_size)} batches/epoch"
        )

    @property
    def checkpoint_path(self) -> Path:
        return self.out_dir / CHECKPOINT_NAME

    def _resume(self, path: Path) -> None:
        ckpt = load_checkpoint(path, self.model, self.optimizer, restore_rng=True)
        if ckpt.manifest.get("config_hash") != self.cfg.config_hash():
            logger.warning("resuming with a config that differs from the checkpoint's")
        self.step, self.epoch, self.batch_in_epoch = ckpt.step, ckpt.epoch, ckpt.batch_in_epoch
        kept = self.metrics.truncate_after(self.step - 1)
        logger.info(f"resumed from {path} at step {self.step}, epoch {self.epoch} ({kept} metric rows kept)")

    def _save(self) -> Path:
        return save_checkpoint(
            self.checkpoint_path, self.model, self.cfg, self.optimizer,
            step=self.step, epoch=self.epoch, batch_in_epoch=self.batch_in_epoch,
        )

    def _finished(self) -> bool:
        if self.cfg.max_steps is not None and self.step >= self.cfg.max_steps:
            return True
        return self.epoch >= self.cfg.epochs

    def train_step(self, batch: TrainingBatch) -> LossRecord:
        lr = lr_schedule(self.step, self.cfg)
        set_learning_rate(self.optimizer, lr)
        self.model.train()
        pred = self.model(batch.content, batch.style)
        breakdown: LossBreakdown = total_loss(pred, batch.target, self.cfg.loss, self.cfg.n_p_train)
        terms = breakdown.as_floats()
        if not breakdown.is_finite():
            logger.error(f"non-finite loss at step {self.step}: {terms}")
            raise NonFiniteLoss(self.step, terms)
        self.optimizer.zero_grad(set_to_none=True)
        breakdown.total.backward()
        torch.nn.utils.clip_grad_norm_(self.model.parameters(), self.cfg.grad_clip)
        self.optimizer.step()
        record = LossRecord.from_breakdown(self.step, lr, terms)
        self.metrics.append(record)
        if self.step % self.cfg.log_every == 0:
            logger.info(
                f"step {self.step} lr {lr:.6f} total {terms['loss_total']:.5f} "
                f"(vis {terms['loss_vis']:.4f} cmd {terms['loss_cmd']:.4f} "
                f"args {terms['loss_args']:.4f} cfr {terms['loss_cfr']:.6f})"
            )
        self.step += 1
        return record

    def train(self) -> TrainResult:
        last: Optional[LossRecord] = None
        while not self._finished():
            with timed(f"epoch {self.epoch}"):
                for i, batch in enumerate(self.pairs.epoch(self.epoch, self.cfg.batch_size)):
                    if i < self.batch_in_epoch:
                        continue
                    last = self.train_step(batch)
                    self.batch_in_epoch = i + 1
                    if self.cfg.max_steps is not None and self.step >= self.cfg.max_steps:
                        break
                else:
                    self.epoch += 1
                    self.batch_in_epoch = 0
                    if self.epoch % self.cfg.checkpoint_every == 0:
                        self._save()
        self._save()
        summary = self.metrics.summary()
        total = summary["loss_total"]
        logger.info(
            f"training finished at step {self.step}, epoch {self.epoch}: "
            f"total last {total['last']:.5f} min {total['min']:.5f} over {total['count']} steps"
        )
        return TrainResult(self.step, self.epoch, last, self.checkpoint_path, self.metrics.path, summary)


def train(cfg: TrainConfig, data: DatasetSplit, out_dir: Union[str, Path],
          resume: Optional[Union[str, Path]] = None) -> TrainResult:
    return Trainer(cfg, data, out_dir, resume).train()


def load_model(path: Union[str, Path]) -> Tuple[FontStyleTransfer, Checkpoint]:
    """Rebuild the model described by a checkpoint's config and load its weights."""
    ckpt = load_checkpoint(path)
    model = build_model(ckpt.config)
    check_shapes(ckpt.model_state, model)
    model.load_state_dict(ckpt.model_state)
    model.eval()
    return model, ckpt
