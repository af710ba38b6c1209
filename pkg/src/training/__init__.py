"""Synthetic data, dataset I/O, LR schedule, checkpoints and the training loop."""

from src.training.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from src.training.dataset import (
    DatasetSplit,
    TrainingPairs,
    read_dataset,
    split_styles,
    synth_dataset,
    write_dataset,
)
from src.training.schedule import lr_schedule
from src.training.trainer import Trainer, TrainResult, build_model, train

__all__ = [
    "Checkpoint",
    "DatasetSplit",
    "TrainResult",
    "Trainer",
    "TrainingPairs",
    "build_model",
    "load_checkpoint",
    "lr_schedule",
    "read_dataset",
    "save_checkpoint",
    "split_styles",
    "synth_dataset",
    "train",
    "write_dataset",
]
