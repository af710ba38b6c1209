"""
Training metrics log.

One LossRecord per optimizer step, appended to a CSV file with a fixed
header. MetricsLog also keeps running per-term statistics for progress lines
and can read an existing log back (used when resuming).
"""

import csv
import math
import threading
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

from src.logger import get_logger

logger = get_logger(__name__)

METRICS_HEADER = ("step", "lr", "loss_vis", "loss_cmd", "loss_args", "loss_cfr", "loss_total")


@dataclass
class LossRecord:
    """One row of metrics.csv"""
    step: int
    lr: float
    loss_vis: float
    loss_cmd: float
    loss_args: float
    loss_cfr: float
    loss_total: float

    @classmethod
    def from_breakdown(cls, step: int, lr: float, terms: Dict[str, float]) -> "LossRecord":
        return cls(step=step, lr=lr, **{k: terms[k] for k in METRICS_HEADER[2:]})

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "LossRecord":
        return cls(step=int(row["step"]), **{k: float(row[k]) for k in METRICS_HEADER[1:]})

    def to_row(self) -> List[str]:
        # repr keeps full float precision
        return [str(self.step)] + [repr(float(getattr(self, k))) for k in METRICS_HEADER[1:]]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def is_finite(self) -> bool:
        return all(math.isfinite(getattr(self, f.name)) for f in fields(self) if f.name != "step")


@dataclass
class TermStats:
    last: float = math.nan
    minimum: float = math.inf
    count: int = 0

    def update(self, value: float) -> None:
        self.last = value
        self.minimum = min(self.minimum, value)
        self.count += 1


class MetricsLog:
    """Append-only CSV writer with running statistics."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.stats: Dict[str, TermStats] = {k: TermStats() for k in METRICS_HEADER[2:]}
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists() or self.path.stat().st_size == 0:
            with open(self.path, "w", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow(METRICS_HEADER)

    def append(self, record: LossRecord) -> None:
        with self._lock:
            with open(self.path, "a", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow(record.to_row())
            for key, st in self.stats.items():
                st.update(getattr(record, key))

    def truncate_after(self, step: int) -> int:
        """Drop rows past `step` (left over from an interrupted run). Returns rows kept."""
        with self._lock:
            kept = [r for r in self.read(self.path) if r.step <= step]
            with open(self.path, "w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f)
                writer.writerow(METRICS_HEADER)
                for r in kept:
                    writer.writerow(r.to_row())
        return len(kept)

    def summary(self) -> Dict[str, Dict[str, float]]:
        with self._lock:
            return {k: {"last": s.last, "min": s.minimum, "count": s.count} for k, s in self.stats.items()}

    @staticmethod
    def read(path: Union[str, Path]) -> List[LossRecord]:
        path = Path(path)
        if not path.exists():
            return []
        with open(path, "r", newline="", encoding="utf-8") as f:
            return [LossRecord.from_row(row) for row in csv.DictReader(f)]


@contextmanager
def timed(label: str, sink: Optional[Dict[str, float]] = None) -> Iterator[None]:
    """Log wall time of a block at DEBUG; optionally store it in sink[label]."""
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        if sink is not None:
            sink[label] = elapsed
        logger.debug(f"{label} took {elapsed:.3f}s")
