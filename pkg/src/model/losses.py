"""
Training losses: visibility CE, command-type CE, masked L1 on arguments and
the path-wise Chamfer loss, plus their weighted total.

All functions take a batched Prediction and GlyphBatch target and average over
the batch. Target paths are assumed canonically ordered, so predicted path i is
compared with target path i.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import torch
import torch.nn.functional as F

from src.config import LossWeights
from src.model.batch import GlyphBatch, Prediction
from src.svg.glyph import CommandType

N_P_TRAIN = 9


@dataclass
class LossBreakdown:
    visibility: torch.Tensor
    command: torch.Tensor
    args: torch.Tensor
    chamfer: torch.Tensor  # already multiplied by chamfer_scale
    total: torch.Tensor
    args_all_masked: bool = False

    def as_floats(self) -> Dict[str, float]:
        return {
            "loss_vis": float(self.visibility.detach()),
            "loss_cmd": float(self.command.detach()),
            "loss_args": float(self.args.detach()),
            "loss_cfr": float(self.chamfer.detach()),
            "loss_total": float(self.total.detach()),
        }

    def is_finite(self) -> bool:
        return bool(torch.isfinite(self.total.detach()))


def _zero(like: torch.Tensor) -> torch.Tensor:
    # keeps the graph connected so backward() works on an all-masked batch
    return like.sum() * 0.0


def visibility_loss(pred: Prediction, target: GlyphBatch) -> torch.Tensor:
    logits = pred.visibility_logits
    return F.cross_entropy(logits.reshape(-1, logits.shape[-1]), target.visibility.reshape(-1))


def command_loss(pred: Prediction, target: GlyphBatch) -> torch.Tensor:
    """Mean CE over every command slot of ground-truth-visible paths."""
    logits = pred.command_logits
    per_slot = F.cross_entropy(
        logits.reshape(-1, logits.shape[-1]), target.command_types.reshape(-1), reduction="none"
    ).reshape(target.command_types.shape)
    mask = target.visibility.bool()[:, :, None].expand_as(per_slot)
    if not mask.any():
        return _zero(logits)
    return per_slot[mask].mean()


def argument_loss(pred: Prediction, target: GlyphBatch) -> Tuple[torch.Tensor, bool]:
    """Mean |pred - target| over used argument slots of visible paths; (0, True) if there are none."""
    mask = target.arg_mask & target.visibility.bool()[:, :, None, None]
    if not mask.any():
        return _zero(pred.args), True
    diff = (pred.args - target.args.to(pred.args.dtype)).abs()
    return diff[mask].mean(), False


def pen_sources(command_types: np.ndarray) -> np.ndarray:
    """
    For every drawing slot, the index of the command whose end point is the pen
    position before it (-1 where undefined). Uses the given types only, so the
    same threading applies to predicted and target coordinates.
    """
    src = np.full(command_types.shape, -1, dtype=np.int64)
    flat_types = command_types.reshape(-1, command_types.shape[-1])
    flat_src = src.reshape(-1, command_types.shape[-1])
    for r, row in enumerate(flat_types):
        pen = subpath = -1
        for j, kind in enumerate(row):
            if kind == CommandType.M:
                pen = subpath = j
            elif kind in (CommandType.L, CommandType.C):
                flat_src[r, j] = pen
                pen = j
            elif kind == CommandType.Z:
                pen = subpath
            elif kind == CommandType.EOS:
                break
    return src


def bernstein_basis(n_p: int, dtype=torch.float64) -> torch.Tensor:
    """(n_p, 4) cubic Bernstein weights at t = k / n_p."""
    t = torch.arange(n_p, dtype=dtype) / n_p
    s = 1.0 - t
    return torch.stack([s ** 3, 3 * s ** 2 * t, 3 * s * t ** 2, t ** 3], dim=-1)


def _control_points(args: torch.Tensor, types: torch.Tensor, src: torch.Tensor) -> torch.Tensor:
    """(P, C, 6) args -> (P, C, 4, 2) cubic control points; L is degree-elevated."""
    ends = args[..., 4:6]
    start = torch.gather(ends, 1, src.clamp(min=0).unsqueeze(-1).expand(-1, -1, 2))
    is_cubic = (types == CommandType.C).unsqueeze(-1)
    c1 = torch.where(is_cubic, args[..., 0:2], start + (ends - start) / 3.0)
    c2 = torch.where(is_cubic, args[..., 2:4], start + 2.0 * (ends - start) / 3.0)
    return torch.stack([start, c1, c2, ends], dim=-2)


def _path_chamfer(a: torch.Tensor, b: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """
    a, b: (V, N, 2) clouds sharing the validity mask (V, N). Returns (V,) d_CD;
    rows with no valid point give 0.
    """
    d = ((a[:, :, None, :] - b[:, None, :, :]) ** 2).sum(-1)
    big = torch.finfo(d.dtype).max
    pair_ok = mask[:, :, None] & mask[:, None, :]
    d = d.masked_fill(~pair_ok, big)
    counts = mask.sum(dim=1).clamp(min=1).to(d.dtype)
    a_to_b = torch.where(mask, d.min(dim=2).values, torch.zeros_like(d[..., 0])).sum(1) / counts
    b_to_a = torch.where(mask, d.min(dim=1).values, torch.zeros_like(d[..., 0])).sum(1) / counts
    return a_to_b + b_to_a


def chamfer_loss(pred: Prediction, target: GlyphBatch, n_p: int = N_P_TRAIN) -> torch.Tensor:
    """
    Path-wise Chamfer loss in squared coordinate units.

    Both clouds are sampled with the target command kinds as template; only the
    coordinates differ. Averaged over visible paths per item, then over items.
    """
    if n_p < 1:
        raise ValueError(f"n_p must be >= 1, got {n_p}")
    dtype = pred.args.dtype
    basis = bernstein_basis(n_p, dtype=dtype).to(pred.args.device)
    types_np = target.command_types.cpu().numpy()
    sources = torch.from_numpy(pen_sources(types_np)).to(pred.args.device)
    drawing = (target.command_types == CommandType.L) | (target.command_types == CommandType.C)
    drawing &= sources >= 0

    per_item = []
    for k in range(len(target)):
        visible = torch.nonzero(target.visibility[k], as_tuple=True)[0]
        if len(visible) == 0:
            per_item.append(_zero(pred.args[k]))
            continue
        types = target.command_types[k, visible]
        src = sources[k, visible]
        draw = drawing[k, visible]
        n_draw = int(draw.sum(dim=1).max())
        if n_draw == 0:
            per_item.append(_zero(pred.args[k]))
            continue
        # compact drawing slots to the front; order within a path is preserved
        order = torch.argsort((~draw).to(torch.int8), dim=1, stable=True)[:, :n_draw]
        slot_ok = torch.gather(draw, 1, order)

        def cloud(args: torch.Tensor) -> torch.Tensor:
            ctrl = _control_points(args, types, src)
            ctrl = torch.gather(ctrl, 1, order[:, :, None, None].expand(-1, -1, 4, 2))
            pts = torch.einsum("tk,vjkd->vjtd", basis, ctrl)
            return pts.reshape(len(visible), n_draw * n_p, 2)

        pred_cloud = cloud(pred.args[k, visible])
        true_cloud = cloud(target.args[k, visible].to(dtype))
        point_ok = slot_ok.repeat_interleave(n_p, dim=1)
        per_item.append(_path_chamfer(pred_cloud, true_cloud, point_ok).mean())
    return torch.stack(per_item).mean()


def total_loss(pred: Prediction, target: GlyphBatch, weights: LossWeights = None,
               n_p: int = N_P_TRAIN) -> LossBreakdown:
    weights = weights or LossWeights()
    vis = visibility_loss(pred, target)
    cmd = command_loss(pred, target)
    args, all_masked = argument_loss(pred, target)
    cfr = chamfer_loss(pred, target, n_p) * weights.chamfer_scale
    total = weights.w_vis * vis + weights.w_cmd * cmd + weights.w_args * args + weights.w_cfr * cfr
    return LossBreakdown(vis, cmd, args, cfr, total, args_all_masked=all_masked)
