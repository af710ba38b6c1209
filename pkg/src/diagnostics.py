"""
Numerical diagnostics: central-difference gradients for checking autograd, and
a per-parameter gradient scan for spotting dead or exploding tensors.
"""

from typing import Callable, Dict, List, Tuple

import torch
import torch.nn as nn

from src.logger import get_logger

logger = get_logger(__name__)


def central_difference_gradient(fn: Callable[[torch.Tensor], torch.Tensor], x: torch.Tensor,
                                h: float = 1e-3) -> torch.Tensor:
    """
    (f(x + h e_k) - f(x - h e_k)) / 2h for every element k of x.

    fn must return a scalar tensor. x is not modified. Use float64.
    """
    x = x.detach().clone()
    grad = torch.zeros_like(x)
    flat_x = x.view(-1)
    flat_g = grad.view(-1)
    with torch.no_grad():
        for k in range(flat_x.numel()):
            orig = flat_x[k].item()
            flat_x[k] = orig + h
            f_plus = float(fn(x))
            flat_x[k] = orig - h
            f_minus = float(fn(x))
            flat_x[k] = orig
            flat_g[k] = (f_plus - f_minus) / (2.0 * h)
    return grad


def autograd_gradient(fn: Callable[[torch.Tensor], torch.Tensor], x: torch.Tensor) -> torch.Tensor:
    x = x.detach().clone().requires_grad_(True)
    fn(x).backward()
    return x.grad.detach()


def relative_error(analytic: torch.Tensor, numeric: torch.Tensor, floor: float = 1e-8) -> float:
    """max |a - n| / max(|a|, |n|, floor), elementwise."""
    scale = torch.maximum(analytic.abs(), numeric.abs()).clamp(min=floor)
    return float(((analytic - numeric).abs() / scale).max())


def check_gradient(fn: Callable[[torch.Tensor], torch.Tensor], x: torch.Tensor, h: float = 1e-3,
                   rtol: float = 1e-3, atol: float = 1e-6) -> Tuple[bool, float]:
    """Compare autograd with central differences; returns (ok, max relative error)."""
    analytic = autograd_gradient(fn, x)
    numeric = central_difference_gradient(fn, x, h)
    ok = bool(torch.allclose(analytic, numeric, rtol=rtol, atol=atol))
    return ok, relative_error(analytic, numeric)


def dead_parameter_scan(model: nn.Module, loss: torch.Tensor) -> Dict[str, float]:
    """Backpropagate `loss` and return the gradient norm of every parameter tensor (nan if no grad)."""
    model.zero_grad(set_to_none=True)
    loss.backward()
    norms: Dict[str, float] = {}
    for name, param in model.named_parameters():
        norms[name] = float("nan") if param.grad is None else float(param.grad.norm())
    return norms


def unhealthy_parameters(norms: Dict[str, float]) -> List[str]:
    """Names whose gradient norm is zero or not finite."""
    bad = [name for name, n in norms.items() if not (n == n and n != float("inf") and n > 0.0)]
    if bad:
        logger.warning(f"{len(bad)} parameter tensors with zero or non-finite gradient: {bad[:5]}")
    return bad
