"""Pre-norm Transformer blocks and the AdaIN conditioning layer."""

from typing import Optional

import torch
import torch.nn as nn

ADAIN_EPS = 1e-5


def adain(x: torch.Tensor, gamma: torch.Tensor, beta: torch.Tensor, eps: float = ADAIN_EPS) -> torch.Tensor:
    """
    Per-channel instance normalization over the sequence axis, then scale/shift.

    x: (B, S, D); gamma, beta: (B, D). Uses the population std with eps added to
    sigma, so a constant sequence maps to beta.
    """
    mu = x.mean(dim=1, keepdim=True)
    sigma = x.var(dim=1, unbiased=False, keepdim=True).clamp_min(1e-12).sqrt()
    return gamma.unsqueeze(1) * (x - mu) / (sigma + eps) + beta.unsqueeze(1)


class AdaIN(nn.Module):
    """gamma(z) = 1 + mlp(z), beta(z) = mlp(z); both start close to (1, 0)."""

    def __init__(self, d_model: int, eps: float = ADAIN_EPS):
        super().__init__()
        self.eps = eps
        self.gamma = nn.Sequential(nn.Linear(d_model, d_model), nn.ReLU(), nn.Linear(d_model, d_model))
        self.beta = nn.Sequential(nn.Linear(d_model, d_model), nn.ReLU(), nn.Linear(d_model, d_model))
        for mlp in (self.gamma, self.beta):
            nn.init.normal_(mlp[-1].weight, std=1e-3)
            nn.init.zeros_(mlp[-1].bias)

    def style_params(self, z: torch.Tensor):
        return 1.0 + self.gamma(z), self.beta(z)

    def forward(self, x: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        gamma, beta = self.style_params(z)
        return adain(x, gamma, beta, self.eps)


class TransformerBlock(nn.Module):
    """
    x + Attn(Norm1(x)), then x + FF(Norm2(x)). Attention is unmasked.

    With conditional=True both norms are AdaIN sites and forward() needs z.
    """

    def __init__(self, d_model: int, n_heads: int, ff_dim: int, dropout: float, conditional: bool = False):
        super().__init__()
        self.conditional = conditional
        if conditional:
            self.norm1, self.norm2 = AdaIN(d_model), AdaIN(d_model)
        else:
            self.norm1, self.norm2 = nn.LayerNorm(d_model), nn.LayerNorm(d_model)
        self.attn = nn.MultiheadAttention(d_model, n_heads, dropout=dropout, batch_first=True)
        self.ff = nn.Sequential(
            nn.Linear(d_model, ff_dim),
            nn.GELU(),
            nn.Dropout(dropout),
            nn.Linear(ff_dim, d_model),
        )
        self.drop1 = nn.Dropout(dropout)
        self.drop2 = nn.Dropout(dropout)

    def _norm(self, norm: nn.Module, x: torch.Tensor, z: Optional[torch.Tensor]) -> torch.Tensor:
        if self.conditional:
            if z is None:
                raise ValueError("conditional block needs a style feature")
            return norm(x, z)
        return norm(x)

    def forward(self, x: torch.Tensor, z: Optional[torch.Tensor] = None) -> torch.Tensor:
        h = self._norm(self.norm1, x, z)
        attn_out, _ = self.attn(h, h, h, need_weights=False)
        x = x + self.drop1(attn_out)
        h = self._norm(self.norm2, x, z)
        return x + self.drop2(self.ff(h))


class TransformerStack(nn.Module):
    def __init__(self, n_layers: int, d_model: int, n_heads: int, ff_dim: int, dropout: float,
                 conditional: bool = False):
        super().__init__()
        self.blocks = nn.ModuleList(
            TransformerBlock(d_model, n_heads, ff_dim, dropout, conditional) for _ in range(n_layers)
        )

    def __len__(self) -> int:
        return len(self.blocks)

    def run(self, x: torch.Tensor, z: Optional[torch.Tensor] = None, start: int = 0,
            stop: Optional[int] = None) -> torch.Tensor:
        """Apply blocks[start:stop]."""
        for block in self.blocks[start:stop]:
            x = block(x, z)
        return x

    def forward(self, x: torch.Tensor, z: Optional[torch.Tensor] = None) -> torch.Tensor:
        return self.run(x, z)
