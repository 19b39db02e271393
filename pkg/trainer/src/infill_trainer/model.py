"""Character-level decoder matching the inference engine's arithmetic.

Pre-LN blocks, fused QKV with heads as contiguous d_head slices, tanh
GELU, layer-norm epsilon 1e-5, learned absolute positions, untied output
head. Keeping these choices bit-compatible is what lets exported bundles
reproduce logits across the package boundary.
"""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F
from torch import nn

LN_EPS = 1e-5
INIT_STD = 0.02


class Block(nn.Module):
    def __init__(self, d_model: int, n_heads: int, max_positions: int) -> None:
        super().__init__()
        if d_model % n_heads:
            raise ValueError(f"d_model {d_model} not divisible by n_heads {n_heads}")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.ln1 = nn.LayerNorm(d_model, eps=LN_EPS)
        self.qkv = nn.Linear(d_model, 3 * d_model)
        self.proj = nn.Linear(d_model, d_model)
        self.ln2 = nn.LayerNorm(d_model, eps=LN_EPS)
        self.fc = nn.Linear(d_model, 4 * d_model)
        self.out = nn.Linear(4 * d_model, d_model)
        mask = torch.triu(torch.ones(max_positions, max_positions, dtype=torch.bool), 1)
        self.register_buffer("causal_mask", mask, persistent=False)

    def _attend(self, x: torch.Tensor) -> torch.Tensor:
        b, t, d = x.shape
        q, k, v = self.qkv(x).split(d, dim=-1)

        def heads(m: torch.Tensor) -> torch.Tensor:
            return m.view(b, t, self.n_heads, self.d_head).transpose(1, 2)

        q, k, v = heads(q), heads(k), heads(v)
        scores = (q @ k.transpose(-2, -1)) / math.sqrt(self.d_head)
        scores = scores.masked_fill(self.causal_mask[:t, :t], float("-inf"))
        out = torch.softmax(scores, dim=-1) @ v
        return self.proj(out.transpose(1, 2).contiguous().view(b, t, d))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self._attend(self.ln1(x))
        return x + self.out(F.gelu(self.fc(self.ln2(x)), approximate="tanh"))


class CharGPT(nn.Module):
    def __init__(
        self,
        n_layers: int,
        d_model: int,
        n_heads: int,
        vocab_size: int,
        max_positions: int,
    ) -> None:
        super().__init__()
        self.n_layers = n_layers
        self.d_model = d_model
        self.n_heads = n_heads
        self.vocab_size = vocab_size
        self.max_positions = max_positions
        self.wte = nn.Embedding(vocab_size, d_model)
        self.wpe = nn.Embedding(max_positions, d_model)
        self.blocks = nn.ModuleList(
            Block(d_model, n_heads, max_positions) for _ in range(n_layers)
        )
        self.lnf = nn.LayerNorm(d_model, eps=LN_EPS)
        self.head = nn.Linear(d_model, vocab_size, bias=False)
        self.apply(self._init)

    @staticmethod
    def _init(module: nn.Module) -> None:
        if isinstance(module, (nn.Linear, nn.Embedding)):
            nn.init.normal_(module.weight, mean=0.0, std=INIT_STD)
            if isinstance(module, nn.Linear) and module.bias is not None:
                nn.init.zeros_(module.bias)

    def config_dict(self) -> dict[str, int]:
        return {
            "n_layers": self.n_layers,
            "d_model": self.d_model,
            "n_heads": self.n_heads,
            "vocab_size": self.vocab_size,
            "max_positions": self.max_positions,
        }

    def forward(self, idx: torch.Tensor) -> torch.Tensor:
        """Next-token logits, shape [batch, T, vocab_size]."""
        if idx.dim() != 2:
            raise ValueError(f"expected [batch, T] token ids, got {tuple(idx.shape)}")
        t = idx.shape[1]
        if t > self.max_positions:
            raise ValueError(f"sequence length {t} exceeds {self.max_positions}")
        pos = torch.arange(t, device=idx.device)
        x = self.wte(idx) + self.wpe(pos)
        for block in self.blocks:
            x = block(x)
        return self.head(self.lnf(x))
