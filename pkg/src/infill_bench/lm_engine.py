"""Decoder-only transformer inference on numpy, plus the weight-bundle format.

The architecture is the classic pre-norm GPT-2 block: token + position
embeddings, masked multi-head self-attention, a 4x GELU MLP, residual
connections, a final layer norm, and an untied output projection. All math is
float32; generation recomputes the full forward pass each step rather than
keeping a KV cache, trading speed for an implementation that is trivially
bit-reproducible.

Weight bundle ("PFIM") layout, also the contract for external exporters:

    bytes 0..3    magic b"PFIM"
    bytes 4..7    format version, uint32 little-endian (currently 1)
    bytes 8..11   header length H, uint32 little-endian
    bytes 12..    UTF-8 JSON header: {"config": {...}, "tensors":
                  [{"name", "shape", "offset"}]} with offsets in bytes
                  relative to the payload start
    ...           payload: float32 little-endian tensor data
    last 4 bytes  CRC-32 of everything before them, uint32 little-endian

Layer norm epsilon is 1e-5 and GELU is the tanh approximation; both are part
of the numeric contract for anyone producing bundles elsewhere.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .rng import split_rng
from .seqcore import DEFAULT_ALPHABET, TokenSeq

MAGIC = b"PFIM"
BUNDLE_VERSION = 1
LN_EPS = 1e-5

# Below this temperature sampling collapses to argmax.
ARGMAX_TEMPERATURE = 1e-6

# Slack when locating the nucleus so sums like 0.5 + 0.3 still count as
# reaching top_p = 0.8 despite float rounding.
NUCLEUS_TOL = 1e-9


class WeightBundleError(ValueError):
    """Base class for weight-bundle load failures."""


class BadMagicError(WeightBundleError):
    pass


class VersionMismatchError(WeightBundleError):
    pass


class ChecksumError(WeightBundleError):
    pass


class HeaderError(WeightBundleError):
    pass


class ShapeMismatchError(WeightBundleError):
    pass


class ContextLengthError(ValueError):
    """Input does not fit the model's position table."""


class ContextOverflowError(RuntimeError):
    """Generation ran out of context window before finishing.

    ``partial`` carries the tokens produced before the overflow.
    """

    def __init__(self, message: str, partial: TokenSeq):
        super().__init__(message)
        self.partial = partial


class SamplingError(ValueError):
    """Logit row admits no valid token (e.g. all -inf)."""


@dataclass(frozen=True)
class ModelConfig:
    n_layers: int
    d_model: int
    n_heads: int
    vocab_size: int
    max_positions: int = 1024

    def __post_init__(self) -> None:
        for name in ("n_layers", "d_model", "n_heads", "vocab_size", "max_positions"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.d_model % self.n_heads:
            raise ValueError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}"
            )

    @property
    def d_head(self) -> int:
        return self.d_model // self.n_heads

    def to_dict(self) -> dict[str, int]:
        return {
            "n_layers": self.n_layers,
            "d_model": self.d_model,
            "n_heads": self.n_heads,
            "vocab_size": self.vocab_size,
            "max_positions": self.max_positions,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelConfig":
        return cls(**{k: int(obj[k]) for k in (
            "n_layers", "d_model", "n_heads", "vocab_size", "max_positions")})


@dataclass(frozen=True)
class SamplingParams:
    top_k: int = 100
    top_p: float = 0.95
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.temperature <= 0.0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")

    def with_top_k(self, top_k: int) -> "SamplingParams":
        return SamplingParams(top_k, self.top_p, self.temperature, self.seed)


def expected_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Tensor directory implied by a config; names are part of the format."""
    d, v, p = config.d_model, config.vocab_size, config.max_positions
    shapes: dict[str, tuple[int, ...]] = {"wte": (v, d), "wpe": (p, d)}
    for i in range(config.n_layers):
        shapes.update({
            f"h{i}.ln1.g": (d,),
            f"h{i}.ln1.b": (d,),
            f"h{i}.attn.w_qkv": (d, 3 * d),
            f"h{i}.attn.b_qkv": (3 * d,),
            f"h{i}.attn.w_o": (d, d),
            f"h{i}.attn.b_o": (d,),
            f"h{i}.ln2.g": (d,),
            f"h{i}.ln2.b": (d,),
            f"h{i}.mlp.w_fc": (d, 4 * d),
            f"h{i}.mlp.b_fc": (4 * d,),
            f"h{i}.mlp.w_proj": (4 * d, d),
            f"h{i}.mlp.b_proj": (d,),
        })
    shapes.update({"lnf.g": (d,), "lnf.b": (d,), "lm_head.w": (d, v)})
    return shapes


@dataclass(frozen=True)
class Model:
    """Immutable weights + config; safe to share across threads."""

    config: ModelConfig
    tensors: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        _check_shapes(self.config, {k: v.shape for k, v in self.tensors.items()})
        for t in self.tensors.values():
            t.flags.writeable = False


def _check_shapes(config: ModelConfig, got: dict[str, tuple[int, ...]]) -> None:
    want = expected_shapes(config)
    missing = sorted(set(want) - set(got))
    extra = sorted(set(got) - set(want))
    if missing or extra:
        raise ShapeMismatchError(
            f"tensor directory mismatch: missing {missing}, unexpected {extra}"
        )
    for name, shape in want.items():
        if tuple(got[name]) != shape:
            raise ShapeMismatchError(
                f"tensor {name}: expected shape {shape}, got {tuple(got[name])}"
            )


def zero_weights(config: ModelConfig) -> dict[str, np.ndarray]:
    return {
        name: np.zeros(shape, dtype=np.float32)
        for name, shape in expected_shapes(config).items()
    }


def random_weights(
    config: ModelConfig, rng: np.random.Generator, scale: float = 0.02
) -> dict[str, np.ndarray]:
    tensors = {}
    for name, shape in expected_shapes(config).items():
        if name.endswith((".ln1.g", ".ln2.g")) or name == "lnf.g":
            tensors[name] = np.ones(shape, dtype=np.float32)
        elif name.endswith(".b") or name.endswith(("b_qkv", "b_o", "b_fc", "b_proj")):
            tensors[name] = np.zeros(shape, dtype=np.float32)
        else:
            tensors[name] = rng.normal(0.0, scale, size=shape).astype(np.float32)
    return tensors


# ---------------------------------------------------------------------------
# Bundle I/O
# ---------------------------------------------------------------------------

def save_weights(
    path: str | Path, config: ModelConfig, tensors: dict[str, np.ndarray]
) -> None:
    _check_shapes(config, {k: v.shape for k, v in tensors.items()})
    order = list(expected_shapes(config))
    directory = []
    payload = bytearray()
    for name in order:
        arr = np.ascontiguousarray(tensors[name], dtype="<f4")
        directory.append(
            {"name": name, "shape": list(arr.shape), "offset": len(payload)}
        )
        payload += arr.tobytes()
    header = json.dumps(
        {"config": config.to_dict(), "tensors": directory}
    ).encode("utf-8")
    body = (
        MAGIC
        + BUNDLE_VERSION.to_bytes(4, "little")
        + len(header).to_bytes(4, "little")
        + header
        + bytes(payload)
    )
    crc = zlib.crc32(body)
    Path(path).write_bytes(body + crc.to_bytes(4, "little"))


def load_weights(path: str | Path) -> Model:
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise ChecksumError(f"file too short to be a weight bundle ({len(data)} bytes)")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    version = int.from_bytes(data[4:8], "little")
    if version != BUNDLE_VERSION:
        raise VersionMismatchError(
            f"bundle version {version}, this reader supports {BUNDLE_VERSION}"
        )
    if zlib.crc32(data[:-4]) != int.from_bytes(data[-4:], "little"):
        raise ChecksumError("CRC-32 mismatch (file corrupt or truncated)")
    header_len = int.from_bytes(data[8:12], "little")
    header_end = 12 + header_len
    if header_end > len(data) - 4:
        raise HeaderError("declared header length exceeds file size")
    try:
        header = json.loads(data[12:header_end].decode("utf-8"))
        config = ModelConfig.from_dict(header["config"])
        entries = [
            (str(e["name"]), tuple(int(x) for x in e["shape"]), int(e["offset"]))
            for e in header["tensors"]
        ]
    except (KeyError, TypeError, ValueError, UnicodeDecodeError) as exc:
        raise HeaderError(f"malformed bundle header: {exc}") from None
    _check_shapes(config, {name: shape for name, shape, _ in entries})
    payload = data[header_end:-4]
    tensors = {}
    for name, shape, offset in entries:
        count = int(np.prod(shape)) if shape else 1
        if offset < 0 or offset + 4 * count > len(payload):
            raise ShapeMismatchError(
                f"tensor {name} extends past payload ({offset} + {4 * count} bytes)"
            )
        tensors[name] = np.frombuffer(
            payload, dtype="<f4", count=count, offset=offset
        ).reshape(shape)
    return Model(config, tensors)


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------

def _layer_norm(x: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return (x - mu) / np.sqrt(var + np.float32(LN_EPS)) * g + b


def _gelu(x: np.ndarray) -> np.ndarray:
    c = np.float32(math.sqrt(2.0 / math.pi))
    return np.float32(0.5) * x * (
        np.float32(1.0) + np.tanh(c * (x + np.float32(0.044715) * x * x * x))
    )


def _softmax_rows(x: np.ndarray) -> np.ndarray:
    z = x - x.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _attention(x: np.ndarray, t: dict[str, np.ndarray], prefix: str, cfg: ModelConfig) -> np.ndarray:
    T, d = x.shape
    qkv = x @ t[f"{prefix}.w_qkv"] + t[f"{prefix}.b_qkv"]
    q, k, v = np.split(qkv, 3, axis=-1)
    # [n_heads, T, d_head]
    def heads(m: np.ndarray) -> np.ndarray:
        return m.reshape(T, cfg.n_heads, cfg.d_head).transpose(1, 0, 2)

    q, k, v = heads(q), heads(k), heads(v)
    scores = (q @ k.transpose(0, 2, 1)) / np.float32(math.sqrt(cfg.d_head))
    mask = np.triu(np.ones((T, T), dtype=bool), k=1)
    scores = np.where(mask, np.float32(-np.inf), scores)
    out = _softmax_rows(scores) @ v
    out = out.transpose(1, 0, 2).reshape(T, d)
    return out @ t[f"{prefix}.w_o"] + t[f"{prefix}.b_o"]


def forward_hidden(model: Model, tokens: Sequence[int]) -> np.ndarray:
    """Hidden states after the final layer norm, shape [T, d_model], float32."""
    T = len(tokens)
    cfg, t = model.config, model.tensors
    if T == 0:
        raise ContextLengthError("empty token sequence")
    if T > cfg.max_positions:
        raise ContextLengthError(
            f"sequence length {T} exceeds max_positions {cfg.max_positions}"
        )
    ids = np.asarray(tokens, dtype=np.int64)
    if ids.min() < 0 or ids.max() >= cfg.vocab_size:
        raise ValueError(
            f"token id out of range for vocab_size {cfg.vocab_size}"
        )
    x = t["wte"][ids] + t["wpe"][:T]
    for i in range(cfg.n_layers):
        x = x + _attention(_layer_norm(x, t[f"h{i}.ln1.g"], t[f"h{i}.ln1.b"]),
                           t, f"h{i}.attn", cfg)
        h = _layer_norm(x, t[f"h{i}.ln2.g"], t[f"h{i}.ln2.b"])
        h = _gelu(h @ t[f"h{i}.mlp.w_fc"] + t[f"h{i}.mlp.b_fc"])
        x = x + h @ t[f"h{i}.mlp.w_proj"] + t[f"h{i}.mlp.b_proj"]
    return _layer_norm(x, t["lnf.g"], t["lnf.b"])


def forward_logits(model: Model, tokens: Sequence[int]) -> np.ndarray:
    """Next-token logits per position, shape [T, vocab_size], float32."""
    return forward_hidden(model, tokens) @ model.tensors["lm_head.w"]


# ---------------------------------------------------------------------------
# Sampling and generation
# ---------------------------------------------------------------------------

def nucleus_set(logit_row: np.ndarray, params: SamplingParams) -> np.ndarray:
    """Token ids in the top-k ∩ top-p set, most probable first.

    The nucleus is the smallest prefix of the probability-sorted vocabulary
    whose mass reaches top_p (within ``NUCLEUS_TOL``); top-k keeps the first k
    of the same ordering, so the intersection is a prefix too.
    """
    row = np.asarray(logit_row, dtype=np.float64)
    if row.ndim != 1:
        raise ValueError("expected a single logit row")
    if not np.isfinite(row).any():
        raise SamplingError("no finite logits to sample from")
    scaled = row / params.temperature
    order = np.argsort(-scaled, kind="stable")
    probs = _softmax_rows(scaled[order][None, :])[0]
    cum = np.cumsum(probs)
    p_len = int(np.searchsorted(cum, params.top_p - NUCLEUS_TOL, side="left")) + 1
    take = min(params.top_k, p_len, len(row))
    return order[:take]


def sample_next(
    logit_row: np.ndarray, params: SamplingParams, rng: np.random.Generator
) -> int:
    row = np.asarray(logit_row, dtype=np.float64)
    if not np.isfinite(row).any():
        raise SamplingError("no finite logits to sample from")
    if params.temperature < ARGMAX_TEMPERATURE:
        return int(np.argmax(row))
    keep = nucleus_set(row, params)
    scaled = row[keep] / params.temperature
    probs = _softmax_rows(scaled[None, :])[0]
    return int(keep[rng.choice(len(keep), p=probs)])


def generate(
    model: Model,
    prompt: Sequence[int],
    params: SamplingParams,
    max_new: int,
    stop_token: int | None = None,
    rng: np.random.Generator | None = None,
) -> TokenSeq:
    """Sample up to ``max_new`` tokens; returns the continuation only.

    Stops early at ``stop_token`` (not included in the result). Raises
    :class:`ContextOverflowError` carrying the partial continuation if the
    context window fills before either stopping condition.
    """
    if max_new < 0:
        raise ValueError(f"max_new must be >= 0, got {max_new}")
    if rng is None:
        rng = split_rng(params.seed)
    current = list(prompt)
    out: TokenSeq = []
    for _ in range(max_new):
        if len(current) >= model.config.max_positions:
            raise ContextOverflowError(
                f"context window of {model.config.max_positions} exhausted "
                f"after {len(out)} generated tokens",
                partial=out,
            )
        logits = forward_logits(model, current)
        token = sample_next(logits[-1], params, rng)
        if stop_token is not None and token == stop_token:
            break
        current.append(token)
        out.append(token)
    return out


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _corpus_nll(model: Model, sequences: Iterable[Sequence[int]]) -> tuple[float, int]:
    """Summed negative log-likelihood (natural log) and predicted-token count.

    Position 0 of each sequence is conditioning only; positions 1..n-1 are
    predicted.
    """
    total, count = 0.0, 0
    for seq in sequences:
        if len(seq) < 2:
            continue
        logits = forward_logits(model, seq).astype(np.float64)[:-1]
        z = logits - logits.max(axis=-1, keepdims=True)
        logp = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
        targets = np.asarray(seq[1:], dtype=np.int64)
        total -= float(logp[np.arange(len(targets)), targets].sum())
        count += len(targets)
    return total, count


def perplexity(model: Model, sequences: Iterable[Sequence[int]]) -> float:
    """exp(mean negative log-likelihood per predicted token), natural log."""
    total, count = _corpus_nll(model, list(sequences))
    if count == 0:
        raise ValueError("corpus has no predicted tokens (empty or length-1 only)")
    return float(np.exp(total / count))


def log_likelihood_score(model: Model, tokens: Sequence[int]) -> float:
    """Mean per-token log probability; equals -ln(perplexity({tokens}))."""
    total, count = _corpus_nll(model, [tokens])
    if count == 0:
        raise ValueError("sequence too short to score (need >= 2 tokens)")
    return -total / count


_DEFAULT_EXCLUDE = frozenset(DEFAULT_ALPHABET.special_ids.values())


def mean_embedding(
    model: Model,
    tokens: Sequence[int],
    exclude_ids: frozenset[int] | None = None,
) -> np.ndarray:
    """Mean of final-layer hidden states over residue positions.

    Positions holding ids from ``exclude_ids`` (special tokens by default) do
    not contribute.
    """
    if exclude_ids is None:
        exclude_ids = _DEFAULT_EXCLUDE
    hidden = forward_hidden(model, tokens)
    keep = np.array([t not in exclude_ids for t in tokens], dtype=bool)
    if not keep.any():
        raise ValueError("no residue positions left after exclusions")
    return hidden[keep].mean(axis=0)
