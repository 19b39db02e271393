"""Weight-bundle writer and reader.

Layout (all integers little-endian):

    magic "PFIM" | version u32 | header-len u32 | header JSON | payload | crc32 u32

The header JSON is ``{"config": {...}, "tensors": [{name, shape,
offset}, ...]}``; the payload is contiguous float32 tensors; the CRC-32
covers everything before it. Linear layers store (out, in) in torch but
the bundle stores (in, out), so weight matrices transpose on the way
through. The format is owned by the inference side; this module must
track it, and the self-check below plus the cross-process logits test
keep that honest.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import torch

from .model import CharGPT

MAGIC = b"PFIM"
BUNDLE_VERSION = 1

SELF_CHECK_TOL = 1e-6
SELF_CHECK_INPUTS = 8


class BundleError(ValueError):
    """Malformed, corrupted, or wrong-version bundle file."""


class ExportError(RuntimeError):
    """Exported bundle failed its reload self-check."""


def tensor_entries(model: CharGPT) -> list[tuple[str, np.ndarray]]:
    """(name, float32 array) pairs in canonical directory order."""

    def arr(t: torch.Tensor, transpose: bool = False) -> np.ndarray:
        a = t.detach().cpu().numpy().astype(np.float32, copy=True)
        return np.ascontiguousarray(a.T) if transpose else a

    entries = [("wte", arr(model.wte.weight)), ("wpe", arr(model.wpe.weight))]
    for i, block in enumerate(model.blocks):
        entries += [
            (f"h{i}.ln1.g", arr(block.ln1.weight)),
            (f"h{i}.ln1.b", arr(block.ln1.bias)),
            (f"h{i}.attn.w_qkv", arr(block.qkv.weight, transpose=True)),
            (f"h{i}.attn.b_qkv", arr(block.qkv.bias)),
            (f"h{i}.attn.w_o", arr(block.proj.weight, transpose=True)),
            (f"h{i}.attn.b_o", arr(block.proj.bias)),
            (f"h{i}.ln2.g", arr(block.ln2.weight)),
            (f"h{i}.ln2.b", arr(block.ln2.bias)),
            (f"h{i}.mlp.w_fc", arr(block.fc.weight, transpose=True)),
            (f"h{i}.mlp.b_fc", arr(block.fc.bias)),
            (f"h{i}.mlp.w_proj", arr(block.out.weight, transpose=True)),
            (f"h{i}.mlp.b_proj", arr(block.out.bias)),
        ]
    entries += [
        ("lnf.g", arr(model.lnf.weight)),
        ("lnf.b", arr(model.lnf.bias)),
        ("lm_head.w", arr(model.head.weight, transpose=True)),
    ]
    return entries


def write_bundle(
    path: str | Path, config: Mapping[str, int], entries: Sequence[tuple[str, np.ndarray]]
) -> None:
    directory = []
    payload = bytearray()
    for name, a in entries:
        a = np.ascontiguousarray(a, dtype="<f4")
        directory.append({"name": name, "shape": list(a.shape), "offset": len(payload)})
        payload += a.tobytes()
    header = json.dumps({"config": dict(config), "tensors": directory}).encode()
    body = (
        MAGIC
        + BUNDLE_VERSION.to_bytes(4, "little")
        + len(header).to_bytes(4, "little")
        + header
        + bytes(payload)
    )
    Path(path).write_bytes(body + zlib.crc32(body).to_bytes(4, "little"))


def read_bundle(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise BundleError(f"file too short to be a bundle ({len(data)} bytes)")
    if data[:4] != MAGIC:
        raise BundleError(f"bad magic {data[:4]!r}")
    version = int.from_bytes(data[4:8], "little")
    if version != BUNDLE_VERSION:
        raise BundleError(f"unsupported bundle version {version}")
    if zlib.crc32(data[:-4]) != int.from_bytes(data[-4:], "little"):
        raise BundleError("checksum mismatch")
    header_len = int.from_bytes(data[8:12], "little")
    try:
        header = json.loads(data[12 : 12 + header_len])
    except ValueError as exc:
        raise BundleError(f"malformed header: {exc}") from exc
    payload = data[12 + header_len : -4]
    tensors = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        n = int(np.prod(shape)) * 4
        raw = payload[entry["offset"] : entry["offset"] + n]
        if len(raw) != n:
            raise BundleError(f"tensor {entry['name']} overruns the payload")
        tensors[entry["name"]] = np.frombuffer(raw, dtype="<f4").reshape(shape)
    return dict(header["config"]), tensors


def load_into_model(config: Mapping[str, int], tensors: Mapping[str, np.ndarray]) -> CharGPT:
    """Rebuild a torch model from bundle tensors (inverse transposes)."""
    model = CharGPT(
        config["n_layers"], config["d_model"], config["n_heads"],
        config["vocab_size"], config["max_positions"],
    )

    def put(param: torch.nn.Parameter, name: str, transpose: bool = False) -> None:
        # frombuffer arrays are read-only; copy before handing them to torch
        a = np.array(tensors[name], dtype=np.float32)
        with torch.no_grad():
            param.copy_(torch.from_numpy(np.ascontiguousarray(a.T) if transpose else a))

    put(model.wte.weight, "wte")
    put(model.wpe.weight, "wpe")
    for i, block in enumerate(model.blocks):
        put(block.ln1.weight, f"h{i}.ln1.g")
        put(block.ln1.bias, f"h{i}.ln1.b")
        put(block.qkv.weight, f"h{i}.attn.w_qkv", transpose=True)
        put(block.qkv.bias, f"h{i}.attn.b_qkv")
        put(block.proj.weight, f"h{i}.attn.w_o", transpose=True)
        put(block.proj.bias, f"h{i}.attn.b_o")
        put(block.ln2.weight, f"h{i}.ln2.g")
        put(block.ln2.bias, f"h{i}.ln2.b")
        put(block.fc.weight, f"h{i}.mlp.w_fc", transpose=True)
        put(block.fc.bias, f"h{i}.mlp.b_fc")
        put(block.out.weight, f"h{i}.mlp.w_proj", transpose=True)
        put(block.out.bias, f"h{i}.mlp.b_proj")
    put(model.lnf.weight, "lnf.g")
    put(model.lnf.bias, "lnf.b")
    put(model.head.weight, "lm_head.w", transpose=True)
    model.eval()
    return model


def model_logits(model: CharGPT, tokens: Sequence[int]) -> np.ndarray:
    """Per-position logits for one input, shape [T, vocab], float32."""
    with torch.no_grad():
        out = model(torch.as_tensor(list(tokens), dtype=torch.long)[None, :])
    return out[0].numpy().astype(np.float32)


def _check_inputs(model: CharGPT, n: int) -> list[list[int]]:
    rng = np.random.default_rng(20_24)
    return [
        rng.integers(0, model.vocab_size, size=int(rng.integers(4, 33))).tolist()
        for _ in range(n)
    ]


def export_bundle(checkpoint, path: str | Path, check: bool = True) -> Path:
    """Write the checkpoint's weights; reload and compare logits by default.

    The self-check reloads the written file through ``read_bundle`` and
    requires logit agreement within SELF_CHECK_TOL on random inputs, so a
    broken transpose or dtype can never leave a silently wrong bundle.
    """
    path = Path(path)
    model = checkpoint.model
    write_bundle(path, model.config_dict(), tensor_entries(model))
    if check:
        config, tensors = read_bundle(path)
        reloaded = load_into_model(config, tensors)
        for tokens in _check_inputs(model, SELF_CHECK_INPUTS):
            diff = float(
                np.abs(model_logits(model, tokens) - model_logits(reloaded, tokens)).max()
            )
            if diff > SELF_CHECK_TOL:
                raise ExportError(
                    f"reloaded bundle disagrees by {diff:.2e} (> {SELF_CHECK_TOL})"
                )
    return path
