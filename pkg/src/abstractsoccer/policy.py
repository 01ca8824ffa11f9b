"""Portable feed-forward policy: deterministic inference and binary I/O.

File layout (little-endian throughout):

    magic     8 bytes  b"ASOCPOL\\0"
    header    u32 length-prefixed UTF-8 JSON with keys:
              format_version, obs_layout_version, layer_sizes, metadata
    blob      float32 parameters, layer-major: W1, b1, W2, b2, ...
              W_l stored row-major with shape (n_out, n_in)
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Dict, List

import numpy as np

MAGIC = b"ASOCPOL\x00"
FORMAT_VERSION = "1"
ACTION_SIZE = 5


class PolicyFormatError(ValueError):
    """Raised for malformed, truncated or incompatible policy files."""


@dataclass
class MlpPolicy:
    """tanh MLP mapping an observation to the 5 action channels."""

    layer_sizes: List[int]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    obs_layout_version: str
    metadata: Dict[str, object] = dc_field(default_factory=dict)

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise PolicyFormatError("need at least input and output layers")
        if self.layer_sizes[-1] != ACTION_SIZE:
            raise PolicyFormatError(
                f"output dimension must be {ACTION_SIZE}, got {self.layer_sizes[-1]}"
            )
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise PolicyFormatError("layer count mismatch between sizes and parameters")
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            n_in, n_out = self.layer_sizes[layer], self.layer_sizes[layer + 1]
            if w.shape != (n_out, n_in):
                raise PolicyFormatError(
                    f"layer {layer}: weight shape {w.shape}, expected {(n_out, n_in)}"
                )
            if b.shape != (n_out,):
                raise PolicyFormatError(f"layer {layer}: bias shape {b.shape}")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise PolicyFormatError(f"layer {layer}: non-finite parameters")

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    def forward(self, obs: np.ndarray) -> np.ndarray:
        """Deterministic action means, each squashed into [-1, 1].

        Accepts a single observation vector or a batch (n, input_size).
        """
        x = np.asarray(obs, dtype=np.float32)
        if x.shape[-1] != self.input_size:
            raise PolicyFormatError(
                f"observation size {x.shape[-1]} does not match policy input {self.input_size}"
            )
        for w, b in zip(self.weights, self.biases):
            x = np.tanh(x @ w.T + b)
        return x

    def check_layout(self, env_layout: str) -> None:
        if self.obs_layout_version != env_layout:
            raise PolicyFormatError(
                f"policy observation layout {self.obs_layout_version!r} does not match "
                f"environment layout {env_layout!r}"
            )


def forward(policy: MlpPolicy, obs: np.ndarray) -> np.ndarray:
    return policy.forward(obs)


def _param_count(layer_sizes: List[int]) -> int:
    return sum(
        n_in * n_out + n_out for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:])
    )


def save_policy(policy: MlpPolicy, path) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "obs_layout_version": policy.obs_layout_version,
        "layer_sizes": policy.layer_sizes,
        "metadata": policy.metadata,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode()
    chunks = []
    for w, b in zip(policy.weights, policy.biases):
        chunks.append(np.ascontiguousarray(w, dtype="<f4").tobytes())
        chunks.append(np.ascontiguousarray(b, dtype="<f4").tobytes())
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        for chunk in chunks:
            fh.write(chunk)


def load_policy(path) -> MlpPolicy:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < len(MAGIC) + 4 or data[: len(MAGIC)] != MAGIC:
        raise PolicyFormatError(f"{path}: not a policy file (bad magic at offset 0)")
    offset = len(MAGIC)
    (header_len,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if len(data) < offset + header_len:
        raise PolicyFormatError(f"{path}: truncated header at offset {offset}")
    try:
        header = json.loads(data[offset : offset + header_len].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise PolicyFormatError(f"{path}: corrupt header: {exc}") from exc
    offset += header_len
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise PolicyFormatError(
            f"{path}: unknown format_version {version!r} (supported: {FORMAT_VERSION!r})"
        )
    layer_sizes = [int(n) for n in header["layer_sizes"]]
    expected_floats = _param_count(layer_sizes)
    blob = data[offset:]
    actual_floats = len(blob) // 4
    if len(blob) != expected_floats * 4:
        raise PolicyFormatError(
            f"{path}: parameter blob holds {actual_floats} floats, "
            f"expected {expected_floats} (offset {offset})"
        )
    flat = np.frombuffer(blob, dtype="<f4")
    weights, biases = [], []
    cursor = 0
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(flat[cursor : cursor + n_in * n_out].reshape(n_out, n_in).copy())
        cursor += n_in * n_out
        biases.append(flat[cursor : cursor + n_out].copy())
        cursor += n_out
    return MlpPolicy(
        layer_sizes=layer_sizes,
        weights=weights,
        biases=biases,
        obs_layout_version=header["obs_layout_version"],
        metadata=header.get("metadata", {}),
    )


def random_policy(
    input_size: int,
    layout_version: str,
    hidden: List[int] = (64, 64),
    rng=None,
) -> MlpPolicy:
    """Small random policy, mainly for tests and smoke runs."""
    rng = rng if rng is not None else np.random.default_rng(0)
    sizes = [input_size, *hidden, ACTION_SIZE]
    weights = [
        rng.normal(0, 0.3, (n_out, n_in)).astype(np.float32)
        for n_in, n_out in zip(sizes[:-1], sizes[1:])
    ]
    biases = [np.zeros(n_out, dtype=np.float32) for n_out in sizes[1:]]
    return MlpPolicy(sizes, weights, biases, layout_version)
