"""Toy transformer encoder for sequence classification.

A plain numpy forward pass: token plus learned position embeddings, then
``n_layers`` blocks of multi-head self-attention and a ReLU feed-forward
network, each wrapped in residual add and layer norm (post-norm). Token
states are mean-pooled and mapped to label logits by a linear head.

Weights live in two files: a JSON manifest (config, labels, vocabulary and
per-tensor name/shape/byte offset) and a flat little-endian float64 blob.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .classifiers.features import tokenize
from .fusion import EmotionDistribution, softmax

LN_EPS = 1e-5
MAX_LENGTH = 128
UNK = "[UNK]"
WEIGHTS_FORMAT = "emoflow-encoder/1"


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    d_model: int
    n_heads: int
    d_ff: int
    n_layers: int
    n_labels: int
    max_length: int = MAX_LENGTH

    def __post_init__(self):
        for name in ("vocab_size", "d_model", "n_heads", "d_ff", "n_labels", "max_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_layers < 0:
            raise ValueError("n_layers must be >= 0")
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model={self.d_model} is not divisible by n_heads={self.n_heads}")

    @property
    def d_k(self) -> int:
        return self.d_model // self.n_heads


@dataclass(frozen=True)
class LayerWeights:
    w_q: np.ndarray  # (d_model, d_model); head i uses columns i*d_k:(i+1)*d_k
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray
    w_1: np.ndarray  # (d_model, d_ff)
    b_1: np.ndarray
    w_2: np.ndarray  # (d_ff, d_model)
    b_2: np.ndarray
    ln1_scale: np.ndarray
    ln1_shift: np.ndarray
    ln2_scale: np.ndarray
    ln2_shift: np.ndarray


LAYER_FIELDS = tuple(LayerWeights.__dataclass_fields__)


def _layer_shapes(c: EncoderConfig) -> dict[str, tuple[int, ...]]:
    d, f = c.d_model, c.d_ff
    return {"w_q": (d, d), "w_k": (d, d), "w_v": (d, d), "w_o": (d, d), "w_1": (d, f), "b_1": (f,),
            "w_2": (f, d), "b_2": (d,), "ln1_scale": (d,), "ln1_shift": (d,), "ln2_scale": (d,), "ln2_shift": (d,)}


def tensor_shapes(c: EncoderConfig) -> dict[str, tuple[int, ...]]:
    """Name -> shape of every tensor, in storage order."""
    out = {"token_embedding": (c.vocab_size, c.d_model), "position_embedding": (c.max_length, c.d_model)}
    for i in range(c.n_layers):
        out.update({f"layer{i}.{k}": v for k, v in _layer_shapes(c).items()})
    out["head"] = (c.n_labels, c.d_model)
    out["head_bias"] = (c.n_labels,)
    return out


@dataclass(frozen=True)
class EncoderWeights:
    config: EncoderConfig
    token_embedding: np.ndarray  # (vocab_size, d_model)
    position_embedding: np.ndarray  # (max_length, d_model)
    layers: tuple[LayerWeights, ...]
    head: np.ndarray  # (n_labels, d_model)
    head_bias: np.ndarray  # (n_labels,)

    def __post_init__(self):
        c = self.config
        if len(self.layers) != c.n_layers:
            raise ValueError(f"expected {c.n_layers} layers, got {len(self.layers)}")
        shapes = tensor_shapes(c)
        for name, arr in self.tensors().items():
            expected = shapes[name]
            if arr.shape != expected:
                raise ValueError(f"{name}: shape {arr.shape} does not match config {expected}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}: non-finite entries")

    def tensors(self) -> dict[str, np.ndarray]:
        out = {"token_embedding": self.token_embedding, "position_embedding": self.position_embedding}
        for i, layer in enumerate(self.layers):
            out.update({f"layer{i}.{k}": getattr(layer, k) for k in LAYER_FIELDS})
        out["head"] = self.head
        out["head_bias"] = self.head_bias
        return out

    @classmethod
    def from_tensors(cls, config: EncoderConfig, tensors: Mapping[str, np.ndarray]) -> "EncoderWeights":
        layers = tuple(LayerWeights(**{k: tensors[f"layer{i}.{k}"] for k in LAYER_FIELDS})
                       for i in range(config.n_layers))
        return cls(config, tensors["token_embedding"], tensors["position_embedding"], layers,
                   tensors["head"], tensors["head_bias"])


def init_weights(config: EncoderConfig, seed: int = 0) -> EncoderWeights:
    """Random weights: N(0, 1/fan_in) matrices, zero biases, unit layer-norm scale."""
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, shape in tensor_shapes(config).items():
        field = name.rsplit(".", 1)[-1]
        if "scale" in field:
            tensors[name] = np.ones(shape)
        elif field.startswith("b_") or "shift" in field or field == "head_bias":
            tensors[name] = np.zeros(shape)
        else:
            fan_in = shape[0] if field.startswith("w_") else shape[-1]
            tensors[name] = rng.normal(0.0, 1.0 / math.sqrt(fan_in), size=shape)
    return EncoderWeights.from_tensors(config, tensors)


# kernels

def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    z = np.exp(scores - scores.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


def attention_weights(Q: np.ndarray, K: np.ndarray) -> np.ndarray:
    Q, K = np.atleast_2d(Q), np.atleast_2d(K)
    if Q.shape[1] != K.shape[1]:
        raise ValueError(f"query width {Q.shape[1]} != key width {K.shape[1]}")
    if Q.shape[1] == 0:
        raise ValueError("key width must be > 0")
    return _softmax_rows(Q @ K.T / math.sqrt(Q.shape[1]))


def attention(Q: np.ndarray, K: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Scaled dot-product attention softmax(Q K^T / sqrt(d_k)) V."""
    V = np.atleast_2d(V)
    if V.shape[0] != np.atleast_2d(K).shape[0]:
        raise ValueError(f"{np.atleast_2d(K).shape[0]} keys but {V.shape[0]} values")
    return attention_weights(Q, K) @ V


def multi_head(X: np.ndarray, layer: LayerWeights, n_heads: int) -> np.ndarray:
    X = np.atleast_2d(X)
    d = layer.w_q.shape[0]
    if X.shape[1] != d:
        raise ValueError(f"input width {X.shape[1]} != d_model {d}")
    if d % n_heads:
        raise ValueError(f"d_model={d} is not divisible by n_heads={n_heads}")
    dk = d // n_heads
    Q, K, V = X @ layer.w_q, X @ layer.w_k, X @ layer.w_v
    heads = [attention(Q[:, h * dk:(h + 1) * dk], K[:, h * dk:(h + 1) * dk], V[:, h * dk:(h + 1) * dk])
             for h in range(n_heads)]
    return np.concatenate(heads, axis=1) @ layer.w_o


def ffn(x: np.ndarray, w_1: np.ndarray, b_1: np.ndarray, w_2: np.ndarray, b_2: np.ndarray) -> np.ndarray:
    """max(0, x W1 + b1) W2 + b2, row-wise for matrices."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != w_1.shape[0] or w_1.shape[1] != b_1.shape[0] or w_1.shape[1] != w_2.shape[0] \
            or w_2.shape[1] != b_2.shape[0]:
        raise ValueError("ffn shape mismatch")
    return np.maximum(0.0, x @ w_1 + b_1) @ w_2 + b_2


def layer_norm_residual(x: np.ndarray, sublayer_output: np.ndarray, scale: np.ndarray, shift: np.ndarray,
                        eps: float = LN_EPS) -> np.ndarray:
    """LayerNorm(x + sublayer_output) over the last axis, population variance."""
    x, s = np.asarray(x, dtype=np.float64), np.asarray(sublayer_output, dtype=np.float64)
    if x.shape != s.shape or x.shape[-1] != np.shape(scale)[-1] or x.shape[-1] != np.shape(shift)[-1]:
        raise ValueError("layer_norm_residual length mismatch")
    h = x + s
    mu = h.mean(axis=-1, keepdims=True)
    var = ((h - mu) ** 2).mean(axis=-1, keepdims=True)
    return (h - mu) / np.sqrt(var + eps) * scale + shift


def encoder_layer(X: np.ndarray, layer: LayerWeights, n_heads: int) -> np.ndarray:
    X = layer_norm_residual(X, multi_head(X, layer, n_heads), layer.ln1_scale, layer.ln1_shift)
    return layer_norm_residual(X, ffn(X, layer.w_1, layer.b_1, layer.w_2, layer.b_2), layer.ln2_scale, layer.ln2_shift)


@dataclass(frozen=True)
class TokenSequence:
    ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.ids) < 1:
            raise ValueError("token sequence must not be empty")
        if any(i < 0 for i in self.ids):
            raise ValueError("token ids must be >= 0")

    def __len__(self) -> int:
        return len(self.ids)


def encode_text(text: str, vocabulary: Sequence[str], max_length: int = MAX_LENGTH) -> TokenSequence:
    """Token ids for ``text``; unknown words map to index 0, overlong input keeps its head.

    ``vocabulary[0]`` is the unknown-word slot. Empty text becomes a single
    unknown token so the sequence is never empty.
    """
    index = {tok: i for i, tok in enumerate(vocabulary)}
    ids = [index.get(tok, 0) for tok in tokenize(text)][:max_length]
    return TokenSequence(tuple(ids) or (0,))


def hidden_states(tokens: TokenSequence, weights: EncoderWeights) -> np.ndarray:
    c = weights.config
    ids = np.asarray(tokens.ids, dtype=np.int64)
    if ids.max() >= c.vocab_size:
        raise ValueError(f"token id {int(ids.max())} out of range for vocab_size {c.vocab_size}")
    if ids.size > c.max_length:
        raise ValueError(f"sequence of {ids.size} tokens exceeds max_length {c.max_length}")
    X = weights.token_embedding[ids] + weights.position_embedding[:ids.size]
    for layer in weights.layers:
        X = encoder_layer(X, layer, c.n_heads)
    return X


def forward(tokens: TokenSequence, weights: EncoderWeights) -> np.ndarray:
    """Label logits for one sequence (mean-pooled states through the linear head)."""
    pooled = hidden_states(tokens, weights).mean(axis=0)
    return weights.head @ pooled + weights.head_bias


# persistence

def save_weights(weights: EncoderWeights, manifest_path: str | Path, labels: Sequence[str],
                 vocabulary: Sequence[str]) -> None:
    """Write ``<stem>.json`` (manifest) and ``<stem>.bin`` (tensor blob)."""
    c = weights.config
    if len(labels) != c.n_labels or len(vocabulary) != c.vocab_size:
        raise ValueError("labels/vocabulary sizes disagree with the config")
    manifest_path = Path(manifest_path)
    blob_path = manifest_path.with_suffix(".bin")
    entries, offset = [], 0
    with blob_path.open("wb") as fh:
        for name, arr in weights.tensors().items():
            data = np.ascontiguousarray(arr, dtype="<f8").tobytes()
            entries.append({"name": name, "shape": list(arr.shape), "offset": offset})
            fh.write(data)
            offset += len(data)
    manifest = {"format": WEIGHTS_FORMAT, "config": c.__dict__, "labels": list(labels),
                "vocabulary": list(vocabulary), "data_file": blob_path.name, "dtype": "<f8",
                "tensors": entries}
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True, ensure_ascii=False) + "\n",
                             encoding="utf-8")


def load_weights(manifest_path: str | Path) -> tuple[EncoderWeights, tuple[str, ...], tuple[str, ...]]:
    """Return (weights, labels, vocabulary)."""
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest.get("format") != WEIGHTS_FORMAT:
        raise ValueError(f"{manifest_path}: unsupported weights format {manifest.get('format')!r}")
    config = EncoderConfig(**manifest["config"])
    blob = (manifest_path.parent / manifest["data_file"]).read_bytes()
    tensors = {}
    for entry in manifest["tensors"]:
        count = math.prod(entry["shape"])
        end = entry["offset"] + 8 * count
        if end > len(blob):
            raise ValueError(f"{manifest_path}: tensor {entry['name']} runs past the end of the data file")
        tensors[entry["name"]] = np.frombuffer(blob, dtype="<f8", count=count,
                                               offset=entry["offset"]).reshape(entry["shape"]).astype(np.float64)
    missing = set(tensor_shapes(config)) - set(tensors)
    if missing:
        raise ValueError(f"{manifest_path}: missing tensors {sorted(missing)}")
    weights = EncoderWeights.from_tensors(config, tensors)
    return weights, tuple(manifest["labels"]), tuple(manifest["vocabulary"])


class EncoderClassifier:
    """Text classifier wrapping an encoder: softmax over the head logits."""

    def __init__(self, weights: EncoderWeights, labels: Sequence[str], vocabulary: Sequence[str]):
        if len(labels) != weights.config.n_labels:
            raise ValueError("label count does not match the encoder head")
        if len(vocabulary) != weights.config.vocab_size:
            raise ValueError("vocabulary size does not match the embedding table")
        self.weights = weights
        self.labels = tuple(labels)
        self.vocabulary = tuple(vocabulary)

    @classmethod
    def load(cls, manifest_path: str | Path) -> "EncoderClassifier":
        weights, labels, vocab = load_weights(manifest_path)
        return cls(weights, labels, vocab)

    def logits(self, text: str) -> np.ndarray:
        return forward(encode_text(text, self.vocabulary, self.weights.config.max_length), self.weights)

    def __call__(self, text: str) -> EmotionDistribution:
        return softmax(self.logits(text), self.labels)
