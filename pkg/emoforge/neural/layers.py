"""
Neural layers with exact backward passes.

Inputs are batch-first. Sequence layers take ``(B, T, d)`` values together
with a ``(B, T)`` boolean mask of real (non-pad) positions. A layer caches
what its backward pass needs only when ``forward`` runs in train mode.
"""
import math
from abc import ABC, abstractmethod
from typing import Dict, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DimensionError, PreconditionError, StateError

LayerKind = Literal["embedding", "dense", "dropout", "conv1d", "max_pool1d", "rnn_cell",
                    "lstm_cell", "self_attention_block", "mean_pool", "repeat"]
Activation = Literal["identity", "relu", "tanh"]
Mode = Literal["train", "infer"]

ATTENTION_MASK_VALUE = -1e9
LAYER_NORM_EPS = 1e-5


class LayerSpec(BaseModel):
    """Kind plus the shape parameters that kind needs."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: LayerKind
    input_dim: Optional[int] = Field(default=None, ge=1)
    units: Optional[int] = Field(default=None, ge=1)
    vocab_size: Optional[int] = Field(default=None, ge=1)
    max_len: Optional[int] = Field(default=None, ge=1)
    kernel_width: Optional[int] = Field(default=None, ge=1)
    filters: Optional[int] = Field(default=None, ge=1)
    pool_width: Optional[int] = Field(default=None, ge=1)
    heads: Optional[int] = Field(default=None, ge=1)
    model_dim: Optional[int] = Field(default=None, ge=1)
    ff_dim: Optional[int] = Field(default=None, ge=1)
    positions: Optional[int] = Field(default=None, ge=1)
    rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    activation: Activation = "identity"

    @model_validator(mode="after")
    def _required_fields(self):
        required = {
            "embedding": ("vocab_size", "units"),
            "dense": ("input_dim", "units"),
            "conv1d": ("input_dim", "filters", "kernel_width"),
            "max_pool1d": ("pool_width",),
            "rnn_cell": ("input_dim", "units"),
            "lstm_cell": ("input_dim", "units"),
            "self_attention_block": ("model_dim", "heads", "ff_dim"),
            "repeat": ("positions",),
        }.get(self.kind, ())
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.kind} layer needs {missing}")
        if self.kind == "self_attention_block" and self.model_dim % self.heads:
            raise ValueError("model_dim must be divisible by heads")
        return self


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0)
    if name == "tanh":
        return np.tanh(z)
    return z


def _activate_grad(name: str, z: np.ndarray, y: np.ndarray, grad: np.ndarray) -> np.ndarray:
    if name == "relu":
        return grad * (z > 0)
    if name == "tanh":
        return grad * (1.0 - y * y)
    return grad


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


Grads = Dict[str, np.ndarray]


class Layer(ABC):
    """Base class: named parameters, a forward/backward pair and a cache."""

    def __init__(self, spec: LayerSpec, index: int = 0):
        self.spec = spec
        self.index = index
        self.params: Dict[str, np.ndarray] = {}
        self._cache = None

    # shape bookkeeping for graph compatibility checks; None means "any"
    in_dim: Optional[int] = None
    out_dim: Optional[int] = None

    @abstractmethod
    def forward(self, x: np.ndarray, mask: Optional[np.ndarray] = None, mode: Mode = "infer",
                rng: Optional[np.random.Generator] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """Return (output, output mask)."""

    @abstractmethod
    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], Grads]:
        """Return (input gradient, parameter gradients) for the cached forward pass."""

    def _store(self, mode: Mode, cache) -> None:
        self._cache = cache if mode == "train" else None

    def _cached(self):
        if self._cache is None:
            raise StateError(f"layer {self.index} ({self.spec.kind}): backward without a "
                             "train-mode forward pass")
        return self._cache

    def _check_last_dim(self, x: np.ndarray, expected: int) -> None:
        if x.shape[-1] != expected:
            raise DimensionError(f"{self.spec.kind} expects last dimension {expected}, "
                                 f"got shape {x.shape}", layer_index=self.index)

    def _check_rank(self, x: np.ndarray, rank: int) -> None:
        if x.ndim != rank:
            raise DimensionError(f"{self.spec.kind} expects a rank-{rank} input, got shape {x.shape}",
                                 layer_index=self.index)

    def astype(self, dtype) -> None:
        self.params = {k: v.astype(dtype) for k, v in self.params.items()}
        self._cache = None


# -----------------------------
# Feed-forward layers
# -----------------------------
class Embedding(Layer):
    """Token lookup with optional learned positions; pad positions read as zero."""

    def __init__(self, spec: LayerSpec, index: int, rng: np.random.Generator, dtype):
        super().__init__(spec, index)
        self.params["W"] = rng.uniform(-0.05, 0.05, size=(spec.vocab_size, spec.units)).astype(dtype)
        if spec.max_len:
            self.params["P"] = rng.uniform(-0.05, 0.05, size=(spec.max_len, spec.units)).astype(dtype)
        self.out_dim = spec.units

    def forward(self, x, mask=None, mode="infer", rng=None):
        ids = np.asarray(x)
        self._check_rank(ids, 2)
        if not np.issubdtype(ids.dtype, np.integer):
            raise DimensionError("embedding expects integer token ids", layer_index=self.index)
        if ids.size and (ids.min() < 0 or ids.max() >= self.spec.vocab_size):
            raise DimensionError(f"token id outside [0, {self.spec.vocab_size})", layer_index=self.index)
        steps = ids.shape[1]
        if "P" in self.params and steps > self.spec.max_len:
            raise DimensionError(f"sequence length {steps} exceeds max_len {self.spec.max_len}",
                                 layer_index=self.index)
        mask = np.ones(ids.shape, dtype=bool) if mask is None else mask.astype(bool)
        out = self.params["W"][ids]
        if "P" in self.params:
            out = out + self.params["P"][:steps]
        out = out * mask[..., None]
        self._store(mode, (ids, mask))
        return out, mask

    def backward(self, grad):
        ids, mask = self._cached()
        g = grad * mask[..., None]
        grads: Grads = {"W": np.zeros_like(self.params["W"])}
        np.add.at(grads["W"], ids.ravel(), g.reshape(-1, g.shape[-1]))
        if "P" in self.params:
            grads["P"] = np.zeros_like(self.params["P"])
            grads["P"][:ids.shape[1]] = g.sum(axis=0)
        return None, grads


class Dense(Layer):
    def __init__(self, spec: LayerSpec, index: int, rng: np.random.Generator, dtype):
        super().__init__(spec, index)
        self.params["W"] = glorot(rng, spec.input_dim, spec.units).astype(dtype)
        self.params["b"] = np.zeros(spec.units, dtype=dtype)
        self.in_dim, self.out_dim = spec.input_dim, spec.units

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_last_dim(x, self.spec.input_dim)
        z = x @ self.params["W"] + self.params["b"]
        y = _activate(self.spec.activation, z)
        self._store(mode, (x, z, y))
        return y, mask

    def backward(self, grad):
        x, z, y = self._cached()
        g = _activate_grad(self.spec.activation, z, y, grad)
        flat_x = x.reshape(-1, x.shape[-1])
        flat_g = g.reshape(-1, g.shape[-1])
        grads = {"W": flat_x.T @ flat_g, "b": flat_g.sum(axis=0)}
        return g @ self.params["W"].T, grads


class Dropout(Layer):
    """Inverted dropout: survivors scaled by 1/(1-rate) in train mode, identity otherwise."""

    def __init__(self, spec: LayerSpec, index: int, rng=None, dtype=None):
        super().__init__(spec, index)

    def forward(self, x, mask=None, mode="infer", rng=None):
        rate = self.spec.rate
        if mode != "train" or rate == 0.0:
            self._store(mode, None if mode != "train" else np.ones((), dtype=x.dtype))
            return x, mask
        if rng is None:
            raise PreconditionError(f"layer {self.index}: train-mode dropout needs an rng")
        keep = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
        self._store(mode, keep)
        return x * keep, mask

    def backward(self, grad):
        keep = self._cached()
        return grad * keep, {}


class RepeatVector(Layer):
    """(B, d) -> (B, positions, d) with an all-valid mask."""

    def __init__(self, spec: LayerSpec, index: int, rng=None, dtype=None):
        super().__init__(spec, index)

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 2)
        steps = self.spec.positions
        out = np.repeat(x[:, None, :], steps, axis=1)
        self._store(mode, True)
        return out, np.ones(out.shape[:2], dtype=bool)

    def backward(self, grad):
        self._cached()
        return grad.sum(axis=1), {}


class MeanPool(Layer):
    """Average over real positions of a sequence."""

    def __init__(self, spec: LayerSpec, index: int, rng=None, dtype=None):
        super().__init__(spec, index)

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 3)
        mask = np.ones(x.shape[:2], dtype=bool) if mask is None else mask
        weights = mask.astype(x.dtype)
        count = np.maximum(weights.sum(axis=1, keepdims=True), 1.0)
        out = (x * weights[..., None]).sum(axis=1) / count
        self._store(mode, (weights, count))
        return out, None

    def backward(self, grad):
        weights, count = self._cached()
        return grad[:, None, :] * (weights / count)[..., None], {}


# -----------------------------
# Convolution and pooling
# -----------------------------
class Conv1D(Layer):
    """'same'-padded 1-D convolution over the time axis, computed as im2col @ W."""

    def __init__(self, spec: LayerSpec, index: int, rng: np.random.Generator, dtype):
        super().__init__(spec, index)
        width, c_in, c_out = spec.kernel_width, spec.input_dim, spec.filters
        self.params["W"] = glorot(rng, width * c_in, c_out).astype(dtype)
        self.params["b"] = np.zeros(c_out, dtype=dtype)
        self.in_dim, self.out_dim = c_in, c_out

    def _pads(self) -> Tuple[int, int]:
        width = self.spec.kernel_width
        left = (width - 1) // 2
        return left, width - 1 - left

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 3)
        self._check_last_dim(x, self.spec.input_dim)
        batch, steps, _ = x.shape
        mask = np.ones((batch, steps), dtype=bool) if mask is None else mask.astype(bool)
        left, right = self._pads()
        padded = np.pad(x, ((0, 0), (left, right), (0, 0)))
        cols = np.concatenate([padded[:, k:k + steps, :] for k in range(self.spec.kernel_width)],
                              axis=-1)
        z = cols @ self.params["W"] + self.params["b"]
        y = _activate(self.spec.activation, z) * mask[..., None]
        self._store(mode, (cols, z, y, mask, x.shape))
        return y, mask

    def backward(self, grad):
        cols, z, y, mask, shape = self._cached()
        g = _activate_grad(self.spec.activation, z, y, grad * mask[..., None])
        flat_cols = cols.reshape(-1, cols.shape[-1])
        flat_g = g.reshape(-1, g.shape[-1])
        grads = {"W": flat_cols.T @ flat_g, "b": flat_g.sum(axis=0)}
        dcols = g @ self.params["W"].T
        batch, steps, c_in = shape
        left, right = self._pads()
        dpadded = np.zeros((batch, steps + left + right, c_in), dtype=grad.dtype)
        for k in range(self.spec.kernel_width):
            dpadded[:, k:k + steps, :] += dcols[..., k * c_in:(k + 1) * c_in]
        return dpadded[:, left:left + steps, :], grads


class MaxPool1D(Layer):
    """Non-overlapping max over windows of ``pool_width`` real positions."""

    def __init__(self, spec: LayerSpec, index: int, rng=None, dtype=None):
        super().__init__(spec, index)

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 3)
        batch, steps, dim = x.shape
        width = self.spec.pool_width
        mask = np.ones((batch, steps), dtype=bool) if mask is None else mask.astype(bool)
        out_steps = -(-steps // width)
        extra = out_steps * width - steps
        masked = np.where(mask[..., None], x, -np.inf)
        masked = np.pad(masked, ((0, 0), (0, extra), (0, 0)), constant_values=-np.inf)
        windows = masked.reshape(batch, out_steps, width, dim)
        arg = windows.argmax(axis=2)
        out = np.take_along_axis(windows, arg[:, :, None, :], axis=2)[:, :, 0, :]
        out_mask = np.pad(mask, ((0, 0), (0, extra))).reshape(batch, out_steps, width).any(axis=2)
        out = np.where(out_mask[..., None], out, 0.0).astype(x.dtype)
        self._store(mode, (arg, out_mask, x.shape))
        return out, out_mask

    def backward(self, grad):
        arg, out_mask, shape = self._cached()
        batch, steps, dim = shape
        width = self.spec.pool_width
        out_steps = arg.shape[1]
        dwin = np.zeros((batch, out_steps, width, dim), dtype=grad.dtype)
        g = grad * out_mask[..., None]
        np.put_along_axis(dwin, arg[:, :, None, :], g[:, :, None, :], axis=2)
        return dwin.reshape(batch, out_steps * width, dim)[:, :steps, :], {}


# -----------------------------
# Recurrent layers
# -----------------------------
class SimpleRNN(Layer):
    """tanh recurrence returning the state after the last real position."""

    def __init__(self, spec: LayerSpec, index: int, rng: np.random.Generator, dtype):
        super().__init__(spec, index)
        n_in, hidden = spec.input_dim, spec.units
        self.params["Wx"] = rng.uniform(-0.1, 0.1, size=(n_in, hidden)).astype(dtype)
        self.params["Wh"] = rng.uniform(-0.1, 0.1, size=(hidden, hidden)).astype(dtype)
        self.params["b"] = np.zeros(hidden, dtype=dtype)
        self.in_dim, self.out_dim = n_in, hidden

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 3)
        self._check_last_dim(x, self.spec.input_dim)
        batch, steps, _ = x.shape
        mask = np.ones((batch, steps), dtype=bool) if mask is None else mask.astype(bool)
        h = np.zeros((batch, self.spec.units), dtype=x.dtype)
        trace = []
        for t in range(steps):
            m = mask[:, t, None].astype(x.dtype)
            h_new = np.tanh(x[:, t] @ self.params["Wx"] + h @ self.params["Wh"] + self.params["b"])
            trace.append((h, h_new, m))
            h = m * h_new + (1.0 - m) * h
        self._store(mode, (x, trace))
        return h, None

    def backward(self, grad):
        x, trace = self._cached()
        grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        dx = np.zeros_like(x)
        dh = grad
        for t in reversed(range(len(trace))):
            h_prev, h_new, m = trace[t]
            dz = (m * dh) * (1.0 - h_new * h_new)
            grads["Wx"] += x[:, t].T @ dz
            grads["Wh"] += h_prev.T @ dz
            grads["b"] += dz.sum(axis=0)
            dx[:, t] = dz @ self.params["Wx"].T
            dh = dz @ self.params["Wh"].T + (1.0 - m) * dh
        return dx, grads


class LSTM(Layer):
    """LSTM (gate order i, f, g, o) returning the last real hidden state."""

    def __init__(self, spec: LayerSpec, index: int, rng: np.random.Generator, dtype):
        super().__init__(spec, index)
        n_in, hidden = spec.input_dim, spec.units
        self.params["Wx"] = rng.uniform(-0.1, 0.1, size=(n_in, 4 * hidden)).astype(dtype)
        self.params["Wh"] = rng.uniform(-0.1, 0.1, size=(hidden, 4 * hidden)).astype(dtype)
        bias = np.zeros(4 * hidden)
        bias[hidden:2 * hidden] = 1.0
        self.params["b"] = bias.astype(dtype)
        self.in_dim, self.out_dim = n_in, hidden

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 3)
        self._check_last_dim(x, self.spec.input_dim)
        batch, steps, _ = x.shape
        H = self.spec.units
        mask = np.ones((batch, steps), dtype=bool) if mask is None else mask.astype(bool)
        h = np.zeros((batch, H), dtype=x.dtype)
        c = np.zeros((batch, H), dtype=x.dtype)
        trace = []
        for t in range(steps):
            m = mask[:, t, None].astype(x.dtype)
            z = x[:, t] @ self.params["Wx"] + h @ self.params["Wh"] + self.params["b"]
            i = _sigmoid(z[:, :H])
            f = _sigmoid(z[:, H:2 * H])
            g = np.tanh(z[:, 2 * H:3 * H])
            o = _sigmoid(z[:, 3 * H:])
            c_new = f * c + i * g
            tanh_c = np.tanh(c_new)
            h_new = o * tanh_c
            trace.append((h, c, i, f, g, o, tanh_c, m))
            h = m * h_new + (1.0 - m) * h
            c = m * c_new + (1.0 - m) * c
        self._store(mode, (x, trace))
        return h, None

    def backward(self, grad):
        x, trace = self._cached()
        grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        dx = np.zeros_like(x)
        dh = grad
        dc = np.zeros_like(grad)
        for t in reversed(range(len(trace))):
            h_prev, c_prev, i, f, g, o, tanh_c, m = trace[t]
            dh_new = m * dh
            dc_new = m * dc + dh_new * o * (1.0 - tanh_c * tanh_c)
            dz = np.concatenate([
                dc_new * g * i * (1.0 - i),
                dc_new * c_prev * f * (1.0 - f),
                dc_new * i * (1.0 - g * g),
                dh_new * tanh_c * o * (1.0 - o),
            ], axis=1)
            grads["Wx"] += x[:, t].T @ dz
            grads["Wh"] += h_prev.T @ dz
            grads["b"] += dz.sum(axis=0)
            dx[:, t] = dz @ self.params["Wx"].T
            dh = dz @ self.params["Wh"].T + (1.0 - m) * dh
            dc = dc_new * f + (1.0 - m) * dc
        return dx, grads


# -----------------------------
# Self-attention
# -----------------------------
def _layer_norm(x, gamma, beta):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    xhat = (x - mu) * inv
    return xhat * gamma + beta, (xhat, inv)


def _layer_norm_backward(grad, gamma, cache):
    xhat, inv = cache
    dgamma = (grad * xhat).reshape(-1, xhat.shape[-1]).sum(axis=0)
    dbeta = grad.reshape(-1, grad.shape[-1]).sum(axis=0)
    dxhat = grad * gamma
    dx = inv * (dxhat - dxhat.mean(axis=-1, keepdims=True)
                - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
    return dx, dgamma, dbeta


def _softmax_last(scores):
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class SelfAttentionBlock(Layer):
    """
    Post-norm transformer block:
    y1 = LN(x + MHA(x)), out = LN(y1 + FF(y1)) with FF = relu(y1 W1 + b1) W2 + b2.
    Pad positions are masked out as attention keys.
    """

    def __init__(self, spec: LayerSpec, index: int, rng: np.random.Generator, dtype):
        super().__init__(spec, index)
        d, ff = spec.model_dim, spec.ff_dim
        for name in ("q", "k", "v", "o"):
            self.params["W" + name] = glorot(rng, d, d).astype(dtype)
            self.params["b" + name] = np.zeros(d, dtype=dtype)
        self.params["W1"] = glorot(rng, d, ff).astype(dtype)
        self.params["b1"] = np.zeros(ff, dtype=dtype)
        self.params["W2"] = glorot(rng, ff, d).astype(dtype)
        self.params["b2"] = np.zeros(d, dtype=dtype)
        for norm in ("ln1", "ln2"):
            self.params[norm + "_g"] = np.ones(d, dtype=dtype)
            self.params[norm + "_b"] = np.zeros(d, dtype=dtype)
        self.in_dim = self.out_dim = d

    def _split(self, x):
        batch, steps, d = x.shape
        heads = self.spec.heads
        return x.reshape(batch, steps, heads, d // heads).transpose(0, 2, 1, 3)

    @staticmethod
    def _merge(x):
        batch, heads, steps, dh = x.shape
        return x.transpose(0, 2, 1, 3).reshape(batch, steps, heads * dh)

    def forward(self, x, mask=None, mode="infer", rng=None):
        self._check_rank(x, 3)
        self._check_last_dim(x, self.spec.model_dim)
        p = self.params
        batch, steps, d = x.shape
        mask = np.ones((batch, steps), dtype=bool) if mask is None else mask.astype(bool)
        scale = 1.0 / math.sqrt(d // self.spec.heads)

        q = self._split(x @ p["Wq"] + p["bq"])
        k = self._split(x @ p["Wk"] + p["bk"])
        v = self._split(x @ p["Wv"] + p["bv"])
        scores = (q @ k.transpose(0, 1, 3, 2)) * scale
        scores = np.where(mask[:, None, None, :], scores, ATTENTION_MASK_VALUE).astype(x.dtype)
        attn = _softmax_last(scores)
        context = self._merge(attn @ v)
        attn_out = context @ p["Wo"] + p["bo"]

        y1, ln1 = _layer_norm(x + attn_out, p["ln1_g"], p["ln1_b"])
        pre = y1 @ p["W1"] + p["b1"]
        hidden = np.maximum(pre, 0)
        ff_out = hidden @ p["W2"] + p["b2"]
        out, ln2 = _layer_norm(y1 + ff_out, p["ln2_g"], p["ln2_b"])
        self._store(mode, (x, q, k, v, attn, context, y1, ln1, pre, hidden, ln2, scale))
        return out, mask

    def backward(self, grad):
        x, q, k, v, attn, context, y1, ln1, pre, hidden, ln2, scale = self._cached()
        p = self.params

        def flat(a):
            return a.reshape(-1, a.shape[-1])

        grads: Grads = {}
        d_res2, grads["ln2_g"], grads["ln2_b"] = _layer_norm_backward(grad, p["ln2_g"], ln2)
        grads["W2"] = flat(hidden).T @ flat(d_res2)
        grads["b2"] = flat(d_res2).sum(axis=0)
        d_pre = (d_res2 @ p["W2"].T) * (pre > 0)
        grads["W1"] = flat(y1).T @ flat(d_pre)
        grads["b1"] = flat(d_pre).sum(axis=0)
        d_y1 = d_res2 + d_pre @ p["W1"].T

        d_res1, grads["ln1_g"], grads["ln1_b"] = _layer_norm_backward(d_y1, p["ln1_g"], ln1)
        grads["Wo"] = flat(context).T @ flat(d_res1)
        grads["bo"] = flat(d_res1).sum(axis=0)
        d_context = self._split(d_res1 @ p["Wo"].T)
        d_attn = d_context @ v.transpose(0, 1, 3, 2)
        d_v = attn.transpose(0, 1, 3, 2) @ d_context
        d_scores = attn * (d_attn - (d_attn * attn).sum(axis=-1, keepdims=True)) * scale
        d_q = d_scores @ k
        d_k = d_scores.transpose(0, 1, 3, 2) @ q

        dx = d_res1.copy()
        for name, dproj in (("q", d_q), ("k", d_k), ("v", d_v)):
            merged = self._merge(dproj)
            grads["W" + name] = flat(x).T @ flat(merged)
            grads["b" + name] = flat(merged).sum(axis=0)
            dx += merged @ p["W" + name].T
        return dx, grads


_LAYER_TYPES = {
    "embedding": Embedding,
    "dense": Dense,
    "dropout": Dropout,
    "conv1d": Conv1D,
    "max_pool1d": MaxPool1D,
    "rnn_cell": SimpleRNN,
    "lstm_cell": LSTM,
    "self_attention_block": SelfAttentionBlock,
    "mean_pool": MeanPool,
    "repeat": RepeatVector,
}


def build_layer(spec: LayerSpec, index: int, rng: np.random.Generator, dtype=np.float32) -> Layer:
    return _LAYER_TYPES[spec.kind](spec, index, rng, dtype)
