"""Attention message-passing regressor in plain numpy, with hand-written backprop.

Each layer computes, for node i over every other node j,

    q_i = h_i Wq + bq,   k_ij = h_j Wk + bk + e_ij We,   v_ij = h_j Wv + bv + e_ij We
    a_ij = softmax_j(q_i . k_ij / sqrt(d))
    h'_i = leaky_relu(sum_j a_ij v_ij + h_i Ws + bs)

Three layers feed a readout that concatenates mean- and sum-pooled node
embeddings into a linear head.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from anticipatory_tamp.domain import rules

Params = dict[str, np.ndarray]

_LAYER_PARAMS = ("wq", "bq", "wk", "bk", "wv", "bv", "we", "ws", "bs")


def leaky_relu(x: np.ndarray, slope: float = rules.LEAKY_SLOPE) -> np.ndarray:
    return np.where(x > 0, x, slope * x)


def init_params(
    node_dim: int,
    edge_dim: int,
    hidden: int = rules.HIDDEN_WIDTH,
    n_layers: int = rules.N_LAYERS,
    seed: int = 0,
) -> Params:
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(seed)

    def glorot(fan_in: int, fan_out: int) -> np.ndarray:
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    params: Params = {}
    d_in = node_dim
    for layer in range(n_layers):
        p = f"l{layer}."
        for name in ("wq", "wk", "wv", "ws"):
            params[p + name] = glorot(d_in, hidden)
        params[p + "we"] = glorot(edge_dim, hidden)
        for name in ("bq", "bk", "bv", "bs"):
            params[p + name] = np.zeros(hidden)
        d_in = hidden
    params["head.w"] = glorot(2 * hidden, 1)[:, 0]
    params["head.b"] = np.zeros(())
    return params


@dataclass
class _LayerCache:
    h: np.ndarray
    q: np.ndarray
    k: np.ndarray
    v: np.ndarray
    a: np.ndarray
    z: np.ndarray


@dataclass
class ForwardCache:
    e: np.ndarray
    layers: list[_LayerCache]
    pooled: np.ndarray
    n: int


class GraphRegressor:
    """Stateless apart from its parameters; safe to share across threads for inference."""

    def __init__(self, params: Params, slope: float = rules.LEAKY_SLOPE):
        self.params = params
        self.slope = slope
        self.n_layers = sum(1 for k in params if k.endswith(".wq"))
        self.hidden = params["head.w"].shape[0] // 2

    @classmethod
    def initialize(
        cls,
        node_dim: int,
        edge_dim: int,
        hidden: int = rules.HIDDEN_WIDTH,
        n_layers: int = rules.N_LAYERS,
        seed: int = 0,
    ) -> GraphRegressor:
        return cls(init_params(node_dim, edge_dim, hidden, n_layers, seed))

    @property
    def n_params(self) -> int:
        return sum(int(v.size) for v in self.params.values())

    def _layer(self, i: int) -> dict[str, np.ndarray]:
        return {name: self.params[f"l{i}.{name}"] for name in _LAYER_PARAMS}

    # -- forward -------------------------------------------------------------

    def forward(self, x: np.ndarray, e: np.ndarray, mask: np.ndarray) -> tuple[float, ForwardCache]:
        """x: (n, node_dim) features, e: (n, n, edge_dim) edge tensor, mask: (n, n) neighbours."""
        h = x
        caches = []
        for i in range(self.n_layers):
            p = self._layer(i)
            d = p["wq"].shape[1]
            ep = e @ p["we"]
            q = h @ p["wq"] + p["bq"]
            k = (h @ p["wk"] + p["bk"])[None, :, :] + ep
            v = (h @ p["wv"] + p["bv"])[None, :, :] + ep
            s = np.einsum("id,ijd->ij", q, k) / math.sqrt(d)
            s = np.where(mask, s, -np.inf)
            row_max = s.max(axis=1, keepdims=True)
            row_max = np.where(np.isfinite(row_max), row_max, 0.0)
            a = np.exp(s - row_max) * mask
            denom = a.sum(axis=1, keepdims=True)
            a = a / np.where(denom > 0, denom, 1.0)
            z = np.einsum("ij,ijd->id", a, v) + h @ p["ws"] + p["bs"]
            caches.append(_LayerCache(h=h, q=q, k=k, v=v, a=a, z=z))
            h = leaky_relu(z, self.slope)
        n = h.shape[0]
        pooled = np.concatenate([h.mean(axis=0), h.sum(axis=0)])
        y = float(pooled @ self.params["head.w"] + self.params["head.b"])
        return y, ForwardCache(e=e, layers=caches, pooled=pooled, n=n)

    def predict(self, x: np.ndarray, e: np.ndarray, mask: np.ndarray) -> float:
        return self.forward(x, e, mask)[0]

    # -- backward ------------------------------------------------------------

    def backward(self, cache: ForwardCache, dy: float) -> Params:
        """Gradients of ``dy * y`` with respect to every parameter."""
        grads: Params = {"head.w": dy * cache.pooled, "head.b": np.asarray(dy)}
        dpooled = dy * self.params["head.w"]
        hidden = self.hidden
        dh = np.broadcast_to(dpooled[:hidden] / cache.n + dpooled[hidden:], (cache.n, hidden)).copy()
        e = cache.e
        for i in reversed(range(self.n_layers)):
            p = self._layer(i)
            c = cache.layers[i]
            d = p["wq"].shape[1]
            dz = dh * np.where(c.z > 0, 1.0, self.slope)
            g = f"l{i}."
            grads[g + "ws"] = c.h.T @ dz
            grads[g + "bs"] = dz.sum(axis=0)
            dh_in = dz @ p["ws"].T

            da = np.einsum("id,ijd->ij", dz, c.v)
            dv = c.a[:, :, None] * dz[:, None, :]
            ds = c.a * (da - (c.a * da).sum(axis=1, keepdims=True)) / math.sqrt(d)
            dq = np.einsum("ij,ijd->id", ds, c.k)
            dk = ds[:, :, None] * c.q[:, None, :]

            grads[g + "we"] = np.einsum("ijf,ijd->fd", e, dk + dv)
            dk0, dv0 = dk.sum(axis=0), dv.sum(axis=0)
            grads[g + "wq"] = c.h.T @ dq
            grads[g + "bq"] = dq.sum(axis=0)
            grads[g + "wk"] = c.h.T @ dk0
            grads[g + "bk"] = dk0.sum(axis=0)
            grads[g + "wv"] = c.h.T @ dv0
            grads[g + "bv"] = dv0.sum(axis=0)
            dh = dh_in + dq @ p["wq"].T + dk0 @ p["wk"].T + dv0 @ p["wv"].T
        return grads
