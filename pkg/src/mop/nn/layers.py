"""Primitive layers with explicit forward/backward passes.

Everything is float64. Forward methods return ``(output, cache)`` and never
mutate module state, so a model can be shared read-only across threads;
backward methods take the cache plus a GradBag that filters which parameter
gradients are actually produced.
"""

from __future__ import annotations

import numpy as np


def softmax(x: np.ndarray) -> np.ndarray:
    """Numerically stable softmax along the last axis."""
    z = x - x.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_backward(s: np.ndarray, ds: np.ndarray) -> np.ndarray:
    """Given s = softmax(z) and dL/ds, return dL/dz."""
    return (ds - (ds * s).sum(axis=-1, keepdims=True)) * s


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


class GradBag:
    """Gradient accumulator keyed by parameter array identity.

    ``trainable=None`` collects gradients for every parameter; otherwise only
    for the given arrays. Backward passes consult ``wants`` before computing
    a parameter gradient, which is how the frozen base stays truly frozen:
    its gradients are never produced, not merely discarded.
    """

    def __init__(self, trainable=None):
        self._slots: dict[int, list] = {}
        if trainable is None:
            self._allow = None
            self._refs = None
        else:
            self._refs = list(trainable)
            self._allow = {id(p) for p in self._refs}

    def wants(self, param: np.ndarray) -> bool:
        return self._allow is None or id(param) in self._allow

    def add(self, param: np.ndarray, grad: np.ndarray) -> None:
        if not self.wants(param):
            return
        slot = self._slots.get(id(param))
        if slot is None:
            self._slots[id(param)] = [param, np.asarray(grad, dtype=np.float64)]
        else:
            slot[1] = slot[1] + grad

    def get(self, param: np.ndarray) -> np.ndarray | None:
        slot = self._slots.get(id(param))
        return None if slot is None else slot[1]

    def items(self):
        for param, grad in self._slots.values():
            yield param, grad

    def __len__(self) -> int:
        return len(self._slots)


def scaled_normal(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    return rng.normal(0.0, 1.0 / np.sqrt(d_in), size=(d_in, d_out))


class Linear:
    """y = x @ w + b over the last axis."""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, init: str = "scaled"):
        if init == "scaled":
            self.w = scaled_normal(rng, d_in, d_out)
        elif init == "zero":
            self.w = np.zeros((d_in, d_out))
        elif init == "identity_noise":
            self.w = np.eye(d_in, d_out) + 0.01 * rng.normal(size=(d_in, d_out))
        else:
            raise ValueError(f"unknown init {init!r}")
        self.b = np.zeros(d_out)

    def forward(self, x: np.ndarray):
        return x @ self.w + self.b, x

    def backward(self, dy: np.ndarray, cache: np.ndarray, bag: GradBag) -> np.ndarray:
        x = cache
        if bag.wants(self.w):
            bag.add(self.w, x.reshape(-1, x.shape[-1]).T @ dy.reshape(-1, dy.shape[-1]))
        if bag.wants(self.b):
            bag.add(self.b, dy.reshape(-1, dy.shape[-1]).sum(axis=0))
        return dy @ self.w.T

    def named_params(self, prefix: str):
        yield f"{prefix}.w", self.w
        yield f"{prefix}.b", self.b


class LayerNorm:
    """y = gain * (x - mean) / sqrt(var + eps) + bias, over the last axis."""

    EPS = 1e-5

    def __init__(self, d: int):
        self.gain = np.ones(d)
        self.bias = np.zeros(d)

    def forward(self, x: np.ndarray):
        mu = x.mean(axis=-1, keepdims=True)
        var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
        sigma = np.sqrt(var + self.EPS)
        xhat = (x - mu) / sigma
        return xhat * self.gain + self.bias, (xhat, sigma)

    def backward(self, dy: np.ndarray, cache, bag: GradBag) -> np.ndarray:
        xhat, sigma = cache
        if bag.wants(self.gain):
            bag.add(self.gain, (dy * xhat).reshape(-1, xhat.shape[-1]).sum(axis=0))
        if bag.wants(self.bias):
            bag.add(self.bias, dy.reshape(-1, dy.shape[-1]).sum(axis=0))
        g = dy * self.gain
        m1 = g.mean(axis=-1, keepdims=True)
        m2 = (g * xhat).mean(axis=-1, keepdims=True)
        return (g - m1 - xhat * m2) / sigma

    def named_params(self, prefix: str):
        yield f"{prefix}.gain", self.gain
        yield f"{prefix}.bias", self.bias


class Embedding:
    """Row-lookup table with scatter-add gradients."""

    def __init__(self, rows: int, d: int, rng: np.random.Generator, std: float = 0.02):
        self.w = rng.normal(0.0, std, size=(rows, d))

    def forward(self, idx: np.ndarray):
        return self.w[idx], idx

    def backward(self, dy: np.ndarray, cache: np.ndarray, bag: GradBag) -> None:
        idx = cache
        if bag.wants(self.w):
            g = np.zeros_like(self.w)
            np.add.at(g, idx.reshape(-1), dy.reshape(-1, dy.shape[-1]))
            bag.add(self.w, g)

    def named_params(self, prefix: str):
        yield f"{prefix}.w", self.w
