"""Minimal dense layers with explicit reverse-mode gradients.

Everything is float64 numpy. Each module caches what its backward pass
needs during forward(train=True) and accumulates parameter gradients into
Param.grad; backward returns the gradient wrt the module input.
"""

from __future__ import annotations

from typing import Iterator, Tuple

import numpy as np

BN_MOMENTUM = 0.1
BN_EPS = 1e-5


class Param:
    """Trainable tensor with an accumulated gradient."""

    __slots__ = ("value", "grad")

    def __init__(self, value: np.ndarray):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)

    @property
    def size(self) -> int:
        return self.value.size


class Linear:
    def __init__(self, in_width: int, out_width: int, rng: np.random.Generator):
        bound = np.sqrt(6.0 / in_width)
        self.weight = Param(rng.uniform(-bound, bound, size=(in_width, out_width)))
        self.bias = Param(rng.uniform(-1.0, 1.0, size=out_width) / np.sqrt(in_width))
        self._x = None

    def forward(self, x, train: bool):
        if train:
            self._x = x
        return x @ self.weight.value + self.bias.value

    def backward(self, dy):
        self.weight.grad += self._x.T @ dy
        self.bias.grad += dy.sum(axis=0)
        return dy @ self.weight.value.T

    def parameters(self):
        yield "weight", self.weight
        yield "bias", self.bias


class BatchNorm:
    """Batch normalization over rows with running statistics for eval."""

    def __init__(self, width: int, momentum: float = BN_MOMENTUM, eps: float = BN_EPS):
        self.gamma = Param(np.ones(width))
        self.beta = Param(np.zeros(width))
        self.running_mean = np.zeros(width)
        self.running_var = np.ones(width)
        self.momentum = momentum
        self.eps = eps
        self._cache = None

    def forward(self, x, train: bool):
        if train:
            n = x.shape[0]
            mean = x.mean(axis=0)
            var = x.var(axis=0)
            inv_std = 1.0 / np.sqrt(var + self.eps)
            xhat = (x - mean) * inv_std
            self._cache = (xhat, inv_std, n)
            unbiased = var * n / max(n - 1, 1)
            self.running_mean = (1 - self.momentum) * self.running_mean + self.momentum * mean
            self.running_var = (1 - self.momentum) * self.running_var + self.momentum * unbiased
            self._train_mode = True
        else:
            inv_std = 1.0 / np.sqrt(self.running_var + self.eps)
            xhat = (x - self.running_mean) * inv_std
            self._cache = (xhat, inv_std, x.shape[0])
            self._train_mode = False
        return xhat * self.gamma.value + self.beta.value

    def backward(self, dy):
        xhat, inv_std, n = self._cache
        self.gamma.grad += (dy * xhat).sum(axis=0)
        self.beta.grad += dy.sum(axis=0)
        dxhat = dy * self.gamma.value
        if not self._train_mode:
            return dxhat * inv_std
        return (inv_std / n) * (
            n * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0)
        )

    def parameters(self):
        yield "gamma", self.gamma
        yield "beta", self.beta


class ReLU:
    def forward(self, x, train: bool):
        self._mask = x > 0
        return x * self._mask

    def backward(self, dy):
        return dy * self._mask

    def parameters(self):
        return iter(())


class Sequential:
    def __init__(self, *modules):
        self.modules = list(modules)

    def forward(self, x, train: bool):
        for m in self.modules:
            x = m.forward(x, train)
        return x

    def backward(self, dy):
        for m in reversed(self.modules):
            dy = m.backward(dy)
        return dy

    def parameters(self) -> Iterator[Tuple[str, Param]]:
        for i, m in enumerate(self.modules):
            for name, p in m.parameters():
                yield f"{i}.{name}", p


def mlp(widths, rng, momentum=BN_MOMENTUM, eps=BN_EPS) -> Sequential:
    """Stack of Linear+BN+ReLU per consecutive width pair."""
    modules = []
    for w_in, w_out in zip(widths[:-1], widths[1:]):
        modules += [Linear(w_in, w_out, rng), BatchNorm(w_out, momentum, eps), ReLU()]
    return Sequential(*modules)
