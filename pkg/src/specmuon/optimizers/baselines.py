"""Textbook first-order baselines: GD, Adam, AdamW."""
from __future__ import annotations

import numpy as np

from .base import Optimizer, StepInfo, require, total_fro


class GradientDescent(Optimizer):
    name = "gd"

    def __init__(self, problem, lr: float = 1e-2):
        super().__init__(problem)
        require(lr > 0, "lr must be positive")
        self.lr = lr

    def step(self, params):
        loss, grads = self._eval(params)
        new = [p - self.lr * g for p, g in zip(params, grads)]
        gn = total_fro(grads)
        self.step_count += 1
        return new, StepInfo(loss=loss, grad_fro=gn, step_fro=self.lr * gn)


class Adam(Optimizer):
    """Adam with bias correction; first-moment and second-moment buffers
    are allocated lazily on the first step."""

    name = "adam"
    _decoupled_decay = False

    def __init__(self, problem, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8, weight_decay: float = 0.0):
        super().__init__(problem)
        require(lr > 0, "lr must be positive")
        require(0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0, "betas must lie in [0, 1)")
        require(eps > 0, "eps must be positive")
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.weight_decay = weight_decay
        self._m = None
        self._v = None

    def step(self, params):
        loss, grads = self._eval(params)
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self.step_count += 1
        t = self.step_count
        new = []
        moved = 0.0
        for i, (p, g) in enumerate(zip(params, grads)):
            if self.weight_decay and not self._decoupled_decay:
                g = g + self.weight_decay * p
            self._m[i] = self.beta1 * self._m[i] + (1.0 - self.beta1) * g
            self._v[i] = self.beta2 * self._v[i] + (1.0 - self.beta2) * g * g
            mhat = self._m[i] / (1.0 - self.beta1**t)
            vhat = self._v[i] / (1.0 - self.beta2**t)
            delta = self.lr * mhat / (np.sqrt(vhat) + self.eps)
            if self.weight_decay and self._decoupled_decay:
                delta = delta + self.lr * self.weight_decay * p
            new.append(p - delta)
            moved += float(np.linalg.norm(delta)) ** 2
        return new, StepInfo(loss=loss, grad_fro=total_fro(grads), step_fro=float(np.sqrt(moved)))


class AdamW(Adam):
    """Adam with decoupled weight decay: the decay shrinks the weights
    directly instead of being folded into the gradient."""

    name = "adamw"
    _decoupled_decay = True

    def __init__(self, problem, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8, weight_decay: float = 1e-2):
        super().__init__(problem, lr=lr, beta1=beta1, beta2=beta2, eps=eps,
                         weight_decay=weight_decay)
