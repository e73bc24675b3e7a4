"""Orthogonalized-momentum optimizer.

Each block keeps a momentum buffer B <- mu*B + G. The applied direction
is the polar factor of B, approximated by Newton-Schulz iterations on
the Frobenius-normalized buffer, so every retained spectral direction
moves with unit magnitude regardless of its singular value.
"""
from __future__ import annotations

import numpy as np

from ..linalg import frobenius_norm, newton_schulz_orthogonalize
from .base import Optimizer, StepInfo, require, total_fro


class Muon(Optimizer):
    name = "muon"

    def __init__(self, problem, lr: float = 0.02, momentum: float = 0.95,
                 ns_iters: int = 5, eps: float = 1e-8):
        super().__init__(problem)
        require(lr > 0, "lr must be positive")
        require(0.0 <= momentum < 1.0, "momentum must lie in [0, 1)")
        require(ns_iters >= 1, "ns_iters must be >= 1")
        self.lr, self.momentum, self.ns_iters, self.eps = lr, momentum, ns_iters, eps
        self._b = None

    def step(self, params):
        loss, grads = self._eval(params)
        if self._b is None:
            self._b = [np.zeros_like(p) for p in params]
        new = []
        moved = 0.0
        for i, (p, g) in enumerate(zip(params, grads)):
            self._b[i] = self.momentum * self._b[i] + g
            bn = frobenius_norm(self._b[i])
            if bn == 0.0:
                # Zero buffer carries no direction; leave the block alone.
                new.append(p.copy())
                continue
            direction = newton_schulz_orthogonalize(self._b[i] / (bn + self.eps),
                                                    iters=self.ns_iters)
            delta = self.lr * direction
            new.append(p - delta)
            moved += float(np.linalg.norm(delta)) ** 2
        self.step_count += 1
        return new, StepInfo(loss=loss, grad_fro=total_fro(grads), step_fro=float(np.sqrt(moved)))
