"""Shared stepping interface for all optimizers.

An optimizer is bound to a problem at construction and advances a list
of parameter blocks one step at a time. ``step`` returns fresh arrays
(inputs are never mutated) together with a StepInfo describing what the
step did; energy-based optimizers fill the auxiliary-variable fields,
plain baselines leave them at NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgumentError, NonFiniteDataError


@dataclass
class StepInfo:
    """Per-step ledger entries, one record per optimizer step.

    ``loss`` and ``grad_fro`` describe the pre-step iterate. Auxiliary
    fields track the squared-auxiliary energy M = sum(r_i^2), its
    one-step change (lhs) against the guaranteed budget (rhs), the
    smallest auxiliary value, and the relaxation weights applied.
    """

    loss: float
    grad_fro: float
    step_fro: float
    modified_energy: float = math.nan
    dissipation_lhs: float = math.nan
    dissipation_rhs: float = math.nan
    min_r: float = math.nan
    xi_values: tuple[float, ...] = ()
    eta_condition_ok: bool | None = None
    c0: float = math.nan
    eta_star: float = math.nan
    stalled: bool = False

    @property
    def max_xi(self) -> float:
        return max(self.xi_values) if self.xi_values else math.nan


class Optimizer:
    """Base class: holds the problem, validates gradients, counts steps."""

    name = "base"

    def __init__(self, problem):
        self.problem = problem
        self.step_count = 0

    def _eval(self, params):
        loss = self.problem.loss(params)
        grads = self.problem.grad(params)
        for g in grads:
            if not np.all(np.isfinite(g)):
                raise NonFiniteDataError(f"{self.name}: gradient contains NaN or Inf")
        if not math.isfinite(loss):
            raise NonFiniteDataError(f"{self.name}: loss is not finite")
        return loss, grads

    def step(self, params: list[np.ndarray]) -> tuple[list[np.ndarray], StepInfo]:
        raise NotImplementedError


def total_fro(mats) -> float:
    """Frobenius norm of a list of blocks viewed as one stacked vector."""
    return math.sqrt(sum(float(np.linalg.norm(m)) ** 2 for m in mats))


def require(cond: bool, message: str):
    if not cond:
        raise InvalidArgumentError(message)
