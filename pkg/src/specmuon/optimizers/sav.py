"""Scalar auxiliary-variable gradient schemes.

Both optimizers carry a single scalar r tracking the energy root
E = sqrt(loss + kappa). The predictor contracts r by the gradient
magnitude, the parameters move along -h*(r_tilde/E)*G, and the squared
auxiliary r^2 decreases by at least the dissipation D = ||dTheta||^2/h
(up to the tolerance psi when relaxation is enabled). The relaxed
variant re-anchors r toward the energy root of the new iterate through
a convex weight chosen by ``rsav_xi``.
"""
from __future__ import annotations

import logging
import math

from ..errors import EnergyDomainError, InvalidArgumentError
from .base import Optimizer, StepInfo, require, total_fro

log = logging.getLogger(__name__)

# Below this the quadratic's leading coefficient is treated as zero
# (the predictor already sits on the energy root).
_DEGENERATE_A = 1e-14


def rsav_xi(r_tilde: float, r_prev: float, e_next: float, d: float, psi: float) -> float:
    """Smallest relaxation weight that keeps the auxiliary dissipative.

    The relaxed value r = xi*r_tilde + (1-xi)*e_next must satisfy
    r^2 <= r_tilde^2 + psi*d. Writing that as a quadratic in xi with
    a = (r_tilde - e_next)^2, b = 2*e_next*(r_tilde - e_next) and
    c = e_next^2 - r_tilde^2 - psi*d, the answer is the smaller root,
    floored at 0 and capped at 1. xi = 1 (keep the predictor) is always
    feasible, so the cap never breaks the inequality; the floor can,
    which is logged as an infeasible re-anchor (only reachable through
    the degenerate branches below).

    ``r_prev`` is the pre-step auxiliary; the rule itself does not
    depend on it, it is accepted so callers can pass the full step state.
    """
    del r_prev
    require(0.0 < psi < 1.0, "psi must lie in (0, 1)")
    require(d >= 0.0, "dissipation term must be non-negative")
    require(r_tilde > 0.0 and e_next > 0.0, "r_tilde and e_next must be positive")
    a = (r_tilde - e_next) ** 2
    b = 2.0 * e_next * (r_tilde - e_next)
    c = e_next**2 - r_tilde**2 - psi * d
    if a < _DEGENERATE_A:
        if c > 0.0:
            log.debug("rsav_xi: degenerate anchor, xi=0 infeasible by %.3e", c)
        return 0.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        # Exact arithmetic gives disc = 4*a*(r_tilde^2 + psi*d) >= 0;
        # only roundoff lands here.
        log.debug("rsav_xi: negative discriminant %.3e, falling back to xi=0", disc)
        return 0.0
    xi = (-b - math.sqrt(disc)) / (2.0 * a)
    return min(max(xi, 0.0), 1.0)


def _relax(r_tilde: float, r_prev: float, e_next: float, d: float, psi: float):
    """Apply rsav_xi, then guard the dissipation budget.

    The degenerate xi=0 branches can re-anchor r slightly above the
    admissible level when r_tilde is within sqrt(1e-14) of e_next; in
    that case fall back to the plain predictor, which always dissipates.
    """
    xi = rsav_xi(r_tilde, r_prev, e_next, d, psi)
    r_new = xi * r_tilde + (1.0 - xi) * e_next
    if r_new * r_new > r_tilde * r_tilde + psi * d:
        r_new = r_tilde
        xi = 1.0
    return r_new, xi


class Sav(Optimizer):
    """Plain scheme: no relaxation, r follows its own predictor."""

    name = "sav"

    def __init__(self, problem, lr: float = 1e-3, kappa: float = 1.0):
        super().__init__(problem)
        require(lr > 0, "lr must be positive")
        require(kappa > 0, "kappa must be positive")
        self.lr, self.kappa = lr, kappa
        self.r = None

    def _energy_root(self, loss: float) -> float:
        shifted = loss + self.kappa
        if shifted <= 0.0:
            raise EnergyDomainError(f"loss + kappa = {shifted} is not positive")
        return math.sqrt(shifted)

    def step(self, params):
        loss, grads = self._eval(params)
        e = self._energy_root(loss)
        if self.r is None:
            self.r = e
        gn = total_fro(grads)
        self.step_count += 1
        if gn == 0.0:
            return [p.copy() for p in params], StepInfo(
                loss=loss, grad_fro=0.0, step_fro=0.0,
                modified_energy=self.r**2, dissipation_lhs=0.0,
                dissipation_rhs=0.0, min_r=self.r)
        h = self.lr
        r_prev = self.r
        r_tilde = r_prev / (1.0 + 0.5 * h * gn**2 / e**2)
        scale = h * r_tilde / e
        new = [p - scale * g for p, g in zip(params, grads)]
        step_fro = scale * gn
        d = step_fro**2 / h
        r_new, rhs, xis = self._finish(r_tilde, r_prev, new, d)
        info = StepInfo(
            loss=loss, grad_fro=gn, step_fro=step_fro,
            modified_energy=r_new**2,
            dissipation_lhs=r_new**2 - r_prev**2,
            dissipation_rhs=rhs, min_r=r_new, xi_values=xis)
        self.r = r_new
        return new, info

    def _finish(self, r_tilde, r_prev, new_params, d):
        # For the plain scheme the exact identity gives
        # r_tilde^2 - r_prev^2 = -d - (r_tilde - r_prev)^2 <= -d.
        return r_tilde, -d, ()


class Rsav(Sav):
    """Relaxed scheme: r re-anchored toward the new energy root."""

    name = "rsav"

    def __init__(self, problem, lr: float = 1e-3, kappa: float = 1.0, psi: float = 0.95):
        super().__init__(problem, lr=lr, kappa=kappa)
        require(0.0 < psi < 1.0, "psi must lie in (0, 1)")
        self.psi = psi

    def _finish(self, r_tilde, r_prev, new_params, d):
        e_next = self._energy_root(self.problem.loss(new_params))
        r_new, xi = _relax(r_tilde, r_prev, e_next, d, self.psi)
        return r_new, -(1.0 - self.psi) * d, (xi,)
