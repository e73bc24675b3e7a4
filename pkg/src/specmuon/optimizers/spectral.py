"""Mode-wise auxiliary-variable optimizers in the gradient's singular basis.

Two variants share the idea of attaching one auxiliary scalar r_i to
each leading singular direction Q_i = u_i v_i^T of the gradient:

* ``SpecMuonTheory`` is the bare scheme the dissipation, positivity,
  descent and rate guarantees are proved for: no momentum, unnormalized
  gradient, energy root E = sqrt(loss + kappa) with kappa > 0, and the
  same quadratic relaxation rule as the scalar relaxed scheme applied
  per mode against the new iterate's energy root.

* ``SpecMuonPractical`` is the implementation-oriented variant: the
  gradient is Frobenius-normalized, the top-k_r directions get the
  auxiliary treatment with sqrt(loss) as the energy (kappa = 0), the
  remaining spectral mass is applied raw, and the whole update passes
  through a momentum buffer. No theorem is claimed for it.

Auxiliary state is indexed by descending-singular-value rank, not by a
tracked subspace; the basis is recomputed from each step's gradient.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import EnergyDomainError
from ..linalg import frobenius_inner, frobenius_norm, thin_svd
from .base import Optimizer, StepInfo, require, total_fro
from .sav import _relax

log = logging.getLogger(__name__)

_SIGMA_FLOOR = 1e-14


class SpecMuonTheory(Optimizer):
    """Per-mode relaxed auxiliary scheme; the form the theorems cover."""

    name = "specmuon-theory"

    def __init__(self, problem, lr: float = 1e-3, k_r: int = 6, kappa: float = 1.0,
                 psi: float = 0.95, eps: float = 1e-8, predictor_power: int = 2):
        super().__init__(problem)
        require(lr > 0, "lr must be positive")
        require(k_r >= 1, "k_r must be >= 1")
        require(kappa > 0, "kappa must be positive in theory mode")
        require(0.0 < psi < 1.0, "psi must lie in (0, 1)")
        require(eps > 0, "eps must be positive")
        require(predictor_power in (1, 2), "predictor_power must be 1 or 2")
        self.lr, self.k_r, self.kappa = lr, k_r, kappa
        self.psi, self.eps, self.predictor_power = psi, eps, predictor_power
        self._r = None  # one length-k_r array per block

    def _energy_root(self, loss: float) -> float:
        shifted = loss + self.kappa
        if shifted <= 0.0:
            raise EnergyDomainError(f"loss + kappa = {shifted} is not positive")
        return math.sqrt(shifted)

    @property
    def r_modes(self) -> list[np.ndarray]:
        """Copies of the per-block auxiliary vectors (length k_r each)."""
        return [r.copy() for r in (self._r or [])]

    def _predictor(self, r_i: float, sigma: float, e: float) -> float:
        # Mode step h_i = lr/sigma and mode magnitude g_i = sigma/e give
        # (h_i/2) g_i^2 = (lr/2) sigma/e^2; the first-power variant uses
        # (h_i/2) g_i = lr/(2 e).
        if self.predictor_power == 2:
            return r_i / (1.0 + 0.5 * self.lr * sigma / e**2)
        return r_i / (1.0 + 0.5 * self.lr / e)

    def step(self, params):
        loss, grads = self._eval(params)
        e = self._energy_root(loss)
        if self._r is None:
            self._r = [np.full(self.k_r, e) for _ in params]
        m_prev = sum(float(r @ r) for r in self._r)
        self.step_count += 1

        new_params = []
        pending = []  # (block, mode, sigma, r_tilde, d_i)
        step_sq = 0.0
        sum_rs = sum_rr = sum_ss = 0.0
        for b, (p, g) in enumerate(zip(params, grads)):
            k_eff = min(self.k_r, min(p.shape))
            fac = thin_svd(g, k_eff)
            if fac.rank == 0 or fac.sigma[0] <= _SIGMA_FLOOR:
                new_params.append(p.copy())
                continue
            floor = max(_SIGMA_FLOOR, self.eps * fac.sigma[0])
            delta = np.zeros_like(p)
            active = []
            for i in range(fac.rank):
                sigma = fac.sigma[i]
                if sigma <= floor:
                    continue  # r_i carried unchanged this step
                r_tilde = self._predictor(self._r[b][i], sigma, e)
                delta -= (self.lr / e) * r_tilde * fac.mode(i)
                active.append((i, sigma, r_tilde))
            new_params.append(p + delta)
            step_sq += float(np.linalg.norm(delta)) ** 2
            for i, sigma, r_tilde in active:
                # Dissipation from the aggregate increment; orthonormal
                # modes make this equal -lr*r_tilde/e up to roundoff.
                proj = frobenius_inner(delta, fac.mode(i))
                d_i = proj**2 / (self.lr / sigma)
                pending.append((b, i, sigma, r_tilde, d_i))
                sum_rs += r_tilde * sigma
                sum_rr += r_tilde**2
                sum_ss += sigma**2

        if not pending:
            log.debug("%s: all singular values at the floor, step stalled", self.name)
            info = StepInfo(loss=loss, grad_fro=total_fro(grads), step_fro=0.0,
                            modified_energy=m_prev, dissipation_lhs=0.0,
                            dissipation_rhs=0.0,
                            min_r=min(float(r.min()) for r in self._r),
                            stalled=True)
            return [p.copy() for p in params], info

        e_next = self._energy_root(self.problem.loss(new_params))
        xis = []
        d_sum = 0.0
        for b, i, sigma, r_tilde, d_i in pending:
            r_new, xi = _relax(r_tilde, float(self._r[b][i]), e_next, d_i, self.psi)
            self._r[b][i] = r_new
            xis.append(xi)
            d_sum += d_i

        m_new = sum(float(r @ r) for r in self._r)
        lipschitz = getattr(self.problem, "lipschitz", None)
        eta_ok = None
        eta_star = math.nan
        if lipschitz is not None:
            eta_ok = all(self.lr <= 2.0 * sigma * e / (lipschitz * r_tilde)
                         for _, _, sigma, r_tilde, _ in pending)
            eta_star = e * sum_rs / (lipschitz * sum_rr)
        info = StepInfo(
            loss=loss, grad_fro=total_fro(grads), step_fro=math.sqrt(step_sq),
            modified_energy=m_new, dissipation_lhs=m_new - m_prev,
            dissipation_rhs=-(1.0 - self.psi) * d_sum,
            min_r=min(float(r.min()) for r in self._r),
            xi_values=tuple(xis), eta_condition_ok=eta_ok,
            c0=sum_rs**2 / (sum_rr * sum_ss), eta_star=eta_star)
        return new_params, info


class SpecMuonPractical(Optimizer):
    """Normalized, momentum-buffered variant used for benchmarking."""

    name = "specmuon"

    def __init__(self, problem, lr: float = 3e-3, momentum: float = 0.9, k_r: int = 6,
                 sav_eta: float = 0.2, eps: float = 1e-8, predictor_power: int = 1):
        super().__init__(problem)
        require(lr > 0, "lr must be positive")
        require(0.0 <= momentum < 1.0, "momentum must lie in [0, 1)")
        require(k_r >= 0, "k_r must be >= 0")
        require(0.0 < sav_eta <= 1.0, "sav_eta must lie in (0, 1]")
        require(eps > 0, "eps must be positive")
        require(predictor_power in (1, 2), "predictor_power must be 1 or 2")
        self.lr, self.momentum, self.k_r = lr, momentum, k_r
        self.sav_eta, self.eps, self.predictor_power = sav_eta, eps, predictor_power
        self._r = None
        self._b = None

    @property
    def r_modes(self) -> list[np.ndarray]:
        return [r.copy() for r in (self._r or [])]

    def step(self, params):
        loss, grads = self._eval(params)
        if loss < 0.0:
            raise EnergyDomainError("practical mode assumes a non-negative loss")
        sq = math.sqrt(loss)
        if self._r is None:
            self._r = [np.full(self.k_r, sq) for _ in params]
            self._b = [np.zeros_like(p) for p in params]
        m_prev = sum(float(r @ r) for r in self._r)
        self.step_count += 1

        new_params = []
        chis = []
        step_sq = 0.0
        for b, (p, g) in enumerate(zip(params, grads)):
            gn = frobenius_norm(g)
            ghat = g / (gn + self.eps)
            k_eff = min(self.k_r, min(p.shape))
            if k_eff == 0:
                # Empty top-k loop: the residual is the whole normalized
                # gradient, taken verbatim so the k_r=0 reduction to a
                # normalized-gradient step is exact.
                o = ghat
            else:
                fac = thin_svd(ghat, k_eff)
                o = np.zeros_like(p)
                top = np.zeros_like(p)
                if fac.rank > 0:
                    floor = max(_SIGMA_FLOOR, self.eps * fac.sigma[0])
                    r_vec = self._r[b]
                    for j in range(fac.rank):
                        s = fac.sigma[j]
                        if s <= floor:
                            continue  # left inside the residual
                        q = fac.mode(j)
                        eta_j = self.lr / (s + self.eps)
                        dg_norm = s / (sq + self.eps)
                        r_prev = float(r_vec[j])
                        r_new = r_prev / (1.0 + 0.5 * eta_j * dg_norm**self.predictor_power)
                        o += (r_new / (sq + self.eps)) * q
                        top += s * q
                        t_val = ((1.0 - self.sav_eta) * r_new**2
                                 + self.sav_eta * r_prev**2
                                 + (1.0 - self.sav_eta) * (r_new - r_prev) ** 2)
                        chi = (sq - math.sqrt(t_val)) / (sq - r_new + self.eps)
                        clamp = min(max(chi, 0.0), 1.0)
                        r_vec[j] = clamp * r_new + (1.0 - clamp) * sq
                        chis.append(clamp)
                # Remaining spectral mass, raw (not orthogonalized).
                o += ghat - top
            buf = o if self.momentum == 0.0 else self.momentum * self._b[b] + o
            self._b[b] = buf
            delta = self.lr * buf
            new_params.append(p - delta)
            step_sq += float(np.linalg.norm(delta)) ** 2

        m_new = sum(float(r @ r) for r in self._r)
        info = StepInfo(
            loss=loss, grad_fro=total_fro(grads), step_fro=math.sqrt(step_sq),
            modified_energy=m_new, dissipation_lhs=m_new - m_prev,
            min_r=min(float(r.min()) for r in self._r) if self.k_r else math.nan,
            xi_values=tuple(chis))
        return new_params, info
