"""Per-iteration ledger of the theoretical guarantees.

Optimizer steps emit StepInfo; the harness wraps them into
TrajectoryRecords and the checkers here verify, per step, that the
squared-auxiliary energy dissipated within budget, that every auxiliary
stayed positive, and that the stepsize condition guaranteeing descent
held. ``estimate_rate`` fits the empirical linear rate of a trajectory
and compares it against the proven contraction factor.

Checkers return booleans instead of raising: a failed theorem is a
result to report, not an exception. All comparisons carry a 1e-9
absolute slack for accumulated double-precision error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, RateFitError
from .optimizers.base import StepInfo

SLACK = 1e-9

#: Column order of the trajectory CSV files written by the harness.
CSV_HEADER = (
    "iter", "loss", "grad_fro", "modified_energy", "dissipation_lhs",
    "dissipation_rhs", "step_fro", "min_r", "max_xi", "eta_condition_ok",
    "wall_ns",
)


@dataclass
class TrajectoryRecord:
    """One optimizer step, as logged by the harness."""

    iteration: int
    loss: float
    grad_fro: float
    step_fro: float
    modified_energy: float = math.nan
    dissipation_lhs: float = math.nan
    dissipation_rhs: float = math.nan
    min_r: float = math.nan
    xi_values: tuple[float, ...] = ()
    eta_condition_ok: bool | None = None
    wall_ns: int = 0
    c0: float = math.nan
    eta_star: float = math.nan
    stalled: bool = False

    @classmethod
    def from_step_info(cls, iteration: int, info: StepInfo, wall_ns: int = 0):
        return cls(
            iteration=iteration, loss=info.loss, grad_fro=info.grad_fro,
            step_fro=info.step_fro, modified_energy=info.modified_energy,
            dissipation_lhs=info.dissipation_lhs,
            dissipation_rhs=info.dissipation_rhs, min_r=info.min_r,
            xi_values=info.xi_values, eta_condition_ok=info.eta_condition_ok,
            wall_ns=wall_ns, c0=info.c0, eta_star=info.eta_star,
            stalled=info.stalled)

    @property
    def max_xi(self) -> float:
        return max(self.xi_values) if self.xi_values else math.nan


def check_mode_dissipation(r_prev, r_next, d_terms, psi: float) -> bool:
    """Did the squared auxiliaries decay within the tolerated budget?

    Verifies the aggregate sum(r_next^2) - sum(r_prev^2) against
    -(1-psi)*sum(d) and every mode individually against its own d term.
    Mode counts must agree; carried (inactive) modes contribute d = 0.
    """
    r_prev = np.asarray(r_prev, dtype=np.float64).ravel()
    r_next = np.asarray(r_next, dtype=np.float64).ravel()
    d = np.asarray(d_terms, dtype=np.float64).ravel()
    if not (r_prev.shape == r_next.shape == d.shape):
        raise InvalidArgumentError("mode counts of r_prev, r_next, d_terms must agree")
    if not 0.0 < psi < 1.0:
        raise InvalidArgumentError("psi must lie in (0, 1)")
    budget = -(1.0 - psi) * d
    per_mode = r_next**2 - r_prev**2 <= budget + SLACK
    aggregate = float(np.sum(r_next**2 - r_prev**2)) <= float(np.sum(budget)) + SLACK
    return bool(aggregate and np.all(per_mode))


def check_positivity(r_values) -> bool:
    """All auxiliary variables strictly positive."""
    r = np.asarray(r_values, dtype=np.float64).ravel()
    return bool(r.size == 0 or np.all(r > 0.0))


def check_eta_condition(sigma: float, e_k: float, r_tilde: float, eta: float,
                        lipschitz: float | None) -> bool | None:
    """Local stepsize condition under which one-step descent is proven.

    Returns None when the smoothness constant is unknown (condition
    indeterminate). eta = 0 passes vacuously.
    """
    if lipschitz is None:
        return None
    if lipschitz <= 0.0:
        raise InvalidArgumentError("lipschitz constant must be positive")
    if eta == 0.0:
        return True
    return eta <= 2.0 * sigma * e_k / (lipschitz * r_tilde)


@dataclass
class RateEstimate:
    """Empirical decay rate of f - f* against the proven bound.

    ``fitted_contraction`` is exp(slope) of a least-squares line through
    log(f - f*); the per-step alignment factors c0 and stepsize ratios
    tau come straight from the records. The theoretical contraction uses
    the window-minimum c0 and tau, which only weakens the bound, so a
    trajectory that beats it beats every per-step bound too.
    """

    fitted_contraction: float
    theoretical_rho: float
    c0_series: list[float] = field(repr=False)
    tau: float = math.nan
    n_tau_out_of_range: int = 0

    @property
    def bound_satisfied(self) -> bool:
        return self.fitted_contraction <= 1.0 - self.theoretical_rho


def estimate_rate(records: list[TrajectoryRecord], f_star: float, lipschitz: float,
                  pl_mu: float, kappa: float, lr: float) -> RateEstimate:
    """Fit the linear rate of a trajectory and the matching proven bound.

    The bound is rho = 2*tau*(2-tau) * E_lower * c0 * mu / L with
    E_lower = sqrt(f* + kappa), evaluated at the window-minimum c0 and
    tau = lr / eta_star. Raises when the window has fewer than 20
    usable points or f - f* is not positive throughout.
    """
    if len(records) < 20:
        raise RateFitError(f"need at least 20 records to fit a rate, got {len(records)}")
    gaps = np.array([r.loss - f_star for r in records], dtype=np.float64)
    if np.any(gaps <= 1e-14):
        raise RateFitError("f - f_star must stay positive over the fit window")
    slope = np.polyfit(np.arange(len(gaps)), np.log(gaps), 1)[0]
    fitted = float(np.exp(slope))

    c0s = [r.c0 for r in records]
    taus = [lr / r.eta_star for r in records]
    if not all(map(math.isfinite, c0s)) or not all(map(math.isfinite, taus)):
        raise RateFitError("records lack alignment or stepsize data (non-energy run?)")
    out_of_range = sum(1 for t in taus if not 0.0 < t <= 2.0)
    tau = min(taus)
    e_lower = math.sqrt(f_star + kappa)
    rho = 2.0 * tau * (2.0 - tau) * e_lower * min(c0s) * pl_mu / lipschitz
    return RateEstimate(fitted_contraction=fitted, theoretical_rho=rho,
                        c0_series=c0s, tau=tau, n_tau_out_of_range=out_of_range)
