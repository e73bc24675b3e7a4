"""Theorem checkers and the rate estimator.

Every checker gets at least one constructed violation: a checker that
cannot fail verifies nothing.
"""
import math

import numpy as np
import pytest

from specmuon.diagnostics import (
    CSV_HEADER,
    RateEstimate,
    TrajectoryRecord,
    check_eta_condition,
    check_mode_dissipation,
    check_positivity,
    estimate_rate,
)
from specmuon.errors import InvalidArgumentError, RateFitError
from specmuon.optimizers.base import StepInfo


def _geometric_records(ratio, n, f_star=0.0, c0=1.0, eta_star=1.0):
    recs = []
    for k in range(n):
        recs.append(TrajectoryRecord(
            iteration=k, loss=f_star + ratio**k, grad_fro=1.0, step_fro=0.1,
            c0=c0, eta_star=eta_star))
    return recs


class TestModeDissipation:
    def test_exact_budget_passes(self):
        # r^2 drop of exactly (1 - psi) * d per mode.
        psi, d = 0.95, np.array([0.4, 0.1])
        r_prev = np.array([1.0, 0.5])
        r_next = np.sqrt(r_prev**2 - (1 - psi) * d)
        assert check_mode_dissipation(r_prev, r_next, d, psi)

    def test_aggregate_ok_but_one_mode_violates(self):
        # Total decay is fine; mode 1 grew beyond its own budget.
        r_prev = np.array([1.0, 0.5])
        r_next = np.array([0.7, 0.6])
        assert not check_mode_dissipation(r_prev, r_next, [0.0, 0.0], 0.5)

    def test_growth_rejected(self):
        assert not check_mode_dissipation([1.0], [1.1], [0.0], 0.9)

    def test_slack_absorbs_roundoff(self):
        assert check_mode_dissipation([1.0], [1.0 + 1e-13], [0.0], 0.9)

    def test_shape_mismatch_raises(self):
        with pytest.raises(InvalidArgumentError):
            check_mode_dissipation([1.0, 2.0], [1.0], [0.0], 0.5)

    def test_bad_psi_raises(self):
        with pytest.raises(InvalidArgumentError):
            check_mode_dissipation([1.0], [1.0], [0.0], 1.0)


class TestPositivity:
    def test_positive(self):
        assert check_positivity([0.3, 1e-12, 5.0])

    def test_zero_fails(self):
        assert not check_positivity([0.3, 0.0])

    def test_negative_fails(self):
        assert not check_positivity([-1e-16])

    def test_empty_is_vacuous(self):
        assert check_positivity([])


class TestEtaCondition:
    def test_threshold_value(self):
        # sigma=2, E=1, r_tilde=1, L=4 gives the threshold eta <= 1.
        assert check_eta_condition(2.0, 1.0, 1.0, 0.999, 4.0)
        assert check_eta_condition(2.0, 1.0, 1.0, 1.0, 4.0)
        assert not check_eta_condition(2.0, 1.0, 1.0, 1.001, 4.0)

    def test_zero_eta_vacuous(self):
        assert check_eta_condition(1e-9, 1e-9, 1e9, 0.0, 1e9)

    def test_unknown_lipschitz_is_indeterminate(self):
        assert check_eta_condition(2.0, 1.0, 1.0, 0.5, None) is None

    def test_nonpositive_lipschitz_raises(self):
        with pytest.raises(InvalidArgumentError):
            check_eta_condition(1.0, 1.0, 1.0, 0.1, 0.0)


class TestTrajectoryRecord:
    def test_from_step_info_copies_fields(self):
        info = StepInfo(loss=2.0, grad_fro=3.0, step_fro=0.5,
                        modified_energy=1.5, dissipation_lhs=-0.1,
                        dissipation_rhs=-0.05, min_r=0.9,
                        xi_values=(0.2, 0.7), eta_condition_ok=True,
                        c0=0.8, eta_star=0.01)
        rec = TrajectoryRecord.from_step_info(4, info, wall_ns=123)
        assert rec.iteration == 4
        assert rec.loss == 2.0
        assert rec.max_xi == 0.7
        assert rec.eta_condition_ok is True
        assert rec.wall_ns == 123
        assert rec.c0 == 0.8

    def test_max_xi_empty_is_nan(self):
        rec = TrajectoryRecord(iteration=0, loss=1.0, grad_fro=1.0, step_fro=0.0)
        assert math.isnan(rec.max_xi)

    def test_csv_header_order(self):
        assert CSV_HEADER == (
            "iter", "loss", "grad_fro", "modified_energy", "dissipation_lhs",
            "dissipation_rhs", "step_fro", "min_r", "max_xi",
            "eta_condition_ok", "wall_ns")


class TestEstimateRate:
    def test_exact_geometric_sequence(self):
        est = estimate_rate(_geometric_records(0.9, 50), f_star=0.0,
                            lipschitz=1.0, pl_mu=1.0, kappa=1.0, lr=1.0)
        assert abs(est.fitted_contraction - 0.9) < 1e-6

    def test_theoretical_rho_formula(self):
        # tau = lr/eta_star = 0.5, c0 = 0.8, E_lower = sqrt(0 + 4) = 2,
        # mu/L = 0.25: rho = 2*0.5*1.5*2*0.8*0.25 = 0.6.
        est = estimate_rate(_geometric_records(0.5, 30, c0=0.8, eta_star=2.0),
                            f_star=0.0, lipschitz=4.0, pl_mu=1.0, kappa=4.0,
                            lr=1.0)
        assert est.tau == 0.5
        assert abs(est.theoretical_rho - 0.6) < 1e-12

    def test_bound_comparison_both_ways(self):
        fast = RateEstimate(fitted_contraction=0.3, theoretical_rho=0.6,
                            c0_series=[1.0])
        slow = RateEstimate(fitted_contraction=0.5, theoretical_rho=0.6,
                            c0_series=[1.0])
        assert fast.bound_satisfied
        assert not slow.bound_satisfied

    def test_short_window_raises(self):
        with pytest.raises(RateFitError):
            estimate_rate(_geometric_records(0.9, 19), 0.0, 1.0, 1.0, 1.0, 1.0)

    def test_nonpositive_gap_raises(self):
        recs = _geometric_records(0.9, 25)
        recs[10].loss = 0.0
        with pytest.raises(RateFitError):
            estimate_rate(recs, 0.0, 1.0, 1.0, 1.0, 1.0)

    def test_missing_energy_fields_raise(self):
        recs = _geometric_records(0.9, 25, c0=math.nan)
        with pytest.raises(RateFitError):
            estimate_rate(recs, 0.0, 1.0, 1.0, 1.0, 1.0)

    def test_tau_out_of_range_counted(self):
        # lr/eta_star = 2.5 on every step: outside (0, 2].
        est = estimate_rate(_geometric_records(0.9, 20, eta_star=0.4),
                            f_star=0.0, lipschitz=1.0, pl_mu=0.01, kappa=1.0,
                            lr=1.0)
        assert est.n_tau_out_of_range == 20

    def test_window_minimum_tau_and_c0(self):
        recs = _geometric_records(0.9, 30, c0=0.9, eta_star=1.0)
        recs[7].c0 = 0.4
        recs[12].eta_star = 10.0  # tau = 0.1 at this step
        est = estimate_rate(recs, 0.0, lipschitz=1.0, pl_mu=1.0, kappa=1.0,
                            lr=1.0)
        assert est.tau == pytest.approx(0.1)
        # rho = 2*0.1*1.9*1.0*0.4*1.0 = 0.152
        assert abs(est.theoretical_rho - 0.152) < 1e-12

    def test_noisy_geometric_still_close(self):
        rng = np.random.default_rng(3)
        recs = _geometric_records(0.8, 60)
        for r in recs:
            r.loss *= float(np.exp(rng.normal(0.0, 0.01)))
        est = estimate_rate(recs, 0.0, 1.0, 1.0, 1.0, 1.0)
        assert abs(est.fitted_contraction - 0.8) < 0.01
