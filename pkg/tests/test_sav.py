"""Scalar auxiliary-variable schemes and the relaxation-weight rule."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specmuon.errors import EnergyDomainError, InvalidArgumentError
from specmuon.optimizers import Rsav, Sav, rsav_xi
from specmuon.problems import LeastSquaresInstance, SpectrumQuadratic


class _ZeroGrad:
    name = "flat"
    fstar = 0.0
    param_shapes = [(1, 1)]

    def loss(self, params):
        return 0.5

    def grad(self, params):
        return [np.zeros((1, 1))]


def _grid_scan_xi(r_tilde, e_next, d, psi, points=100_000):
    # Independent oracle: smallest xi on a uniform grid whose relaxed
    # value keeps r^2 within the dissipation budget.
    budget = r_tilde**2 + psi * d
    for k in range(points + 1):
        xi = k / points
        r = xi * r_tilde + (1.0 - xi) * e_next
        if r * r <= budget:
            return xi
    return None


class TestRsavXi:
    def test_equal_anchor_is_degenerate(self):
        assert rsav_xi(1.5, 1.5, 1.5, 0.3, 0.95) == 0.0

    def test_hand_value(self):
        # r_tilde=1, e_next=2, d=1, psi=0.95:
        # a=1, b=-4, c=4-1-0.95=2.05, disc=7.8,
        # xi=(4-sqrt(7.8))/2 = 0.6035759956231057
        xi = rsav_xi(1.0, 1.2, 2.0, 1.0, 0.95)
        assert xi == pytest.approx(0.6035759956231057, abs=1e-15)

    def test_loss_dropped_a_lot_means_full_reanchor(self):
        # e_next far below r_tilde: xi=0 re-anchors to the energy root.
        assert rsav_xi(2.0, 2.0, 0.5, 0.1, 0.95) == 0.0

    def test_result_satisfies_the_budget(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            r_tilde = float(rng.uniform(0.05, 5.0))
            e_next = float(rng.uniform(0.05, 5.0))
            d = float(rng.uniform(0.0, 4.0))
            xi = rsav_xi(r_tilde, r_tilde, e_next, d, 0.95)
            if (r_tilde - e_next) ** 2 < 1e-14:
                continue  # degenerate branch may be infeasible by design
            r = xi * r_tilde + (1.0 - xi) * e_next
            assert r * r <= r_tilde**2 + 0.95 * d + 1e-10

    def test_matches_grid_scan(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            r_tilde = float(rng.uniform(0.1, 3.0))
            e_next = float(rng.uniform(0.1, 3.0))
            d = float(rng.uniform(0.0, 2.0))
            if (r_tilde - e_next) ** 2 < 1e-10:
                continue
            closed = rsav_xi(r_tilde, r_tilde, e_next, d, 0.95)
            grid = _grid_scan_xi(r_tilde, e_next, d, 0.95)
            assert grid is not None
            assert abs(closed - grid) <= 2e-5

    def test_preconditions(self):
        with pytest.raises(InvalidArgumentError):
            rsav_xi(1.0, 1.0, 1.0, 0.1, 1.5)
        with pytest.raises(InvalidArgumentError):
            rsav_xi(1.0, 1.0, 1.0, -0.1, 0.9)
        with pytest.raises(InvalidArgumentError):
            rsav_xi(0.0, 1.0, 1.0, 0.1, 0.9)
        with pytest.raises(InvalidArgumentError):
            rsav_xi(1.0, 1.0, -1.0, 0.1, 0.9)

    @given(st.floats(min_value=0.05, max_value=4.0),
           st.floats(min_value=0.05, max_value=4.0),
           st.floats(min_value=0.0, max_value=3.0),
           st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=200, deadline=None)
    def test_always_in_unit_interval(self, r_tilde, e_next, d, psi):
        xi = rsav_xi(r_tilde, r_tilde, e_next, d, psi)
        assert 0.0 <= xi <= 1.0


def _scalar_quadratic():
    return SpectrumQuadratic([1.0])


class TestSav:
    def test_hand_trace(self):
        # f=theta^2/2 at theta=1, kappa=1, h=0.1: E=sqrt(1.5),
        # r_tilde = sqrt(1.5)/(1+0.05/1.5) = 30*sqrt(1.5)/31,
        # theta1 = 1 - 0.1*(r_tilde/E) = 28/31.
        opt = Sav(_scalar_quadratic(), lr=0.1, kappa=1.0)
        new, info = opt.step([np.array([[1.0]])])
        assert opt.r == pytest.approx(30.0 * math.sqrt(1.5) / 31.0, abs=1e-12)
        assert new[0][0, 0] == pytest.approx(28.0 / 31.0, abs=1e-12)
        assert info.modified_energy == pytest.approx(opt.r**2)

    def test_zero_gradient_noop(self):
        opt = Sav(_ZeroGrad(), lr=0.1)
        p0 = [np.array([[2.0]])]
        new, info = opt.step(p0)
        r_first = opt.r
        new2, _ = opt.step(new)
        np.testing.assert_array_equal(new2[0], p0[0])
        assert opt.r == r_first
        assert info.step_fro == 0.0

    def test_predictor_contracts_r(self):
        prob = LeastSquaresInstance(seed=1)
        opt = Sav(prob, lr=1e-3)
        params = prob.init(np.random.default_rng(3))
        rs = []
        for _ in range(50):
            params, info = opt.step(params)
            rs.append(opt.r)
            assert opt.r > 0
        assert all(b <= a for a, b in zip(rs, rs[1:]))

    def test_dissipation_identity(self):
        # r_tilde^2 - r^2 = -D - (r_tilde - r)^2 exactly.
        prob = LeastSquaresInstance(seed=2)
        opt = Sav(prob, lr=1e-3)
        params = prob.init(np.random.default_rng(4))
        for _ in range(30):
            r_prev = opt.r
            params, info = opt.step(params)
            if r_prev is None:
                r_prev = math.sqrt(info.loss + opt.kappa)
            d = info.step_fro**2 / opt.lr
            lhs = opt.r**2 - r_prev**2
            assert lhs == pytest.approx(-d - (opt.r - r_prev) ** 2, rel=1e-9, abs=1e-12)
            assert lhs <= -d + 1e-9

    def test_energy_domain_guard(self):
        class Negative:
            name = "neg"
            fstar = None
            param_shapes = [(1, 1)]

            def loss(self, params):
                return -2.0

            def grad(self, params):
                return [np.ones((1, 1))]

        with pytest.raises(EnergyDomainError):
            Sav(Negative(), lr=0.1, kappa=1.0).step([np.zeros((1, 1))])


class TestRsav:
    def test_relaxed_value_stays_between_anchors(self):
        prob = LeastSquaresInstance(seed=3)
        opt = Rsav(prob, lr=1e-3)
        params = prob.init(np.random.default_rng(5))
        for _ in range(40):
            loss, grads = prob.loss(params), prob.grad(params)
            e = math.sqrt(loss + opt.kappa)
            r_prev = opt.r if opt.r is not None else e
            gn2 = sum(float(np.linalg.norm(g)) ** 2 for g in grads)
            r_tilde = r_prev / (1.0 + 0.5 * opt.lr * gn2 / e**2)
            params, info = opt.step(params)
            e_next = math.sqrt(prob.loss(params) + opt.kappa)
            lo, hi = sorted((r_tilde, e_next))
            assert lo - 1e-12 <= opt.r <= hi + 1e-12

    def test_dissipation_inequality_small_instance(self):
        # 4x4 regression, 100 steps: the relaxed energy never rises
        # faster than the tolerated budget.
        prob = LeastSquaresInstance(seed=7, m=4, n=4, n_samples=16)
        opt = Rsav(prob, lr=5e-3, psi=0.95)
        params = prob.init(np.random.default_rng(11))
        for _ in range(100):
            params, info = opt.step(params)
            assert info.dissipation_lhs <= info.dissipation_rhs + 1e-9
            assert info.min_r > 0
            assert 0.0 <= info.max_xi <= 1.0

    def test_energy_monotone_even_with_large_step(self):
        # Stability of the loss is not required for r^2 to decay.
        prob = LeastSquaresInstance(seed=9)
        opt = Rsav(prob, lr=0.5)  # far beyond 2/L
        params = prob.init(np.random.default_rng(13))
        last = None
        for _ in range(50):
            params, info = opt.step(params)
            if last is not None:
                assert info.modified_energy <= last + 1e-9
            last = info.modified_energy
