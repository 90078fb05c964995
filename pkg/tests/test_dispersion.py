import numpy as np
import pytest

from capwhitham import (
    BondParams,
    K_eps,
    ScalingParams,
    k_crit,
    l_eps,
    m_beta,
    m_beta_derivs,
    nondimensionalize,
    phase_speed_min,
)
from capwhitham.errors import NoRootError, NonPositiveInputError, WrongRegimeError

# reference values computed once at 50-digit precision
M_BETA_01_AT_2 = 0.8214738620632258551146038
D1_BETA_02_AT_15 = -0.02489591883154497817226291
D2_BETA_01_AT_075 = -0.04573178996285960374210887
BETA_THIN_LAYER = 0.074413863404689092762


class TestBondParams:
    def test_gamma_definition(self):
        p = BondParams(0.1)
        assert p.gamma == (1.0 - 3.0 * 0.1) / 6.0
        assert p.weak and not p.strong

    def test_boundary_rejected(self):
        with pytest.raises(WrongRegimeError):
            BondParams(1.0 / 3.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(NonPositiveInputError):
            BondParams(0.0)
        with pytest.raises(NonPositiveInputError):
            BondParams(-0.2)

    def test_nondimensionalize_ratio(self):
        assert nondimensionalize(1.0, 1.0, 0.1).beta == 0.1

    def test_nondimensionalize_thin_layer(self):
        p = nondimensionalize(9.81, 0.01, 7.3e-5)
        assert p.beta == pytest.approx(BETA_THIN_LAYER, rel=1e-15)

    def test_nondimensionalize_boundary_case(self):
        # tau = g d^2 / 3 lands exactly on the regime boundary in floats
        with pytest.raises(WrongRegimeError):
            nondimensionalize(9.81, 1.0, 9.81 / 3.0)

    def test_nondimensionalize_requires_positive(self):
        with pytest.raises(NonPositiveInputError):
            nondimensionalize(9.81, 0.0, 0.1)


class TestSymbol:
    def test_value_at_zero(self):
        assert m_beta(BondParams(0.2), 0.0) == 1.0

    def test_reference_value(self):
        assert m_beta(BondParams(0.1), 2.0) == pytest.approx(M_BETA_01_AT_2, rel=1e-15)

    def test_even(self):
        p = BondParams(0.27)
        ks = np.linspace(0.0, 30.0, 301)
        assert np.array_equal(m_beta(p, ks), m_beta(p, -ks))

    def test_taylor_branch_continuity(self):
        # the series branch below 1e-4 matches the direct formula to 1e-14
        p = BondParams(0.2)
        for k in (0.9e-4, 1.1e-4):
            direct = np.sqrt((1.0 + p.beta * k**2) * np.tanh(k) / k)
            assert m_beta(p, k) == pytest.approx(direct, rel=1e-14)

    def test_high_frequency_growth(self):
        p = BondParams(0.3)
        k = 1e6
        assert m_beta(p, k) / np.sqrt(p.beta * k) == pytest.approx(1.0, abs=1e-3)

    def test_single_interior_minimum_weak(self):
        p = BondParams(0.1)
        ks = np.geomspace(1e-3, 1e3, 10_000)
        signs = np.sign(m_beta_derivs(p, ks, 1))
        assert int(np.sum(signs[:-1] != signs[1:])) == 1

    def test_quartic_remainder_window(self):
        p = BondParams(0.1)
        ks = np.geomspace(1e-3, 0.5, 200)
        eta = np.abs(m_beta(p, ks) - 1.0 + p.gamma * ks**2)
        slope = np.polyfit(np.log(ks), np.log(eta), 1)[0]
        assert slope == pytest.approx(4.0, abs=0.1)


class TestDerivatives:
    def test_order_validation(self):
        with pytest.raises(ValueError):
            m_beta_derivs(BondParams(0.1), 1.0, 3)

    def test_second_derivative_at_zero(self):
        assert m_beta_derivs(BondParams(0.1), 0.0, 2) == pytest.approx(-7.0 / 30.0, rel=1e-14)
        # gamma vanishes at the regime boundary; approach it from both sides
        assert m_beta_derivs(BondParams(1 / 3 + 1e-9), 0.0, 2) == pytest.approx(0.0, abs=1e-8)

    def test_first_derivative_at_zero(self):
        assert m_beta_derivs(BondParams(0.2), 0.0, 1) == 0.0

    def test_reference_values(self):
        assert m_beta_derivs(BondParams(0.2), 1.5, 1) == pytest.approx(
            D1_BETA_02_AT_15, rel=1e-13
        )
        assert m_beta_derivs(BondParams(0.1), 0.75, 2) == pytest.approx(
            D2_BETA_01_AT_075, rel=1e-13
        )

    def test_first_derivative_against_central_difference(self):
        p = BondParams(0.2)
        k, h = 1.5, 1e-5
        fd = (m_beta(p, k + h) - m_beta(p, k - h)) / (2 * h)
        assert m_beta_derivs(p, k, 1) == pytest.approx(fd, rel=1e-8)

    def test_random_samples_against_richardson(self, rng):
        from capwhitham.verify import richardson_d1, richardson_d2

        for _ in range(100):
            beta = float(rng.uniform(0.02, 3.0))
            k = float(rng.uniform(0.05, 12.0))
            p = BondParams(beta)
            d1 = richardson_d1(lambda x: m_beta(p, x), k)
            d2 = richardson_d2(lambda x: m_beta(p, x), k)
            assert m_beta_derivs(p, k, 1) == pytest.approx(d1, rel=1e-8, abs=1e-10)
            assert m_beta_derivs(p, k, 2) == pytest.approx(d2, rel=1e-8, abs=1e-8)


class TestRescaledSymbol:
    def test_vanishes_at_resonance(self, weak_params):
        s = ScalingParams.from_epsilon(weak_params, 0.2)
        assert abs(l_eps(weak_params, s, K_eps(weak_params, s))) <= 1e-10

    def test_even(self, weak_params):
        s = ScalingParams.from_epsilon(weak_params, 0.2)
        ks = np.linspace(0.1, 40.0, 57)
        assert np.array_equal(l_eps(weak_params, s, ks), l_eps(weak_params, s, -ks))

    def test_long_wave_limit(self):
        # l_eps -> -gamma (1 + K^2) as eps -> 0 at fixed K: the symbol of the
        # desingularizing operator -gamma (1 - d^2), including the +1 from
        # the nearly-critical speed shift
        p = BondParams(0.1)
        s = ScalingParams.from_epsilon(p, 1e-3)
        for K in (0.5, 1.0, 2.0):
            assert l_eps(p, s, K) == pytest.approx(-p.gamma * (1.0 + K**2), abs=1e-4)


class TestCriticalFrequency:
    def test_residual(self):
        p = BondParams(0.1)
        k = k_crit(p, 1.0)
        assert abs(m_beta(p, k) - 1.0) <= 1e-12
        assert k > phase_speed_min(p)[0]

    def test_supercritical_speed(self):
        p = BondParams(0.25)
        k = k_crit(p, 1.001)
        assert abs(m_beta(p, k) - 1.001) <= 1e-12

    def test_below_minimum_is_no_root(self):
        # oracle: scan the symbol minimum first, then classify the speed
        p = BondParams(0.1)
        k_min, m_min = phase_speed_min(p)
        ks = np.geomspace(1e-3, 1e3, 10_000)
        assert m_min == pytest.approx(float(np.min(m_beta(p, ks))), abs=1e-6)
        if 0.9 < m_min:
            with pytest.raises(NoRootError):
                k_crit(p, 0.9)
        else:
            assert abs(m_beta(p, k_crit(p, 0.9)) - 0.9) <= 1e-12
        with pytest.raises(NoRootError):
            k_crit(p, 0.99 * m_min)

    def test_wrong_regime(self):
        with pytest.raises(WrongRegimeError):
            k_crit(BondParams(0.5), 1.0)

    def test_small_bond_number_bracket(self):
        # the symbol minimum sits beyond k = 10 here; the bracket must widen
        p = BondParams(0.01)
        k = k_crit(p, 1.0)
        assert abs(m_beta(p, k) - 1.0) <= 1e-12


class TestScaledCriticalFrequency:
    def test_resonance(self, weak_params):
        s = ScalingParams.from_epsilon(weak_params, 0.15)
        assert abs(l_eps(weak_params, s, K_eps(weak_params, s))) <= 1e-10

    def test_limit_to_unit_speed_root(self):
        p = BondParams(0.1)
        k_target = k_crit(p, 1.0)
        gaps = []
        for eps in (0.2, 0.1, 0.05):
            s = ScalingParams.from_epsilon(p, eps)
            gaps.append(abs(K_eps(p, s) * eps - k_target))
        assert gaps[0] > gaps[1] > gaps[2]

    def test_inverse_epsilon_scaling(self):
        p = BondParams(0.1)
        for eps in (0.1, 0.05):
            big = K_eps(p, ScalingParams.from_epsilon(p, eps / 2))
            small = K_eps(p, ScalingParams.from_epsilon(p, eps))
            assert 1.8 <= big / small <= 2.2

    def test_scaling_params_speed(self):
        p = BondParams(0.1)
        s = ScalingParams.from_epsilon(p, 0.1)
        assert s.c == 1.0 + p.gamma * 0.01
