import numpy as np
import pytest

from capwhitham import (
    BondParams,
    Grid,
    ScalingParams,
    j0,
    kdv_residual,
    s0_apply,
    s0_solve,
    sigma_beta,
    sigma_hat,
)
from capwhitham.errors import BoundaryNotDecayedError
from capwhitham.verify import random_even_field


class TestCore:
    def test_center_value(self, grid):
        prof = sigma_beta(BondParams(0.1), grid)
        assert prof.field.values[grid.n_points // 2] == pytest.approx(0.175, rel=1e-14)

    def test_sign_by_regime(self, grid):
        assert np.all(sigma_beta(BondParams(0.1), grid).field.values > 0)
        assert np.all(sigma_beta(BondParams(0.5), grid).field.values < 0)

    def test_kdv_residual(self, grid):
        for beta in (0.1, 0.3, 0.5, 2.0):
            assert kdv_residual(sigma_beta(BondParams(beta), grid)) <= 1e-10

    def test_short_domain_rejected(self):
        with pytest.raises(BoundaryNotDecayedError):
            sigma_beta(BondParams(0.1), Grid(30.0, 256))

    def test_transform_closed_form(self, core, grid):
        # probes certify the exponential smallness used for the resonant overlap
        params = core.params
        for j in (0, 5, 11, 23, 47, 95, 150, 200, 300, 400):
            k = float(grid.k[j])
            assert core.field.coeffs[j].real == pytest.approx(
                sigma_hat(params, k), abs=1e-10
            )

    def test_sigma_hat_limit_at_zero(self):
        p = BondParams(0.1)
        assert sigma_hat(p, 0.0) == pytest.approx((1 - 3 * 0.1) / (2 * np.pi), rel=1e-12)

    def test_sigma_hat_large_argument_underflows(self):
        p = BondParams(0.1)
        assert sigma_hat(p, 300.0) == 0.0
        assert sigma_hat(p, 50.0) == pytest.approx(
            0.7 * 50.0 / (2 * np.sinh(50 * np.pi)), rel=1e-12
        )


class TestForcing:
    def test_even(self, core, scaling):
        f = j0(core, scaling)
        assert f.even
        assert np.max(np.abs(f.values - f.grid.reflect(f.values))) <= 1e-12 * f.sup()

    @pytest.mark.parametrize("q", [0.0, 0.1])
    def test_eps2_scaling(self, core, q):
        eps_list = [0.4, 0.3, 0.2, 0.1, 0.05]
        norms = [
            j0(core, ScalingParams.from_epsilon(core.params, e)).weighted_norm(0, q)
            for e in eps_list
        ]
        slope = np.polyfit(np.log(eps_list), np.log(norms), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.2)

    def test_limit_is_quartic_derivative(self, core, grid):
        # J0/eps^2 -> -c4 * sigma'''' with c4 the quartic symbol coefficient,
        # estimated here by a small-k ratio of the symbol remainder
        from capwhitham import m_beta

        params = core.params
        k_small = 1e-2
        c4 = (m_beta(params, k_small) - 1.0 + params.gamma * k_small**2) / k_small**4
        d4 = core.field.apply_multiplier(lambda k: k**4)
        limit = -c4 * d4.values
        scaled = j0(core, ScalingParams.from_epsilon(params, 0.05)).values / 0.05**2
        assert np.max(np.abs(scaled - limit)) <= 2e-2 * np.max(np.abs(limit))

    def test_cauchy_in_epsilon(self, core):
        fields = {
            e: j0(core, ScalingParams.from_epsilon(core.params, e)) * (1.0 / e**2)
            for e in (0.2, 0.1, 0.05)
        }
        d1 = (fields[0.1] - fields[0.2]).l2()
        d2 = (fields[0.05] - fields[0.1]).l2()
        assert d2 < d1


class TestOrderZeroSolve:
    def test_zero_rhs(self, core, grid):
        from capwhitham import SpectralField

        out = s0_solve(core, SpectralField.zeros(grid))
        assert out.l2() == 0.0

    def test_round_trip_on_core(self, core):
        rhs = s0_apply(core, core.field)
        rec = s0_solve(core, rhs)
        assert (rec - core.field).l2() <= 1e-9 * core.field.l2()

    def test_round_trip_random(self, core, grid, rng):
        for _ in range(20):
            f = random_even_field(grid, rng)
            rec = s0_solve(core, s0_apply(core, f))
            assert (rec - f).l2() <= 1e-9 * f.l2()

    def test_odd_kernel_direction(self, core, grid):
        # the derivative of the core spans the kernel of the forward operator
        sig = core.field
        dvals = grid.from_coeffs(1j * grid.k * grid.to_coeffs(sig.values)).real
        smooth = grid.from_coeffs(
            grid.to_coeffs(sig.values * dvals) / (1.0 + grid.k**2)
        ).real
        fwd = dvals - (2.0 / core.params.gamma) * smooth
        assert np.linalg.norm(fwd) <= 1e-8 * np.linalg.norm(dvals)

    def test_krylov_path_matches_dense(self, core, grid, rng):
        import capwhitham.kdv as kdv

        f = random_even_field(grid, rng)
        rhs = s0_apply(core, f)
        dense = s0_solve(core, rhs)
        old = kdv.DENSE_SOLVE_MAX_N
        kdv.DENSE_SOLVE_MAX_N = 0
        try:
            krylov = s0_solve(core, rhs)
        finally:
            kdv.DENSE_SOLVE_MAX_N = old
        assert (dense - krylov).l2() <= 1e-9 * dense.l2()
