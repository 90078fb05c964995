import json

import numpy as np
import pytest
from scipy.integrate import quad

from capwhitham import Grid, SpectralField, WeightedNorm, load_field, save_field
from capwhitham.errors import (
    BoundaryNotDecayedError,
    NonFiniteSymbolError,
    OverflowGuardError,
    SizeMismatchError,
)


def sech2_half(x):
    return 1.0 / np.cosh(x / 2.0) ** 2


class TestGrid:
    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            Grid(10.0, 100)
        with pytest.raises(ValueError):
            Grid(10.0, 4)

    def test_frequencies_closed_under_negation(self, grid):
        n = grid.n_points
        for j in range(1, n // 2):
            assert grid.k[n - j] == -grid.k[j]
        assert grid.k[0] == 0.0

    def test_spacing(self, grid):
        assert grid.spacing == 2 * grid.half_length / grid.n_points
        assert grid.x[0] == -grid.half_length


class TestTransformRoundTrip:
    def test_on_grid_cosine_two_modes(self, grid):
        j = 17
        f = SpectralField(grid, np.cos(grid.k[j] * grid.x))
        c = np.abs(f.coeffs)
        big = np.argsort(c)[-2:]
        assert set(big) == {j, grid.n_points - j}
        assert np.all(c[np.setdiff1d(np.arange(grid.n_points), big)] < 1e-13)

    def test_zero_field(self, grid):
        f = SpectralField.zeros(grid)
        assert np.all(f.coeffs == 0.0)

    def test_round_trip(self, grid, even_field_factory):
        f = even_field_factory(grid)
        g = SpectralField.from_coeffs(grid, f.coeffs)
        assert np.max(np.abs(g.values - f.values)) <= 1e-13 * f.sup()

    def test_sech2_closed_form_coefficient(self):
        # fhat(k) = 2k/sinh(pi k) under the (1/2pi) integral convention
        grid = Grid(80.0, 1024)
        f = SpectralField.from_function(grid, sech2_half)
        for target in (0.5, 1.0, 2.0):
            j = round(target * grid.half_length / np.pi)
            kj = grid.k[j]
            assert f.coeffs[j].real == pytest.approx(2 * kj / np.sinh(np.pi * kj), abs=1e-10)

    def test_sech2_against_quadrature(self):
        grid = Grid(80.0, 1024)
        f = SpectralField.from_function(grid, sech2_half)
        k = float(grid.k[40])
        oracle = quad(lambda x: sech2_half(x) * np.cos(k * x), 0, np.inf)[0] / np.pi
        assert f.coeff_at(k) == pytest.approx(oracle, abs=1e-10)

    def test_conjugate_symmetry(self, grid, even_field_factory):
        c = even_field_factory(grid).coeffs
        n = grid.n_points
        assert np.allclose(c[1:], np.conj(c[1:][::-1]), rtol=0, atol=1e-15)

    def test_parseval(self, grid, even_field_factory):
        dk = np.pi / grid.half_length
        for _ in range(50):
            f = even_field_factory(grid)
            phys = grid.spacing * np.sum(f.values**2)
            spec = 2 * np.pi * dk * np.sum(np.abs(f.coeffs) ** 2)
            assert spec == pytest.approx(phys, rel=1e-12)

    def test_size_mismatch(self, grid):
        with pytest.raises(SizeMismatchError):
            SpectralField(grid, np.zeros(17))


class TestApplyMultiplier:
    def test_identity(self, grid, even_field_factory):
        f = even_field_factory(grid)
        g = f.apply_multiplier(lambda k: np.ones_like(k))
        assert np.max(np.abs(g.values - f.values)) <= 1e-14

    def test_second_derivative_of_cosine(self, grid):
        k0 = grid.k[25]
        f = SpectralField(grid, np.cos(k0 * grid.x))
        g = f.apply_multiplier(lambda k: -(k**2))
        assert np.max(np.abs(g.values + k0**2 * np.cos(k0 * grid.x))) <= 1e-10

    def test_multiplier_against_quadrature(self, core, scaling):
        # slow oracle: g(x) = int symbol(k) sigma_hat(k) e^{ikx} dk
        from capwhitham.kdv import j0_symbol, sigma_hat

        params = core.params
        field = core.field.apply_multiplier(
            lambda k: j0_symbol(params, scaling, k)
        )
        grid = core.field.grid

        def integrand(k, x):
            return float(2 * j0_symbol(params, scaling, k) * sigma_hat(params, k) * np.cos(k * x))

        for idx in (512, 500, 480, 450, 400):
            x = grid.x[idx]
            oracle = quad(integrand, 0, 60.0, args=(x,), limit=400)[0]
            assert field.values[idx] == pytest.approx(oracle, abs=1e-8)

    def test_product_symbol_is_composition(self, grid, even_field_factory):
        f = even_field_factory(grid)
        s1 = lambda k: 1.0 / (1.0 + k**2)
        s2 = lambda k: np.cos(k)
        once = f.apply_multiplier(lambda k: s1(k) * s2(k))
        twice = f.apply_multiplier(s1).apply_multiplier(s2)
        assert np.max(np.abs(once.values - twice.values)) <= 1e-14 * max(f.sup(), 1.0)

    def test_even_symbol_preserves_evenness(self, grid, even_field_factory):
        f = even_field_factory(grid)
        g = f.apply_multiplier(lambda k: np.exp(-(k**2)))
        assert g.even

    def test_nonfinite_symbol_rejected(self, grid, even_field_factory):
        f = even_field_factory(grid)
        with pytest.raises(NonFiniteSymbolError):
            f.apply_multiplier(lambda k: 1.0 / k)


class TestCoeffAt:
    def test_on_grid_matches_cached(self, grid):
        f = SpectralField.from_function(grid, sech2_half)
        for j in (3, 57, 200):
            assert f.coeff_at(float(grid.k[j])) == pytest.approx(
                f.coeffs[j].real, abs=1e-12
            )

    def test_even_field_real_result(self, grid, even_field_factory):
        val = even_field_factory(grid).coeff_at(1.2345)
        assert isinstance(val, float)

    def test_riemann_lebesgue_decay(self, grid):
        # frequencies well above the modulated-gaussian support but inside
        # the resolvable band (k_max ~ 20 here)
        vals = np.cos(2.0 * grid.x) * np.exp(-(grid.x**2) / 8.0)
        f = SpectralField(grid, vals)
        assert abs(f.coeff_at(12.0)) < 1e-12
        assert abs(f.coeff_at(16.0)) < 1e-12

    def test_boundary_decay_required(self, grid):
        f = SpectralField(grid, np.cos(grid.k[4] * grid.x))
        with pytest.raises(BoundaryNotDecayedError):
            f.coeff_at(1.0)


class TestWeightedNorm:
    def test_zero(self, grid):
        assert SpectralField.zeros(grid).weighted_norm(0, 0.5) == 0.0

    def test_flat_norm_is_discrete_l2(self, grid, even_field_factory):
        f = even_field_factory(grid)
        direct = np.sqrt(grid.spacing * np.sum(f.values**2))
        assert f.weighted_norm(0, 0.0) == pytest.approx(direct, rel=1e-12)
        assert f.l2() == pytest.approx(direct, rel=1e-14)

    def test_weighted_sech2_against_quadrature(self):
        # int cosh(x) sech^4(x/2) dx = 16/3
        grid = Grid(80.0, 1024)
        f = SpectralField.from_function(grid, sech2_half)
        assert f.weighted_norm(0, 0.5) == pytest.approx(np.sqrt(16.0 / 3.0), abs=1e-8)

    def test_overflow_guard(self, grid, even_field_factory):
        with pytest.raises(OverflowGuardError):
            even_field_factory(grid).weighted_norm(0, 8.0)

    def test_norm_spec_object(self, grid, even_field_factory):
        f = even_field_factory(grid)
        wn = WeightedNorm(r=1.0, q=0.1)
        assert f.weighted_norm(wn) == f.weighted_norm(1.0, 0.1)
        with pytest.raises(ValueError):
            WeightedNorm(r=-1.0)


class TestEvenness:
    def test_product_of_even_fields_is_even(self, grid, even_field_factory):
        f = even_field_factory(grid)
        g = even_field_factory(grid)
        assert (f * g).even

    def test_gross_asymmetry_rejected(self, grid):
        vals = np.zeros(grid.n_points)
        vals[3] = 1.0
        with pytest.raises(ValueError):
            SpectralField(grid, vals, even=True)

    def test_symmetrization_of_small_drift(self, grid, even_field_factory):
        f = even_field_factory(grid)
        perturbed = f.values.copy()
        perturbed[3] += 1e-12
        g = SpectralField(grid, perturbed, even=True)
        assert np.array_equal(g.values, grid.reflect(g.values))


class TestSerialization:
    def test_round_trip(self, tmp_path, grid, even_field_factory):
        f = even_field_factory(grid)
        path = tmp_path / "field.csv"
        save_field(f, path, meta={"beta": 0.2, "epsilon": 0.25}, kind="test")
        g, meta = load_field(path)
        assert meta["kind"] == "test" and meta["N"] == grid.n_points
        assert np.max(np.abs(g.values - f.values)) <= 1e-15 * f.sup()
        header = path.read_text().splitlines()[0]
        assert header == "x,value"
        sidecar = json.loads((tmp_path / "field.csv.json").read_text())
        assert sidecar["beta"] == 0.2
