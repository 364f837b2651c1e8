import numpy as np
import pytest
from scipy.integrate import quad

from latticekg import (
    ContinuousFunction,
    GridSpec,
    LatticeField,
    aliasing_defect,
    continuous_sobolev_norm,
    dft,
    hs_error,
    lebesgue_norm,
    mean_project,
    projection_interpolation_residual,
    restrict_to_coarse,
    shannon_interpolate,
    sobolev_norm,
)
from latticekg.transfer import SeparableTerm, sinc

from conftest import random_field


class TestContinuousFunction:
    def test_pointwise_closed_form(self):
        phi = ContinuousFunction.gaussian(2, amplitude=1.5, width=0.8, center=(0.3, -0.2))
        x = np.linspace(-2, 2, 7)
        got = phi(x[:, None], x[None, :])
        expect = 1.5 * np.exp(
            -((x[:, None] - 0.3) ** 2 + (x[None, :] + 0.2) ** 2) / (2 * 0.8**2)
        )
        assert np.max(np.abs(got - expect)) <= 1e-14

    def test_modulated_pointwise(self):
        k = (1.7,)
        phi = ContinuousFunction.modulated_gaussian(1, 2.0, 1.2, k, center=(0.5,))
        x = np.linspace(-3, 3, 11)
        expect = 2.0 * np.exp(-((x - 0.5) ** 2) / (2 * 1.2**2)) * np.cos(1.7 * (x - 0.5))
        assert np.max(np.abs(phi(x) - expect)) <= 1e-14

    def test_fourier_matches_riemann_sum(self):
        # independent check of the closed-form transform on a fine grid
        phi = ContinuousFunction.modulated_gaussian(1, 1.0, 0.9, (2.0,), center=(0.4,))
        g = GridSpec(1, 0.05, 1024)
        sampled = phi.sample(g)
        xi = g.axis_frequencies()
        riemann = dft(sampled).coeffs
        closed = phi.fourier(xi)
        assert np.max(np.abs(riemann - closed)) <= 1e-10

    def test_support_radius(self):
        phi = ContinuousFunction.gaussian(1, amplitude=1.0, width=1.0)
        R = phi.support_radius(1e-14)
        assert phi(np.array([R + 0.1]))[0] < 1e-14
        assert phi(np.array([R - 0.5]))[0] > 1e-14


class TestMeanProject:
    def test_constant_function(self):
        phi = ContinuousFunction(1, (SeparableTerm(2.5, (lambda x: np.ones_like(x),)),))
        g = GridSpec(1, 0.5, 8)
        vals = mean_project(phi, g).values
        assert np.max(np.abs(vals - 2.5)) <= 1e-14

    def test_linear_function_exact_centers(self):
        # odd part integrates out: the cell mean of x is the cell center
        phi = ContinuousFunction(1, (SeparableTerm(1.0, (lambda x: x,)),))
        g = GridSpec(1, 0.25, 16)
        vals = mean_project(phi, g).values
        assert np.max(np.abs(vals - g.axis_sites())) <= 1e-13

    def test_gaussian_cell_value_oracle(self):
        # int_{-1/2}^{1/2} exp(-x^2/2) dx, frozen from extended precision
        phi = ContinuousFunction.gaussian(1)
        g = GridSpec(1, 1.0, 16)
        got = mean_project(phi, g).values[8]
        assert got == pytest.approx(0.9598504379197684, rel=1e-13)

    def test_quadrature_path_matches_quad_oracle(self):
        phi = ContinuousFunction.modulated_gaussian(1, 1.0, 1.0, (3.0,))
        g = GridSpec(1, 0.5, 8)
        vals = mean_project(phi, g).values
        for idx in (1, 4, 6):
            a = g.axis_sites()[idx]
            oracle, _ = quad(
                lambda x: np.exp(-x**2 / 2) * np.cos(3.0 * x), a - 0.25, a + 0.25,
                epsabs=1e-14,
            )
            assert vals[idx] == pytest.approx(oracle / g.h, abs=1e-12)

    def test_separable_2d(self):
        phi = ContinuousFunction.gaussian(2, width=0.7)
        g = GridSpec(2, 0.5, 8)
        vals = mean_project(phi, g).values
        one_d = mean_project(ContinuousFunction.gaussian(1, width=0.7), GridSpec(1, 0.5, 8)).values
        assert np.max(np.abs(vals - np.outer(one_d, one_d))) <= 1e-14


class TestProjectionIdentity:
    def test_gaussian_residual_small(self):
        phi = ContinuousFunction.gaussian(1)
        g = GridSpec(1, 0.25, 128)  # box 32, tails < 1e-14
        assert projection_interpolation_residual(phi, g) <= 1e-8

    def test_zero_function(self):
        g = GridSpec(1, 0.5, 8)
        assert projection_interpolation_residual(ContinuousFunction.zero(1), g) == 0.0

    def test_dc_coefficient_is_integral(self):
        # sinc(0) = 1: the DC coefficient of the projection equals int(phi)
        phi = ContinuousFunction.gaussian(1, width=1.3)
        g = GridSpec(1, 0.25, 128)
        proj = mean_project(phi, g)
        dc = dft(proj).coeffs[g.m_per_axis // 2]
        assert dc == pytest.approx(np.sqrt(2 * np.pi) * 1.3, rel=1e-12)

    def test_sinc_convention(self):
        assert sinc(np.array([0.0]))[0] == 1.0
        x = np.array([0.3, 2.0])
        assert np.max(np.abs(sinc(x) - np.sin(x) / x)) <= 1e-15


class TestShannonInterpolate:
    def test_constant(self):
        g = GridSpec(1, 0.5, 8)
        u = LatticeField(g, np.full(8, 1.7))
        fine = shannon_interpolate(u, 4)
        assert np.max(np.abs(fine.values - 1.7)) <= 1e-13

    def test_band_limited_mode_reproduced(self):
        g = GridSpec(1, 0.5, 16)
        xi = g.axis_frequencies()[g.m_per_axis // 2 + 3]
        u = LatticeField(g, np.cos(xi * g.axis_sites()))
        fine = shannon_interpolate(u, 4)
        expect = np.cos(xi * fine.grid.axis_sites())
        assert np.max(np.abs(fine.values - expect)) <= 1e-12

    def test_identity_at_r1(self):
        g = GridSpec(1, 0.5, 8)
        u = LatticeField(g, np.arange(8.0))
        out = shannon_interpolate(u, 1)
        assert np.array_equal(out.values, u.values)

    def test_l2_isometry(self, rng):
        g = GridSpec(2, 0.5, 12)
        u = random_field(rng, g)
        fine = shannon_interpolate(u, 2)
        assert lebesgue_norm(fine, 2) == pytest.approx(lebesgue_norm(u, 2), rel=1e-12)

    def test_restriction_round_trip(self, rng):
        g = GridSpec(1, 0.5, 16)
        u = random_field(rng, g)
        back = restrict_to_coarse(shannon_interpolate(u, 4), 4)
        assert np.max(np.abs(back.values - u.values)) <= 1e-12

    def test_rejects_bad_factor(self):
        g = GridSpec(1, 0.5, 8)
        u = LatticeField(g, np.zeros(8))
        with pytest.raises(ValueError):
            shannon_interpolate(u, 3)


class TestHsError:
    def test_identical_fields(self, rng):
        g = GridSpec(1, 0.5, 16)
        u = random_field(rng, g)
        assert hs_error(u, u, 1.0) == 0.0

    def test_s0_matches_l2(self, rng):
        g = GridSpec(2, 0.5, 8)
        a = random_field(rng, g)
        b = random_field(rng, g)
        assert hs_error(a, b, 0.0) == pytest.approx(lebesgue_norm(a - b, 2), rel=1e-12)

    def test_single_mode_closed_form(self):
        g = GridSpec(1, 0.5, 16)
        xi = g.axis_frequencies()[g.m_per_axis // 2 + 2]
        c = 0.7
        a = LatticeField(g, c * np.exp(1j * xi * g.axis_sites()))
        b = LatticeField(g, np.zeros(16, dtype=complex))
        s = 1.5
        expect = c * np.sqrt(g.box_length) * (1 + xi**2) ** (s / 2)
        assert hs_error(a, b, s) == pytest.approx(expect, rel=1e-12)

    def test_grid_mismatch_raises(self):
        a = LatticeField(GridSpec(1, 0.5, 8), np.zeros(8))
        b = LatticeField(GridSpec(1, 0.25, 16), np.zeros(16))
        with pytest.raises(ValueError):
            hs_error(a, b, 0.0)


class TestAliasingDefect:
    def test_constant_factor_no_defect(self, rng):
        g = GridSpec(1, 0.5, 16)
        f = LatticeField(g, np.full(16, 2.0))
        u = random_field(rng, g)
        assert aliasing_defect(f, u, 1.0, 4) <= 1e-12

    def test_two_mode_hand_computation(self):
        # f = g = cos(xi0 a) with 2 xi0 outside the torus: the lattice product
        # carries the aliased frequency, the interpolant product the true one
        g = GridSpec(1, 1.0, 16)
        m = g.m_per_axis
        xi0 = g.axis_frequencies()[m // 2 + 5]  # 2 xi0 > pi
        f = LatticeField(g, np.cos(xi0 * g.axis_sites()))
        s, r = 1.0, 4
        got = aliasing_defect(f, f, s, r)
        xi_alias = 2 * xi0 - 2 * np.pi / g.h
        w = lambda xi: (1 + xi**2) ** s
        # defect field: (cos(alias x) - cos(2 xi0 x))/2, orthogonal modes
        expect = np.sqrt(0.25 * (g.box_length / 2) * (w(xi_alias) + w(2 * xi0)))
        assert got == pytest.approx(expect, rel=1e-12)

    def test_symmetry(self, rng):
        g = GridSpec(1, 0.5, 32)
        f = random_field(rng, g)
        u = random_field(rng, g)
        assert aliasing_defect(f, u, 1.0, 4) == pytest.approx(
            aliasing_defect(u, f, 1.0, 4), rel=1e-13
        )

    def test_smooth_decay_order(self):
        # rate h^(delta - s) with delta = s + 2 predicts order >= 2 - 0.3;
        # smooth data decays much faster, well above the floor
        s = 1.0
        hs_chain = (0.5, 0.25, 0.125)
        defects = []
        for h in hs_chain:
            g = GridSpec(1, h, int(round(26.0 / h)))
            x = g.axis_sites()
            f = LatticeField(g, np.exp(-(x**2) / (2 * 0.35**2)))
            defects.append(aliasing_defect(f, f, s, 4))
        assert all(d > 1e-12 for d in defects)  # above the roundoff floor
        order = np.polyfit(np.log(hs_chain), np.log(defects), 1)[0]
        assert order >= (2.0 - 0.3)


class TestBoundedness:
    def test_projection_bounded_in_hs(self):
        # |pi_h phi|_{H^s_h} <= 1.05 |phi|_{H^s} on the Gaussian family
        fine = GridSpec(1, 0.03125, 1024)
        for width in (0.7, 1.0, 1.5):
            phi = ContinuousFunction.gaussian(1, width=width)
            g = GridSpec(1, 0.25, 128)
            proj = mean_project(phi, g)
            for s in (0.0, 1.0, 2.0):
                assert sobolev_norm(proj, s) <= 1.05 * continuous_sobolev_norm(phi, fine, s)
