import numpy as np
import pytest

from latticekg import (
    GridSpec,
    InstabilityError,
    LatticeField,
    ModelParams,
    State,
    energy,
    evolve,
    lebesgue_norm,
    linear_propagate,
    modified_energy,
    nonlinear_kick,
    pair_norm,
    second_time_derivative,
    strang_step,
)
from latticekg.evolution import third_time_derivative
from latticekg.spectral import lattice_symbol

from conftest import random_field


def gaussian_state(grid, amp=1.0):
    mesh = grid.site_mesh()
    r2 = sum(np.broadcast_to(x * x, grid.shape) for x in mesh)
    u = LatticeField(grid, amp * np.exp(-r2 / 2.0))
    v = LatticeField(grid, np.zeros(grid.shape))
    return State(u, v, 0.0)


def zero_state(grid):
    z = LatticeField(grid, np.zeros(grid.shape))
    return State(z, z, 0.0)


def random_state(rng, grid):
    return State(random_field(rng, grid), random_field(rng, grid), 0.0)


class TestModelParams:
    def test_param_admissibility(self):
        with pytest.raises(ValueError):
            ModelParams(1.0)
        ModelParams(2.5).validate_dimension(3)
        with pytest.raises(ValueError):
            ModelParams(3.0).validate_dimension(3)
        ModelParams(7.0).validate_dimension(2)


class TestLinearPropagate:
    def test_dt_zero_identity(self, rng):
        g = GridSpec(1, 0.5, 32)
        s = random_state(rng, g)
        out = linear_propagate(s, 0.0)
        assert np.max(np.abs(out.u.values - s.u.values)) <= 1e-15
        assert np.max(np.abs(out.v.values - s.v.values)) <= 1e-15

    def test_eigenmode_evolution(self):
        g = GridSpec(1, 0.5, 32)
        xi = g.axis_frequencies()[g.m_per_axis // 2 + 3]
        omega = np.sqrt(1 + (4 / g.h**2) * np.sin(g.h * xi / 2) ** 2)
        u0 = np.cos(xi * g.axis_sites())
        s = State(LatticeField(g, u0), LatticeField(g, np.zeros(32)), 0.0)
        dt = 0.37
        out = linear_propagate(s, dt)
        assert np.max(np.abs(out.u.values - np.cos(dt * omega) * u0)) <= 1e-12
        assert out.t == dt

    def test_linear_energy_conserved_1000_steps(self, rng):
        g = GridSpec(1, 0.5, 64)
        s = random_state(rng, g)
        hd = g.h

        def lin_energy(state):
            u, v = state.u.values, state.v.values
            grad = (np.roll(u, -1) - u) / g.h
            return 0.5 * hd * (np.sum(v * v) + np.sum(grad * grad) + np.sum(u * u))

        e0 = lin_energy(s)
        for _ in range(1000):
            s = linear_propagate(s, 0.05)
        assert abs(lin_energy(s) - e0) <= 1e-12 * e0

    def test_semigroup_property(self, rng):
        g = GridSpec(2, 0.5, 12)
        s = random_state(rng, g)
        stepped = s
        n, dt = 7, 0.3
        for _ in range(n):
            stepped = linear_propagate(stepped, dt)
        direct = linear_propagate(s, n * dt)
        scale = max(np.max(np.abs(direct.u.values)), 1.0)
        assert np.max(np.abs(stepped.u.values - direct.u.values)) <= 1e-11 * scale
        assert np.max(np.abs(stepped.v.values - direct.v.values)) <= 1e-11 * scale


class TestNonlinearKick:
    def test_zero_u_identity(self, rng):
        g = GridSpec(1, 1.0, 16)
        v = random_field(rng, g)
        s = State(LatticeField(g, np.zeros(16)), v, 0.0)
        out = nonlinear_kick(s, ModelParams(3.0), 0.5)
        assert np.array_equal(out.v.values, v.values)

    def test_unit_field_cubic(self):
        g = GridSpec(1, 1.0, 16)
        s = State(LatticeField(g, np.ones(16)), LatticeField(g, np.zeros(16)), 0.0)
        out = nonlinear_kick(s, ModelParams(3.0), 0.1)
        assert np.max(np.abs(out.v.values + 0.1)) <= 1e-15
        assert np.array_equal(out.u.values, s.u.values)

    def test_composition_identity(self, rng):
        # algebraic identity kick(dt) = kick(dt/2) o kick(dt/2) (u frozen);
        # floating point allows one rounding of slack per entry
        g = GridSpec(1, 0.5, 32)
        s = random_state(rng, g)
        p = ModelParams(2.5)
        once = nonlinear_kick(s, p, 0.4)
        twice = nonlinear_kick(nonlinear_kick(s, p, 0.2), p, 0.2)
        scale = np.max(np.abs(once.v.values))
        assert np.max(np.abs(once.v.values - twice.v.values)) <= 1e-15 * scale


class TestStrangStep:
    def test_zero_state_fixed(self):
        g = GridSpec(1, 0.5, 16)
        out = strang_step(zero_state(g), ModelParams(3.0), 0.1)
        assert np.all(out.u.values == 0.0) and np.all(out.v.values == 0.0)

    def test_self_convergence_order_two(self):
        g = GridSpec(1, 0.2, 128)
        p = ModelParams(3.0)
        T = 1.0

        def run(dt):
            s = gaussian_state(g)
            for _ in range(int(round(T / dt))):
                s = strang_step(s, p, dt)
            return s.u.values

        u1, u2, u4 = run(0.04), run(0.02), run(0.01)
        e12 = np.max(np.abs(u1 - u2))
        e24 = np.max(np.abs(u2 - u4))
        order = np.log2(e12 / e24)
        assert 1.8 <= order <= 2.2

    def test_energy_drift_quadratic_budget(self):
        # calibrate K once at the coarse step, then check K dt^2 at the half
        # step and the ~4x shrink ratio
        g = GridSpec(1, 0.1, 464)
        p = ModelParams(3.0)
        T = 2.0

        def sup_drift(dt):
            s = gaussian_state(g)
            e0 = energy(s, p)
            worst = 0.0
            for _ in range(int(round(T / dt))):
                s = strang_step(s, p, dt)
                worst = max(worst, abs(energy(s, p) - e0) / e0)
            return worst

        d1 = sup_drift(0.02)
        K = d1 / 0.02**2
        d2 = sup_drift(0.01)
        assert d2 <= 1.25 * K * 0.01**2
        assert 3.0 <= d1 / d2 <= 5.0


class TestEnergy:
    def test_zero_state(self):
        g = GridSpec(2, 0.5, 8)
        assert energy(zero_state(g), ModelParams(3.0)) == 0.0

    def test_constant_field_closed_form(self):
        g = GridSpec(2, 0.5, 8)
        c = 1.3
        V = g.box_length**2
        s = State(
            LatticeField(g, np.full(g.shape, c)),
            LatticeField(g, np.zeros(g.shape)),
            0.0,
        )
        expect = 0.5 * V * c**2 + 0.25 * V * c**4
        assert energy(s, ModelParams(3.0)) == pytest.approx(expect, rel=1e-14)

    def test_quadratic_part_matches_spectral(self, rng):
        from latticekg import sobolev_norm

        g = GridSpec(1, 0.5, 64)
        s = random_state(rng, g)
        p = ModelParams(3.0)
        quartic = (g.h / 4.0) * np.sum(s.u.values**4)
        quadratic = energy(s, p) - quartic
        spectral = 0.5 * (
            sobolev_norm(s.u, 1.0) ** 2 + lebesgue_norm(s.v, 2) ** 2
        )
        assert quadratic == pytest.approx(spectral, rel=1e-12)


class TestTimeDerivatives:
    def test_zero_state(self):
        g = GridSpec(1, 0.5, 16)
        p = ModelParams(3.0)
        assert np.all(second_time_derivative(zero_state(g), p).values == 0.0)

    def test_constant_one_cubic(self):
        g = GridSpec(1, 0.5, 16)
        s = State(LatticeField(g, np.ones(16)), LatticeField(g, np.zeros(16)), 0.0)
        out = second_time_derivative(s, ModelParams(3.0))
        assert np.max(np.abs(out.values + 2.0)) <= 1e-15

    def test_central_difference_consistency(self):
        # d_t^2 u from the equation vs the trajectory's central difference
        g = GridSpec(1, 0.2, 128)
        p = ModelParams(3.0)

        def residual(dt):
            mid = gaussian_state(g)
            fwd = strang_step(mid, p, dt)
            bwd = strang_step(mid, p, -dt)
            central = (fwd.u.values - 2 * mid.u.values + bwd.u.values) / dt**2
            return np.max(np.abs(central - second_time_derivative(mid, p).values))

        r1, r2 = residual(0.02), residual(0.01)
        assert 3.0 <= r1 / r2 <= 5.0  # O(dt^2)


class TestModifiedEnergy:
    def test_zero_state(self):
        g = GridSpec(1, 0.5, 16)
        assert modified_energy(zero_state(g), ModelParams(3.0), 1) == 0.0

    def test_linear_regime_conserved(self):
        g = GridSpec(1, 0.2, 128)
        p = ModelParams(3.0)
        s = gaussian_state(g, amp=1e-6)
        e0 = modified_energy(s, p, 1)
        table = evolve(s, p, 0.01, 2.0, observers=[("E1", lambda st: modified_energy(st, p, 1))])
        vals = table.column("E1")
        assert np.max(np.abs(vals - e0)) <= 1e-8 * e0

    def test_k2_gate(self):
        g = GridSpec(1, 0.5, 16)
        s = gaussian_state(g)
        with pytest.raises(ValueError):
            modified_energy(s, ModelParams(1.5), 2)
        modified_energy(s, ModelParams(1.5), 2, allow_nonsmooth=True)
        modified_energy(s, ModelParams(2.0), 2)
        with pytest.raises(ValueError):
            modified_energy(s, ModelParams(3.0), 3)

    def test_third_derivative_formula(self, rng):
        from latticekg.operators import laplacian_values

        g = GridSpec(1, 0.5, 32)
        s = random_state(rng, g)
        p = ModelParams(3.0)
        got = third_time_derivative(s, p).values
        u, v = s.u.values, s.v.values
        expect = laplacian_values(v, g.h) - v - 3.0 * u**2 * v
        assert np.max(np.abs(got - expect)) <= 1e-13


class TestEvolve:
    def test_T_zero_initial_row_only(self):
        g = GridSpec(1, 0.5, 16)
        p = ModelParams(3.0)
        table = evolve(gaussian_state(g), p, 0.1, 0.0, observers=[("E", lambda s: energy(s, p))])
        assert len(table.rows) == 1
        assert table.rows[0][0] == 0.0

    def test_reversibility(self):
        g = GridSpec(1, 0.1, 256)
        p = ModelParams(3.0)
        s0 = gaussian_state(g)
        fwd = evolve(s0, p, 0.01, 2.0)
        back = evolve(fwd.final_state, p, -0.01, -2.0)
        s1 = back.final_state
        assert np.max(np.abs(s1.u.values - s0.u.values)) <= 1e-8
        assert np.max(np.abs(s1.v.values - s0.v.values)) <= 1e-8

    def test_observation_times_exact(self):
        g = GridSpec(1, 0.5, 16)
        p = ModelParams(3.0)
        dt = 0.1
        table = evolve(gaussian_state(g), p, dt, 1.0, obs_stride=2)
        ts = table.column("t")
        expect = np.array([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
        assert np.max(np.abs(ts - expect)) <= 1e-12 * len(ts)

    def test_dt_must_divide_T(self):
        g = GridSpec(1, 0.5, 16)
        with pytest.raises(ValueError):
            evolve(gaussian_state(g), ModelParams(3.0), 0.3, 1.0)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_instability_detected(self):
        g = GridSpec(1, 0.5, 32)
        s = gaussian_state(g, amp=10.0)
        with pytest.raises(InstabilityError) as err:
            evolve(s, ModelParams(3.0), 10.0, 200.0)
        assert err.value.dt == 10.0

    def test_uniform_phase_space_bound(self):
        g = GridSpec(1, 0.1, 464)
        p = ModelParams(3.0)
        s0 = gaussian_state(g)
        bound = np.sqrt(2.0 * (energy(s0, p) + 1.0))
        table = evolve(s0, p, 0.01, 5.0, observers=[("n", lambda s: pair_norm(s, 1))],
                       obs_stride=10)
        assert np.max(table.column("n")) <= bound

    def test_second_derivative_proxy_bounded(self):
        # sup_t |u + |u|^(p-1) u| = sup_t |d_t^2 u - Lap u| stays within
        # 10x its initial value on admissible desk-scale runs
        from latticekg.operators import power_values

        g = GridSpec(1, 0.1, 464)
        p = ModelParams(3.0)

        def proxy(state):
            w = state.u.values + power_values(state.u.values, 3.0)
            return np.sqrt(g.h * np.sum(w * w))

        s0 = gaussian_state(g)
        table = evolve(s0, p, 0.01, 10.0, observers=[("proxy", proxy)], obs_stride=20)
        vals = table.column("proxy")
        assert np.max(vals) <= 10.0 * vals[0]

    def test_strang_method_selectable(self):
        g = GridSpec(1, 0.5, 16)
        p = ModelParams(3.0)
        t1 = evolve(gaussian_state(g), p, 0.1, 0.5, method="strang")
        s_manual = gaussian_state(g)
        for _ in range(5):
            s_manual = strang_step(s_manual, p, 0.1)
        assert np.max(np.abs(t1.final_state.u.values - s_manual.u.values)) <= 1e-13
        with pytest.raises(ValueError):
            evolve(gaussian_state(g), p, 0.1, 0.5, method="rk4")
