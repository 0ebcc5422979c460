import numpy as np
import pytest

from euler_lab.fields import GridSpec, ScalarField2D, State
from euler_lab.solver import (
    IntegrationError,
    SolverConfig,
    advective_dt,
    cfl_dt,
    initial_state,
    kinetic_energy,
    max_circulation,
    rhs,
    run,
    step_rk4,
)

L = 1.0 / 6.0


def swirl_only(grid, f):
    rr, _ = grid.mesh()
    return State.from_vorticity(0.0, ScalarField2D(grid, f(rr)), ScalarField2D.zeros(grid))


class TestRhs:
    def test_rest_is_steady(self):
        du, dw = rhs(State.rest(GridSpec(16, 16, L)))
        assert du.max_abs() == 0 and dw.max_abs() == 0

    def test_axially_uniform_swirl_is_steady(self):
        s = swirl_only(GridSpec(32, 32, L), lambda r: np.exp(-3 * r) + r**3)
        du, dw = rhs(s)
        assert du.max_abs() == 0 and dw.max_abs() == 0

    def test_axially_uniform_stream_keeps_swirl(self):
        g = GridSpec(32, 32, L)
        rr, _ = g.mesh()
        s = State.from_vorticity(0.0, ScalarField2D(g, 1 + rr**2), ScalarField2D(g, np.cos(rr)))
        du, _ = rhs(s)
        assert du.max_abs() <= 1e-12


class TestStep:
    def test_rest_stays_at_rest(self):
        s = step_rk4(State.rest(GridSpec(16, 16, L)), 0.3)
        assert s.t == 0.3 and s.u1.max_abs() == 0 and s.omega1.max_abs() == 0

    def test_family_b_structure_is_a_fixed_point(self):
        g = GridSpec(64, 64, L)
        s0 = swirl_only(g, lambda r: 2.0 * (1 - r) ** 0.15674664469845204)
        s = s0
        for _ in range(100):
            s = step_rk4(s, 1e-3)
        assert np.max(np.abs(s.u1.values - s0.u1.values)) <= 1e-13

    def test_local_order_is_five(self):
        g = GridSpec(32, 32, 1.0)
        s0 = initial_state(g, "random-smooth", {"seed": 4})
        orders = []
        prev = None
        for dt in (0.02, 0.01, 0.005):
            one = step_rk4(s0, dt)
            two = step_rk4(step_rk4(s0, dt / 2), dt / 2)
            err = max(np.max(np.abs(one.u1.values - two.u1.values)), np.max(np.abs(one.omega1.values - two.omega1.values)))
            if prev is not None:
                orders.append(np.log2(prev / err))
            prev = err
        assert all(abs(o - 5.0) <= 0.3 for o in orders), orders

    def test_nonpositive_dt(self):
        with pytest.raises(ValueError):
            step_rk4(State.rest(GridSpec(8, 8, L)), 0.0)

    def test_overflow_names_stage_and_time(self):
        g = GridSpec(16, 16, 1.0)
        s = initial_state(g, "random-smooth", {"seed": 1, "amplitude": 1e150})
        with np.errstate(all="ignore"), pytest.raises(IntegrationError, match=r"stage .* at t="):
            step_rk4(s, 1e100)

    def test_constraint_holds_after_step(self):
        from euler_lab.elliptic import apply_operator

        s = step_rk4(initial_state(GridSpec(32, 32, L), "wall-swirl"), 1e-3)
        assert np.max(np.abs(apply_operator(s.psi1).values - s.omega1.values)) <= 1e-10 * max(1.0, s.omega1.max_abs())

    def test_axial_reflection_symmetry_is_preserved(self):
        g = GridSpec(32, 32, 1.0)
        rr, zz = g.mesh()
        k = 2 * np.pi
        u1 = (1 - rr**2) * (1 + 0.3 * np.cos(k * zz))
        w1 = rr**2 * (1 - rr**2) * np.sin(k * zz)
        s = State.from_vorticity(0.0, ScalarField2D(g, u1), ScalarField2D(g, w1))
        for _ in range(20):
            s = step_rk4(s, 2e-3)
        flip = (-np.arange(g.nz)) % g.nz
        assert np.max(np.abs(s.u1.values - s.u1.values[:, flip])) <= 1e-12
        assert np.max(np.abs(s.omega1.values + s.omega1.values[:, flip])) <= 1e-12


class TestCfl:
    def test_rest_gets_cap(self):
        assert cfl_dt(State.rest(GridSpec(8, 8, L)), 0.5, dt_max=0.01) == 0.01

    def test_arithmetic(self):
        assert advective_dt(1.0, 0.0, 0.01, 0.02, 0.5) == pytest.approx(0.005, rel=1e-15)

    def test_doubling_velocity_halves_dt(self):
        g = GridSpec(32, 32, L)
        s = initial_state(g, "random-smooth", {"seed": 2})
        s2 = State(0.0, s.u1 * 2.0, s.omega1 * 2.0, s.psi1 * 2.0)
        assert cfl_dt(s2, 0.7) == pytest.approx(cfl_dt(s, 0.7) / 2, rel=1e-12)

    @pytest.mark.parametrize("cfl", [0.0, 1.5])
    def test_bad_cfl(self, cfl):
        with pytest.raises(ValueError):
            advective_dt(1.0, 1.0, 0.1, 0.1, cfl)


class TestRun:
    def test_rest_diagnostics_are_constant(self):
        traj = run(SolverConfig(GridSpec(16, 16, L), t_end=1.0, initial_condition="rest", dt_max=0.05))
        assert traj.snapshots[-1].t == pytest.approx(1.0)
        for name in ("max_abs_u1", "max_abs_omega1", "max_abs_circ", "energy"):
            assert np.all(traj.column(name) == 0)

    def test_snapshot_times_increase_and_final_kept(self):
        traj = run(SolverConfig(GridSpec(16, 16, L), t_end=0.0105, snapshot_every=3, dt_max=1e-3))
        t = [s.t for s in traj.snapshots]
        assert np.all(np.diff(t) > 0)
        assert t[-1] == pytest.approx(0.0105)
        assert len(traj.rows) == traj.steps == 11

    def test_ceiling_guard(self):
        traj = run(SolverConfig(GridSpec(16, 16, L), t_end=1.0, omega_ceiling=1e-3, dt_max=1e-3))
        assert traj.blew_up and traj.steps < 1000
        assert traj.rows[-1]["max_abs_omega1"] > 1e-3

    def test_energy_drift_short_run(self):
        traj = run(SolverConfig(GridSpec(64, 64, L), t_end=2e-3, dt_max=1e-4))
        e = traj.column("energy")
        assert abs(e[-1] - traj.initial["energy"]) / traj.initial["energy"] <= 1e-6

    def test_deterministic(self):
        cfg = SolverConfig(GridSpec(16, 16, L), t_end=5e-3, initial_condition="random-smooth", ic_params={"seed": 3})
        a, b = run(cfg), run(cfg)
        assert all(np.array_equal(x.u1.values, y.u1.values) for x, y in zip(a.snapshots, b.snapshots))
        assert a.rows == b.rows

    @pytest.mark.parametrize(
        "kw", [dict(cfl=0.0), dict(cfl=1.1), dict(t_end=0.0), dict(snapshot_every=0), dict(initial_condition="vortex-ring")]
    )
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(GridSpec(8, 8, L), **{"t_end": 1.0, **kw})


def test_energy_and_circulation_of_pure_swirl():
    g = GridSpec(64, 8, 1.0)
    s = swirl_only(g, lambda r: np.ones_like(r))
    # sum r^3 dr dz approximates int_0^1 int_0^1 r^3 = 1/4
    assert kinetic_energy(s) == pytest.approx(0.25, rel=1e-3)
    assert max_circulation(s) == pytest.approx(g.r[-1] ** 2)
