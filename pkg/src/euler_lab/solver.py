"""Time integration of the transformed axisymmetric Euler system.

Prognostic variables are u1 and omega1; psi1 is re-solved from omega1 after every
Runge-Kutta stage, so every stage state satisfies the elliptic constraint.
Advection uses the same second-order stencils as :mod:`euler_lab.elliptic`; no
boundary condition is imposed on u1 or omega1 at the wall (u_r = 0 there).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from euler_lab.elliptic import EllipticOptions, ddr, ddz, solve_stream, velocity_from_stream
from euler_lab.fields import GridSpec, ScalarField2D, State

log = logging.getLogger(__name__)

DEFAULT_OMEGA_CEILING = 1e8
_EPS_SPEED = 1e-30


class IntegrationError(RuntimeError):
    """Non-finite values appeared during time stepping."""


def _tendencies(grid: GridSpec, u1: np.ndarray, omega1: np.ndarray, psi1: np.ndarray):
    ur, uz = velocity_from_stream(ScalarField2D(grid, psi1))
    ur, uz = ur.values, uz.values
    h, k = grid.dr, grid.dz
    du1 = -ur * ddr(u1, h) - uz * ddz(u1, k) + 2.0 * u1 * ddz(psi1, k)
    domega1 = -ur * ddr(omega1, h) - uz * ddz(omega1, k) + ddz(u1 * u1, k)
    return du1, domega1


def rhs(s: State) -> tuple[ScalarField2D, ScalarField2D]:
    """Tendencies ``(du1/dt, domega1/dt)`` of the transformed system at state ``s``."""
    g = s.grid
    du1, dom = _tendencies(g, s.u1.values, s.omega1.values, s.psi1.values)
    return ScalarField2D(g, du1), ScalarField2D(g, dom)


def step_rk4(s: State, dt: float, opts: EllipticOptions | None = None) -> State:
    """Advance one classical RK4 step, re-solving psi1 after each stage."""
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    g = s.grid

    def psi_of(om):
        return solve_stream(ScalarField2D(g, om), opts).values

    def check(stage, *arrays):
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise IntegrationError(f"non-finite values in RK4 stage {stage} at t={s.t:.17g}")

    u0, w0, p0 = s.u1.values, s.omega1.values, s.psi1.values
    k1u, k1w = _tendencies(g, u0, w0, p0)
    check(1, k1u, k1w)
    u, w = u0 + 0.5 * dt * k1u, w0 + 0.5 * dt * k1w
    check(2, u, w)
    k2u, k2w = _tendencies(g, u, w, psi_of(w))
    check(2, k2u, k2w)
    u, w = u0 + 0.5 * dt * k2u, w0 + 0.5 * dt * k2w
    check(3, u, w)
    k3u, k3w = _tendencies(g, u, w, psi_of(w))
    check(3, k3u, k3w)
    u, w = u0 + dt * k3u, w0 + dt * k3w
    check(4, u, w)
    k4u, k4w = _tendencies(g, u, w, psi_of(w))
    check(4, k4u, k4w)
    u_new = u0 + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    w_new = w0 + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    check("update", u_new, w_new)
    omega1 = ScalarField2D(g, w_new)
    return State(s.t + dt, ScalarField2D(g, u_new), omega1, solve_stream(omega1, opts))


def advective_dt(max_ur: float, max_uz: float, dr: float, dz: float, cfl: float, dt_max: float = np.inf) -> float:
    """``cfl / (max_ur/dr + max_uz/dz + 1e-30)``, capped by ``dt_max``."""
    if not 0 < cfl <= 1:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    rate = max_ur / dr + max_uz / dz + _EPS_SPEED
    return float(min(cfl / rate, dt_max))


def cfl_dt(s: State, cfl: float, dt_max: float = np.inf) -> float:
    """Advective time step of state ``s``; the rest state gets ``dt_max``."""
    ur, uz = velocity_from_stream(s.psi1)
    g = s.grid
    return advective_dt(ur.max_abs(), uz.max_abs(), g.dr, g.dz, cfl, dt_max)


def kinetic_energy(s: State) -> float:
    """``sum (u_r^2 + u_theta^2 + u_z^2) r dr dz`` over the strip (midpoint rule)."""
    g = s.grid
    r = g.r[:, None]
    ur, uz = velocity_from_stream(s.psi1)
    utheta = r * s.u1.values
    density = (ur.values**2 + utheta**2 + uz.values**2) * r
    return float(np.sum(density) * g.dr * g.dz)


def max_circulation(s: State) -> float:
    """``max |r^2 u1|``, the grid maximum of ``|r u_theta|``."""
    r = s.grid.r[:, None]
    return float(np.max(np.abs(r * r * s.u1.values)))


def diagnostics_row(s: State, dt: float) -> dict[str, float]:
    return {
        "t": s.t,
        "dt": dt,
        "max_abs_u1": s.u1.max_abs(),
        "max_abs_omega1": s.omega1.max_abs(),
        "max_abs_circ": max_circulation(s),
        "energy": kinetic_energy(s),
    }


# -- initial conditions -----------------------------------------------------


def _rest(grid: GridSpec, **_):
    return np.zeros(grid.shape), np.zeros(grid.shape)


def _wall_swirl(grid: GridSpec, A: float = 1.0, eps: float = 0.1, **_):
    rr, zz = grid.mesh()
    u1 = A * np.exp(-30.0 * (1.0 - rr**2) ** 4) * (1.0 + eps * np.sin(2.0 * np.pi * zz / grid.L))
    return u1, np.zeros(grid.shape)


def _random_smooth(grid: GridSpec, seed: int = 0, amplitude: float = 1.0, modes: int = 3, **_):
    """Low-mode random data: polynomials in r^2 times axial Fourier modes."""
    rng = np.random.default_rng(seed)
    rr, zz = grid.mesh()
    kz = 2.0 * np.pi / grid.L
    fields = []
    for _name in ("u1", "omega1"):
        a = np.zeros(grid.shape)
        for m in range(modes + 1):
            for p in range(3):
                cc, cs = rng.standard_normal(2)
                a += (rr**2) ** p * (1 - rr**2) * (cc * np.cos(m * kz * zz) + cs * np.sin(m * kz * zz))
        fields.append(amplitude * a / (modes + 1))
    return fields[0], fields[1]


PRESETS = {"rest": _rest, "wall-swirl": _wall_swirl, "random-smooth": _random_smooth}


def initial_state(grid: GridSpec, preset: str, params: dict[str, Any] | None = None, opts=None) -> State:
    try:
        make = PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown initial condition {preset!r}; choose from {sorted(PRESETS)}") from None
    u1, omega1 = make(grid, **(params or {}))
    return State.from_vorticity(0.0, ScalarField2D(grid, u1), ScalarField2D(grid, omega1), opts)


# -- driver -----------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    grid: GridSpec
    t_end: float
    cfl: float = 0.5
    snapshot_every: int = 10
    initial_condition: str = "wall-swirl"
    ic_params: dict[str, Any] = field(default_factory=dict)
    dt_max: float = 1e-3
    max_steps: int | None = None
    omega_ceiling: float = DEFAULT_OMEGA_CEILING
    elliptic: EllipticOptions = field(default_factory=EllipticOptions)

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if int(self.snapshot_every) != self.snapshot_every or self.snapshot_every < 1:
            raise ValueError("snapshot_every must be a positive integer")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if not self.omega_ceiling > 0:
            raise ValueError("omega_ceiling must be positive")
        if self.initial_condition not in PRESETS:
            raise ValueError(f"unknown initial condition {self.initial_condition!r}")


@dataclass
class Trajectory:
    snapshots: list[State]
    rows: list[dict[str, float]]
    initial: dict[str, float]
    blew_up: bool = False
    steps: int = 0

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])


def run(cfg: SolverConfig, callback=None) -> Trajectory:
    """Integrate to ``cfg.t_end`` (or ``cfg.max_steps``), stopping early if max|omega1| exceeds the ceiling.

    ``callback(step, state, row)`` is invoked after every step if given.
    """
    s = initial_state(cfg.grid, cfg.initial_condition, cfg.ic_params, cfg.elliptic)
    traj = Trajectory(snapshots=[s], rows=[], initial=diagnostics_row(s, 0.0))
    step = 0
    while s.t < cfg.t_end * (1 - 1e-14):
        if cfg.max_steps is not None and step >= cfg.max_steps:
            break
        dt = min(cfl_dt(s, cfg.cfl, cfg.dt_max), cfg.t_end - s.t)
        s = step_rk4(s, dt, cfg.elliptic)
        step += 1
        row = diagnostics_row(s, dt)
        traj.rows.append(row)
        if callback is not None:
            callback(step, s, row)
        if step % cfg.snapshot_every == 0:
            traj.snapshots.append(s)
        if row["max_abs_omega1"] > cfg.omega_ceiling:
            log.warning("max|omega1| = %.3e exceeds ceiling %.1e at t=%.6g", row["max_abs_omega1"], cfg.omega_ceiling, s.t)
            traj.blew_up = True
            break
    if traj.snapshots[-1] is not s:
        traj.snapshots.append(s)
    traj.steps = step
    return traj
