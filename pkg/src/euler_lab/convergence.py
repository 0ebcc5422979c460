"""Manufactured-solution refinement studies for the discrete operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from euler_lab.diagnostics import family_b_swirl, family_b_vorticity
from euler_lab.elliptic import divergence, solve_stream_modes, velocity_from_stream
from euler_lab.fields import GridSpec, ScalarField2D

CASES = ("elliptic", "divergence", "curl")
REQUIRED_ORDER = 1.8
DEFAULT_L = 1.0 / 6.0


@dataclass
class ConvergenceResult:
    case: str
    resolutions: list[int]
    errors: list[float]
    orders: list[float]
    max_mode_residual: float | None = None

    @property
    def observed_order(self) -> float:
        return min(self.orders)

    @property
    def passed(self) -> bool:
        return self.observed_order >= REQUIRED_ORDER

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "resolutions": list(self.resolutions),
            "errors": list(self.errors),
            "orders": list(self.orders),
            "observed_order": self.observed_order,
            "max_mode_residual": self.max_mode_residual,
            "passed": self.passed,
        }


def _orders(errors) -> list[float]:
    e = np.asarray(errors)
    return [float(x) for x in np.log2(e[:-1] / e[1:])]


def manufactured_stream(grid: GridSpec):
    """``psi1 = (1-r^2) sin(k z)`` and its exact data ``omega1 = [8 + k^2 (1-r^2)] sin(k z)``, k = 2 pi / L."""
    k = 2.0 * np.pi / grid.L
    rr, zz = grid.mesh()
    psi = (1.0 - rr**2) * np.sin(k * zz)
    omega = (8.0 + k**2 * (1.0 - rr**2)) * np.sin(k * zz)
    return psi, omega


def elliptic_case(resolutions=(32, 64, 128), L: float = DEFAULT_L) -> ConvergenceResult:
    errors, worst = [], 0.0
    for n in resolutions:
        grid = GridSpec(n, n, L)
        psi, omega = manufactured_stream(grid)
        sol, rel = solve_stream_modes(ScalarField2D(grid, omega))
        errors.append(float(np.max(np.abs(sol.values - psi))))
        worst = max(worst, float(rel.max()))
    return ConvergenceResult("elliptic", list(resolutions), errors, _orders(errors), worst)


def divergence_case(resolutions=(32, 64, 128), L: float = DEFAULT_L) -> ConvergenceResult:
    errors = []
    for n in resolutions:
        grid = GridSpec(n, n, L)
        psi, _ = manufactured_stream(grid)
        ur, uz = velocity_from_stream(ScalarField2D(grid, psi))
        errors.append(divergence(ur, uz).max_abs())
    return ConvergenceResult("divergence", list(resolutions), errors, _orders(errors))


def curl_case(
    resolutions=(8000, 16000, 32000), kappa: float = 1.0, gamma: float = 2.9133, interval=(0.5, 0.999)
) -> ConvergenceResult:
    """Axial vorticity ``(1/r) d_r(r u_theta)`` of the Family-B swirl against its closed form.

    The radial stencil is the solver's (central inside, one-sided second order at the ends);
    the interval stops short of the wall, where the closed form is unbounded.
    """
    a, b = interval
    errors = []
    for n in resolutions:
        r = np.linspace(a, b, n + 1)
        u_theta = family_b_swirl(r, kappa, gamma)
        w = np.gradient(r * u_theta, r[1] - r[0], edge_order=2) / r
        errors.append(float(np.max(np.abs(w - family_b_vorticity(r, kappa, gamma)))))
    return ConvergenceResult("curl", list(resolutions), errors, _orders(errors))


def run_case(case: str, **kwargs) -> ConvergenceResult:
    try:
        fn = {"elliptic": elliptic_case, "divergence": divergence_case, "curl": curl_case}[case]
    except KeyError:
        raise ValueError(f"unknown convergence case {case!r}; choose from {CASES}") from None
    return fn(**kwargs)
