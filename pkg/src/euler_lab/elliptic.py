"""Stream-function solve and velocity recovery for the transformed variables.

The operator is ``-(d_rr + (3/r) d_r + d_zz) psi1 = omega1`` on the periodic strip,
discretised with second-order central differences (five-point stencil) on the
cell-centred grid. A real FFT along z diagonalises the periodic second difference
exactly, leaving one tridiagonal radial problem per axial mode.

Boundary treatment:
    axis  r = 0: even reflection, ghost psi_{-1} = psi_0
    wall  r = 1: psi1 = 0 on the face, ghost psi_{nr} = -psi_{nr-1}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from euler_lab.fields import GridSpec, ScalarField2D


class EllipticError(RuntimeError):
    """The per-mode radial system is singular or was solved inaccurately."""


@dataclass(frozen=True)
class EllipticOptions:
    axis_bc: str = "even-symmetry"
    wall_bc: str = "dirichlet-zero"
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.axis_bc != "even-symmetry":
            raise ValueError(f"unsupported axis condition {self.axis_bc!r}")
        if self.wall_bc != "dirichlet-zero":
            raise ValueError(f"unsupported wall condition {self.wall_bc!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


def _radial_coefficients(grid: GridSpec):
    """Lower, diagonal and upper bands of d_rr + (3/r) d_r with the boundary ghosts folded in."""
    h = grid.dr
    r = grid.r
    lower = 1.0 / h**2 - 3.0 / (2.0 * h * r)
    upper = 1.0 / h**2 + 3.0 / (2.0 * h * r)
    diag = np.full(grid.nr, -2.0 / h**2)
    diag[0] += lower[0]
    diag[-1] -= upper[-1]
    lower = lower.copy()
    upper = upper.copy()
    lower[0] = 0.0
    upper[-1] = 0.0
    return lower, diag, upper


def axial_eigenvalues(grid: GridSpec) -> np.ndarray:
    """Eigenvalues of the periodic three-point second difference for the rfft modes."""
    m = np.arange(grid.nz // 2 + 1)
    return -(2.0 / grid.dz * np.sin(np.pi * m / grid.nz)) ** 2


def _thomas(lower, diag, upper, rhs):
    """Batched tridiagonal solve; ``diag`` and ``rhs`` carry one column per mode."""
    n = rhs.shape[0]
    cp = np.empty_like(diag)
    dp = np.empty_like(rhs)
    denom = diag[0]
    if np.any(denom == 0):
        raise EllipticError("zero pivot in radial system")
    cp[0] = upper[0] / denom
    dp[0] = rhs[0] / denom
    for i in range(1, n):
        denom = diag[i] - lower[i] * cp[i - 1]
        if np.any(denom == 0):
            raise EllipticError(f"zero pivot in radial system at row {i}")
        cp[i] = upper[i] / denom
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / denom
    x = np.empty_like(rhs)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def _tridiag_apply(lower, diag, upper, x):
    y = diag * x
    y[1:] += lower[1:, None] * x[:-1]
    y[:-1] += upper[:-1, None] * x[1:]
    return y


def solve_stream_modes(omega1: ScalarField2D, opts: EllipticOptions | None = None):
    """Solve for psi1 and return ``(psi1, per_mode_relative_residuals)``."""
    opts = opts or EllipticOptions()
    grid = omega1.grid
    lower, base, upper = _radial_coefficients(grid)
    lam = axial_eigenvalues(grid)
    diag = base[:, None] + lam[None, :]
    rhs = -np.fft.rfft(omega1.values, axis=1)
    psi_hat = _thomas(lower, diag, upper, rhs)

    res = _tridiag_apply(lower, diag, upper, psi_hat) - rhs
    scale = np.max(np.abs(rhs), axis=0)
    rel = np.zeros(lam.shape)
    nonzero = scale > 0
    rel[nonzero] = np.max(np.abs(res[:, nonzero]), axis=0) / scale[nonzero]
    if np.any(rel > opts.tolerance):
        worst = int(np.argmax(rel))
        raise EllipticError(f"mode {worst} residual {rel[worst]:.3e} exceeds tolerance {opts.tolerance:.1e}")
    psi = np.fft.irfft(psi_hat, n=grid.nz, axis=1)
    return ScalarField2D(grid, psi), rel


def solve_stream(omega1: ScalarField2D, opts: EllipticOptions | None = None) -> ScalarField2D:
    return solve_stream_modes(omega1, opts)[0]


def apply_operator(psi1: ScalarField2D) -> ScalarField2D:
    """Discrete ``-(d_rr + (3/r) d_r + d_zz) psi1`` with the solver's ghost conventions."""
    grid = psi1.grid
    h, k = grid.dr, grid.dz
    r = grid.r[:, None]
    p = psi1.values
    ext = np.empty((grid.nr + 2, grid.nz))
    ext[1:-1] = p
    ext[0] = p[0]
    ext[-1] = -p[-1]
    d_rr = (ext[2:] - 2.0 * p + ext[:-2]) / h**2
    d_r = (ext[2:] - ext[:-2]) / (2.0 * h)
    d_zz = (np.roll(p, -1, axis=1) - 2.0 * p + np.roll(p, 1, axis=1)) / k**2
    return ScalarField2D(grid, -(d_rr + 3.0 / r * d_r + d_zz))


def ddr(a: np.ndarray, h: float) -> np.ndarray:
    """Radial derivative: central inside, second-order one-sided in the first and last cells."""
    return np.gradient(a, h, axis=0, edge_order=2)


def ddz(a: np.ndarray, k: float) -> np.ndarray:
    """Periodic central axial derivative."""
    return (np.roll(a, -1, axis=1) - np.roll(a, 1, axis=1)) / (2.0 * k)


def velocity_from_stream(psi1: ScalarField2D) -> tuple[ScalarField2D, ScalarField2D]:
    """Meridional velocity ``u_r = -r d_z psi1``, ``u_z = 2 psi1 + r d_r psi1``."""
    grid = psi1.grid
    r = grid.r[:, None]
    p = psi1.values
    ur = -r * ddz(p, grid.dz)
    uz = 2.0 * p + r * ddr(p, grid.dr)
    return ScalarField2D(grid, ur), ScalarField2D(grid, uz)


def divergence(ur: ScalarField2D, uz: ScalarField2D) -> ScalarField2D:
    """Cylindrical divergence ``(1/r) d_r(r u_r) + d_z u_z``."""
    if ur.grid != uz.grid:
        raise ValueError("velocity components live on different grids")
    grid = ur.grid
    r = grid.r[:, None]
    div = ddr(r * ur.values, grid.dr) / r + ddz(uz.values, grid.dz)
    return ScalarField2D(grid, div)
