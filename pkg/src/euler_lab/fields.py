"""Grids, discrete fields and self-similar coordinate algebra.

The computational domain is the strip 0 < r < 1, z periodic with period L.
Radial nodes are cell centred, r_i = (i + 1/2)/nr, so neither the axis nor the
wall carries a node; the wall r = 1 is a cell face.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_DELTA = 0.1
CONSTANTIN_THRESHOLD = 2.0 / 5.0


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class GridSpec:
    nr: int
    nz: int
    L: float

    def __post_init__(self):
        if int(self.nr) != self.nr or int(self.nz) != self.nz:
            raise ValueError("nr and nz must be integers")
        if self.nr < 8 or self.nz < 8:
            raise ValueError(f"grid too coarse: nr={self.nr}, nz={self.nz} (need >= 8)")
        if self.nz & (self.nz - 1):
            raise ValueError(f"nz must be a power of two, got {self.nz}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"axial period L must be positive, got {self.L}")

    @property
    def dr(self) -> float:
        return 1.0 / self.nr

    @property
    def dz(self) -> float:
        return self.L / self.nz

    @property
    def r(self) -> np.ndarray:
        return (np.arange(self.nr) + 0.5) / self.nr

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.nz) * (self.L / self.nz)

    @property
    def z_centered(self) -> np.ndarray:
        """Axial nodes wrapped into [-L/2, L/2), the same points as ``z`` modulo L."""
        z = self.z
        return np.where(z < 0.5 * self.L, z, z - self.L)

    def mesh(self, centered: bool = False) -> tuple[np.ndarray, np.ndarray]:
        z = self.z_centered if centered else self.z
        return np.meshgrid(self.r, z, indexing="ij")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nr, self.nz)


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    """A finite nr x nz array of float64 values tied to a grid (radial index outer)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != self.grid.shape:
            raise ValueError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: GridSpec) -> ScalarField2D:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: GridSpec, f, centered: bool = False) -> ScalarField2D:
        rr, zz = grid.mesh(centered=centered)
        return cls(grid, np.broadcast_to(f(rr, zz), grid.shape))

    def _check(self, other: ScalarField2D) -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def _coerce(self, other):
        if isinstance(other, ScalarField2D):
            self._check(other)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField2D(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField2D(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return ScalarField2D(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return ScalarField2D(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField2D(self.grid, -self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __repr__(self):
        return f"ScalarField2D(grid={self.grid}, max_abs={self.max_abs():.3g})"


@dataclass(frozen=True, eq=False)
class State:
    """Time-stamped triple (u1, omega1, psi1) on a common grid.

    Use :meth:`from_vorticity` to build a state whose psi1 is the elliptic solve of
    omega1. States sampled from self-similar reconstructions carry their own psi1.
    """

    t: float
    u1: ScalarField2D
    omega1: ScalarField2D
    psi1: ScalarField2D

    def __post_init__(self):
        if not (self.u1.grid == self.omega1.grid == self.psi1.grid):
            raise ValueError("state fields must share a grid")

    @property
    def grid(self) -> GridSpec:
        return self.u1.grid

    @classmethod
    def from_vorticity(cls, t, u1, omega1, opts=None) -> State:
        from euler_lab.elliptic import solve_stream

        return cls(float(t), u1, omega1, solve_stream(omega1, opts))

    @classmethod
    def rest(cls, grid: GridSpec, t: float = 0.0) -> State:
        zero = ScalarField2D.zeros(grid)
        return cls(float(t), zero, zero, zero)

    def sample(self, r, z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Bilinear interpolation of (u1, omega1, psi1) at physical points.

        z is periodic. In the half cells next to the axis and the wall the values are
        extrapolated linearly from the two nearest radial nodes.
        """
        g = self.grid
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        s = r * g.nr - 0.5
        i0 = np.clip(np.floor(s).astype(int), 0, g.nr - 2)
        wr = s - i0
        q = z / g.dz
        j0f = np.floor(q)
        wz = q - j0f
        j0 = j0f.astype(int) % g.nz
        j1 = (j0 + 1) % g.nz

        def interp(a):
            lo = (1.0 - wz) * a[i0, j0] + wz * a[i0, j1]
            hi = (1.0 - wz) * a[i0 + 1, j0] + wz * a[i0 + 1, j1]
            return (1.0 - wr) * lo + wr * hi

        return interp(self.u1.values), interp(self.omega1.values), interp(self.psi1.values)


@dataclass(frozen=True)
class SelfSimilarParams:
    gamma: float
    T: float
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if not self.T > 0:
            raise DomainError(f"T must be positive, got {self.T}")
        if not (0 < self.delta < min(1.0, self.T)):
            raise DomainError(f"delta must lie in (0, min(1, T)), got {self.delta}")


@dataclass(frozen=True)
class ScalingExponents:
    gamma_u: float
    gamma_omega: float
    gamma_psi: float
    gamma_l: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.gamma_u, self.gamma_omega, self.gamma_psi, self.gamma_l)


def scaling_exponents(gamma: float) -> ScalingExponents:
    """Amplitude exponents of the self-similar ansatz in terms of the length exponent."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return ScalingExponents(-1.0 + gamma / 2.0, -1.0, -1.0 + 2.0 * gamma, float(gamma))


def constantin_admissible(gamma: float) -> bool:
    """Energy-based necessary condition for finite-time self-similar blow-up."""
    return gamma >= CONSTANTIN_THRESHOLD


def _length_scale(t, p: SelfSimilarParams):
    tau = p.T - np.asarray(t, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("self-similar variables are undefined for t >= T")
    return tau ** p.gamma


def to_selfsimilar(r, z, t, p: SelfSimilarParams):
    s = _length_scale(t, p)
    return (np.asarray(r) - 1.0) / s, np.asarray(z) / s


def from_selfsimilar(R, Z, t, p: SelfSimilarParams):
    s = _length_scale(t, p)
    return 1.0 + np.asarray(R) * s, np.asarray(Z) * s


def in_window(r, z, t, p: SelfSimilarParams):
    """Membership of (r, z, t) in the open space-time window around (1, 0, T)."""
    r, z, t = np.asarray(r), np.asarray(z), np.asarray(t)
    out = (1.0 - p.delta < r) & (r < 1.0) & (-p.delta < z) & (z < p.delta) & (p.T - p.delta < t) & (t < p.T)
    return bool(out) if out.ndim == 0 else out


def in_spatial_window(r, z, p: SelfSimilarParams):
    r, z = np.asarray(r), np.asarray(z)
    return (1.0 - p.delta < r) & (r < 1.0) & (np.abs(z) < p.delta)
