"""Self-similar profile trios (U, Omega, Psi) on the closed left half-plane R <= 0.

Two backings exist. :class:`AnalyticProfileSet` composes closed-form terms with
exact derivatives; :class:`GridProfileSet` stores values on a tensor (R, Z)
lattice and differentiates them with second-order differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from euler_lab.fields import DomainError

DEFAULT_R_RANGE = (-10.0, -0.1)
DEFAULT_Z_RANGE = (-10.0, 10.0)


def default_lattice(n_r: int = 32, n_z: int = 33) -> tuple[np.ndarray, np.ndarray]:
    """Log-spaced R nodes in [-10, -0.1] and uniform Z nodes in [-10, 10]."""
    R = -np.logspace(math.log10(-DEFAULT_R_RANGE[0]), math.log10(-DEFAULT_R_RANGE[1]), n_r)
    Z = np.linspace(DEFAULT_Z_RANGE[0], DEFAULT_Z_RANGE[1], n_z)
    return R, Z


def lattice_points(R_nodes, Z_nodes) -> tuple[np.ndarray, np.ndarray]:
    RR, ZZ = np.meshgrid(R_nodes, Z_nodes, indexing="ij")
    return RR.ravel(), ZZ.ravel()


# -- analytic terms ---------------------------------------------------------


class Term:
    """Closed-form scalar function of (R, Z) returning its value and derivatives.

    ``jet`` returns ``(f, f_R, f_Z, f_RR, f_ZZ)``.
    """

    def jet(self, R, Z):
        raise NotImplementedError

    def singular(self, R, Z):
        return np.zeros(np.broadcast(R, Z).shape, dtype=bool)

    def __add__(self, other: Term) -> Term:
        return SumTerm((self, other))


@dataclass(frozen=True)
class SumTerm(Term):
    parts: tuple[Term, ...]

    def jet(self, R, Z):
        jets = [p.jet(R, Z) for p in self.parts]
        return tuple(sum(js) for js in zip(*jets))

    def singular(self, R, Z):
        mask = np.zeros(np.broadcast(R, Z).shape, dtype=bool)
        for p in self.parts:
            mask |= p.singular(R, Z)
        return mask


@dataclass(frozen=True)
class Polynomial(Term):
    """``sum c_ij R^i Z^j`` with ``coeffs = {(i, j): c_ij}``."""

    coeffs: tuple[tuple[tuple[int, int], float], ...]

    @classmethod
    def of(cls, coeffs: dict[tuple[int, int], float]) -> Polynomial:
        return cls(tuple(sorted((k, float(v)) for k, v in coeffs.items())))

    def jet(self, R, Z):
        R, Z = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(Z, dtype=float))
        out = [np.zeros(R.shape) for _ in range(5)]

        def mono(x, n):
            return x**n if n > 0 else np.ones(x.shape)

        for (i, j), c in self.coeffs:
            ri, zj = mono(R, i), mono(Z, j)
            out[0] = out[0] + c * ri * zj
            if i >= 1:
                out[1] = out[1] + c * i * mono(R, i - 1) * zj
            if j >= 1:
                out[2] = out[2] + c * j * ri * mono(Z, j - 1)
            if i >= 2:
                out[3] = out[3] + c * i * (i - 1) * mono(R, i - 2) * zj
            if j >= 2:
                out[4] = out[4] + c * j * (j - 1) * ri * mono(Z, j - 2)
        return tuple(out)


ZERO = Polynomial.of({})


def constant(c: float) -> Polynomial:
    return Polynomial.of({(0, 0): c})


@dataclass(frozen=True)
class RadialPowerLaw(Term):
    """``kappa * (-R)^exponent``; unbounded (or with unbounded slope) at R = 0 unless the exponent is 0, 1 or >= 2."""

    kappa: float
    exponent: float

    def _regular_at_axis(self) -> bool:
        e = self.exponent
        return e == 0 or e == 1 or e >= 2

    def jet(self, R, Z):
        R, Z = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(Z, dtype=float))
        zero = np.zeros(R.shape)
        k, e = self.kappa, self.exponent
        x = -R
        if e == 0:
            return (np.full(R.shape, k), zero, zero, zero, zero)
        v = k * x**e
        vR = -k * e * x ** (e - 1)
        vRR = k * e * (e - 1) * x ** (e - 2) if e != 1 else zero
        return (v, vR, zero, vRR, zero)

    def singular(self, R, Z):
        shape = np.broadcast(R, Z).shape
        if self._regular_at_axis():
            return np.zeros(shape, dtype=bool)
        return np.broadcast_to(np.asarray(R) == 0, shape).copy()


# -- profile sets -----------------------------------------------------------


@dataclass(frozen=True)
class ProfileValues:
    U: np.ndarray
    U_R: np.ndarray
    U_Z: np.ndarray
    Omega: np.ndarray
    Omega_R: np.ndarray
    Omega_Z: np.ndarray
    Psi: np.ndarray
    Psi_R: np.ndarray
    Psi_Z: np.ndarray
    Psi_RR: np.ndarray
    Psi_ZZ: np.ndarray


class ProfileSet:
    backing: str = "abstract"
    tag: dict[str, Any] | None = None

    def evaluate(self, R, Z) -> ProfileValues:
        raise NotImplementedError

    def singular_mask(self, R, Z) -> np.ndarray:
        return np.zeros(np.broadcast(R, Z).shape, dtype=bool)

    def default_samples(self) -> tuple[np.ndarray, np.ndarray]:
        return lattice_points(*default_lattice())

    @staticmethod
    def _check_half_plane(R):
        if np.any(np.asarray(R) > 0):
            raise DomainError("profiles are defined only on the closed left half-plane R <= 0")


class AnalyticProfileSet(ProfileSet):
    backing = "analytic"

    def __init__(self, U: Term, Omega: Term, Psi: Term, tag: dict[str, Any] | None = None):
        self.U, self.Omega, self.Psi = U, Omega, Psi
        self.tag = tag

    def singular_mask(self, R, Z):
        return self.U.singular(R, Z) | self.Omega.singular(R, Z) | self.Psi.singular(R, Z)

    def evaluate(self, R, Z) -> ProfileValues:
        self._check_half_plane(R)
        if np.any(self.singular_mask(R, Z)):
            raise DomainError("evaluation on a declared singular locus")
        u = self.U.jet(R, Z)
        w = self.Omega.jet(R, Z)
        p = self.Psi.jet(R, Z)
        return ProfileValues(u[0], u[1], u[2], w[0], w[1], w[2], p[0], p[1], p[2], p[3], p[4])

    def perturbed(self, U: Term | None = None, Omega: Term | None = None, Psi: Term | None = None) -> AnalyticProfileSet:
        """Copy with the given terms added; the family tag is dropped."""
        return AnalyticProfileSet(
            self.U + U if U is not None else self.U,
            self.Omega + Omega if Omega is not None else self.Omega,
            self.Psi + Psi if Psi is not None else self.Psi,
        )

    def __repr__(self):
        return f"AnalyticProfileSet(tag={self.tag})"


def _second_derivative(a: np.ndarray, x: np.ndarray, axis: int) -> np.ndarray:
    """Second derivative along ``axis`` on possibly non-uniform nodes.

    Three-point weights inside, four-point one-sided weights at the two ends, each
    obtained from the Taylor conditions on its own stencil.
    """
    n = len(x)
    out = np.empty(a.shape)
    a = np.moveaxis(a, axis, 0)
    res = np.moveaxis(out, axis, 0)
    for i in range(n):
        if i == 0:
            idx = np.arange(0, min(4, n))
        elif i == n - 1:
            idx = np.arange(max(0, n - 4), n)
        else:
            idx = np.array([i - 1, i, i + 1])
        h = x[idx] - x[i]
        m = len(idx)
        V = np.vander(h, m, increasing=True).T
        rhs = np.zeros(m)
        rhs[2] = 2.0
        w = np.linalg.solve(V, rhs)
        res[i] = np.tensordot(w, a[idx], axes=1)
    return out


class GridProfileSet(ProfileSet):
    """Profiles sampled on a tensor lattice, differentiated with second-order differences.

    Exact values and derivatives are returned at lattice nodes; elsewhere inside the
    lattice box every quantity is interpolated bilinearly.
    """

    backing = "grid"

    def __init__(self, R_nodes, Z_nodes, U, Omega, Psi, tag: dict[str, Any] | None = None):
        R_nodes = np.asarray(R_nodes, dtype=float)
        Z_nodes = np.asarray(Z_nodes, dtype=float)
        if R_nodes.ndim != 1 or Z_nodes.ndim != 1 or len(R_nodes) < 3 or len(Z_nodes) < 3:
            raise ValueError("lattice needs at least 3 nodes per direction")
        if np.any(np.diff(R_nodes) <= 0) or np.any(np.diff(Z_nodes) <= 0):
            raise ValueError("lattice nodes must be strictly increasing")
        self._check_half_plane(R_nodes)
        shape = (len(R_nodes), len(Z_nodes))
        arrays = [np.array(a, dtype=float).reshape(shape) for a in (U, Omega, Psi)]
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise ValueError("profile samples must be finite")
        self.R_nodes, self.Z_nodes = R_nodes, Z_nodes
        self.U, self.Omega, self.Psi = arrays
        self.tag = tag

        def d(a, axis):
            return np.gradient(a, R_nodes if axis == 0 else Z_nodes, axis=axis, edge_order=2)

        self._tables = {
            "U": self.U,
            "U_R": d(self.U, 0),
            "U_Z": d(self.U, 1),
            "Omega": self.Omega,
            "Omega_R": d(self.Omega, 0),
            "Omega_Z": d(self.Omega, 1),
            "Psi": self.Psi,
            "Psi_R": d(self.Psi, 0),
            "Psi_Z": d(self.Psi, 1),
        }
        self._tables["Psi_RR"] = _second_derivative(self.Psi, R_nodes, 0)
        self._tables["Psi_ZZ"] = _second_derivative(self.Psi, Z_nodes, 1)

    @property
    def shape(self) -> tuple[int, int]:
        return self.U.shape

    def default_samples(self):
        return lattice_points(self.R_nodes, self.Z_nodes)

    @staticmethod
    def _locate(nodes, x):
        i = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(nodes) - 2)
        w = (x - nodes[i]) / (nodes[i + 1] - nodes[i])
        return i, w

    def evaluate(self, R, Z) -> ProfileValues:
        R, Z = np.broadcast_arrays(np.asarray(R, dtype=float), np.asarray(Z, dtype=float))
        tol = 1e-12
        if (
            np.any(R < self.R_nodes[0] - tol * abs(self.R_nodes[0]))
            or np.any(R > self.R_nodes[-1] + tol * abs(self.R_nodes[-1]))
            or np.any(Z < self.Z_nodes[0] - tol * max(1.0, abs(self.Z_nodes[0])))
            or np.any(Z > self.Z_nodes[-1] + tol * max(1.0, abs(self.Z_nodes[-1])))
        ):
            raise DomainError("evaluation point outside the profile lattice")
        i, wr = self._locate(self.R_nodes, R)
        j, wz = self._locate(self.Z_nodes, Z)
        # weights are exactly 0 or 1 at nodes, so node values come back bit-exact
        out = {
            name: (1 - wr) * ((1 - wz) * a[i, j] + wz * a[i, j + 1]) + wr * ((1 - wz) * a[i + 1, j] + wz * a[i + 1, j + 1])
            for name, a in self._tables.items()
        }
        return ProfileValues(**out)

    def __repr__(self):
        return f"GridProfileSet(shape={self.shape}, tag={self.tag})"


def sample_profiles(ps: ProfileSet, R_nodes=None, Z_nodes=None) -> GridProfileSet:
    """Grid-backed copy of ``ps`` holding only its values on the lattice."""
    if R_nodes is None or Z_nodes is None:
        R_nodes, Z_nodes = default_lattice()
    RR, ZZ = np.meshgrid(R_nodes, Z_nodes, indexing="ij")
    v = ps.evaluate(RR, ZZ)
    return GridProfileSet(R_nodes, Z_nodes, v.U, v.Omega, v.Psi)


# -- the two exact families -------------------------------------------------


def family_a(b: float, c: float) -> AnalyticProfileSet:
    """Trivial family: U = 0, Omega = 0, Psi = b Z + c."""
    return AnalyticProfileSet(ZERO, ZERO, Polynomial.of({(0, 1): b, (0, 0): c}), tag={"family": "A", "b": float(b), "c": float(c)})


def family_b_exponent(gamma: float) -> float:
    return 0.5 - 1.0 / gamma


def family_b(kappa: float, c: float, gamma: float) -> AnalyticProfileSet:
    """Stationary-swirl family: U = kappa (-R)^(1/2 - 1/gamma), Omega = 0, Psi = c.

    The point R = 0 is declared singular for every gamma != 2, where either U or its
    radial slope is unbounded.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return AnalyticProfileSet(
        RadialPowerLaw(float(kappa), family_b_exponent(gamma)),
        ZERO,
        constant(c),
        tag={"family": "B", "kappa": float(kappa), "c": float(c), "gamma": float(gamma)},
    )


def profile_from_tag(tag: dict[str, Any]) -> AnalyticProfileSet:
    name = tag.get("family")
    if name == "A":
        return family_a(tag["b"], tag["c"])
    if name == "B":
        return family_b(tag["kappa"], tag["c"], tag["gamma"])
    raise ValueError(f"unknown profile family tag {tag!r}")
