"""Mapping between self-similar profiles and physical fields.

:func:`reconstruct_fields` builds (u1, omega1, psi1)(r, z, t) from a profile trio;
:func:`extract_profiles` inverts the map on a sequence of snapshots and measures
how well the rescaled snapshots collapse onto a single profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from euler_lab.fields import (
    DomainError,
    GridSpec,
    ScalarField2D,
    SelfSimilarParams,
    State,
    from_selfsimilar,
    in_window,
    scaling_exponents,
    to_selfsimilar,
)
from euler_lab.selfsim.profiles import GridProfileSet, ProfileSet, default_lattice


class SelfSimilarFields:
    """Time-dependent evaluator ``(u1, omega1, psi1)(r, z, t)`` for a profile trio."""

    def __init__(self, ps: ProfileSet, p: SelfSimilarParams):
        self.ps = ps
        self.p = p
        self.exponents = scaling_exponents(p.gamma)

    def evaluate(self, r, z, t, strict: bool = True):
        """Evaluate the fields; with ``strict`` every point must lie in the window."""
        r, z, t = np.broadcast_arrays(np.asarray(r, float), np.asarray(z, float), np.asarray(t, float))
        if strict and not np.all(in_window(r, z, t, self.p)):
            raise DomainError("evaluation point outside the self-similar window")
        R, Z = to_selfsimilar(r, z, t, self.p)
        v = self.ps.evaluate(R, Z)
        tau = self.p.T - t
        e = self.exponents
        return tau**e.gamma_u * v.U, tau**e.gamma_omega * v.Omega, tau**e.gamma_psi * v.Psi

    __call__ = evaluate

    def snapshot(self, t: float) -> FrozenSnapshot:
        return FrozenSnapshot(self, float(t))

    def sample_state(self, grid: GridSpec, t: float) -> State:
        """Sample the closed-form fields on every grid node at time ``t``.

        Nodes outside the window get the profile formula extended to the whole strip;
        axial coordinates are taken in [-L/2, L/2). psi1 here is the reconstruction,
        not an elliptic solve.
        """
        rr, zz = grid.mesh(centered=True)
        u1, w1, p1 = self.evaluate(rr, zz, np.full(rr.shape, t), strict=False)
        return State(float(t), ScalarField2D(grid, u1), ScalarField2D(grid, w1), ScalarField2D(grid, p1))


def reconstruct_fields(ps: ProfileSet, p: SelfSimilarParams) -> SelfSimilarFields:
    return SelfSimilarFields(ps, p)


@dataclass(frozen=True)
class FrozenSnapshot:
    """A reconstruction frozen at one time, sampled exactly (no interpolation)."""

    fields: SelfSimilarFields
    t: float

    def sample(self, r, z):
        r, z = np.broadcast_arrays(np.asarray(r, float), np.asarray(z, float))
        return self.fields.evaluate(r, z, np.full(r.shape, self.t), strict=False)


@dataclass
class Extraction:
    profiles: GridProfileSet
    collapse_metric: float
    per_time: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    times: list[float]
    dropped_R: np.ndarray
    dropped_Z: np.ndarray


def extract_profiles(snapshots, p: SelfSimilarParams, rz_lattice=None) -> Extraction:
    """Rescale each snapshot onto an (R, Z) lattice and measure the collapse.

    ``snapshots`` are objects with a time ``t`` and a ``sample(r, z)`` method
    (grid :class:`State` objects interpolate bilinearly; :class:`FrozenSnapshot`
    is exact). Lattice rows or columns that leave the spatial window at any
    snapshot time are dropped.

    The collapse metric is the largest, over snapshot pairs, lattice sup of
    ``|U_k - U_l| + |Omega_k - Omega_l| + |Psi_k - Psi_l|``.
    """
    snapshots = list(snapshots)
    if len(snapshots) < 2:
        raise ValueError("profile extraction needs at least two snapshots")
    times = [float(s.t) for s in snapshots]
    for t in times:
        if not (p.T - p.delta < t < p.T):
            raise DomainError(f"snapshot time {t} outside (T - delta, T)")
    R_nodes, Z_nodes = rz_lattice if rz_lattice is not None else default_lattice()
    R_nodes = np.asarray(R_nodes, dtype=float)
    Z_nodes = np.asarray(Z_nodes, dtype=float)

    # the window condition separates into an R part and a Z part
    keep_R = np.ones(R_nodes.shape, dtype=bool)
    keep_Z = np.ones(Z_nodes.shape, dtype=bool)
    for t in times:
        s = (p.T - t) ** p.gamma
        r = 1.0 + R_nodes * s
        keep_R &= (1.0 - p.delta < r) & (r < 1.0)
        keep_Z &= np.abs(Z_nodes * s) < p.delta
    if keep_R.sum() < 3 or keep_Z.sum() < 3:
        raise DomainError("fewer than 3 lattice rows or columns stay inside the window at every snapshot time")
    Rk, Zk = R_nodes[keep_R], Z_nodes[keep_Z]
    RR, ZZ = np.meshgrid(Rk, Zk, indexing="ij")

    e = scaling_exponents(p.gamma)
    per_time = []
    for snap, t in zip(snapshots, times):
        tau = p.T - t
        r, z = from_selfsimilar(RR, ZZ, t, p)
        u1, w1, p1 = snap.sample(r, z)
        per_time.append((tau ** -e.gamma_u * u1, tau ** -e.gamma_omega * w1, tau ** -e.gamma_psi * p1))

    metric = 0.0
    for k in range(len(per_time)):
        for l in range(k + 1, len(per_time)):
            gap = sum(np.abs(a - b) for a, b in zip(per_time[k], per_time[l]))
            metric = max(metric, float(np.max(gap)))

    mean = [np.mean([pt[i] for pt in per_time], axis=0) for i in range(3)]
    profiles = GridProfileSet(Rk, Zk, *mean)
    return Extraction(profiles, metric, per_time, times, R_nodes[~keep_R], Z_nodes[~keep_Z])
