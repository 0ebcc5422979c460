"""Residuals of the self-similar profile equations.

Three systems are evaluated pointwise on a sample set in the left half-plane:

* the leading-order balance, obtained by letting t -> T in the rescaled equations;
* the next-order balance, carrying the wall-curvature factor r = 1 + R (T-t)^gamma;
* the full time-dependent equations before any limit is taken, with every
  (T-t)-weighted term retained.

Notation: Y = (R, Z), grad = (d_R, d_Z), perp-grad = (-d_Z, d_R).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from euler_lab.fields import DomainError, SelfSimilarParams, from_selfsimilar, in_spatial_window
from euler_lab.selfsim.profiles import ProfileSet, ProfileValues

LEADING = ("leading_swirl", "leading_vorticity", "leading_stream")
NEXT_ORDER = ("next_swirl", "next_vorticity", "next_stream")
FULL = ("full_swirl", "full_vorticity", "full_stream")


@dataclass(frozen=True)
class EquationResidual:
    equation: str
    sup: float
    rms: float
    argmax: tuple[float, float] | None


@dataclass
class ResidualReport:
    records: list[EquationResidual]
    n_samples: int
    skipped: list[tuple[float, float]] = field(default_factory=list)
    description: str = ""

    def __getitem__(self, equation: str) -> EquationResidual:
        for rec in self.records:
            if rec.equation == equation:
                return rec
        raise KeyError(equation)

    def sups(self) -> dict[str, float]:
        return {rec.equation: rec.sup for rec in self.records}

    def max_sup(self) -> float:
        return max((rec.sup for rec in self.records), default=0.0)

    @property
    def n_used(self) -> int:
        return self.n_samples - len(self.skipped)

    def worst(self) -> EquationResidual:
        return max(self.records, key=lambda rec: rec.sup)

    def as_dict(self) -> dict:
        return {
            "description": self.description,
            "n_samples": self.n_samples,
            "n_skipped": len(self.skipped),
            "equations": [
                {"equation": r.equation, "sup": r.sup, "rms": r.rms, "argmax": list(r.argmax) if r.argmax else None}
                for r in self.records
            ],
        }

    def table(self) -> str:
        lines = [f"{self.description}  (samples used {self.n_used}/{self.n_samples})"]
        lines.append(f"  {'equation':<20}{'sup':>24}{'rms':>24}  argmax (R, Z)")
        for r in self.records:
            where = f"({r.argmax[0]:.6g}, {r.argmax[1]:.6g})" if r.argmax else "-"
            lines.append(f"  {r.equation:<20}{r.sup:>24.17g}{r.rms:>24.17g}  {where}")
        return "\n".join(lines)


def as_samples(samples, ps: ProfileSet | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Normalise a sample set to two flat arrays (R, Z).

    Accepts ``None`` (the profile's default samples), a pair of arrays, or an (N, 2) array.
    """
    if samples is None:
        if ps is None:
            raise ValueError("no samples given")
        R, Z = ps.default_samples()
    elif isinstance(samples, tuple) and len(samples) == 2:
        R, Z = samples
    else:
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("samples must be a pair (R, Z) or an (N, 2) array")
        R, Z = arr[:, 0], arr[:, 1]
    R, Z = np.broadcast_arrays(np.asarray(R, dtype=float).ravel(), np.asarray(Z, dtype=float).ravel())
    if np.any(R > 0):
        raise DomainError("samples must lie in the closed left half-plane R <= 0")
    return R, Z


def _record(name, res, R, Z) -> EquationResidual:
    if res.size == 0:
        return EquationResidual(name, 0.0, 0.0, None)
    a = np.abs(res)
    k = int(np.argmax(a))
    return EquationResidual(name, float(a[k]), float(np.sqrt(np.mean(a * a))), (float(R[k]), float(Z[k])))


def _build(names, residuals, R, Z, n_samples, skipped, description) -> ResidualReport:
    records = [_record(n, r, R, Z) for n, r in zip(names, residuals)]
    return ResidualReport(records, n_samples, skipped, description)


def _regular(ps: ProfileSet, R, Z):
    bad = ps.singular_mask(R, Z)
    skipped = [(float(r), float(z)) for r, z in zip(R[bad], Z[bad])]
    return R[~bad], Z[~bad], skipped


def leading_residuals(v: ProfileValues, gamma: float, R, Z):
    adv_u = -v.Psi_Z * v.U_R + v.Psi_R * v.U_Z
    adv_w = -v.Psi_Z * v.Omega_R + v.Psi_R * v.Omega_Z
    swirl = (1.0 - gamma / 2.0) * v.U + gamma * (R * v.U_R + Z * v.U_Z) + adv_u
    vort = v.Omega + gamma * (R * v.Omega_R + Z * v.Omega_Z) + adv_w - 2.0 * v.U * v.U_Z
    stream = -(v.Psi_RR + v.Psi_ZZ) - v.Omega
    return swirl, vort, stream


def next_order_residuals(v: ProfileValues, R, Z):
    adv_u = -v.Psi_Z * v.U_R + v.Psi_R * v.U_Z
    adv_w = -v.Psi_Z * v.Omega_R + v.Psi_R * v.Omega_Z
    swirl = R * adv_u + 2.0 * v.Psi * v.U_Z - 2.0 * v.U * v.Psi_Z
    vort = R * adv_w + 2.0 * v.Psi * v.Omega_Z
    return swirl, vort, v.Psi_R


def residual_group1(ps: ProfileSet, gamma: float, samples=None) -> ResidualReport:
    """Leading-order profile equations: swirl transport, vorticity transport, Poisson."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    R, Z = as_samples(samples, ps)
    n = R.size
    R, Z, skipped = _regular(ps, R, Z)
    v = ps.evaluate(R, Z)
    return _build(LEADING, leading_residuals(v, gamma, R, Z), R, Z, n, skipped, f"leading-order balance, gamma={gamma:.17g}")


def residual_group2(ps: ProfileSet, samples=None) -> ResidualReport:
    """Next-order profile equations; the last one says Psi is independent of R."""
    R, Z = as_samples(samples, ps)
    n = R.size
    R, Z, skipped = _regular(ps, R, Z)
    v = ps.evaluate(R, Z)
    return _build(NEXT_ORDER, next_order_residuals(v, R, Z), R, Z, n, skipped, "next-order balance")


def full_residuals(v: ProfileValues, gamma: float, tau: float, R, Z):
    """Raw residuals of the transformed Euler system after substituting the ansatz at T - t = tau."""
    g = gamma
    s = tau**g
    w = 1.0 + R * s
    # meridional velocity and its pairing with the rescaled derivatives
    u_r_part = -w * v.Psi_Z
    u_z_part = 2.0 * tau ** (-1.0 + 2.0 * g) * v.Psi + w * tau ** (-1.0 + g) * v.Psi_R

    p_u = tau ** (-2.0 + g / 2.0)
    swirl = (
        (1.0 - g / 2.0) * p_u * v.U
        + g * p_u * (R * v.U_R + Z * v.U_Z)
        + p_u * u_r_part * v.U_R
        + u_z_part * tau ** (-1.0 - g / 2.0) * v.U_Z
        - 2.0 * tau ** (-2.0 + 1.5 * g) * v.U * v.Psi_Z
    )
    p_w = tau**-2.0
    vort = (
        p_w * v.Omega
        + g * p_w * (R * v.Omega_R + Z * v.Omega_Z)
        + p_w * u_r_part * v.Omega_R
        + u_z_part * tau ** (-1.0 - g) * v.Omega_Z
        - p_w * 2.0 * v.U * v.U_Z
    )
    stream = -(v.Psi_RR + v.Psi_ZZ) / tau - 3.0 * tau ** (-1.0 + g) / w * v.Psi_R - v.Omega / tau
    return swirl, vort, stream


def residual_timedependent(ps: ProfileSet, p: SelfSimilarParams, t: float, samples=None) -> ResidualReport:
    """Full time-dependent equations at time ``t``; samples mapping outside the window's spatial section are skipped."""
    if t >= p.T:
        raise DomainError("t must precede the singular time T")
    if t < p.T - p.delta:
        raise DomainError("t must lie in the window [T - delta, T)")
    R, Z = as_samples(samples, ps)
    n = R.size
    r, z = from_selfsimilar(R, Z, t, p)
    inside = in_spatial_window(r, z, p) & ~ps.singular_mask(R, Z)
    skipped = [(float(a), float(b)) for a, b in zip(R[~inside], Z[~inside])]
    R, Z = R[inside], Z[inside]
    v = ps.evaluate(R, Z)
    tau = p.T - t
    return _build(FULL, full_residuals(v, p.gamma, tau, R, Z), R, Z, n, skipped, f"full system at t={t:.17g}, gamma={p.gamma:.17g}")
