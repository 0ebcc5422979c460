"""Decide whether a profile trio belongs to one of the two exact families.

The decision chain follows the consequences of the over-determined profile system:
Psi cannot depend on R; Psi'' balances -Omega; Psi Omega' vanishes; Psi is at most
quadratic in Z and its quadratic part must vanish; what is left is either U = 0
with affine Psi, or a Z-independent radial power law U with constant Psi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from euler_lab.selfsim.profiles import ProfileSet, family_b_exponent
from euler_lab.selfsim.residuals import ResidualReport, _regular, as_samples, residual_group1, residual_group2

FAMILY_A = "FamilyA"
FAMILY_B = "FamilyB"
NOT_SOLUTION = "NotSolution"

MIN_DISTINCT = 10


class SampleGeometryError(ValueError):
    """The sample set cannot support the least-squares fits."""


@dataclass
class Classification:
    verdict: str
    params: dict[str, float] = field(default_factory=dict)
    fit_residuals: dict[str, float] = field(default_factory=dict)
    checks: dict[str, float] = field(default_factory=dict)
    failed_check: str | None = None
    reports: list[ResidualReport] = field(default_factory=list)

    @property
    def is_family(self) -> bool:
        return self.verdict in (FAMILY_A, FAMILY_B)

    def as_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "params": dict(self.params),
            "fit_residuals": dict(self.fit_residuals),
            "checks": dict(self.checks),
            "failed_check": self.failed_check,
        }
        if self.reports:
            out["reports"] = [r.as_dict() for r in self.reports]
        return out


def _lstsq(columns, y):
    A = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return coef, float(np.max(np.abs(resid))) if resid.size else 0.0


def classify(ps: ProfileSet, gamma: float, tol: float, samples=None) -> Classification:
    if not tol > 0:
        raise ValueError("classification tolerance must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    R, Z = as_samples(samples, ps)
    R, Z, _ = _regular(ps, R, Z)
    if np.unique(R).size < MIN_DISTINCT or np.unique(Z).size < MIN_DISTINCT:
        raise SampleGeometryError(
            f"need at least {MIN_DISTINCT} distinct R and Z values, got {np.unique(R).size} and {np.unique(Z).size}"
        )
    v = ps.evaluate(R, Z)
    out = Classification(NOT_SOLUTION)

    def reject(name):
        out.failed_check = name
        out.reports = [residual_group1(ps, gamma, (R, Z)), residual_group2(ps, (R, Z))]
        return out

    out.checks["stream_radial"] = float(np.max(np.abs(v.Psi_R)))
    if out.checks["stream_radial"] > tol:
        return reject("stream_radial")

    one = np.ones_like(Z)
    (q0, q1, q2), quad_fit = _lstsq([one, Z, Z * Z], v.Psi)
    a = -2.0 * q2
    out.fit_residuals["stream_quadratic"] = quad_fit
    out.checks["stream_curvature"] = float(np.max(np.abs(v.Omega + v.Psi_ZZ)))
    if out.checks["stream_curvature"] > tol:
        return reject("stream_curvature")
    out.checks["stream_vorticity_product"] = float(np.max(np.abs(v.Psi * v.Omega_Z)))
    if out.checks["stream_vorticity_product"] > tol:
        return reject("stream_vorticity_product")
    out.params["a"] = float(a)
    out.checks["quadratic_coefficient"] = abs(float(a))
    if abs(a) > tol:
        return reject("quadratic_coefficient")

    (c, b), affine_fit = _lstsq([one, Z], v.Psi)
    out.fit_residuals["stream_affine"] = affine_fit
    if affine_fit > tol:
        return reject("stream_affine")
    b, c = float(b), float(c)

    out.checks["swirl_magnitude"] = float(np.max(np.abs(v.U)))
    if out.checks["swirl_magnitude"] <= tol:
        out.verdict = FAMILY_A
        out.params = {"b": b, "c": c}
        return out

    out.checks["swirl_axial_slope"] = float(np.max(np.abs(v.U_Z)))
    if out.checks["swirl_axial_slope"] > tol:
        return reject("swirl_axial_slope")
    out.checks["stream_slope"] = abs(b)
    if abs(b) > tol:
        return reject("stream_slope")
    sign = np.sign(v.U)
    if np.any(sign == 0) or np.any(sign != sign[0]):
        out.checks["swirl_sign_change"] = 1.0
        return reject("swirl_sign_change")
    ref = int(np.argmin(np.abs(R + 1.0)))
    (intercept, slope), log_fit = _lstsq([one, np.log(-R)], np.log(np.abs(v.U)))
    out.fit_residuals["swirl_power_law"] = log_fit
    out.checks["swirl_power_law"] = log_fit
    if log_fit > tol:
        return reject("swirl_power_law")
    expected = family_b_exponent(gamma)
    out.checks["swirl_exponent"] = abs(float(slope) - expected)
    if out.checks["swirl_exponent"] > tol:
        return reject("swirl_exponent")
    out.verdict = FAMILY_B
    out.params = {"kappa": float(sign[ref] * np.exp(intercept)), "c": c, "exponent": float(slope)}
    return out
