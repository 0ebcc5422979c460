"""Physical-space diagnostics: cylindrical velocity and vorticity, the closed-form
Family-B vorticity, BKM integral estimates, power-law fits, vorticity-maximum
tracking and the far-field decay probe for profile sets.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from euler_lab.elliptic import ddr, ddz, velocity_from_stream
from euler_lab.fields import DomainError, ScalarField2D, SelfSimilarParams, State
from euler_lab.selfsim.profiles import ProfileSet

log = logging.getLogger(__name__)

MIN_FIT_ENTRIES = 8
MARGINAL_BAND = 0.02
# a noise-free p = 1 series fits to 1 - O(1e-15); do not let that flip the verdict
DIVERGENCE_ROUNDOFF = 1e-9
ARC_POINTS = 64


class PhysicalFields(NamedTuple):
    u_r: ScalarField2D
    u_theta: ScalarField2D
    u_z: ScalarField2D
    omega_r: ScalarField2D
    omega_theta: ScalarField2D
    omega_z: ScalarField2D


def physical_fields(s: State) -> PhysicalFields:
    """Cylindrical velocity and vorticity components recovered from (u1, omega1, psi1)."""
    grid = s.grid
    r = grid.r[:, None]
    ur, uz = velocity_from_stream(s.psi1)
    u_theta = r * s.u1.values
    omega_r = -ddz(u_theta, grid.dz)
    omega_theta = r * s.omega1.values
    omega_z = ddr(r * u_theta, grid.dr) / r
    f = lambda a: ScalarField2D(grid, a)  # noqa: E731
    return PhysicalFields(ur, f(u_theta), uz, f(omega_r), f(omega_theta), f(omega_z))


def vorticity_magnitude(s: State) -> np.ndarray:
    pf = physical_fields(s)
    return np.sqrt(pf.omega_r.values**2 + pf.omega_theta.values**2 + pf.omega_z.values**2)


def family_b_vorticity(r, kappa: float, gamma: float):
    """Axial vorticity ``kappa (2 - (alpha+2) r) / (1-r)^beta`` of the stationary swirl ``kappa r (1-r)^alpha``.

    ``alpha = 1/2 - 1/gamma`` and ``beta = 1/2 + 1/gamma``. At gamma = 2 the value is exactly ``2 kappa``.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0) or np.any(r_arr >= 1):
        raise DomainError("family-B vorticity is defined for 0 < r < 1 only")
    if gamma == 2.0:
        out = np.full(r_arr.shape, 2.0 * kappa)
    else:
        alpha = 0.5 - 1.0 / gamma
        beta = 0.5 + 1.0 / gamma
        out = kappa * (2.0 - (alpha + 2.0) * r_arr) / (1.0 - r_arr) ** beta
    return float(out) if out.ndim == 0 else out


def family_b_swirl(r, kappa: float, gamma: float):
    """Angular velocity ``u_theta = kappa r (1-r)^alpha`` of Family B (time-independent)."""
    r = np.asarray(r, dtype=float)
    return kappa * r * (1.0 - r) ** (0.5 - 1.0 / gamma)


# -- vorticity time series --------------------------------------------------


@dataclass(frozen=True)
class BkmSeries:
    t: np.ndarray
    sup: np.ndarray
    T: float

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).ravel()
        sup = np.asarray(self.sup, dtype=float).ravel()
        if t.shape != sup.shape:
            raise ValueError("times and sup values differ in length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(sup))):
            raise ValueError("series contains non-finite entries")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("series times must be strictly increasing")
        if not np.isfinite(self.T) or (t.size and t[-1] >= self.T):
            raise ValueError("every series time must precede the horizon T")
        if np.any(sup < 0):
            raise ValueError("sup values must be non-negative")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "sup", sup)
        object.__setattr__(self, "T", float(self.T))

    def __len__(self) -> int:
        return self.t.size

    def tail(self, n: int) -> BkmSeries:
        return BkmSeries(self.t[-n:], self.sup[-n:], self.T)


@dataclass(frozen=True)
class PowerLawFit:
    """``y ~ A (T - t)^(-p)``; ``p > 0`` means growth toward T."""

    p: float
    A: float
    r2: float
    n_used: int = 0

    def as_dict(self) -> dict:
        return {"p": self.p, "A": self.A, "r2": self.r2, "n_used": self.n_used}


def fit_power_law(series: BkmSeries) -> PowerLawFit:
    keep = series.sup > 0
    n = int(keep.sum())
    if n < MIN_FIT_ENTRIES:
        raise ValueError(f"power-law fit needs at least {MIN_FIT_ENTRIES} positive entries, got {n}")
    x = np.log(series.T - series.t[keep])
    y = np.log(series.sup[keep])
    A_mat = np.column_stack([np.ones_like(x), x])
    (log_A, slope), *_ = np.linalg.lstsq(A_mat, y, rcond=None)
    resid = y - A_mat @ np.array([log_A, slope])
    ss_res = float(resid @ resid)
    dev = y - y.mean()
    ss_tot = float(dev @ dev)
    r2 = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return PowerLawFit(p=float(-slope), A=float(np.exp(log_A)), r2=r2, n_used=n)


@dataclass(frozen=True)
class BkmResult:
    divergent: bool
    marginal: bool
    fit: PowerLawFit
    sampled_integral: float
    tail_integral: float | None

    @property
    def value(self) -> float | None:
        if self.divergent:
            return None
        return self.sampled_integral + self.tail_integral

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "divergent": self.divergent,
            "marginal": self.marginal,
            "p": self.fit.p,
            "A": self.fit.A,
            "r2": self.fit.r2,
            "sampled_integral": self.sampled_integral,
            "tail_integral": self.tail_integral,
        }


def bkm_integral(series: BkmSeries, delta: float = 0.1) -> BkmResult:
    """Estimate the time integral of the vorticity sup up to T.

    The sampled range is integrated by the trapezoid rule. The last third of the
    series (at least 8 entries) is fitted to ``A (T-t)^(-p)``; the integral is
    declared divergent iff ``p >= 1``, otherwise the fitted tail from the last
    sample to T is added.
    """
    n = len(series)
    if n < MIN_FIT_ENTRIES:
        raise ValueError(f"BKM estimate needs at least {MIN_FIT_ENTRIES} entries, got {n}")
    if not series.t[-1] > series.T - delta:
        raise ValueError(f"the last sample t={series.t[-1]:.6g} lies outside (T - delta, T)")
    tail = series.tail(max(MIN_FIT_ENTRIES, n // 3))
    bad = int(np.sum(tail.sup <= 0))
    if bad:
        warnings.warn(f"{bad} nonpositive sup values excluded from the tail fit", RuntimeWarning, stacklevel=2)
    fit = fit_power_law(tail)
    sampled = float(0.5 * np.sum(np.diff(series.t) * (series.sup[1:] + series.sup[:-1])))
    divergent = fit.p >= 1.0 - DIVERGENCE_ROUNDOFF
    marginal = abs(fit.p - 1.0) <= MARGINAL_BAND
    tail_value = None
    if not divergent:
        tau = series.T - series.t[-1]
        tail_value = float(fit.A * tau ** (1.0 - fit.p) / (1.0 - fit.p))
    return BkmResult(divergent, marginal, fit, sampled, tail_value)


def closed_form_bkm_divergent(tag: dict) -> bool:
    """BKM verdict for an exact family from its closed form (not from grid data).

    Family A carries no vorticity; Family B has unbounded axial vorticity at the wall for any nonzero kappa.
    """
    family = tag.get("family")
    if family == "A":
        return False
    if family == "B":
        return float(tag["kappa"]) != 0.0
    raise ValueError(f"no closed-form verdict for profile tag {tag!r}")


def sup_vorticity(s: State, window: SelfSimilarParams | None = None) -> float:
    """Grid sup of |omega| over the whole strip, or over the window's spatial section if given."""
    mag = vorticity_magnitude(s)
    if window is not None:
        rr, zz = s.grid.mesh(centered=True)
        mask = (rr > 1.0 - window.delta) & (rr < 1.0) & (np.abs(zz) < window.delta)
        if not mask.any():
            return 0.0
        mag = mag[mask]
    return float(np.max(mag))


def bkm_series_from_states(states, T: float, window: SelfSimilarParams | None = None) -> BkmSeries:
    states = list(states)
    return BkmSeries(np.array([s.t for s in states]), np.array([sup_vorticity(s, window) for s in states]), T)


def max_vorticity_location(s: State) -> tuple[float, float, float]:
    """Location ``(r*, z*, value)`` of the largest vorticity magnitude.

    Ties go to the largest r, then the smallest |z|; ``z*`` is reported in [-L/2, L/2).
    """
    mag = vorticity_magnitude(s)
    grid = s.grid
    top = mag.max()
    i_idx, j_idx = np.nonzero(mag == top)
    zc = grid.z_centered
    order = np.lexsort((np.abs(zc[j_idx]), -grid.r[i_idx]))
    i, j = int(i_idx[order[0]]), int(j_idx[order[0]])
    return float(grid.r[i]), float(zc[j]), float(top)


# -- far-field decay probe ---------------------------------------------------

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass
class DecayReport:
    radii: np.ndarray
    max_U: np.ndarray
    max_grad_ratio: np.ndarray
    swirl_verdict: str
    stream_verdict: str
    skipped: int = 0
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "radii": self.radii.tolist(),
            "max_U": self.max_U.tolist(),
            "max_grad_ratio": self.max_grad_ratio.tolist(),
            "swirl_verdict": self.swirl_verdict,
            "stream_verdict": self.stream_verdict,
            "skipped": self.skipped,
            "notes": list(self.notes),
        }


def arc_angles(n: int = ARC_POINTS) -> np.ndarray:
    """Equally spaced angles strictly inside (pi/2, 3pi/2), i.e. the open left half-plane."""
    return np.pi / 2 + np.pi * (np.arange(n) + 0.5) / n


def _evaluate_skipping(ps: ProfileSet, R, Z):
    good = ~ps.singular_mask(R, Z)
    try:
        v = ps.evaluate(R[good], Z[good])
        return v, good
    except DomainError:
        pass
    ok = np.zeros(R.shape, dtype=bool)
    for k in np.nonzero(good)[0]:
        try:
            ps.evaluate(R[k : k + 1], Z[k : k + 1])
            ok[k] = True
        except DomainError:
            pass
    return ps.evaluate(R[ok], Z[ok]), ok


def _trend(values: np.ndarray, rtol: float = 1e-12) -> str:
    """Verdict on whether a positive sequence indexed by increasing radius tends to zero."""
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return SATISFIED
    steps = np.diff(values)
    slack = rtol * scale
    if np.all(steps <= slack) and values[-1] <= 0.5 * values[0]:
        return SATISFIED
    # flat or growing sequences do not tend to zero
    if np.all(steps >= -slack):
        return VIOLATED
    return INCONCLUSIVE


def decay_condition_check(ps: ProfileSet, gamma: float, radii) -> DecayReport:
    """Probe ``|U| = o(1)`` (stated for 0 < gamma < 2) and ``|grad Psi| = o(rho)`` on half-circles.

    For each radius rho the maxima of |U| and |grad Psi|/rho over 64 points of the
    left half-circle are recorded, and the trend across radii gives the verdict.
    When the profile's singular locus reaches the arc endpoints (0, +-rho) the sup
    of |U| over the closed arc is unbounded and the swirl condition is violated.
    """
    radii = np.asarray(radii, dtype=float).ravel()
    if radii.size < 3:
        raise ValueError("decay probe needs at least 3 radii")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be positive and strictly increasing")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    theta = arc_angles()
    max_U = np.zeros(radii.size)
    max_G = np.zeros(radii.size)
    skipped = 0
    endpoint_singular = False
    for k, rho in enumerate(radii):
        R = rho * np.cos(theta)
        Z = rho * np.sin(theta)
        v, ok = _evaluate_skipping(ps, R, Z)
        skipped += int((~ok).sum())
        if v.U.size:
            max_U[k] = float(np.max(np.abs(v.U)))
            max_G[k] = float(np.max(np.hypot(v.Psi_R, v.Psi_Z))) / rho
        endpoint_singular |= bool(np.any(ps.singular_mask(np.zeros(2), np.array([rho, -rho]))))

    notes = []
    if not np.any(max_U):
        swirl = SATISFIED
    elif gamma >= 2:
        swirl = INCONCLUSIVE
        notes.append("swirl decay is only required for 0 < gamma < 2")
    elif endpoint_singular:
        swirl = VIOLATED
        notes.append("U is unbounded at the arc endpoints on R = 0")
    else:
        swirl = _trend(max_U)
    stream = _trend(max_G)
    if skipped:
        notes.append(f"{skipped} probe points skipped")
    return DecayReport(radii, max_U, max_G, swirl, stream, skipped, notes)
