import numpy as np
import pytest

from euler_lab.fields import DomainError, GridSpec, SelfSimilarParams
from euler_lab.selfsim import ZERO, AnalyticProfileSet, default_lattice, extract_profiles, family_a, family_b, reconstruct_fields

G = 2.9133
P = SelfSimilarParams(G, 1.0, 0.1)
TIMES = P.T - P.delta * np.array([0.9, 0.7, 0.5, 0.3, 0.1])


def window_points(rng, n=200):
    return rng.uniform(0.9, 1.0, n) * (1 - 1e-12), rng.uniform(-0.099, 0.099, n), rng.uniform(0.901, 0.999, n)


class TestReconstruction:
    def test_family_a_stream(self, rng):
        b, c = 1.7, -0.6
        r, z, t = window_points(rng)
        u1, w1, psi1 = reconstruct_fields(family_a(b, c), P)(r, z, t)
        tau = P.T - t
        assert np.all(u1 == 0) and np.all(w1 == 0)
        assert np.allclose(psi1, b * tau ** (-1 + G) * z + c * tau ** (-1 + 2 * G), rtol=1e-13, atol=1e-15)

    def test_family_b_swirl_is_stationary(self, rng):
        kappa = 2.0
        f = reconstruct_fields(family_b(kappa, 1.0, G), P)
        r, z, _ = window_points(rng)
        u_a = f(r, z, np.full(r.shape, 0.91))[0]
        u_b = f(r, z, np.full(r.shape, 0.999))[0]
        assert np.max(np.abs(u_a - u_b)) <= 1e-13
        assert np.allclose(u_a, kappa * (1 - r) ** ((G - 2) / (2 * G)), rtol=1e-13)

    def test_zero_profiles(self, rng):
        f = reconstruct_fields(AnalyticProfileSet(ZERO, ZERO, ZERO), P)
        assert all(np.all(a == 0) for a in f(*window_points(rng)))

    @pytest.mark.parametrize("point", [(1.0, 0.0, 0.95), (0.95, 0.2, 0.95), (0.95, 0.0, 0.85), (0.95, 0.0, 1.0)])
    def test_outside_window(self, point):
        with pytest.raises(DomainError):
            reconstruct_fields(family_a(1, 1), P)(*point)


class TestExtraction:
    def test_family_b_round_trip(self):
        f = reconstruct_fields(family_b(2.0, 1.0, G), P)
        ext = extract_profiles([f.snapshot(t) for t in TIMES], P)
        assert ext.collapse_metric <= 1e-10
        R = ext.profiles.R_nodes[:, None]
        assert np.allclose(ext.profiles.U, 2.0 * (-R) ** 0.15674664469845204 * np.ones_like(ext.profiles.U), rtol=1e-12)

    def test_family_a_round_trip(self):
        f = reconstruct_fields(family_a(-1.1, 0.4), P)
        assert extract_profiles([f.snapshot(t) for t in TIMES], P).collapse_metric <= 1e-10

    def test_mismatched_gamma_does_not_collapse(self):
        f = reconstruct_fields(family_b(2.0, 1.0, G), P)
        wrong = SelfSimilarParams(2.0, P.T, P.delta)
        assert extract_profiles([f.snapshot(t) for t in TIMES], wrong).collapse_metric >= 1e-2

    def test_grid_state_snapshots(self):
        p = SelfSimilarParams(2.0, 1.0, 0.1)
        g = GridSpec(64, 64, 1.0)
        for ps in (family_a(1.2, -0.7), family_b(1.5, 0.3, 2.0)):
            f = reconstruct_fields(ps, p)
            states = [f.sample_state(g, t) for t in TIMES]
            assert extract_profiles(states, p).collapse_metric <= 1e-10

    def test_rows_leaving_the_window_are_dropped(self):
        f = reconstruct_fields(family_a(1, 1), P)
        R = np.array([-1e7, -10.0, -5.0, -1.0])
        Z = np.array([-1e7, -1.0, 0.0, 1.0, 1e7])
        ext = extract_profiles([f.snapshot(t) for t in TIMES[:2]], P, (R, Z))
        assert ext.dropped_R.tolist() == [-1e7] and sorted(ext.dropped_Z.tolist()) == [-1e7, 1e7]
        assert ext.profiles.shape == (3, 3)

    def test_needs_two_snapshots(self):
        f = reconstruct_fields(family_a(1, 1), P)
        with pytest.raises(ValueError):
            extract_profiles([f.snapshot(TIMES[0])], P)

    def test_times_must_lie_in_window(self):
        f = reconstruct_fields(family_a(1, 1), P)
        with pytest.raises(DomainError):
            extract_profiles([f.snapshot(0.5), f.snapshot(0.95)], P)

    def test_all_dropped(self):
        f = reconstruct_fields(family_a(1, 1), P)
        R, Z = default_lattice()
        with pytest.raises(DomainError):
            extract_profiles([f.snapshot(t) for t in TIMES], P, (R * 1e8, Z))
