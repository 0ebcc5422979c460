import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from euler_lab.fields import (
    DomainError,
    GridSpec,
    ScalarField2D,
    SelfSimilarParams,
    State,
    constantin_admissible,
    from_selfsimilar,
    in_spatial_window,
    in_window,
    scaling_exponents,
    to_selfsimilar,
)


class TestGridSpec:
    def test_nodes_are_cell_centres_strictly_inside(self):
        g = GridSpec(8, 16, 0.5)
        assert np.allclose(g.r, (np.arange(8) + 0.5) / 8)
        assert g.r.min() > 0 and g.r.max() < 1
        assert np.allclose(g.z, np.arange(16) * 0.5 / 16)
        assert g.shape == (8, 16)

    @pytest.mark.parametrize("nr,nz,L", [(7, 16, 1.0), (8, 4, 1.0), (8, 12, 1.0), (8, 16, 0.0), (8, 16, -1.0)])
    def test_rejects_invalid(self, nr, nz, L):
        with pytest.raises(ValueError):
            GridSpec(nr, nz, L)

    def test_centred_z_wraps_into_half_period(self):
        g = GridSpec(8, 8, 1.0)
        zc = g.z_centered
        assert zc.min() >= -0.5 and zc.max() < 0.5
        assert np.allclose(np.mod(zc, 1.0), g.z)


class TestScalarField:
    def test_rejects_non_finite(self):
        g = GridSpec(8, 8, 1.0)
        a = np.zeros(g.shape)
        a[3, 3] = np.nan
        with pytest.raises(ValueError):
            ScalarField2D(g, a)

    def test_grid_mismatch(self):
        a = ScalarField2D.zeros(GridSpec(8, 8, 1.0))
        b = ScalarField2D.zeros(GridSpec(8, 8, 2.0))
        with pytest.raises(ValueError):
            a + b

    def test_arithmetic_and_immutability(self):
        g = GridSpec(8, 8, 1.0)
        a = ScalarField2D.from_function(g, lambda r, z: r + z)
        b = (a * 2.0 - a).values
        assert np.array_equal(b, a.values)
        with pytest.raises(ValueError):
            a.values[0, 0] = 1.0


class TestExponents:
    def test_examples(self):
        e = scaling_exponents(2.9133)
        assert e.as_tuple() == pytest.approx((0.45665, -1.0, 4.8266, 2.9133), abs=1e-12)
        assert scaling_exponents(2.0).as_tuple() == (0.0, -1.0, 3.0, 2.0)
        assert scaling_exponents(0.4).as_tuple() == pytest.approx((-0.8, -1.0, -0.2, 0.4), abs=1e-15)

    @pytest.mark.parametrize("g", [0.0, -1.0])
    def test_non_positive(self, g):
        with pytest.raises(DomainError):
            scaling_exponents(g)

    @given(st.floats(min_value=1e-6, max_value=1e6))
    def test_stream_minus_twice_swirl_is_gamma_plus_one(self, g):
        # (-1 + 2g) - 2(-1 + g/2) = g + 1
        e = scaling_exponents(g)
        assert e.gamma_omega == -1.0
        assert e.gamma_psi - 2 * e.gamma_u == pytest.approx(g + 1.0, rel=4e-16, abs=4e-16)

    def test_constantin(self):
        assert constantin_admissible(2.9133)
        assert constantin_admissible(0.4)
        assert not constantin_admissible(0.39)


class TestCoordinateMaps:
    p = SelfSimilarParams(2.0, 1.0, 0.1)

    def test_examples(self):
        t = self.p.T - 0.1
        assert to_selfsimilar(1.0, 0.0, t, self.p) == (0.0, 0.0)
        R, Z = to_selfsimilar(0.99, 0.01, t, self.p)
        assert (float(R), float(Z)) == pytest.approx((-1.0, 1.0), abs=1e-12)
        r, z = from_selfsimilar(-1.0, 1.0, t, self.p)
        assert (float(r), float(z)) == pytest.approx((0.99, 0.01), abs=1e-15)
        assert tuple(map(float, from_selfsimilar(0.0, 0.0, 0.3, self.p))) == (1.0, 0.0)

    @pytest.mark.parametrize("t", [1.0, 1.5])
    def test_at_or_after_T(self, t):
        with pytest.raises(DomainError):
            to_selfsimilar(0.5, 0.0, t, self.p)
        with pytest.raises(DomainError):
            from_selfsimilar(-1.0, 0.0, t, self.p)

    @given(
        st.floats(0.0, 1.0),
        st.floats(-1.0, 1.0),
        st.floats(-5.0, 0.999),
        st.floats(0.1, 5.0),
    )
    def test_round_trip(self, r, z, t, gamma):
        p = SelfSimilarParams(gamma, 1.0, 0.1)
        R, Z = to_selfsimilar(r, z, t, p)
        r2, z2 = from_selfsimilar(R, Z, t, p)
        assert abs(r2 - r) <= 1e-14 and abs(z2 - z) <= 1e-14

    def test_window_maps_to_left_half_plane(self, rng):
        r = rng.uniform(0.9, 1.0, 1000)
        z = rng.uniform(-0.1, 0.1, 1000)
        t = rng.uniform(0.9, 1.0, 1000)
        inside = in_window(r, z, t, self.p)
        R, _ = to_selfsimilar(r[inside], z[inside], t[inside], self.p)
        assert np.all(R <= 0)

    def test_window_membership(self):
        p, d = self.p, self.p.delta
        assert in_window(1 - d / 2, 0.0, p.T - d / 2, p) is True
        assert in_window(1.0, 0.0, p.T - d / 2, p) is False
        assert in_window(1 - d / 2, 0.0, p.T, p) is False
        assert not in_spatial_window(1 - d, 0.0, p)

    @pytest.mark.parametrize("kw", [dict(gamma=0.0, T=1.0), dict(gamma=1.0, T=0.0), dict(gamma=1.0, T=1.0, delta=1.0), dict(gamma=1.0, T=0.05, delta=0.1)])
    def test_params_validation(self, kw):
        with pytest.raises(DomainError):
            SelfSimilarParams(**kw)


class TestStateSampling:
    def test_exact_at_nodes_and_for_bilinear_data(self):
        g = GridSpec(16, 16, 1.0)
        f = ScalarField2D.from_function(g, lambda r, z: 2.0 * r - 1.0)
        s = State(0.0, f, f, f)
        rr, zz = g.mesh()
        assert np.array_equal(s.sample(rr, zz)[0], f.values)
        r = np.array([0.01, 0.33, 0.99])
        assert np.allclose(s.sample(r, np.full(3, 0.2))[0], 2 * r - 1, atol=1e-14)

    def test_periodic_in_z(self):
        g = GridSpec(8, 16, 1.0)
        f = ScalarField2D.from_function(g, lambda r, z: np.cos(2 * np.pi * z) + 0 * r)
        s = State(0.0, f, f, f)
        a = s.sample(0.5, -0.1)[0]
        b = s.sample(0.5, 0.9)[0]
        assert a == pytest.approx(b, abs=1e-15)
