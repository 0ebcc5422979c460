import numpy as np
import pytest

from euler_lab.fields import DomainError
from euler_lab.selfsim import (
    GridProfileSet,
    Polynomial,
    RadialPowerLaw,
    default_lattice,
    family_a,
    family_b,
    family_b_exponent,
    profile_from_tag,
    sample_profiles,
)


def test_default_lattice():
    R, Z = default_lattice()
    assert R.shape == (32,) and Z.shape == (33,)
    assert R[0] == pytest.approx(-10) and R[-1] == pytest.approx(-0.1)
    assert Z[0] == -10 and Z[-1] == 10 and np.all(np.diff(R) > 0)


class TestFamilyA:
    def test_zero(self):
        v = family_a(0, 0).evaluate(np.array([-1.0, -3.0]), np.array([0.5, 2.0]))
        for name in ("U", "U_R", "U_Z", "Omega", "Psi", "Psi_R", "Psi_Z", "Psi_RR", "Psi_ZZ"):
            assert np.all(getattr(v, name) == 0)

    def test_affine_evaluation(self):
        v = family_a(1, 2).evaluate(0.0, 3.0)
        assert float(v.Psi) == 5 and float(v.Psi_R) == 0 and float(v.Psi_Z) == 1

    def test_not_singular_on_axis(self):
        assert not family_a(1, 2).singular_mask(np.zeros(3), np.arange(3.0)).any()


class TestFamilyB:
    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 2.9133, 5.0])
    def test_unit_distance_value(self, gamma):
        assert float(family_b(1.7, 0.0, gamma).evaluate(-1.0, 4.0).U) == pytest.approx(1.7, abs=1e-15)

    def test_exponent_matches_physical_space_form(self):
        g = 2.9133
        assert family_b_exponent(g) == pytest.approx(0.15675, abs=1e-5)
        assert family_b_exponent(g) == pytest.approx((g - 2) / (2 * g), abs=1e-15)

    def test_gamma_two_is_constant_and_regular(self):
        ps = family_b(3.0, 1.0, 2.0)
        R = np.array([0.0, -1e-9, -7.0])
        v = ps.evaluate(R, np.zeros(3))
        assert np.all(v.U == 3.0) and np.all(v.U_R == 0.0)
        assert not ps.singular_mask(R, np.zeros(3)).any()

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.9133, 5.0])
    def test_singular_on_axis(self, gamma):
        ps = family_b(1.0, 0.0, gamma)
        assert ps.singular_mask(np.array([0.0, -1.0]), np.zeros(2)).tolist() == [True, False]
        with pytest.raises(DomainError):
            ps.evaluate(0.0, 1.0)

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 2.9133, 5.0])
    def test_radial_ode(self, gamma):
        R = -np.geomspace(10, 1e-3, 200)
        v = family_b(-1.3, 2.0, gamma).evaluate(R, np.zeros_like(R))
        res = (1 - gamma / 2) * v.U + gamma * R * v.U_R
        assert np.max(np.abs(res)) <= 1e-12 * max(1.0, np.max(np.abs(v.U)))

    def test_invalid_gamma(self):
        with pytest.raises(DomainError):
            family_b(1.0, 0.0, 0.0)


def test_right_half_plane_rejected():
    with pytest.raises(DomainError):
        family_a(1, 1).evaluate(0.5, 0.0)


def test_polynomial_jet():
    p = Polynomial.of({(2, 1): 3.0, (0, 0): 1.0})
    f, fR, fZ, fRR, fZZ = p.jet(np.array(-2.0), np.array(0.5))
    assert (f, fR, fZ, fRR, fZZ) == (7.0, -6.0, 12.0, 3.0, 0.0)


def test_power_law_derivatives_against_differences():
    t = RadialPowerLaw(2.0, 0.3)
    R = np.array([-2.0, -0.5])
    h = 1e-6
    f, fR, _, fRR, _ = t.jet(R, 0 * R)
    assert np.allclose(fR, (t.jet(R + h, 0 * R)[0] - t.jet(R - h, 0 * R)[0]) / (2 * h), rtol=1e-8)
    assert np.allclose(fRR, (t.jet(R + h, 0 * R)[1] - t.jet(R - h, 0 * R)[1]) / (2 * h), rtol=1e-7)


def test_tag_round_trip():
    for ps in (family_a(1.5, -2.0), family_b(2.0, 3.0, 2.9133)):
        again = profile_from_tag(ps.tag)
        R, Z = np.array([-1.0, -2.5]), np.array([0.0, 3.0])
        assert np.array_equal(again.evaluate(R, Z).U, ps.evaluate(R, Z).U)
    with pytest.raises(ValueError):
        profile_from_tag({"family": "C"})


class TestGridBacked:
    def test_exact_at_nodes(self):
        R, Z = default_lattice(16, 17)
        ps = family_b(2.0, 3.0, 5.0)
        gs = sample_profiles(ps, R, Z)
        RR, ZZ = np.meshgrid(R, Z, indexing="ij")
        assert np.array_equal(gs.evaluate(RR, ZZ).U, ps.evaluate(RR, ZZ).U)

    def test_derivatives_second_order(self):
        errs = []
        for n in (33, 65, 129):
            R = np.linspace(-3, -1, n)
            Z = np.linspace(-1, 1, n)
            RR, ZZ = np.meshgrid(R, Z, indexing="ij")
            psi = np.sin(RR) * np.cos(ZZ)
            gs = GridProfileSet(R, Z, psi, psi, psi)
            v = gs.evaluate(RR, ZZ)
            errs.append(max(np.max(np.abs(v.Psi_R - np.cos(RR) * np.cos(ZZ))), np.max(np.abs(v.Psi_ZZ + psi))))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(orders - 2) <= 0.2)

    def test_outside_lattice(self):
        gs = sample_profiles(family_a(1, 1), *default_lattice(8, 9))
        with pytest.raises(DomainError):
            gs.evaluate(-20.0, 0.0)

    @pytest.mark.parametrize("bad", ["short", "unsorted", "nan", "right"])
    def test_lattice_validation(self, bad):
        R, Z = np.linspace(-2, -1, 5), np.linspace(-1, 1, 5)
        U = np.zeros((5, 5))
        if bad == "short":
            R, U = R[:2], U[:2]
        elif bad == "unsorted":
            R = R[::-1]
        elif bad == "nan":
            U = U.copy()
            U[1, 1] = np.nan
        else:
            R = R + 3
        with pytest.raises(ValueError):
            GridProfileSet(R, Z, U, U, U)
