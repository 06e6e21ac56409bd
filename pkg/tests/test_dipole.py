import numpy as np
import pytest

from twolevel.core import ModelError
from twolevel.dipole import AtomGeometry, coupling_ratio_bound, dephasing_modes, mode_constant, z_couplings

ALPHA = 1 / 137.035999084
M_E = 510998.95  # eV
E = np.sqrt(4 * np.pi * ALPHA)
A0 = 1 / (ALPHA * M_E)


def geom(q1=(0.3, 0.1, 1.2), q2=(0.1, -0.4, 0.2), d12=0.7, m=2.0, **kw):
    return AtomGeometry(np.array(q1), np.array(q2), d12, m, **kw)


class TestZCouplings:
    def test_symmetric_levels(self):
        g1, g2 = z_couplings(geom(q1=(1, 2, 3), q2=(1, 2, 3)), [0, 0, 1.5], 1.5)
        assert g1 == 0.0 and g2 != 0.0

    def test_orthogonal_wavevector(self):
        g1, _ = z_couplings(geom(q1=(0, 0, 1), q2=(0, 0, 0)), [2.0, 0, 0], 2.0)
        assert g1 == 0.0

    def test_direct_arithmetic(self):
        G = geom(charge=1.5, eps0=0.8, volume=3.0)
        k = np.array([0.4, -0.2, 1.0])
        w = float(np.sqrt(0.16 + 0.04 + 1.0))
        c = -(1.5 / 2.0) * (2 * 1.0 * w * 0.8 * 3.0) ** -0.5
        g11 = c * (0.4 * 0.3 - 0.2 * 0.1 + 1.0 * 1.2)
        g22 = c * (0.4 * 0.1 + 0.2 * 0.4 + 1.0 * 0.2)
        g1, g2 = z_couplings(G, k, w)
        assert g1 == pytest.approx(g11 - g22, rel=1e-14)
        assert g2 == pytest.approx(g11 + g22, rel=1e-14)
        assert mode_constant(G, w) == pytest.approx(c, rel=1e-14)


class TestRatio:
    def test_zero_for_symmetric(self):
        r = coupling_ratio_bound(geom(q1=(1, 1, 1), q2=(1, 1, 1)), [0, 0, 1], 1.0)
        assert r.ratio == 0.0 and r.bound == 0.0

    def test_degenerate_dipole(self):
        with pytest.raises(ModelError, match="degenerate dipole"):
            coupling_ratio_bound(geom(d12=0.0), [0, 0, 1], 1.0)

    def test_ratio_below_bound(self, rng):
        G = geom()
        for _ in range(20):
            k = rng.normal(size=3)
            r = coupling_ratio_bound(G, k, float(np.linalg.norm(k)))
            assert r.ratio <= r.bound * (1 + 1e-15)

    def test_linear_in_k(self):
        G = geom()
        k = np.array([0.2, 0.5, -0.3])
        w = 1.7
        r1 = coupling_ratio_bound(G, k, w)
        r3 = coupling_ratio_bound(G, 3 * k, w)
        assert r3.ratio == pytest.approx(3 * r1.ratio, rel=1e-14)
        assert r3.bound == pytest.approx(3 * r1.bound, rel=1e-14)

    @pytest.mark.parametrize("lam", [1e-3, 0.5, 7.0])
    def test_homogeneity(self, lam):
        G = geom()
        Gs = geom(q1=lam * G.q1, q2=lam * G.q2, d12=lam * G.d12)
        k, w = np.array([0.1, 0.9, 0.4]), 1.0
        assert coupling_ratio_bound(Gs, k, w).ratio == pytest.approx(coupling_ratio_bound(G, k, w).ratio, rel=1e-13)
        assert coupling_ratio_bound(Gs, k, w).bound == pytest.approx(coupling_ratio_bound(G, k, w).bound, rel=1e-13)

    def test_atomic_scale_regression(self):
        G = AtomGeometry(np.array([0.0, 0.0, 1.0]), np.zeros(3), E * A0, M_E, charge=E)
        r = coupling_ratio_bound(G, [0.0, 0.0, 2.0], 2.0)
        assert r.ratio == pytest.approx(0.024097818707155428, rel=1e-12)
        assert r.bound == pytest.approx(0.024097818707155428, rel=1e-12)
        assert r.ratio < 0.1


def test_dephasing_modes_bounded_by_printed_expression():
    G = geom()
    k = np.array([[0, 0, 1.0], [0.5, 0.5, 0.0], [0.3, -0.2, 0.9]])
    gk = np.array([0.1, -0.2, 0.05])
    m = dephasing_modes(G, k, gk)
    w = np.linalg.norm(k, axis=1)
    bound = np.array([coupling_ratio_bound(G, kk, ww).bound for kk, ww in zip(k, w)]) * np.abs(gk)
    assert np.allclose(m.omegas, w)
    assert np.all(m.couplings <= bound * (1 + 1e-15))


def test_geometry_validation():
    with pytest.raises(ModelError):
        AtomGeometry(np.zeros(2), np.zeros(3), 1.0, 1.0)
    with pytest.raises(ModelError):
        AtomGeometry(np.zeros(3), np.zeros(3), 1.0, 0.0)
