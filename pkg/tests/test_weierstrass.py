import numpy as np
import pytest

from k3collapse.cpoly import BinaryForm, ProjPoint
from k3collapse.weierstrass import (
    Geometry,
    IsotrivialDelta,
    Status,
    WeierstrassModel,
    ZeroModel,
)


def poly(degree, coeffs):
    return BinaryForm.from_poly(degree, coeffs)


def factored(degree, roots, scale=1.0):
    return BinaryForm.from_factors(degree, roots, scale)


def seg_member(c1=4.0, c2=1.0, s=0.0, a=None):
    """g8 = c1 t^4, g12 = c2 t^6 + s * prod (t - a_i)(t - 1/a_i)."""
    g8 = poly(8, [0, 0, 0, 0, c1])
    k12 = np.array([1.0 + 0j])
    if a is None:
        a = 2.0 * np.exp(2j * np.pi * np.arange(1, 7) / 6)
    for ai in a:
        k12 = np.convolve(k12, [ai * (1 / ai), -(ai + 1 / ai), 1.0][::-1])
    g12c = np.zeros(13, dtype=complex)
    g12c[6] = c2
    g12c[: len(k12)] += s * k12
    return WeierstrassModel(g8, poly(12, g12c))


class TestStability:
    def test_polystable_nn_intersection(self):
        # g8 = 3 t^4 (t-1)^4, g12 = t^6 (t-1)^6: the (2,2) boundary point
        g8 = factored(8, [(0.0, 4), (1.0, 4)], 3.0)
        g12 = factored(12, [(0.0, 6), (1.0, 6)], 1.0)
        v = WeierstrassModel(g8, g12).classify_stability()
        assert v.status is Status.STRICTLY_SEMISTABLE
        assert v.geometry is Geometry.SEG_AND_NN_INTERSECTION
        assert v.confidence == "exact"

    def test_polystable_nn_intersection_numeric(self):
        g8 = factored(8, [(0.0, 4), (1.0, 4)], 3.0)
        g12 = factored(12, [(0.0, 6), (1.0, 6)], 1.0)
        m = WeierstrassModel(poly(8, g8.coeffs), poly(12, g12.coeffs))
        v = m.classify_stability()
        assert v.status is Status.STRICTLY_SEMISTABLE
        assert v.geometry is Geometry.SEG_AND_NN_INTERSECTION
        assert v.confidence == "numeric"

    def test_seg_type_boundary(self):
        # g8 = c1 t^4 h4, g12 = c2 t^6 h6 with generic h: destabilized at 0
        h4 = np.array([1.0, 0.3, -0.2, 0.1, 1.0])
        h6 = np.array([1.0, -0.5, 0.0, 0.2, 0.0, 0.1, 1.0])
        g8c = np.zeros(9, dtype=complex)
        g8c[4:] = 4.0 * h4
        g12c = np.zeros(13, dtype=complex)
        g12c[6:] = 1.0 * h6
        v = WeierstrassModel(poly(8, g8c), poly(12, g12c)).classify_stability()
        assert v.status is Status.STRICTLY_SEMISTABLE
        assert v.geometry is Geometry.SEG_TYPE
        assert any(p.isclose(ProjPoint.affine(0.0)) for p in v.destabilizing_points)

    def test_seg_member_has_two_destabilizing_points(self):
        v = seg_member().classify_stability()
        assert v.status is Status.STRICTLY_SEMISTABLE
        pts = v.destabilizing_points
        assert len(pts) == 2
        assert any(p.isclose(ProjPoint.affine(0.0)) for p in pts)
        assert any(p.is_infinity for p in pts)

    def test_stable_generic(self):
        # g8 = t^8 + 1, g12 = t^12 + 1: brute-force valuation scan says stable
        g8 = poly(8, [1] + [0] * 7 + [1])
        g12 = poly(12, [1] + [0] * 11 + [1])
        m = WeierstrassModel(g8, g12)
        v = m.classify_stability()
        assert (v.status, v.geometry) == (Status.STABLE, Geometry.ADE)
        # oracle: scan all roots of both forms
        for f, g in ((g8, g12), (g12, g8)):
            for pt, _ in f.roots():
                d = min(3 * g8.valuation(pt), 2 * g12.valuation(pt))
                assert d < 12

    def test_unstable(self):
        # v_0(g8) = 5, v_0(g12) = 7 -> min(15, 14) = 14 > 12
        g8 = factored(8, [(0.0, 5), (1.0, 3)])
        g12 = factored(12, [(0.0, 7), (1.0, 5)])
        v = WeierstrassModel(g8, g12).classify_stability()
        assert v.status is Status.UNSTABLE

    def test_nn_stable(self):
        # delta == 0 with G4 of distinct roots: stable non-normal
        g4 = factored(4, [(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)])
        m = WeierstrassModel((g4 * g4).scale(3.0), g4**3)
        v = m.classify_stability()
        assert (v.status, v.geometry) == (Status.STABLE, Geometry.NON_NORMAL)

    def test_nn_unstable(self):
        g4 = factored(4, [(0.0, 3), (1.0, 1)])
        m = WeierstrassModel((g4 * g4).scale(3.0), g4**3)
        assert m.classify_stability().status is Status.UNSTABLE

    def test_zero_model_raises(self):
        with pytest.raises(ZeroModel):
            WeierstrassModel(BinaryForm.zero(8), BinaryForm.zero(12))

    def test_weighted_rescale_invariance(self):
        m = seg_member(s=1e-3)
        v0 = m.classify_stability()
        for lam in [2.0, 0.5j, 1.3 - 0.7j]:
            v = m.rescale(lam).classify_stability()
            assert (v.status, v.geometry) == (v0.status, v0.geometry)

    def test_sl2_invariance(self):
        rng = np.random.default_rng(29)
        models = [
            seg_member(s=1e-2),
            WeierstrassModel(poly(8, [1] + [0] * 7 + [1]),
                             poly(12, [1] + [0] * 11 + [1])),
        ]
        for m in models:
            v0 = m.classify_stability()
            for _ in range(20):
                A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                A = A / np.sqrt(np.linalg.det(A))
                v = m.mobius(A).classify_stability()
                assert (v.status, v.geometry) == (v0.status, v0.geometry)


class TestIsotriviality:
    def test_case_c_g8_zero(self):
        m = WeierstrassModel(BinaryForm.zero(8), poly(12, [1] + [0] * 11 + [1]))
        assert m.is_isotrivial().kind == "C_G8Zero"

    def test_case_d_g12_zero(self):
        m = WeierstrassModel(poly(8, [1] + [0] * 7 + [1]), BinaryForm.zero(12))
        assert m.is_isotrivial().kind == "D_G12Zero"

    def test_case_a_delta_zero(self):
        g4 = factored(4, [(0.0, 1), (1.0, 1), (2.0, 1), (5.0, 1)])
        m = WeierstrassModel((g4 * g4).scale(3.0), g4**3)
        assert m.is_isotrivial().kind == "A_DeltaZero"

    def test_case_b_kummer(self):
        g4 = factored(4, [(0.5, 1), (1.0, 1), (2.0, 1), (-1.0, 1)])
        a, b = 4.0, 1.0
        m = WeierstrassModel((g4 * g4).scale(a), (g4**3).scale(b))
        cls = m.is_isotrivial()
        assert cls.kind == "B_ConstantJ"
        # (a, b, G4) is defined up to G4 rescaling; a^3/b^2 is the invariant
        assert cls.a**3 / cls.b**2 == pytest.approx(a**3 / b**2, rel=1e-8)
        assert abs(cls.a * cls.b * (cls.a**3 - 27 * cls.b**2)) > 1e-6
        # reconstruction identities with the returned normalization
        assert ((cls.g4 * cls.g4).scale(cls.a) - m.g8).norm() <= 1e-8 * m.g8.norm()
        assert ((cls.g4**3).scale(cls.b) - m.g12).norm() <= 1e-8 * m.g12.norm()

    def test_not_isotrivial(self):
        m = WeierstrassModel(poly(8, [1] + [0] * 7 + [1]),
                             poly(12, [1] + [0] * 11 + [1]))
        assert m.is_isotrivial().kind == "NotIsotrivial"


class TestFiberTypes:
    def test_generic_24_nodal_fibers(self):
        m = WeierstrassModel(poly(8, [1] + [0] * 7 + [1]),
                             poly(12, [2, 1] + [0] * 10 + [1]))
        reports = m.fiber_types()
        assert sum(r.ord_delta for r in reports) == 24
        assert all(r.kodaira_type == "I1" for r in reports)
        assert len(reports) == 24

    def test_kummer_four_i0star(self):
        # g8 = a G4^2, g12 = b G4^3, distinct zeros, a^3 != 27 b^2
        g4 = factored(4, [(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)])
        m = WeierstrassModel((g4 * g4).scale(4.0), g4**3)
        reports = m.fiber_types()
        stars = [r for r in reports if r.kodaira_type == "I0*"]
        assert len(stars) == 4
        assert all(r.ord_delta == 6 for r in stars)
        assert sum(r.ord_delta for r in reports) == 24

    def test_seg_boundary_reports_non_ade(self):
        h4 = np.array([1.0, 0.0, 0.0, 0.0, 1.0])
        h6 = np.array([1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 1.0])
        g8c = np.zeros(9, dtype=complex)
        g8c[4:] = 4.0 * h4
        g12c = np.zeros(13, dtype=complex)
        g12c[6:] = h6
        m = WeierstrassModel(poly(8, g8c), poly(12, g12c))
        reports = m.fiber_types()
        at0 = [r for r in reports if not r.point.is_infinity
               and abs(r.point.as_affine()) < 1e-6]
        assert len(at0) == 1
        assert at0[0].ord_delta == 12
        assert at0[0].kodaira_type == "non-ADE (E8~)"

    def test_isotrivial_delta_raises(self):
        g4 = factored(4, [(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)])
        m = WeierstrassModel((g4 * g4).scale(3.0), g4**3)
        with pytest.raises(IsotrivialDelta):
            m.fiber_types()

    def test_fiber_sum_on_random_stable_models(self):
        rng = np.random.default_rng(31)
        count = 0
        while count < 20:
            g8 = poly(8, rng.normal(size=9) + 1j * rng.normal(size=9))
            g12 = poly(12, rng.normal(size=13) + 1j * rng.normal(size=13))
            m = WeierstrassModel(g8, g12)
            if m.classify_stability().status is not Status.STABLE:
                continue
            count += 1
            assert sum(r.ord_delta for r in m.fiber_types()) == 24
