"""Weierstrass elliptic K3 models: stability, fiber types, isotriviality.

A model is a pair (g8, g12) of binary forms of degrees 8 and 12 cutting out
the surface y^2 z = 4x^3 - g8(t) x z^2 + g12(t) z^3 over the projective
line, with discriminant form delta24 = g8^3 - 27 g12^2 of degree 24.

Stability under the SL(2) action on the (2,3)-weighted coefficient space is
decided by the valuation criterion: the model has only ADE singularities iff
min(3 v_p(g8), 2 v_p(g12)) < 12 at every point p.  On the non-normal locus
delta24 == 0 the pair factors as (3 G4^2, G4^3) and stability reduces to the
classical binary-quartic criterion on the zeros of G4.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cpoly import BinaryForm, ProjPoint, ZeroForm

__all__ = [
    "ZeroModel",
    "IsotrivialDelta",
    "Status",
    "Geometry",
    "StabilityVerdict",
    "FiberReport",
    "IsotrivialityClass",
    "WeierstrassModel",
]

_DELTA_ZERO_RTOL = 1e-12


class ZeroModel(ValueError):
    """Both defining forms vanish identically."""


class IsotrivialDelta(ValueError):
    """Operation needs delta24 != 0 but the model is on the non-normal locus."""


class Status(Enum):
    STABLE = "Stable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    UNSTABLE = "Unstable"


class Geometry(Enum):
    ADE = "ADE"
    NON_NORMAL = "NonNormal"
    SEG_TYPE = "SegType"
    SEG_AND_NN_INTERSECTION = "SegAndNnIntersection"


@dataclass
class StabilityVerdict:
    status: Status
    geometry: Geometry
    destabilizing_points: list[ProjPoint]
    witness: str
    confidence: str  # "exact" | "numeric"

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "geometry": self.geometry.value,
            "destabilizing": [
                "inf" if p.is_infinity
                else [p.as_affine().real, p.as_affine().imag]
                for p in self.destabilizing_points
            ],
            "witness": self.witness,
            "confidence": self.confidence,
        }


@dataclass
class FiberReport:
    point: ProjPoint
    kodaira_type: str
    ord_delta: int


@dataclass
class IsotrivialityClass:
    """Which constant-j family the model belongs to, if any.

    kind is one of 'NotIsotrivial', 'A_DeltaZero', 'B_ConstantJ', 'C_G8Zero',
    'D_G12Zero'.  For class B the constants (a, b) and the quartic G4 with
    g8 = a G4^2, g12 = b G4^3 are attached.
    """

    kind: str
    a: complex | None = None
    b: complex | None = None
    g4: BinaryForm | None = None


class WeierstrassModel:
    """The pair (g8, g12) with cached discriminant."""

    def __init__(self, g8: BinaryForm, g12: BinaryForm):
        if g8.degree != 8 or g12.degree != 12:
            raise ValueError("expected degrees (8, 12)")
        if g8.is_zero and g12.is_zero:
            raise ZeroModel("(g8, g12) = (0, 0) defines no surface")
        self.g8 = g8
        self.g12 = g12
        self.delta24 = g8**3 - (g12 * g12).scale(27.0)

    # -------------------------------------------------------------- helpers
    def delta_is_zero(self) -> bool:
        scale = max(self.g8.norm() ** 3, 27.0 * self.g12.norm() ** 2, 1e-300)
        return self.delta24.norm() <= _DELTA_ZERO_RTOL * scale

    def rescale(self, lam: complex) -> "WeierstrassModel":
        """The weighted rescale (lam^2 g8, lam^3 g12): an isomorphic model."""
        return WeierstrassModel(self.g8.scale(lam**2), self.g12.scale(lam**3))

    def mobius(self, M) -> "WeierstrassModel":
        return WeierstrassModel(self.g8.mobius_transform(M),
                                self.g12.mobius_transform(M))

    def _candidate_points(self) -> list[ProjPoint]:
        """Points that could carry large valuations: clustered roots of g8, g12."""
        pts: list[ProjPoint] = []
        for f, min_mult in ((self.g8, 4), (self.g12, 6)):
            if f.is_zero:
                continue
            for pt, m in f.roots():
                if m >= min_mult and not any(pt.isclose(q, 1e-7) for q in pts):
                    pts.append(pt)
        return pts

    # ------------------------------------------------------------ stability
    def classify_stability(self) -> StabilityVerdict:
        """Full GIT case split for the SL(2)-action on the model space."""
        exact = self.g8.has_exact_factors and self.g12.has_exact_factors
        if self.delta_is_zero():
            return self._classify_nonnormal()
        worst = 0
        destab: list[ProjPoint] = []
        for p in self._candidate_points():
            v8 = self.g8.valuation(p) if not self.g8.is_zero else 99
            v12 = self.g12.valuation(p) if not self.g12.is_zero else 99
            d = min(3 * v8, 2 * v12)
            if d > worst:
                worst = d
                destab = [p]
            elif d == worst and d >= 12:
                destab.append(p)
        confidence = "exact" if exact else "numeric"
        if worst < 12:
            return StabilityVerdict(
                Status.STABLE, Geometry.ADE, [],
                "min(3 v_p(g8), 2 v_p(g12)) < 12 at every point", confidence)
        if worst == 12:
            return StabilityVerdict(
                Status.STRICTLY_SEMISTABLE, Geometry.SEG_TYPE, destab,
                "min(3 v_p(g8), 2 v_p(g12)) = 12 attained; <= 12 everywhere",
                confidence)
        return StabilityVerdict(
            Status.UNSTABLE, Geometry.SEG_TYPE, destab,
            f"min(3 v_p(g8), 2 v_p(g12)) = {worst} > 12", confidence)

    def _classify_nonnormal(self) -> StabilityVerdict:
        g4, ok = self.extract_g4()
        if not ok:
            return StabilityVerdict(
                Status.UNSTABLE, Geometry.NON_NORMAL, [],
                "delta24 == 0 but no quartic G4 with (3 G4^2, G4^3) found",
                "numeric")
        confidence = ("exact" if self.g8.has_exact_factors
                      and self.g12.has_exact_factors else "numeric")
        mults = sorted((m for _, m in g4.roots()), reverse=True)
        destab = [pt for pt, m in g4.roots() if m >= 2]
        if mults[0] < 2:
            return StabilityVerdict(
                Status.STABLE, Geometry.NON_NORMAL, [],
                "delta24 == 0, all G4 zeros simple (pinch points only)",
                confidence)
        if mults[0] == 2:
            geom = (Geometry.SEG_AND_NN_INTERSECTION
                    if mults == [2, 2] else Geometry.NON_NORMAL)
            return StabilityVerdict(
                Status.STRICTLY_SEMISTABLE, geom, destab,
                "delta24 == 0, double zero of G4; polystable type (2,2) "
                "representative t^2(t-1)^2", confidence)
        return StabilityVerdict(
            Status.UNSTABLE, Geometry.NON_NORMAL, destab,
            f"delta24 == 0, G4 zero of multiplicity {mults[0]} > 2",
            confidence)

    def extract_g4(self, rtol: float = 1e-6) -> tuple[BinaryForm | None, bool]:
        """On the delta24 == 0 locus recover G4 with g8 = 3 G4^2, g12 = G4^3."""
        if self.g8.is_zero or self.g12.is_zero:
            return None, False
        try:
            roots8 = self.g8.roots()
        except ZeroForm:
            return None, False
        if any(m % 2 for _, m in roots8):
            return None, False
        halved = [(pt, m // 2) for pt, m in roots8]
        base = BinaryForm.from_factors(4, halved, 1.0)
        # scale s with g8 = 3 (s base)^2, matched at the largest coefficient
        sq3 = (base * base).scale(3.0)
        j = int(np.argmax(np.abs(sq3.coeffs)))
        if sq3.coeffs[j] == 0:
            return None, False
        s = np.sqrt(complex(self.g8.coeffs[j] / sq3.coeffs[j]))
        for sign in (1.0, -1.0):
            g4 = base.scale(sign * s)
            ok8 = ((g4 * g4).scale(3.0) - self.g8).norm() <= rtol * max(
                self.g8.norm(), 1e-300)
            ok12 = (g4**3 - self.g12).norm() <= rtol * max(
                self.g12.norm(), 1e-300)
            if ok8 and ok12:
                return g4, True
        return None, False

    # ----------------------------------------------------------- j-invariant
    def j_invariant(self) -> dict:
        """Descriptor of j = g8^3 / delta24 as a ratio of degree-24 forms."""
        return {
            "numerator": self.g8**3,
            "denominator": self.delta24,
            "constant": self._constant_j(),
        }

    def _constant_j(self) -> complex | None:
        """The constant value of j when it is constant, else None."""
        num = (self.g8**3).coeffs
        den = self.delta24.coeffs
        if self.delta_is_zero():
            return None  # j == infinity
        nn, nd = np.max(np.abs(num)), np.max(np.abs(den))
        if nn == 0:
            return 0.0 + 0.0j
        # proportionality <=> all 2x2 minors of [num; den] vanish
        cross = np.abs(num[:, None] * den[None, :] - num[None, :] * den[:, None])
        if np.max(cross) <= 1e-10 * nn * nd:
            j = int(np.argmax(np.abs(den)))
            return complex(num[j] / den[j])
        return None

    def is_isotrivial(self) -> IsotrivialityClass:
        if self.g8.is_zero:
            return IsotrivialityClass("C_G8Zero")
        if self.g12.is_zero:
            return IsotrivialityClass("D_G12Zero")
        if self.delta_is_zero():
            return IsotrivialityClass("A_DeltaZero")
        jc = self._constant_j()
        if jc is None:
            return IsotrivialityClass("NotIsotrivial")
        ab = self._extract_ab_g4()
        if ab is None:
            return IsotrivialityClass("NotIsotrivial")
        a, b, g4 = ab
        return IsotrivialityClass("B_ConstantJ", a=a, b=b, g4=g4)

    def _extract_ab_g4(self, rtol: float = 1e-8):
        """For constant finite nonzero j: g8 = a G4^2, g12 = b G4^3."""
        try:
            roots8 = self.g8.roots()
        except ZeroForm:
            return None
        if any(m % 2 for _, m in roots8):
            return None
        g4 = BinaryForm.from_factors(4, [(pt, m // 2) for pt, m in roots8], 1.0)
        # canonicalize: leading nonzero coefficient of G4 equal to 1
        nz = np.nonzero(g4.coeffs)[0]
        lead = g4.coeffs[nz[-1]]
        g4 = g4.scale(1.0 / lead)
        sq = g4 * g4
        cb = g4**3
        j8 = int(np.argmax(np.abs(sq.coeffs)))
        j12 = int(np.argmax(np.abs(cb.coeffs)))
        a = self.g8.coeffs[j8] / sq.coeffs[j8]
        b = self.g12.coeffs[j12] / cb.coeffs[j12]
        ok8 = (sq.scale(a) - self.g8).norm() <= rtol * self.g8.norm()
        ok12 = (cb.scale(b) - self.g12).norm() <= rtol * self.g12.norm()
        if not (ok8 and ok12):
            return None
        if abs(a * b * (a**3 - 27 * b**2)) <= 1e-12 * (abs(a) ** 3 + abs(b) ** 2 + 1):
            return None
        return complex(a), complex(b), g4

    # -------------------------------------------------------------- fibers
    def fiber_types(self) -> list[FiberReport]:
        """Kodaira type of the fiber over each zero of delta24.

        Types follow the standard order table in (v_p(g8), v_p(g12),
        v_p(delta24)); orders over all fibers sum to 24.  Destabilizing
        points (order 12 with the valuations of the boundary locus) are
        reported with the non-ADE flag instead of a Kodaira symbol.
        """
        if self.delta_is_zero():
            raise IsotrivialDelta("fiber types undefined when delta24 == 0")
        # additive fibers sit at common roots of g8 and g12, which locate the
        # point far more accurately than the expanded degree-24 discriminant;
        # snap each delta root onto one of them when within clustering error
        anchors: list[ProjPoint] = []
        for f in (self.g8, self.g12):
            if not f.is_zero:
                anchors.extend(pt for pt, _ in f.roots())
        reports = []
        for pt, k in self.delta24.roots():
            for q in anchors:
                if q.chordal_distance(pt) < 1e-3:
                    pt = q
                    break
            v8 = self.g8.valuation(pt) if not self.g8.is_zero else 99
            v12 = self.g12.valuation(pt) if not self.g12.is_zero else 99
            reports.append(FiberReport(pt, _kodaira_symbol(v8, v12, k), k))
        total = sum(r.ord_delta for r in reports)
        if total != 24:
            raise ArithmeticError(
                f"fiber orders sum to {total} != 24; root clustering failed")
        return reports


def _kodaira_symbol(a: int, b: int, d: int) -> str:
    """Kodaira type from orders (v(g8), v(g12), v(delta)) of a minimal model."""
    if min(3 * a, 2 * b) >= 12:
        return "non-ADE (E8~)"
    if a == 0:
        return f"I{d}"
    if b == 1:
        return "II"
    if a == 1:
        return "III"
    if b == 2:
        return "IV"
    if d == 6:
        return "I0*"
    if a == 2 and b == 3:
        return f"I{d - 6}*"
    if b == 4:
        return "IV*"
    if a == 3:
        return "III*"
    if b == 5:
        return "II*"
    raise ArithmeticError(f"no Kodaira type for orders ({a}, {b}, {d})")
