"""Homogeneous complex binary forms in (t, u) with valuation-aware roots.

A degree-n form is stored as coefficients c_k of t^k u^(n-k), k = 0..n.  The
point at infinity is [1:0]; its valuation reads leading-coefficient
vanishing, never a division.  Forms built from factored input keep symbolic
(point, multiplicity) bookkeeping through products, powers, scalar multiples
and Moebius moves, so boundary classifiers downstream can read exact
multiplicities instead of clustered numerical ones.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ZeroForm",
    "SingularMatrix",
    "ProjPoint",
    "BinaryForm",
    "aberth_roots",
]


class ZeroForm(ValueError):
    """Operation undefined for the identically-zero form."""


class SingularMatrix(ValueError):
    """Moebius transform requested with a non-invertible matrix."""


class ProjPoint:
    """A point [t0 : u0] on the projective line, canonically scaled.

    The larger-modulus coordinate is normalized to 1; [1:0] is infinity.
    """

    __slots__ = ("t", "u")

    def __init__(self, t: complex, u: complex):
        t, u = complex(t), complex(u)
        if t == 0 and u == 0:
            raise ValueError("(0, 0) is not a point of the projective line")
        if abs(t) >= abs(u):
            self.t, self.u = 1.0 + 0.0j, u / t
        else:
            self.t, self.u = t / u, 1.0 + 0.0j

    @staticmethod
    def infinity() -> "ProjPoint":
        return ProjPoint(1.0, 0.0)

    @staticmethod
    def affine(z: complex) -> "ProjPoint":
        return ProjPoint(z, 1.0)

    @property
    def is_infinity(self) -> bool:
        return self.u == 0

    def as_affine(self) -> complex:
        """Affine coordinate t/u; raises at infinity."""
        if self.is_infinity:
            raise ZeroDivisionError("point at infinity has no affine coordinate")
        return self.t / self.u

    def chordal_distance(self, other: "ProjPoint") -> float:
        """Fubini-Study chordal distance |t1 u2 - t2 u1| / (|p1| |p2|)."""
        num = abs(self.t * other.u - other.t * self.u)
        den = math.hypot(abs(self.t), abs(self.u)) * math.hypot(
            abs(other.t), abs(other.u)
        )
        return num / den

    def isclose(self, other: "ProjPoint", tol: float = 1e-9) -> bool:
        return self.chordal_distance(other) <= tol

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjPoint) and self.isclose(other, 1e-12)

    def __hash__(self):
        # canonical form makes coarse rounding stable enough for dict use
        return hash((round(self.t.real, 9), round(self.t.imag, 9),
                     round(self.u.real, 9), round(self.u.imag, 9)))

    def __repr__(self):
        if self.is_infinity:
            return "ProjPoint(inf)"
        return f"ProjPoint({self.as_affine():.6g})"


def _trim_degree(coeffs: np.ndarray) -> int:
    nz = np.nonzero(coeffs)[0]
    return int(nz[-1]) if nz.size else -1


class BinaryForm:
    """Homogeneous form sum_k c_k t^k u^(n-k) of fixed degree n."""

    __slots__ = ("degree", "coeffs", "_factors")

    def __init__(self, degree: int, coeffs: Sequence[complex], _factors=None):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (degree + 1,):
            raise ValueError(f"expected {degree + 1} coefficients, got {c.shape}")
        self.degree = int(degree)
        self.coeffs = c
        # optional exact bookkeeping: (scale, ((ProjPoint, mult), ...))
        self._factors = _factors

    # ------------------------------------------------------------------ build
    @staticmethod
    def zero(degree: int) -> "BinaryForm":
        return BinaryForm(degree, np.zeros(degree + 1, dtype=complex))

    @staticmethod
    def from_poly(degree: int, poly_coeffs: Sequence[complex]) -> "BinaryForm":
        """Form of stated degree from an affine polynomial sum_k a_k t^k."""
        a = np.asarray(poly_coeffs, dtype=complex)
        if a.shape[0] > degree + 1:
            raise ValueError("polynomial degree exceeds form degree")
        c = np.zeros(degree + 1, dtype=complex)
        c[: a.shape[0]] = a
        return BinaryForm(degree, c)

    @staticmethod
    def from_factors(degree: int, factors: Iterable[tuple], scale: complex = 1.0
                     ) -> "BinaryForm":
        """Product form  scale * prod (u0 t - t0 u)^m  with exact multiplicities.

        Factors are (point, mult) pairs where point is a ProjPoint or an
        affine complex number ('inf' accepted); multiplicities must sum to at
        most the degree, the deficit going to u-powers (i.e. no extra root).
        """
        fl = []
        total = 0
        for pt, m in factors:
            if not isinstance(pt, ProjPoint):
                pt = ProjPoint.infinity() if pt == "inf" else ProjPoint.affine(pt)
            m = int(m)
            if m <= 0:
                raise ValueError("multiplicities must be positive")
            fl.append((pt, m))
            total += m
        if total != degree:
            raise ValueError("multiplicities must sum to the degree")
        c = np.array([complex(scale)], dtype=complex)
        deg = 0
        for pt, m in fl:
            # linear factor u0*t - t0*u vanishing at [t0:u0];
            # lin[k] = coeff of t^k u^(1-k)
            lin = np.array([-pt.t, pt.u], dtype=complex)
            for _ in range(m):
                c = _homog_mul(c, deg, lin, 1)
                deg += 1
        form = BinaryForm(degree, c)
        form._factors = (complex(scale), tuple(fl))
        return form

    # ------------------------------------------------------------- predicates
    @property
    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0))

    def norm(self) -> float:
        """Max coefficient modulus."""
        return float(np.max(np.abs(self.coeffs))) if self.degree >= 0 else 0.0

    @property
    def has_exact_factors(self) -> bool:
        return self._factors is not None

    # ------------------------------------------------------------- evaluation
    def evaluate(self, p: ProjPoint) -> complex:
        """Value at the canonical homogeneous representative of p."""
        k = np.arange(self.degree + 1)
        return complex(np.sum(self.coeffs * p.t**k * p.u ** (self.degree - k)))

    def eval_affine(self, t):
        """Dehomogenized value p(t) = sum c_k t^k (u = 1); array-friendly."""
        t = np.asarray(t, dtype=complex)
        out = np.zeros_like(t)
        for c in self.coeffs[::-1]:
            out = out * t + c
        return out if out.ndim else complex(out)

    def dehomogenize(self) -> np.ndarray:
        """Affine coefficients a_k of p(t) = f(t, 1)."""
        return self.coeffs.copy()

    def reversed_chart(self) -> "BinaryForm":
        """The same form read in the chart s = 1/t (swap of t and u)."""
        return self.mobius_transform([[0.0, 1.0], [1.0, 0.0]])

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        if self.degree != other.degree:
            raise ValueError("can only add forms of equal degree")
        return BinaryForm(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        if self.degree != other.degree:
            raise ValueError("can only subtract forms of equal degree")
        return BinaryForm(self.degree, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            c = _homog_mul(self.coeffs, self.degree, other.coeffs, other.degree)
            out = BinaryForm(self.degree + other.degree, c)
            if self._factors is not None and other._factors is not None:
                s1, f1 = self._factors
                s2, f2 = other._factors
                out._factors = (s1 * s2, _merge_factors(f1 + f2))
            return out
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: complex) -> "BinaryForm":
        out = BinaryForm(self.degree, self.coeffs * complex(c))
        if self._factors is not None and c != 0:
            s, fl = self._factors
            out._factors = (s * complex(c), fl)
        return out

    def __pow__(self, m: int) -> "BinaryForm":
        if m < 0:
            raise ValueError("negative power of a form")
        out = BinaryForm(0, np.array([1.0 + 0j]))
        out._factors = (1.0 + 0j, ())
        base = self
        for _ in range(m):
            out = out * base
        return out

    def mobius_transform(self, M) -> "BinaryForm":
        """Substitute (t, u) -> M (t, u): g(x) = f(Mx); degree-preserving.

        Roots move by the inverse Moebius map.  Exact factor bookkeeping is
        transported when present.
        """
        M = np.asarray(M, dtype=complex)
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        if abs(det) < 1e-300:
            raise SingularMatrix("mobius_transform needs det M != 0")
        a, bb, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
        n = self.degree
        # new_coeffs from expanding f(a t + b u, c t + d u)
        out = np.zeros(n + 1, dtype=complex)
        # (a t + b u)^k (c t + d u)^(n-k) expanded via binomials
        for k in range(n + 1):
            ck = self.coeffs[k]
            if ck == 0:
                continue
            poly1 = _binom_pow(a, bb, k)
            poly2 = _binom_pow(c, d, n - k)
            out += ck * _homog_mul(poly1, k, poly2, n - k)
        g = BinaryForm(n, out)
        if self._factors is not None:
            Minv = np.array([[d, -bb], [-c, a]], dtype=complex) / det
            s, fl = self._factors
            moved = []
            cocycle = s
            for pt, m in fl:
                vec = Minv @ np.array([pt.t, pt.u])
                moved.append((ProjPoint(vec[0], vec[1]), m))
            g._factors = (s, tuple(moved))
            # rescale bookkeeping so the factored product matches g numerically
            ref = BinaryForm.from_factors(n, moved, 1.0)
            j = int(np.argmax(np.abs(ref.coeffs)))
            if ref.coeffs[j] != 0:
                g._factors = (g.coeffs[j] / ref.coeffs[j], tuple(moved))
        return g

    # ------------------------------------------------------------------ roots
    def roots(self, tol: float = 1e-8) -> list[tuple[ProjPoint, int]]:
        """Roots with multiplicity; multiplicities sum to the degree.

        Exact-factored forms return their bookkeeping directly.  Otherwise
        the dehomogenization is solved by Aberth-Ehrlich iteration with
        Newton polishing; roots are clustered into multiplicity groups
        within radius tol^(1/m), each accepted group confirmed by the
        Taylor-coefficient valuation at its polished center.
        """
        if self.is_zero:
            raise ZeroForm("the zero form has no well-defined roots")
        if self._factors is not None:
            _, fl = self._factors
            return [(pt, m) for pt, m in fl]
        deg_affine = _trim_degree(self.coeffs)
        out: list[tuple[ProjPoint, int]] = []
        mult_inf = self.degree - deg_affine
        if mult_inf > 0:
            out.append((ProjPoint.infinity(), mult_inf))
        if deg_affine > 0:
            coeffs = self.coeffs[: deg_affine + 1]
            rts = aberth_roots(coeffs)

            def confirm(center: complex, m: int) -> bool:
                if m == 1:
                    return True
                c = _polish_mult_root(coeffs, center, m)
                return self.valuation(ProjPoint.affine(c), tol=1e-5) >= m

            for z, m in _cluster_roots(rts, tol, confirm):
                out.append((ProjPoint.affine(_polish_mult_root(coeffs, z, m)), m))
        return out

    def valuation(self, p: ProjPoint, tol: float = 1e-8) -> int:
        """Multiplicity of p as a root (0 when p is not a root).

        Exact for factored forms.  Otherwise counts Taylor coefficients at p
        below tol * max|coeff| (the deflation tolerance).
        """
        if self.is_zero:
            return math.inf  # sentinel: every point is a root of 0
        if self._factors is not None:
            _, fl = self._factors
            for pt, m in fl:
                if pt.isclose(p, 1e-9):
                    return m
            return 0
        scale = tol * self.norm()
        if p.is_infinity:
            v = 0
            for c in self.coeffs[::-1]:
                if abs(c) <= scale:
                    v += 1
                else:
                    break
            return min(v, self.degree)
        z0 = p.as_affine()
        if abs(z0) <= 1.0:
            shifted = _taylor_shift(self.coeffs, z0)
        else:
            # work in the s = 1/t chart to avoid magnifying roundoff
            rev = self.coeffs[::-1]
            shifted = _taylor_shift(rev, 1.0 / z0)
            scale = tol * float(np.max(np.abs(rev)))
        v = 0
        for c in shifted:
            if abs(c) <= scale:
                v += 1
            else:
                break
        return min(v, self.degree)

    def __repr__(self):
        return f"BinaryForm(deg={self.degree}, coeffs={np.round(self.coeffs, 6)})"

    # ---------------------------------------------------------------- JSON io
    def to_json(self) -> dict:
        if self._factors is not None:
            s, fl = self._factors
            return {
                "degree": self.degree,
                "factors": [
                    {
                        "root": "inf" if pt.is_infinity
                        else [pt.as_affine().real, pt.as_affine().imag],
                        "mult": m,
                    }
                    for pt, m in fl
                ],
                "scale": [s.real, s.imag],
            }
        return {
            "degree": self.degree,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    @staticmethod
    def from_json(obj: dict) -> "BinaryForm":
        degree = int(obj["degree"])
        if "factors" in obj:
            sc = obj.get("scale", [1.0, 0.0])
            factors = []
            for f in obj["factors"]:
                r = f["root"]
                pt = ProjPoint.infinity() if r == "inf" else ProjPoint.affine(
                    complex(r[0], r[1]))
                factors.append((pt, int(f["mult"])))
            return BinaryForm.from_factors(degree, factors,
                                           complex(sc[0], sc[1]))
        coeffs = [complex(c[0], c[1]) for c in obj["coeffs"]]
        return BinaryForm(degree, coeffs)


# ---------------------------------------------------------------------- utils

def _homog_mul(c1: np.ndarray, d1: int, c2: np.ndarray, d2: int) -> np.ndarray:
    return np.convolve(c1, c2)


def _binom_pow(a: complex, b: complex, k: int) -> np.ndarray:
    """(a t + b u)^k coefficients over t^j u^(k-j), index j."""
    out = np.zeros(k + 1, dtype=complex)
    for j in range(k + 1):
        out[j] = math.comb(k, j) * a**j * b ** (k - j)
    return out


def _taylor_shift(coeffs: np.ndarray, z0: complex) -> np.ndarray:
    """Coefficients of p(t + z0) by repeated synthetic division."""
    c = np.array(coeffs, dtype=complex)
    n = c.shape[0]
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            c[j] = c[j] + z0 * c[j + 1]
    return c


def _merge_factors(fl) -> tuple:
    merged: list[tuple[ProjPoint, int]] = []
    for pt, m in fl:
        for i, (q, mm) in enumerate(merged):
            if q.isclose(pt, 1e-12):
                merged[i] = (q, mm + m)
                break
        else:
            merged.append((pt, m))
    return tuple(merged)


def aberth_roots(coeffs: Sequence[complex], maxiter: int = 200,
                 rtol: float = 1e-14) -> np.ndarray:
    """All roots of sum_k a_k z^k by Aberth-Ehrlich simultaneous iteration.

    Starts from a perturbed circle of radius set by the coefficient bound and
    finishes each root with Newton polishing.
    """
    a = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(a)[0]
    if nz.size == 0:
        raise ZeroForm("zero polynomial")
    # strip trailing zero coefficients (roots at 0 handled exactly)
    n_low = int(nz[0])
    a = a[n_low:]
    n = a.shape[0] - 1
    roots0 = np.zeros(n_low, dtype=complex)
    if n == 0:
        return roots0
    a = a / a[-1]
    radius = 1.0 + float(np.max(np.abs(a[:-1])))
    k = np.arange(n)
    z = radius ** (k / max(n, 1) - 0.5) * np.exp(
        2j * np.pi * (k / n + 0.41)
    )

    def peval(x):
        p = np.zeros_like(x)
        dp = np.zeros_like(x)
        for c in a[::-1]:
            dp = dp * x + p
            p = p * x + c
        return p, dp

    for _ in range(maxiter):
        p, dp = peval(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0.0)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            summ = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - newton * summ
            step = np.where(np.abs(denom) > 1e-300, newton / denom, newton)
        z = z - step
        if np.max(np.abs(step)) < rtol * (1.0 + np.max(np.abs(z))):
            break
    # Newton polish
    for _ in range(3):
        p, dp = peval(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(dp) > 0, p / np.where(dp == 0, 1, dp), 0.0)
        z = z - np.where(np.abs(step) < 1.0, step, 0.0)
    return np.concatenate([roots0, z])


def _polish_mult_root(coeffs: np.ndarray, z: complex, m: int) -> complex:
    """Newton-polish an m-fold root as a simple root of the (m-1)th derivative."""
    c = np.asarray(coeffs, dtype=complex)
    for _ in range(m - 1):
        c = c[1:] * np.arange(1, c.shape[0])
    if c.shape[0] < 2:
        return z
    dc = c[1:] * np.arange(1, c.shape[0])
    for _ in range(8):
        p = 0.0 + 0.0j
        for ck in c[::-1]:
            p = p * z + ck
        dp = 0.0 + 0.0j
        for ck in dc[::-1]:
            dp = dp * z + ck
        if dp == 0:
            break
        step = p / dp
        z = z - step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    return z


def _cluster_roots(rts: np.ndarray, tol: float, confirm=None
                   ) -> list[tuple[complex, int]]:
    """Multiplicity clustering: an m-group is accepted within radius tol^(1/m).

    The radius is tested at the prospective multiplicity (largest first),
    since the numerical scatter of an m-fold root is ~eps^(1/m) and exceeds
    the acceptance radius of any smaller multiplicity.  Groups wider than the
    nominal radius (badly conditioned coefficient bases scatter high-order
    roots further) are still accepted when they are isolated from the other
    roots and pass the ``confirm(center, m)`` predicate, which checks that
    the polynomial genuinely vanishes to order m at the polished center.
    Centroids cancel the leading scatter and serve as the root estimates.
    """
    pts = [complex(z) for z in rts]
    unused = list(range(len(pts)))
    out: list[tuple[complex, int]] = []
    while unused:
        i = unused[0]
        order = sorted(unused, key=lambda j: abs(pts[j] - pts[i]))
        for m in range(len(order), 0, -1):
            group = order[:m]
            c = sum(pts[j] for j in group) / m
            r_obs = max(abs(pts[j] - c) for j in group)
            radius = tol ** (1.0 / m) * max(1.0, abs(c))
            ok_tight = r_obs <= radius
            ok_loose = False
            if m > 1 and not ok_tight and confirm is not None:
                rest = [abs(pts[j] - c) for j in unused if j not in group]
                gap = min(rest) if rest else np.inf
                ok_loose = (r_obs <= 0.1 * max(1.0, abs(c))
                            and r_obs <= 0.4 * gap)
            if (ok_tight or ok_loose) and (
                m == 1 or confirm is None or confirm(c, m)
            ):
                out.append((c, m))
                unused = [j for j in unused if j not in group]
                break
    return out
