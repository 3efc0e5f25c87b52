"""Period lattice of the plane cubic v^2 = 4u^3 - a*u + b and its covolume.

The central quantity is ``mu(a, b)``, the covolume of the lattice spanned by
the two half-period integrals

    sigma_1 = int_alpha^inf du / sqrt((u-alpha)(u-beta)(u-gamma)),
    sigma_2 = int_gamma^inf du / sqrt((u-alpha)(u-beta)(u-gamma)),

where 4u^3 - a*u + b = 4(u-alpha)(u-beta)(u-gamma) and the roots are labeled
so that |alpha| >= |beta|, |gamma| and Re(beta) >= Re(gamma).  Both integrals
are evaluated through the Carlson symmetric form R_F extended to complex
arguments; ``mu_quadrature`` provides an independent adaptive-quadrature
evaluation of the same integrals along explicit rays used for cross checks.

mu scales as mu(lam^2 a, lam^3 b) = mu(a, b) / |lam| and blows up
logarithmically at the discriminant locus a^3 = 27 b^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

__all__ = [
    "DegenerateDiscriminant",
    "PeriodData",
    "CubicData",
    "carlson_rf",
    "cubic_roots",
    "periods",
    "mu",
    "mu_array",
    "mu_quadrature",
    "asymptotic_constant",
    "ml_estimate_residual",
    "weighted_size",
]

_DISC_REL_TOL = 1e-14


class DegenerateDiscriminant(ValueError):
    """Raised when a^3 - 27 b^2 vanishes to working precision."""


@dataclass(frozen=True)
class CubicData:
    """Coefficients and ordered roots of 4u^3 - a*u + b."""

    a: complex
    b: complex
    alpha: complex
    beta: complex
    gamma: complex
    disc: complex  # a^3 - 27 b^2


@dataclass(frozen=True)
class PeriodData:
    """A lattice basis (sigma1, sigma2), reduced modulus tau, and covolume mu.

    sigma2 is sign-normalized so that Im(sigma2/sigma1) > 0; tau is the
    Gauss-reduced modulus in the standard fundamental domain
    |Re tau| <= 1/2, |tau| >= 1 (boundary representatives taken with
    Re tau >= 0).
    """

    sigma1: complex
    sigma2: complex
    tau: complex
    mu: float


def carlson_rf(x, y, z, rtol: float = 5e-18):
    """Carlson symmetric integral R_F(x, y, z) for complex arguments.

    R_F(x,y,z) = 1/2 int_0^inf dt / sqrt((t+x)(t+y)(t+z)) with principal
    square roots.  Uses the duplication algorithm; arguments may be numpy
    arrays (broadcast together).  Arguments on the negative real axis are
    outside the principal-branch domain but in practice iterate away from it.
    """
    x0 = np.asarray(x, dtype=complex)
    y0 = np.asarray(y, dtype=complex)
    z0 = np.asarray(z, dtype=complex)
    x0, y0, z0 = np.broadcast_arrays(x0, y0, z0)
    xm, ym, zm = x0.copy(), y0.copy(), z0.copy()
    A0 = (xm + ym + zm) / 3.0
    Q = np.max(
        np.stack([np.abs(A0 - xm), np.abs(A0 - ym), np.abs(A0 - zm)]), axis=0
    ) * (3.0 * rtol) ** (-1.0 / 8.0)
    A = A0.copy()
    f = np.ones(xm.shape)
    for _ in range(120):
        active = Q > np.abs(A) * f
        if not active.any():
            break
        sx, sy, sz = np.sqrt(xm), np.sqrt(ym), np.sqrt(zm)
        lam = sx * sy + sy * sz + sz * sx
        xm = np.where(active, (xm + lam) / 4.0, xm)
        ym = np.where(active, (ym + lam) / 4.0, ym)
        zm = np.where(active, (zm + lam) / 4.0, zm)
        A = np.where(active, (A + lam) / 4.0, A)
        f = np.where(active, f * 4.0, f)
    Af = A * f
    X = (A0 - x0) / Af
    Y = (A0 - y0) / Af
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    series = (
        1.0
        + E3 * (1.0 / 14.0 + 3.0 * E3 / 104.0)
        + E2
        * (
            -1.0 / 10.0
            + E2 / 24.0
            - 3.0 * E3 / 44.0
            - 5.0 * E2 * E2 / 208.0
            + E2 * E3 / 16.0
        )
    )
    out = series / np.sqrt(A)
    if out.ndim == 0:
        return complex(out)
    return out


def _check_disc(a: complex, b: complex) -> complex:
    disc = a**3 - 27.0 * b**2
    scale = abs(a) ** 3 + 27.0 * abs(b) ** 2
    if scale == 0.0 or abs(disc) <= _DISC_REL_TOL * scale:
        raise DegenerateDiscriminant(
            f"a^3 - 27 b^2 vanishes to working precision for a={a}, b={b}"
        )
    return disc


def _quantize(x: np.ndarray, scale: float) -> np.ndarray:
    """Round to ~9 significant digits of scale so near-ties sort stably."""
    return np.round(np.asarray(x) / (scale * 1e-9)) if scale > 0 else np.asarray(x)


def cubic_roots(a: complex, b: complex) -> CubicData:
    """Roots of 4u^3 - a*u + b labeled |alpha| >= |beta|,|gamma|, Re beta >= Re gamma.

    Ties (moduli or real parts equal to ~1e-9 relative) are broken
    lexicographically by (|r|, Re r, Im r) for alpha and by (Re r, Im r) for
    the beta/gamma split, so the labeling is deterministic.
    """
    disc = _check_disc(complex(a), complex(b))
    rs = np.roots([4.0, 0.0, -complex(a), complex(b)])
    scale = float(np.max(np.abs(rs)))
    key = lambda r: (
        float(_quantize(abs(r), scale)),
        float(_quantize(r.real, scale)),
        float(_quantize(r.imag, scale)),
    )
    ordered = sorted(rs, key=key, reverse=True)
    alpha = ordered[0]
    rest = sorted(ordered[1:], key=lambda r: key(r)[1:], reverse=True)
    return CubicData(complex(a), complex(b), complex(alpha), complex(rest[0]),
                     complex(rest[1]), disc)


def _reduce_tau(tau: complex, boundary_tol: float = 1e-9) -> complex:
    """Gauss reduction of a modulus with Im tau > 0 to the fundamental domain."""
    t = complex(tau)
    for _ in range(512):
        t = t - round(t.real)
        if abs(t) < 1.0 - 1e-15:
            t = -1.0 / t
        else:
            break
    # Boundary representatives: |tau| = 1 arc and Re tau = -1/2 edge are
    # glued to their mirrors; take the Re tau >= 0 representative so the
    # hexagonal point comes out as exp(i pi/3).
    if abs(abs(t) - 1.0) < boundary_tol and t.real < -boundary_tol:
        t = -1.0 / t
    if abs(t.real + 0.5) < boundary_tol:
        t = t + 1.0
    return t


def periods(a: complex, b: complex) -> PeriodData:
    """Period basis, reduced modulus, and covolume for v^2 = 4u^3 - a*u + b.

    Raises DegenerateDiscriminant when a^3 = 27 b^2 to working precision.
    """
    cd = cubic_roots(a, b)
    s1 = 2.0 * carlson_rf(0.0, cd.alpha - cd.beta, cd.alpha - cd.gamma)
    s2 = 2.0 * carlson_rf(0.0, cd.gamma - cd.alpha, cd.gamma - cd.beta)
    if (s2 / s1).imag < 0.0:
        s2 = -s2
    cov = abs((s1 * np.conj(s2)).imag)
    tau = _reduce_tau(s2 / s1)
    return PeriodData(complex(s1), complex(s2), tau, float(cov))


def mu(a: complex, b: complex) -> float:
    """Covolume of the period lattice of du/v on v^2 = 4u^3 - a*u + b."""
    return periods(a, b).mu


def _cardano_roots_sorted(a: np.ndarray, b: np.ndarray):
    """Vectorized ordered roots of 4u^3 - a*u + b (same labeling as cubic_roots)."""
    p = -a / 4.0
    q = b / 4.0
    D = np.sqrt(q * q / 4.0 + p**3 / 27.0)
    C3 = -q / 2.0 + D
    alt = -q / 2.0 - D
    C3 = np.where(np.abs(C3) < np.abs(alt), alt, C3)
    C = C3 ** (1.0 / 3.0)
    w = np.exp(2j * np.pi / 3.0)
    roots = []
    for k in range(3):
        Ck = C * w**k
        with np.errstate(divide="ignore", invalid="ignore"):
            r = Ck - np.where(Ck != 0, p / (3.0 * Ck), 0.0)
        roots.append(r)
    R = np.stack(roots, axis=-1)
    # two Newton polish steps on 4u^3 - a u + b
    for _ in range(2):
        F = 4.0 * R**3 - a[..., None] * R + b[..., None]
        dF = 12.0 * R**2 - a[..., None]
        step = np.where(np.abs(dF) > 0, F / np.where(dF == 0, 1.0, dF), 0.0)
        R = R - step
    scale = np.max(np.abs(R), axis=-1, keepdims=True)
    scale = np.where(scale > 0, scale, 1.0)
    q = lambda x: np.round(x / (scale * 1e-9))
    order = np.lexsort((q(R.imag), q(R.real), q(np.abs(R))), axis=-1)
    alpha = np.take_along_axis(R, order[..., -1:], axis=-1)[..., 0]
    rest = np.take_along_axis(R, order[..., :2], axis=-1)
    o2 = np.lexsort((q(rest.imag), q(rest.real)), axis=-1)
    rest = np.take_along_axis(rest, o2, axis=-1)
    return alpha, rest[..., 1], rest[..., 0]


def mu_array(a, b) -> np.ndarray:
    """Vectorized mu over arrays of coefficients (used for field evaluation).

    Entries with a degenerate discriminant come back as +inf, matching the
    blow-up of the metric density at discriminant points.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    shape = a.shape
    a = a.ravel()
    b = b.ravel()
    disc = a**3 - 27.0 * b**2
    scale = np.abs(a) ** 3 + 27.0 * np.abs(b) ** 2
    bad = (scale == 0.0) | (np.abs(disc) <= _DISC_REL_TOL * scale)
    a_safe = np.where(bad, 1.0, a)
    b_safe = np.where(bad, 0.0, b)
    al, be, ga = _cardano_roots_sorted(a_safe, b_safe)
    zero = np.zeros_like(al)
    s1 = 2.0 * carlson_rf(zero, al - be, al - ga)
    s2 = 2.0 * carlson_rf(zero, ga - al, ga - be)
    out = np.abs((np.asarray(s1) * np.conj(s2)).imag)
    out = np.where(bad, np.inf, out)
    return out.reshape(shape)


def mu_quadrature(a: complex, b: complex, dps: int = 30) -> float:
    """mu(a, b) by direct adaptive quadrature of the defining ray integrals.

    Independent of the Carlson pipeline: the cubic is rescaled so the
    largest-modulus root is 1 (roots 1, -1/2 - xi, -1/2 + xi), and the two
    period integrals are taken along the rays u = 1 + s and
    u = gamma + s*xi/|xi| with the square-root branches fixed by
    Re sqrt(s(s + xi + 3/2)(s - xi + 3/2)) > 0 on the first ray and
    Im sqrt(s xi/|xi| + xi - 3/2) > 0, sqrt(s(s+|2 xi|)) >= 0 on the second.
    """
    cd = cubic_roots(a, b)
    xi = cd.gamma / cd.alpha + 0.5
    old = mp.mp.dps
    mp.mp.dps = dps
    try:
        xim = mp.mpc(xi)
        three_half = mp.mpf(3) / 2

        def f1(s):
            w = s * (s + xim + three_half) * (s - xim + three_half)
            r = mp.sqrt(w)
            if mp.re(r) < 0:
                r = -r
            return 1 / r

        I1 = mp.quad(f1, [0, 1, mp.inf])
        u = xim / abs(xim)

        def f2(s):
            r1 = mp.sqrt(s * (s + 2 * abs(xim)))
            r2 = mp.sqrt(s * u + xim - three_half)
            if mp.im(r2) < 0:
                r2 = -r2
            return 1 / (r1 * r2)

        I2 = mp.quad(f2, [0, 1, mp.inf])
        cov = abs(mp.im(I1 * mp.conj(I2)))
        return float(cov) / abs(cd.alpha)
    finally:
        mp.mp.dps = old


def asymptotic_constant() -> float:
    """Coefficient of log(1/|a^3-27b^2|-scale) in the growth of mu at the wall.

    Computed as (sqrt(3)+1) * Im(conj(c1) * I1(0)) where c1 = 1/sqrt(-3/2)
    and I1(0) = int_0^inf ds / (sqrt(s) (s + 3/2)), the latter evaluated by
    quadrature.  Deterministic to well below 1e-8.
    """
    three_half = mp.mpf(3) / 2
    # substitute s = u^2 to remove the sqrt singularity at 0
    I1 = mp.quad(lambda u: 2 / (u * u + three_half), [0, 1, mp.inf])
    c1 = 1.0 / complex(np.sqrt(-1.5 + 0j))  # = -i sqrt(2/3)
    return float((np.sqrt(3.0) + 1.0) * (np.conj(c1) * float(I1)).imag)


def weighted_size(a: complex, b: complex) -> float:
    """|a|^(1/2) + |b|^(1/3), the scale factor pairing with mu."""
    return abs(a) ** 0.5 + abs(b) ** (1.0 / 3.0)


def ml_estimate_residual(a: complex, b: complex, c: float | None = None) -> float:
    """(|a|^(1/2)+|b|^(1/3)) mu(a,b) + c log(|a^3-27b^2| / (|a|^3+27|b|^2)).

    With the default c = asymptotic_constant() the quantity stays within a
    fixed band on sample sets bounded away from the discriminant wall; the
    variant with c/2 is bounded uniformly (the discriminant vanishes to
    second order at a generic wall point, so the log-ratio grows twice as
    fast as the log-gap driving mu).
    """
    if c is None:
        c = asymptotic_constant()
    disc = _check_disc(complex(a), complex(b))
    ratio = abs(disc) / (abs(a) ** 3 + 27.0 * abs(b) ** 2)
    return weighted_size(a, b) * mu(a, b) + c * float(np.log(ratio))
