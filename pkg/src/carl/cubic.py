"""Robust roots of real-coefficient cubics.

This is the computational kernel behind the dispersion relation of the
linearized CARL: the substitution ``lambda = i*x`` turns its complex cubic
into one with real coefficients, so only the real case is needed.

Two independent routes are provided: :func:`solve_cubic` (closed form,
trigonometric for three real roots, Cardano for one real plus a conjugate
pair, Newton-polished) and :func:`companion_roots` (eigenvalues of the
companion matrix), used to cross-check each other in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Tuple

import numpy as np

__all__ = [
    "RealCubic",
    "RootNature",
    "CubicRoots",
    "Classification",
    "solve_cubic",
    "classify",
    "companion_roots",
]

#: Tolerance band on the normalized discriminant inside which the
#: three-real/one-pair distinction is not numerically meaningful.
DEFAULT_BOUNDARY_TOL = 1e-12


class RootNature(Enum):
    """Root structure of a real cubic."""

    THREE_REAL = "three_real"
    ONE_REAL_ONE_PAIR = "one_real_one_pair"


@dataclass(frozen=True)
class RealCubic:
    """Polynomial c3*x^3 + c2*x^2 + c1*x + c0 with real coefficients, c3 != 0."""

    c3: float
    c2: float
    c1: float
    c0: float

    def __post_init__(self):
        for name in ("c3", "c2", "c1", "c0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coefficient {name} must be finite, got {getattr(self, name)!r}")
        if self.c3 == 0.0:
            raise ValueError("c3 must be nonzero (degree exactly 3)")

    def monic(self) -> Tuple[float, float, float]:
        """Coefficients (b, c, d) of the monic form x^3 + b x^2 + c x + d."""
        return self.c2 / self.c3, self.c1 / self.c3, self.c0 / self.c3

    def __call__(self, x):
        return ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0


@dataclass(frozen=True)
class CubicRoots:
    """All three roots plus structure metadata.

    ``discriminant`` is the discriminant of the monic polynomial
    (positive: three distinct real roots, negative: one real root and a
    conjugate pair, zero: repeated root). ``nature`` reflects the exact sign
    of that discriminant; use :func:`classify` for the tolerance-banded tag.

    Ordering convention: three real roots ascending; otherwise the real root
    first, then the pair with positive imaginary part before its conjugate.
    """

    roots: Tuple[complex, complex, complex]
    nature: RootNature
    discriminant: float


class Classification(NamedTuple):
    """Tolerance-aware root-structure tag (see :func:`classify`)."""

    nature: RootNature
    boundary: bool
    discriminant: float  # normalized, scale-free


def _cbrt(x: float) -> float:
    # signed real cube root (math.cbrt is 3.11+)
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _depressed(b: float, c: float, d: float) -> Tuple[float, float]:
    # x = t - b/3 turns x^3 + b x^2 + c x + d into t^3 + p t + q
    p = c - b * b / 3.0
    q = d - b * c / 3.0 + 2.0 * b**3 / 27.0
    return p, q


def _polish_real(x: float, b: float, c: float, d: float) -> float:
    # <= 3 guarded Newton steps on the monic polynomial
    f = ((x + b) * x + c) * x + d
    for _ in range(3):
        if f == 0.0:
            break
        fp = (3.0 * x + 2.0 * b) * x + c
        if fp == 0.0:
            break
        xn = x - f / fp
        fn = ((xn + b) * xn + c) * xn + d
        if abs(fn) >= abs(f):
            break
        x, f = xn, fn
    return x


def _polish_complex(z: complex, b: float, c: float, d: float) -> complex:
    f = ((z + b) * z + c) * z + d
    for _ in range(3):
        if f == 0.0:
            break
        fp = (3.0 * z + 2.0 * b) * z + c
        if fp == 0.0:
            break
        zn = z - f / fp
        fn = ((zn + b) * zn + c) * zn + d
        if abs(fn) >= abs(f):
            break
        z, f = zn, fn
    return z


def solve_cubic(cubic: RealCubic) -> CubicRoots:
    """All three roots of a real cubic, closed form plus Newton polish.

    Three distinct real roots are computed by the trigonometric method;
    the one-real-plus-pair case by Cardano with cancellation-safe radical
    arithmetic. The conjugate pair is symmetrized exactly (the second member
    is the mirror of the polished first), so downstream sign tests on real
    parts are reliable.
    """
    b, c, d = cubic.monic()
    p, q = _depressed(b, c, d)
    disc = -4.0 * p**3 - 27.0 * q * q
    shift = -b / 3.0

    if disc > 0.0:
        # three distinct real roots; p < 0 is guaranteed here
        m = 2.0 * math.sqrt(-p / 3.0)
        # cos(3*theta) = 3q / (p*m); clamp against rounding at the boundary
        arg = min(1.0, max(-1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
        reals = sorted(_polish_real(t + shift, b, c, d) for t in ts)
        roots = tuple(complex(r, 0.0) for r in reals)
        return CubicRoots(roots=roots, nature=RootNature.THREE_REAL, discriminant=disc)

    if disc < 0.0:
        # one real root and a conjugate pair
        s = math.sqrt(q * q / 4.0 + p**3 / 27.0)
        # pick the larger-magnitude radicand to avoid cancellation
        t_big = -q / 2.0 - math.copysign(s, q) if q != 0.0 else s
        u = _cbrt(t_big)
        v = 0.0 if u == 0.0 else -p / (3.0 * u)
        real_root = _polish_real(u + v + shift, b, c, d)
        z = complex(-(u + v) / 2.0 + shift, math.sqrt(3.0) / 2.0 * abs(u - v))
        z = _polish_complex(z, b, c, d)
        z = complex(z.real, abs(z.imag))  # mirror convention: +imag member first
        roots = (complex(real_root, 0.0), z, z.conjugate())
        return CubicRoots(roots=roots, nature=RootNature.ONE_REAL_ONE_PAIR, discriminant=disc)

    # disc == 0: repeated roots, all real
    if p == 0.0:
        triple = shift  # q == 0 follows from disc == 0 and p == 0
        roots = (complex(triple, 0.0),) * 3
    else:
        single = 3.0 * q / p + shift
        double = -3.0 * q / (2.0 * p) + shift
        reals = sorted((single, double, double))
        roots = tuple(complex(r, 0.0) for r in reals)
    return CubicRoots(roots=roots, nature=RootNature.THREE_REAL, discriminant=disc)


def classify(cubic: RealCubic, tol: float = DEFAULT_BOUNDARY_TOL) -> Classification:
    """Scale-free root-structure tag with a tolerance band at the boundary.

    The discriminant of the monic depressed cubic is normalized by
    ``max(1, |p|^3, q^2)`` before comparison, so the verdict does not depend
    on the overall coefficient scale. Inside the band ``|disc| <= tol`` the
    tag is reported as THREE_REAL with ``boundary=True`` (a repeated real
    root and a barely split conjugate pair are indistinguishable there).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    b, c, d = cubic.monic()
    p, q = _depressed(b, c, d)
    disc = -4.0 * p**3 - 27.0 * q * q
    disc_hat = disc / max(1.0, abs(p) ** 3, q * q)
    boundary = abs(disc_hat) <= tol
    nature = RootNature.THREE_REAL if disc_hat >= -tol else RootNature.ONE_REAL_ONE_PAIR
    return Classification(nature=nature, boundary=boundary, discriminant=disc_hat)


def companion_roots(cubic: RealCubic) -> CubicRoots:
    """Roots via eigenvalues of the companion matrix (cross-check oracle).

    Independent of :func:`solve_cubic`: no closed forms, no polishing, no
    conjugate symmetrization. Eigenvalues of a THREE_REAL case may therefore
    carry tiny spurious imaginary parts; keep that in mind when comparing.
    """
    b, c, d = cubic.monic()
    comp = np.array(
        [
            [0.0, 0.0, -d],
            [1.0, 0.0, -c],
            [0.0, 1.0, -b],
        ]
    )
    eigs = sorted(np.linalg.eigvals(comp), key=lambda z: (z.real, z.imag))
    p, q = _depressed(b, c, d)
    disc = -4.0 * p**3 - 27.0 * q * q
    nature = RootNature.THREE_REAL if disc >= 0.0 else RootNature.ONE_REAL_ONE_PAIR
    return CubicRoots(roots=tuple(complex(z) for z in eigs), nature=nature, discriminant=disc)


def residual_scale(cubic: RealCubic) -> float:
    """Normalization for root residuals: max(1, |b|, |c|, |d|) of the monic form."""
    b, c, d = cubic.monic()
    return max(1.0, abs(b), abs(c), abs(d))


def monic_residual(cubic: RealCubic, root: complex) -> float:
    """|x^3 + b x^2 + c x + d| at ``root``."""
    b, c, d = cubic.monic()
    return abs(((root + b) * root + c) * root + d)
