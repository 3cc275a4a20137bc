"""Eigenvalue spectrum, growth rate and instability thresholds.

Linearizing the probe field A1 and the bunching parameter B about the
unbunched, probe-free state gives a constant-coefficient 3x3 system whose
eigenvalues solve

    lambda^3 - i*delta21*lambda^2 + eta*lambda - i*(alpha*beta + eta*delta21) = 0.

With ``lambda = i*x`` this becomes a real cubic,

    x^3 - delta21*x^2 - eta*x + (alpha*beta + eta*delta21) = 0,

so the spectrum splits into exactly two classes: all three x real (all
eigenvalues imaginary, no growth, case I) or one real x plus a conjugate
pair (one eigenvalue with positive real part, exponential growth at rate
``gamma = |Im x_pair|``, case II). The class boundary is the vanishing of
the cubic's discriminant, which :func:`threshold_lhs` expresses directly in
the controls (delta21, alpha*beta, eta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from carl.cubic import RealCubic, RootNature, classify, solve_cubic
from carl.params import ScaledParams

__all__ = [
    "SpectrumCase",
    "Spectrum",
    "eigen_spectrum",
    "gamma_rao_closed_form",
    "threshold_lhs",
    "critical_alpha_beta",
    "critical_delta21",
]


class SpectrumCase(Enum):
    """Stability class of the linearized system."""

    STABLE = "I"  # all eigenvalues imaginary: bounded oscillation
    UNSTABLE = "II"  # one conjugate-broken pair: exponential growth

    def __str__(self) -> str:
        return f"Case {self.value}"


@dataclass(frozen=True)
class Spectrum:
    """Three eigenvalues of the linearized system plus their classification.

    ``gamma`` is the largest real part, clamped to 0 in the stable case.
    ``boundary`` marks points where the discriminant of the underlying real
    cubic falls inside the classification tolerance band (a repeated root:
    the stable/unstable distinction is not numerically meaningful there).
    """

    lambdas: Tuple[complex, complex, complex]
    case: SpectrumCase
    gamma: float
    boundary: bool

    def __str__(self) -> str:
        return f"gamma = {self.gamma:.6g}, {self.case}"


def _dispersion_cubic(delta21: float, alpha_beta: float, eta: int) -> RealCubic:
    return RealCubic(1.0, -delta21, -float(eta), alpha_beta + eta * delta21)


def eigen_spectrum(s: ScaledParams) -> Spectrum:
    """Spectrum of the linearized probe/bunching system at one control point.

    Solves the real cubic for ``x = -i*lambda`` and maps back. The unstable
    case yields real parts ``+gamma`` and ``-gamma`` (exactly opposite, by
    conjugate symmetrization in the cubic solver) plus one purely imaginary
    eigenvalue.
    """
    cubic = _dispersion_cubic(s.delta21, s.alpha_beta, s.eta)
    solved = solve_cubic(cubic)
    lambdas = tuple(1j * x for x in solved.roots)
    boundary = classify(cubic).boundary
    if solved.nature is RootNature.THREE_REAL:
        return Spectrum(lambdas=lambdas, case=SpectrumCase.STABLE, gamma=0.0, boundary=boundary)
    gamma = max(lam.real for lam in lambdas)
    return Spectrum(lambdas=lambdas, case=SpectrumCase.UNSTABLE, gamma=gamma, boundary=boundary)


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def gamma_rao_closed_form(delta21: float, alpha_beta: float) -> float:
    """Closed-form growth rate of the ray-atom-optics (eta = 0) regime.

    Above the RAO threshold ``alpha_beta > 4*delta21^3/27``,

        gamma = (sqrt(3)/2) * (alpha_beta/4)^(1/3)
                * | (1 + sqrt(d))^(2/3) - (1 - sqrt(d))^(2/3) |,

    with ``d = 1 - 4*delta21^3/(27*alpha_beta)``. The two-thirds powers are
    real: ``x^(2/3) = cbrt(x)^2``, which for ``d > 1`` (negative detuning,
    where ``1 - sqrt(d) < 0``) is the branch that reproduces the numerical
    spectrum; principal complex powers do not. At or below threshold the
    rate is 0 by definition.
    """
    if not (math.isfinite(delta21) and math.isfinite(alpha_beta)):
        raise ValueError("delta21 and alpha_beta must be finite")
    if alpha_beta < 0.0:
        raise ValueError(f"alpha_beta must be >= 0, got {alpha_beta}")
    if alpha_beta == 0.0:
        return 0.0
    threshold = 4.0 * delta21**3 / 27.0
    if alpha_beta <= threshold:
        return 0.0
    d = 1.0 - threshold / alpha_beta  # > 0 above threshold
    s = math.sqrt(d)
    lobe = _cbrt(1.0 + s) ** 2 - _cbrt(1.0 - s) ** 2
    return math.sqrt(3.0) / 2.0 * _cbrt(alpha_beta / 4.0) * abs(lobe)


def threshold_lhs(delta21, alpha_beta, eta):
    """Instability indicator: positive exactly where the spectrum is unstable.

    Equals ``-disc/108`` where ``disc`` is the discriminant of the real
    dispersion cubic, written out in the controls (u = delta21/3):

        (alpha_beta/2)^2 + alpha_beta*u*(eta - u^2) - eta*(1 - 9 u^2)^2 / 27.

    For eta = 0 this reduces to ``(ab/2)^2 - ab*delta21^3/27``, positive iff
    ``ab > 4*delta21^3/27``; for eta = 1, delta21 = 0 it is
    ``(ab/2)^2 - 1/27``, positive iff ``ab > 2/(3*sqrt(3))``. Accepts scalars
    or numpy arrays.
    """
    u = delta21 / 3.0
    ring = 1.0 - 9.0 * u * u
    return (alpha_beta / 2.0) ** 2 + alpha_beta * u * (eta - u * u) - eta * ring * ring / 27.0


def critical_alpha_beta(
    delta21: float,
    eta: int,
    *,
    tol: float = 1e-10,
    scan_floor: float = 1e-13,
) -> Optional[float]:
    """Smallest alpha*beta at which instability sets in at fixed detuning.

    Found by bracketing the sign change of :func:`threshold_lhs` in
    alpha*beta and bisecting to absolute accuracy ``tol``. Returns ``None``
    when the system is unstable for every alpha*beta > 0 (for example
    eta = 0 with delta21 <= 0, or eta = 1 at the recoil resonance
    delta21 = 1): there is then no finite positive threshold.
    """

    def f(ab):
        return threshold_lhs(delta21, ab, eta)

    hi = 1.0
    for _ in range(80):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:  # pragma: no cover - lhs grows quadratically in alpha_beta
        raise RuntimeError("no unstable alpha_beta found; threshold_lhs should grow quadratically")

    lo = None
    x = hi / 2.0
    while x >= scan_floor:
        if f(x) <= 0.0:
            lo = x
            break
        x /= 2.0
    if lo is None:
        return None

    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def critical_delta21(
    alpha_beta: float,
    eta: int,
    *,
    window: Tuple[float, float] = (-10.0, 20.0),
    step: float = 1e-3,
    tol: float = 1e-10,
) -> List[float]:
    """All detunings where the stability class flips, at fixed alpha*beta.

    Scans :func:`threshold_lhs` over ``window`` with the given step and
    refines every sign change by bisection to absolute accuracy ``tol``.
    These are the gain-band edges of a growth-rate-versus-detuning curve.
    Returns an ascending (possibly empty) list.
    """
    if alpha_beta <= 0.0:
        raise ValueError(f"alpha_beta must be > 0, got {alpha_beta}")
    lo_w, hi_w = window
    if not (hi_w > lo_w and step > 0.0):
        raise ValueError("window must be increasing and step positive")

    n = int(math.ceil((hi_w - lo_w) / step)) + 1
    grid = np.linspace(lo_w, hi_w, n)
    values = threshold_lhs(grid, alpha_beta, eta)
    signs = values > 0.0

    edges: List[float] = []
    for i in np.nonzero(signs[:-1] != signs[1:])[0]:
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo = float(values[i])
        for _ in range(200):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            f_mid = float(threshold_lhs(mid, alpha_beta, eta))
            if (f_mid > 0.0) == (f_lo > 0.0):
                lo = mid
            else:
                hi = mid
        edges.append(0.5 * (lo + hi))
    return edges
