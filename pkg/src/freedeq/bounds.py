"""Quantitative comparison of spectral distributions via Cauchy transforms.

Closeness of two transforms far from the real axis propagates to a region
near the axis: if |G_mu - G_nu| <= exp(-m) on the part of the upper
half-plane of modulus above R, then on the segment

    I(m) = i eta0 (1 - exp(-1/m^beta)) / (1 + exp(-1/m^beta)) + [-T, T]

one still has |G_mu - G_nu| <= exp(-c m^(1-beta)), for constructive
constants eta0 and m0 built here exactly as the underlying convexity
argument produces them (log max-modulus of a holomorphic function on the
disc is convex in log r; the half-plane is pulled back through the Cayley
type map psi_a(z) = i a (1 + z) / (1 - z)).  Combined with an integral
bound on the Kolmogorov distance in terms of |G_mu - G_nu| along a
horizontal line, this turns far-field transform estimates into
distribution-function estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError, ParameterError, PoleError, SupportError

R0_DEFAULT = math.exp(-0.5)
SAFETY = 1.01
M0_SCAN_CAP = 10 ** 6


def psi_a(a: float, z):
    """Conformal map of the unit disc onto the upper half-plane, i a (1+z)/(1-z)."""
    if a <= 0:
        raise ParameterError("psi_a needs a > 0")
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z == 1):
        raise PoleError("psi_a has a pole at z = 1")
    if np.any(np.abs(z) > 1 + 1e-12):
        raise ParameterError("psi_a is defined on the closed unit disc")
    out = 1j * a * (1 + z) / (1 - z)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ExtensionParams:
    beta: float
    c: float
    R: float
    T: float
    r0: float
    a: float
    eta0: float
    m0: float


def _omega_tilde(s: float) -> float:
    # log of the growth envelope 1/(1 - r) at r = e^s
    return math.log(1.0 / (1.0 - math.exp(s)))


def _chord_value(m: float, beta: float) -> float | None:
    """Value at s2 of the chord through (s0, -m) and (s1, omega_tilde(s1)).

    s0 = log r0, s1 = s0 / m^beta, s2 = 2 s0 / m^beta; requires the ordering
    s0 < s2 < s1 < 0, i.e. m^beta > 2.
    """
    s0 = math.log(R0_DEFAULT)
    mb = m ** beta
    if mb <= 2.0:
        return None
    s1 = s0 / mb
    s2 = 2.0 * s0 / mb
    frac = (s2 - s0) / (s1 - s0)
    return frac * _omega_tilde(s1) - (1.0 - frac) * m


def choose_constants(beta: float, c: float, R: float, T: float) -> ExtensionParams:
    """Constructive constants for the extension estimate.

    r0 = e^(-1/2); a is the smallest admissible pullback scale (at least 4,
    and large enough that the disc of radius r0 maps above modulus R); eta0
    exceeds 2 (a^2 + T^2) / a; m0 is the smallest integer m at which the
    convexity chord already lies below -c m^(1-beta).
    """
    if not (0 < beta < 1 and 0 < c < 1 and R > 0 and T > 0):
        raise ParameterError("need beta, c in (0,1) and R, T > 0")
    r0 = R0_DEFAULT
    a = max(4.0, SAFETY * R * (1 + r0) / (1 - r0))
    eta0 = SAFETY * 2.0 * (a * a + T * T) / a
    m0 = None
    for m in range(1, M0_SCAN_CAP + 1):
        val = _chord_value(float(m), beta)
        if val is not None and val <= -c * float(m) ** (1.0 - beta):
            m0 = m
            break
    if m0 is None:
        raise ParameterError(f"no admissible m0 below {M0_SCAN_CAP}")
    return ExtensionParams(beta, c, R, T, r0, a, eta0, float(m0))


def eta_of_m(params: ExtensionParams, m: float) -> float:
    e = math.exp(-1.0 / m ** params.beta)
    return params.eta0 * (1.0 - e) / (1.0 + e)


def extension_bound(params: ExtensionParams, m: float) -> tuple[tuple[float, float, float], float]:
    """Segment I(m) as (t_min, t_max, height) and the bound exp(-c m^(1-beta))."""
    if m <= params.m0:
        raise ParameterError(f"extension bound needs m > m0 = {params.m0}")
    height = eta_of_m(params, m)
    bound = math.exp(-params.c * m ** (1.0 - params.beta))
    return (-params.T, params.T, height), bound


def sup_on_delta_R(gmu, gnu, R: float, A: float, *, n_circle: int = 2000,
                   n_segment: int = 500) -> tuple[float, float]:
    """Estimate sup |G_mu - G_nu| over the upper half-plane beyond modulus R.

    Both measures must be supported in [-A, A] with A < R.  The sup of the
    holomorphic difference is attained on the boundary (it vanishes at
    infinity), so the half-circle of radius R and the adjacent real
    segments up to 3R are sampled, and the region beyond 3R is covered by
    the tail bound 2A / (|z| (|z| - A)).  Returns (sup, m = -log sup), with
    m = inf when the difference vanishes.
    """
    if A >= R:
        raise SupportError(f"support bound A={A} must be below R={R}")
    theta = np.linspace(0.0, np.pi, n_circle)
    pts = [R * np.exp(1j * theta) + 1e-9j]
    seg = np.linspace(R, 3.0 * R, n_segment)
    pts.append(seg + 1e-9j)
    pts.append(-seg + 1e-9j)
    zs = np.concatenate(pts)
    diffs = np.abs(np.asarray(gmu(zs)) - np.asarray(gnu(zs)))
    sup = float(diffs.max())
    tail = 2.0 * A / (3.0 * R * (3.0 * R - A))
    sup = max(sup, tail if sup > 0 else 0.0)
    if sup == 0.0:
        return 0.0, math.inf
    return sup, -math.log(sup)


@dataclass(frozen=True)
class DistanceReport:
    m: float
    interval: tuple[float, float, float]  # (t_min, t_max, height)
    bound: float
    measured_max: float
    violation: bool
    theorem_applies: bool
    kolmogorov: float | None = None


def verify_extension(gmu, gnu, params: ExtensionParams, m: float, *,
                     n_points: int = 2001) -> DistanceReport:
    """Measure max |G_mu - G_nu| over I(m) and compare with the bound.

    The guarantee only holds for m > m0; the report still evaluates both
    sides otherwise and flags theorem_applies=False.  A violation with
    theorem_applies=True indicates an implementation bug somewhere.
    """
    height = eta_of_m(params, m) if math.isfinite(m) else 0.0
    if not math.isfinite(m):
        return DistanceReport(m, (-params.T, params.T, 0.0), 0.0, 0.0, False, True)
    ts = np.linspace(-params.T, params.T, n_points)
    zs = ts + 1j * height
    measured = float(np.abs(np.asarray(gmu(zs)) - np.asarray(gnu(zs))).max())
    bound = math.exp(-params.c * m ** (1.0 - params.beta))
    applies = m > params.m0
    return DistanceReport(m, (-params.T, params.T, height), bound, measured,
                          applies and measured > bound, applies)


def hardy_convexity_check(f, s_grid, *, n_boundary: int = 4096) -> float:
    """Largest convexity defect of s -> log max |f| on the circle of radius e^s.

    The defect of a triple s_i < s_j < s_k is the amount by which the middle
    value exceeds the chord; for holomorphic f it is nonpositive up to
    discretization error.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid >= 0):
        raise GridError("s grid must be negative (radii below 1)")
    theta = np.linspace(0.0, 2.0 * np.pi, n_boundary, endpoint=False)
    ring = np.exp(1j * theta)
    logm = []
    for s in s_grid:
        vals = np.abs(np.asarray(f(math.exp(s) * ring)))
        logm.append(math.log(max(float(vals.max()), 1e-300)))
    logm = np.asarray(logm)
    worst = -math.inf
    n = len(s_grid)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                si, sj, sk = s_grid[i], s_grid[j], s_grid[k]
                chord = (logm[i] * (sk - sj) + logm[k] * (sj - si)) / (sk - si)
                worst = max(worst, float(logm[j] - chord))
    return worst


def bai_bound(gdiff, rho: float, eta: float, c1: float = 1.0, c2: float = 2.0,
              A: float = 1.0, *, n_points: int = 2001) -> float:
    """Kolmogorov-distance bound from transform closeness on one line.

    d(mu, nu) <= c1 ( integral over [-c2 A, c2 A] of |G_mu - G_nu|(t + i eta)
    + (1/eta) sup_x integral over |t| <= 4 eta of |F_mu(x+t) - F_mu(x)| ).
    With F_mu Lipschitz of constant rho the second term is at most
    (1/eta) * 16 rho eta^2 = 16 rho eta, which is what is used here.
    gdiff is either a callable t -> |G_mu - G_nu|(t + i eta) or an array of
    samples on the uniform grid over [-c2 A, c2 A].
    """
    if eta <= 0:
        raise ParameterError("bai_bound needs eta > 0")
    ts = np.linspace(-c2 * A, c2 * A, n_points)
    if callable(gdiff):
        vals = np.abs(np.asarray(gdiff(ts), dtype=float))
    else:
        vals = np.abs(np.asarray(gdiff, dtype=float))
        if len(vals) != len(ts):
            ts = np.linspace(-c2 * A, c2 * A, len(vals))
    integral = float(np.trapezoid(vals, ts))
    return c1 * (integral + 16.0 * rho * eta)


def kolmogorov_distance(f1, f2) -> float:
    """Sup distance of two distribution functions sampled on a common grid.

    Adjacent-index comparisons are included so that jumps located at grid
    points contribute their one-sided limits.
    """
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    if f1.shape != f2.shape or f1.ndim != 1 or f1.size == 0:
        raise GridError("distribution functions must share one nonempty grid")
    d = float(np.abs(f1 - f2).max())
    if f1.size > 1:
        d = max(d, float(np.abs(f1[1:] - f2[:-1]).max()),
                float(np.abs(f1[:-1] - f2[1:]).max()))
    return d
