"""Cauchy and R transforms of discrete spectral measures.

Sign convention used everywhere in this package: G(z) = sum w_l / (z - t_l)
maps the upper half-plane into the lower one, and the transforms satisfy
G(z) = 1 / (z - R(G(z))), equivalently R(w) = G^{-1}(w) - 1/w.  The point
mass at c has G(z) = 1/(z - c) and R identically c, which pins the signs.

R is evaluated by Newton inversion of G (with damping and an optional warm
start for continuation along a curve of arguments) and by the truncated
cumulant series as a fallback near w = 0.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import GridError, InputError, InversionError, PoleError
from .nclattice import moments_to_cumulants


@dataclass(frozen=True)
class SpectralMeasure:
    """Finite atomic measure: locations and positive weights summing to 1."""

    atoms: np.ndarray
    weights: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.atoms))

    @property
    def spread(self) -> float:
        return float(np.abs(self.atoms - self.mean).max(initial=0.0))

    def moment(self, k: int) -> float:
        return float(np.dot(self.weights, self.atoms ** k))

    def moments(self, order: int) -> list[float]:
        return [self.moment(j) for j in range(1, order + 1)]

    def cumulants(self, order: int) -> list[complex]:
        return moments_to_cumulants(self.moments(order), order)


def spectral_measure(atoms, weights) -> SpectralMeasure:
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if atoms.ndim != 1 or atoms.shape != weights.shape:
        raise InputError("atoms and weights must be 1-d arrays of equal length")
    if not np.all(np.isfinite(atoms)):
        raise InputError("atom locations must be finite")
    if np.any(weights <= 0):
        raise InputError("weights must be positive")
    total = weights.sum()
    if abs(total - 1.0) > 1e-8:
        raise InputError(f"weights sum to {total}, expected 1")
    return SpectralMeasure(atoms, weights / total)


def point_mass(c: float) -> SpectralMeasure:
    return SpectralMeasure(np.array([float(c)]), np.array([1.0]))


def matrix_measure(t) -> SpectralMeasure:
    """Eigenvalue measure of a hermitian matrix, weight 1/N per eigenvalue."""
    t = matcore.as_cmatrix(t)
    if not matcore.is_hermitian(t):
        raise InputError("matrix_measure needs a hermitian matrix")
    w, _ = matcore.hermitian_eig(t)
    n = len(w)
    return SpectralMeasure(np.asarray(w, dtype=float), np.full(n, 1.0 / n))


def semicircle_measure(radius: float = 2.0, n: int = 2000) -> SpectralMeasure:
    """Quadrature discretization of the semicircle on [-radius, radius]."""
    j = np.arange(1, n + 1)
    theta = j * np.pi / (n + 1)
    atoms = radius * np.cos(theta)
    weights = 2.0 / (n + 1) * np.sin(theta) ** 2
    return SpectralMeasure(atoms, weights / weights.sum())


def cauchy(mu: SpectralMeasure, z):
    """G(z) = sum w_l / (z - t_l); scalar or array z."""
    z = np.asarray(z, dtype=np.complex128)
    diff = z[..., None] - mu.atoms
    if np.any(diff == 0):
        raise PoleError("z coincides with an atom")
    out = np.sum(mu.weights / diff, axis=-1)
    return complex(out) if out.ndim == 0 else out


def cauchy_prime(mu: SpectralMeasure, z):
    z = np.asarray(z, dtype=np.complex128)
    diff = z[..., None] - mu.atoms
    if np.any(diff == 0):
        raise PoleError("z coincides with an atom")
    out = -np.sum(mu.weights / diff ** 2, axis=-1)
    return complex(out) if out.ndim == 0 else out


def cauchy_inverse(mu: SpectralMeasure, w: complex, x0: complex | None = None,
                   tol: float = 1e-12, max_iter: int = 200) -> complex:
    """Solve G(x) = w by damped Newton, starting from 1/w + mean by default.

    The default start selects the branch with x ~ 1/w at small w; pass x0 to
    continue along a previously found branch.
    """
    w = complex(w)
    if w == 0:
        raise InputError("cannot invert the Cauchy transform at w = 0")
    x = complex(x0) if x0 is not None else 1.0 / w + mu.mean
    res = abs(cauchy(mu, x) - w)
    for _ in range(max_iter):
        if res <= tol:
            return x
        g = cauchy(mu, x)
        gp = cauchy_prime(mu, x)
        if gp == 0:
            raise InversionError(f"critical point hit while inverting at w={w!r}")
        step = (g - w) / gp
        x_new = x - step
        res_new = abs(cauchy(mu, x_new) - w)
        halvings = 0
        while res_new >= res and halvings < 50:
            step *= 0.5
            x_new = x - step
            res_new = abs(cauchy(mu, x_new) - w)
            halvings += 1
        if res_new >= res:
            break
        x, res = x_new, res_new
    if res <= tol:
        return x
    raise InversionError(f"Newton inversion stalled at residual {res:.3e} for w={w!r}")


def r_transform_newton(mu: SpectralMeasure, w: complex, x0: complex | None = None,
                       tol: float = 1e-12, max_iter: int = 200) -> complex:
    """R(w) = G^{-1}(w) - 1/w via Newton inversion."""
    x = cauchy_inverse(mu, w, x0=x0, tol=tol, max_iter=max_iter)
    return x - 1.0 / complex(w)


def r_transform_series(kappa, w: complex) -> complex:
    """Truncated cumulant series R(w) = sum_j kappa_j w^(j-1)."""
    w = complex(w)
    out = 0.0 + 0.0j
    for k in reversed(kappa):
        out = out * w + k
    return out


# ---------------------------------------------------------------------------
# sampled transforms on grids


@dataclass
class SpectralFunction:
    """Cauchy transform samples on a grid, with optional density and cdf."""

    grid: np.ndarray
    G: np.ndarray
    density: np.ndarray | None = None
    cdf: np.ndarray | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.complex128)
        self.G = np.asarray(self.G, dtype=np.complex128)
        if self.grid.shape != self.G.shape:
            raise GridError("grid and values must have the same shape")
        if np.any(self.grid.imag < -1e-15):
            raise GridError("grid points must lie in the closed upper half-plane")


def stieltjes_invert(sf: SpectralFunction) -> np.ndarray:
    """Density on the grid line: -Im G / pi, clipped at zero.

    The grid must be a horizontal line x + i eta with fixed eta > 0 and
    ascending x.
    """
    eta = sf.grid.imag
    if eta.size == 0 or eta.min() <= 0:
        raise GridError("stieltjes inversion needs a grid at positive height")
    if (eta.max() - eta.min()) > 1e-12 * max(eta.max(), 1.0):
        raise GridError("grid height is not uniform")
    x = sf.grid.real
    if np.any(np.diff(x) <= 0):
        raise GridError("grid abscissae must be strictly ascending")
    return np.clip(-sf.G.imag / np.pi, 0.0, None)


def cdf_from_density(x, density) -> tuple[np.ndarray, float]:
    """Trapezoid cumulative integral, rescaled to end at min(total, 1).

    Returns (cdf, raw_total); the raw total is reported so callers can judge
    how much mass the window captured.
    """
    x = np.asarray(x, dtype=float)
    density = np.asarray(density, dtype=float)
    if x.shape != density.shape:
        raise GridError("grid and density must have the same shape")
    steps = np.diff(x)
    if np.any(steps <= 0):
        raise GridError("grid must be strictly ascending")
    inc = 0.5 * (density[1:] + density[:-1]) * steps
    cdf = np.concatenate([[0.0], np.cumsum(inc)])
    raw = float(cdf[-1])
    if raw > 1.0:
        cdf = cdf / raw
    return cdf, raw


# ---------------------------------------------------------------------------
# CSV serialization: columns z_re, z_im, G_re, G_im, density, cdf


def write_spectral_csv(path: str | os.PathLike, sf: SpectralFunction,
                       manifest_line: str | None = None) -> None:
    with open(path, "w", encoding="ascii") as f:
        if manifest_line is not None:
            f.write(f"# manifest: {manifest_line}\n")
        f.write("z_re,z_im,G_re,G_im,density,cdf\n")
        n = len(sf.grid)
        dens = sf.density if sf.density is not None else [None] * n
        cdf = sf.cdf if sf.cdf is not None else [None] * n
        for z, g, d, c in zip(sf.grid, sf.G, dens, cdf):
            cells = [f"{z.real:.17g}", f"{z.imag:.17g}", f"{g.real:.17g}", f"{g.imag:.17g}",
                     "" if d is None else f"{d:.17g}",
                     "" if c is None else f"{c:.17g}"]
            f.write(",".join(cells) + "\n")


def read_spectral_csv(path: str | os.PathLike) -> SpectralFunction:
    zs: list[complex] = []
    gs: list[complex] = []
    dens: list[float] = []
    cdf: list[float] = []
    have_dens = have_cdf = False
    with open(path, "r", encoding="ascii") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("z_re"):
                continue
            cells = line.split(",")
            if len(cells) != 6:
                raise InputError(f"{path}: expected 6 columns, got {len(cells)}")
            zs.append(complex(float(cells[0]), float(cells[1])))
            gs.append(complex(float(cells[2]), float(cells[3])))
            if cells[4] != "":
                dens.append(float(cells[4]))
                have_dens = True
            if cells[5] != "":
                cdf.append(float(cells[5]))
                have_cdf = True
    if not zs:
        raise InputError(f"{path}: no data rows")
    return SpectralFunction(
        np.array(zs), np.array(gs),
        np.array(dens) if have_dens and len(dens) == len(zs) else None,
        np.array(cdf) if have_cdf and len(cdf) == len(zs) else None,
    )
