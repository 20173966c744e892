"""Deterministic-equivalent resolvent of sums of randomly rotated matrices.

For the model Phi = sum_i H_i U_i T_i U_i* H_i* (H_i deterministic N x N_i,
T_i hermitian N_i x N_i, U_i independent Haar unitaries) the equivalent
spectral problem is the scalar fixed-point system

    W(z)  = (z I_N - sum_i H_i H_i* R_i(f_i(z)))^{-1}
    f_j(z) = Tr[W(z) H_j H_j*] / N_j
    G(z)  = Tr[W(z)] / N

where R_i is the R transform of the eigenvalue measure mu_i of T_i in the
convention G = 1/(z - R(G)) (see transforms).

Internally the unknowns are the evaluation points y_i of the individual
transforms rather than the values f_i: with f_i = G_i(y_i) one has
R_i(f_i) = y_i - 1/G_i(y_i), computable without ever inverting G_i (the
stable form is rho_i = sum w t/(y-t) / sum w/(y-t)), and the update

    y_i <- rho_i + 1 / fhat_i,   fhat_i = Tr[W B_i] / N_i

is a damped fixed-point iteration whose solution carries y_i in the upper
half-plane.  Inverting G_i directly is unreliable deep in the bulk (the
equation G_i(x) = w has many solutions and the iteration can hop sheets),
which is why the solver tracks y instead; the public transforms still
expose Newton inversion and the converged y_i make its branch checkable.
Convergence is, and is reported as, the residual of the f equations.  Two
verified accelerations sit on top of the damped iteration, a geometric
residual-series jump and Newton steps on the y system; candidates count
toward the iteration budget and are kept only when they reduce the
residual.

When the matrices H_i H_i* commute (verified against a joint eigenbasis),
each iteration costs O(N k) instead of a dense inverse; the dense path is
kept for general H.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import matcore, transforms
from .errors import (
    CoverageError,
    DimensionError,
    FixedPointError,
    GridError,
    InputError,
)
from .matcore import CMatrix

_ZERO_RTOL = 1e-14


@dataclass(frozen=True)
class ModelSpec:
    """Dimensions and deterministic matrices of the rotation model."""

    N: int
    sizes: tuple[int, ...]
    H: tuple[CMatrix, ...]
    T: tuple[CMatrix, ...]

    @property
    def k(self) -> int:
        return len(self.sizes)


def model_spec(N: int, sizes, H, T) -> ModelSpec:
    sizes = tuple(int(s) for s in sizes)
    if len(H) != len(sizes) or len(T) != len(sizes):
        raise DimensionError("need one H and one T per block")
    Hs = []
    Ts = []
    for i, (h, t) in enumerate(zip(H, T)):
        h = matcore.as_cmatrix(h, rows=N, cols=sizes[i])
        t = matcore.as_cmatrix(t, rows=sizes[i], cols=sizes[i])
        if not matcore.is_hermitian(t, rtol=1e-10):
            raise InputError(f"T[{i}] is not hermitian")
        Hs.append(h)
        Ts.append(matcore.symmetrize(t))
    return ModelSpec(int(N), sizes, tuple(Hs), tuple(Ts))


def pad_rectangular_T(t, target: int) -> CMatrix:
    """Zero-pad a square matrix into the top-left of a target x target one.

    Models built from truncated unitaries reduce to the square case this
    way; the padded eigenvalue measure is the original one scaled by
    n/target plus a matching atom at zero.
    """
    t = matcore.as_cmatrix(t)
    n = t.shape[0]
    if t.shape[0] != t.shape[1]:
        raise DimensionError("pad_rectangular_T needs a square input")
    if n > target:
        raise DimensionError(f"cannot pad size {n} into size {target}")
    out = np.zeros((target, target), dtype=np.complex128)
    out[:n, :n] = t
    return out


@dataclass(frozen=True)
class FDESolution:
    z: complex
    f: tuple[complex, ...]
    G: complex
    W: CMatrix | None
    iterations: int
    residual: float
    y: tuple[complex, ...] = ()

    @property
    def herglotz_ok(self) -> bool:
        """Im G <= 0 and Im f_j <= 0, the correct half-plane at Im z > 0."""
        tol = 1e-12
        return self.G.imag <= tol and all(fj.imag <= tol for fj in self.f)


@dataclass
class GridResult:
    spectral: transforms.SpectralFunction
    solutions: list[FDESolution | None]
    failures: list[int]
    iterations: list[int]
    cdf_raw_total: float


# ---------------------------------------------------------------------------
# model preparation


@dataclass
class PreparedModel:
    model: ModelSpec
    B: list[CMatrix]
    trB: list[float]
    active: list[bool]
    measures: list[transforms.SpectralMeasure | None]
    means: list[float]
    joint_V: CMatrix | None
    joint_cols: np.ndarray | None  # (N, k) eigenvalues of each B_i in the joint basis
    support_bound: float


def prepare(model: ModelSpec) -> PreparedModel:
    B = [h @ h.conj().T for h in model.H]
    trB = [float(np.trace(b).real) for b in B]
    scaleB = max((float(np.abs(b).max()) for b in B), default=0.0)
    active = [float(np.abs(b).max()) > _ZERO_RTOL * max(scaleB, 1.0) for b in B]

    measures: list[transforms.SpectralMeasure | None] = []
    means: list[float] = []
    sup = 0.0
    for i, t in enumerate(model.T):
        if float(np.abs(t).max()) == 0.0:
            measures.append(None)
            means.append(0.0)
        else:
            mu = transforms.matrix_measure(t)
            measures.append(mu)
            means.append(mu.mean)
        if active[i]:
            bmax = float(np.linalg.eigvalsh(matcore.symmetrize(B[i])).max())
            tmax = float(np.abs(np.linalg.eigvalsh(t)).max()) if np.abs(t).max() else 0.0
            sup += bmax * tmax

    joint_V, joint_cols = _try_joint_diagonalize(B, active, model.N)
    return PreparedModel(model, B, trB, active, measures, means,
                         joint_V, joint_cols, sup)


def _try_joint_diagonalize(B, active, N):
    """Joint eigenbasis for a commuting family of hermitian matrices.

    Verifies the candidate basis; returns (None, None) when the family does
    not commute so callers fall back to dense solves.
    """
    act = [b for b, a in zip(B, active) if a]
    if not act:
        return np.eye(N, dtype=np.complex128), np.zeros((N, len(B)))
    scale = max(float(np.abs(b).max()) for b in act)
    for i in range(len(act)):
        for j in range(i + 1, len(act)):
            comm = act[i] @ act[j] - act[j] @ act[i]
            if float(np.abs(comm).max()) > 1e-10 * scale ** 2:
                return None, None
    mix = sum(b / math.sqrt(2.0 + i) for i, b in enumerate(act))
    _, V = np.linalg.eigh(matcore.symmetrize(mix))
    cols = np.zeros((N, len(B)))
    for i, b in enumerate(B):
        if not active[i]:
            continue
        rot = V.conj().T @ b @ V
        off = rot - np.diag(np.diagonal(rot))
        if float(np.abs(off).max()) > 1e-9 * max(float(np.abs(b).max()), 1.0):
            return None, None
        cols[:, i] = np.diagonal(rot).real
    return V, cols


# ---------------------------------------------------------------------------
# subordination-variable map


def _sub_terms(mu: transforms.SpectralMeasure, y: complex,
               want_deriv: bool) -> tuple[complex, complex, complex]:
    """(G(y), rho(y), rho'(y)) with rho = y - 1/G evaluated as P/G for
    P(y) = sum w t / (y - t); this form has no large-y cancellation."""
    diff = y - mu.atoms
    inv = mu.weights / diff
    g = complex(inv.sum())
    p = complex((inv * mu.atoms).sum())
    rho = p / g
    rho_d = 0.0 + 0.0j
    if want_deriv:
        inv2 = inv / diff
        gd = complex(-inv2.sum())
        pd = complex(-(inv2 * mu.atoms).sum())
        rho_d = (pd * g - p * gd) / g ** 2
    return g, rho, rho_d


class _YState:
    """Unknowns and map evaluation in the subordination parametrization."""

    def __init__(self, prep: PreparedModel):
        self.prep = prep
        # indices that carry an unknown y: active block with a nonzero T
        self.idx = [i for i in range(prep.model.k)
                    if prep.active[i] and prep.measures[i] is not None]

    def default_y(self, z: complex) -> np.ndarray:
        out = np.zeros(len(self.idx), dtype=np.complex128)
        for a, i in enumerate(self.idx):
            f0 = self.prep.trB[i] / (self.prep.model.sizes[i] * z)
            out[a] = 1.0 / f0 + self.prep.means[i]
        return out

    def evaluable(self, y: np.ndarray) -> bool:
        if np.any(y.imag <= 0):
            return False
        for a, i in enumerate(self.idx):
            mu = self.prep.measures[i]
            if float(np.abs(y[a] - mu.atoms).min()) < 1e-300:
                return False
        return True

    def apply(self, z: complex, y: np.ndarray, want_jac: bool):
        """Map y to (y_next, f, fhat, G, jac, residual) at one grid point."""
        prep = self.prep
        model = prep.model
        k = model.k
        rho = np.zeros(k, dtype=np.complex128)
        f = np.zeros(len(self.idx), dtype=np.complex128)
        rho_d = np.zeros(len(self.idx), dtype=np.complex128)
        for a, i in enumerate(self.idx):
            g, r, rd = _sub_terms(prep.measures[i], complex(y[a]), want_jac)
            f[a] = g
            rho[i] = r
            rho_d[a] = rd

        if prep.joint_cols is not None:
            denom = z - prep.joint_cols @ rho
            G = complex(np.mean(1.0 / denom))
            fhat_full = np.zeros(k, dtype=np.complex128)
            for j in range(k):
                if prep.active[j]:
                    fhat_full[j] = complex(
                        np.sum(prep.joint_cols[:, j] / denom)) / model.sizes[j]
            trace_pair = None
            if want_jac:
                inv2 = 1.0 / denom ** 2

                def trace_pair(i, j):
                    return complex(np.sum(prep.joint_cols[:, j]
                                          * prep.joint_cols[:, i] * inv2))
            w_mat = None
        else:
            a_mat = z * np.eye(model.N, dtype=np.complex128)
            for i in range(k):
                if prep.active[i]:
                    a_mat = a_mat - rho[i] * prep.B[i]
            w_mat = matcore.solve_linear(a_mat, np.eye(model.N, dtype=np.complex128))
            G = complex(np.trace(w_mat)) / model.N
            fhat_full = np.zeros(k, dtype=np.complex128)
            for j in range(k):
                if prep.active[j]:
                    fhat_full[j] = complex(np.sum(w_mat * prep.B[j].T)) / model.sizes[j]

            def trace_pair(i, j):
                wbw = w_mat @ prep.B[i] @ w_mat
                return complex(np.sum(wbw * prep.B[j].T))

        fhat = np.array([fhat_full[i] for i in self.idx])
        if np.any(fhat == 0):
            return None
        y_next = np.array([rho[i] for i in self.idx]) + 1.0 / fhat
        jac = None
        if want_jac:
            m = len(self.idx)
            jac = np.zeros((m, m), dtype=np.complex128)
            for a, i in enumerate(self.idx):
                for b, j in enumerate(self.idx):
                    dfhat = trace_pair(j, i) / model.sizes[i] * rho_d[b]
                    jac[a, b] = (rho_d[a] if a == b else 0.0) - dfhat / fhat[a] ** 2
        residual = float(np.abs(fhat - f).max(initial=0.0))
        return y_next, f, fhat, fhat_full, G, jac, residual, w_mat


def _geometric_jump(y: np.ndarray, r: np.ndarray, r_prev: np.ndarray,
                    damping: float) -> np.ndarray | None:
    """Extrapolate the damped sequence assuming geometric residual decay."""
    tiny = 1e-300
    safe = np.abs(r_prev) > tiny
    rho = np.where(safe, r / np.where(safe, r_prev, 1.0), 0.0)
    if float(np.abs(rho).max(initial=0.0)) >= 0.999:
        return None
    denom = 1.0 - rho
    if float(np.abs(denom).min(initial=1.0)) < 1e-6:
        return None
    return y + damping * r / denom


def solve_point(model: ModelSpec | PreparedModel, z: complex, *,
                tol: float = 1e-10, max_iter: int = 2000, damping: float = 0.5,
                f0=None, y0=None, accelerate: bool = True, accel_every: int = 8,
                ladder: bool = True, want_w: bool = True) -> FDESolution:
    """Solve the fixed-point system at one point Im z > 0.

    f0 or y0 warm-start the iteration (y0 wins; f0 is mapped through the
    large-argument branch y ~ 1/f + mean).  Cold starts near the axis are
    continued down from a safe height first (ladder).  Raises
    FixedPointError with the last residual when the evaluation budget is
    exhausted; the reported residual is max_j |f_j - Phi_j(f)|.
    """
    prep = model if isinstance(model, PreparedModel) else prepare(model)
    z = complex(z)
    if z.imag <= 0:
        raise GridError("solve_point needs Im z > 0")
    ys = _YState(prep)
    budget = [0]

    y_start = None
    if y0 is not None:
        y_start = np.asarray(y0, dtype=np.complex128)
    elif f0 is not None:
        f0 = np.asarray(f0, dtype=np.complex128)
        y_start = np.array([1.0 / f0[i] + prep.means[i] if f0[i] != 0 else 1e6j
                            for i in ys.idx])
    elif ladder and ys.idx:
        safe = 2.0 * prep.support_bound + 2.0
        y_cur = None
        height = max(z.imag, safe)
        while height > z.imag * 3.0:
            y_cur, _ = _solve_at(prep, ys, complex(z.real, height), y_cur,
                                 max(tol, 1e-8), max_iter, damping, accelerate,
                                 accel_every, budget)
            height /= 3.0
        y_start = y_cur

    y_fin, data = _solve_at(prep, ys, z, y_start, tol, max_iter, damping,
                            accelerate, accel_every, budget)
    _, f, fhat, fhat_full, G, _, residual, w_mat = data
    if want_w and w_mat is None:
        rho = np.zeros(prep.model.k, dtype=np.complex128)
        for a, i in enumerate(ys.idx):
            _, rho[i], _ = _sub_terms(prep.measures[i], complex(y_fin[a]), False)
        a_mat = z * np.eye(prep.model.N, dtype=np.complex128)
        for i in range(prep.model.k):
            if prep.active[i]:
                a_mat = a_mat - rho[i] * prep.B[i]
        w_mat = matcore.solve_linear(a_mat, np.eye(prep.model.N, dtype=np.complex128))
    return FDESolution(z, tuple(complex(x) for x in fhat_full), G,
                       w_mat if want_w else None, budget[0], residual,
                       tuple(complex(x) for x in y_fin))


def _solve_at(prep, ys: _YState, z: complex, y0, tol, max_iter, damping,
              accelerate, accel_every, budget):
    """Driver loop at a single z; returns (y, last apply output)."""
    y = np.array(y0, dtype=np.complex128) if y0 is not None else ys.default_y(z)
    if not ys.evaluable(y):
        y = ys.default_y(z)
    if not ys.idx:
        out = ys.apply(z, y, False)
        budget[0] += 1
        return y, out

    r_prev = None
    newton_mode = False
    eye_m = np.eye(len(ys.idx), dtype=np.complex128)
    out = ys.apply(z, y, accelerate)
    budget[0] += 1
    it = 0
    while True:
        if out is None:
            raise FixedPointError(f"map not evaluable at z={z!r}")
        y_next, f, fhat, fhat_full, G, jac, residual, w_mat = out
        it += 1
        scale = max(1.0, float(np.abs(fhat).max(initial=0.0)))
        if residual / scale <= tol:
            return y, out
        if it >= max_iter:
            raise FixedPointError(
                f"no fixed point at z={z!r} after {it} iterations "
                f"(residual {residual:.3e})", residual=residual)
        r = y_next - y

        candidate = None
        if accelerate and jac is not None and (newton_mode or residual / scale <= 1e-2):
            try:
                step = np.linalg.solve(jac - eye_m, -r)
                candidate = ("newton", y + step)
            except np.linalg.LinAlgError:
                candidate = None
        if candidate is None and accelerate and r_prev is not None \
                and it % accel_every == 0:
            y_jump = _geometric_jump(y, r, r_prev, damping)
            if y_jump is not None:
                candidate = ("jump", y_jump)

        if candidate is not None and ys.evaluable(candidate[1]):
            kind, y_cand = candidate
            out_cand = ys.apply(z, y_cand, accelerate)
            budget[0] += 1
            if out_cand is not None and out_cand[6] < residual:
                y, out = y_cand, out_cand
                newton_mode = kind == "newton"
                r_prev = None
                continue
            newton_mode = False

        step = damping * r
        y_new = y + step
        halvings = 0
        while not ys.evaluable(y_new) and halvings < 60:
            step *= 0.5
            y_new = y + step
            halvings += 1
        if halvings == 60:
            raise FixedPointError(f"iterate left the upper half-plane at z={z!r}",
                                  residual=residual)
        y = y_new
        r_prev = r
        out = ys.apply(z, y, accelerate)
        budget[0] += 1


# ---------------------------------------------------------------------------
# grid sweeps


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    points: int
    eta: float

    def zs(self) -> np.ndarray:
        if self.points < 1 or self.eta <= 0 or self.x_max < self.x_min:
            raise GridError(f"bad grid {self}")
        return np.linspace(self.x_min, self.x_max, self.points) + 1j * self.eta


def solve_grid(model: ModelSpec | PreparedModel, grid, *,
               tol: float = 1e-10, max_iter: int = 2000, damping: float = 0.5,
               warm_start: bool = True, homotopy: bool = True,
               homotopy_factor: float = 10.0, threads: int = 1,
               want_solutions: bool = True) -> GridResult:
    """Solve along a horizontal grid, left to right.

    With homotopy, a sequential seeding sweep runs at homotopy_factor times
    the grid height and each point is then finished from its seed; finishing
    is independent per point, so it can run on a thread pool without
    changing results.  Failed points are recorded and reported as NaN
    rather than aborting the sweep.
    """
    prep = model if isinstance(model, PreparedModel) else prepare(model)
    zs = grid.zs() if isinstance(grid, GridSpec) else np.asarray(grid, dtype=np.complex128)
    npts = len(zs)
    opts = dict(tol=tol, max_iter=max_iter, damping=damping)

    seeds: list[np.ndarray | None] = [None] * npts
    iter_counts = [0] * npts
    if warm_start:
        y_prev: np.ndarray | None = None
        if homotopy:
            for idx, z in enumerate(zs):
                z_hi = complex(z.real, z.imag * homotopy_factor)
                try:
                    sol = solve_point(prep, z_hi, y0=y_prev, want_w=False,
                                      **{**opts, "tol": max(tol, 1e-8)})
                    y_prev = np.array(sol.y)
                    seeds[idx] = np.array(sol.y)
                    iter_counts[idx] += sol.iterations
                except FixedPointError:
                    seeds[idx] = None
                    y_prev = None
        else:
            solutions: list[FDESolution | None] = [None] * npts
            failures: list[int] = []
            for idx, z in enumerate(zs):
                try:
                    sol = solve_point(prep, complex(z), y0=y_prev, want_w=False, **opts)
                    y_prev = np.array(sol.y)
                    solutions[idx] = sol
                    iter_counts[idx] = sol.iterations
                except FixedPointError:
                    failures.append(idx)
                    y_prev = None
            return _grid_result(zs, solutions, failures, iter_counts, want_solutions)

    def finish(idx: int) -> FDESolution | None:
        z = complex(zs[idx])
        try:
            return solve_point(prep, z, y0=seeds[idx], want_w=False, **opts)
        except FixedPointError:
            return None

    solutions = [None] * npts
    failures = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(finish, range(npts)))
    else:
        results = [finish(idx) for idx in range(npts)]
    for idx, sol in enumerate(results):
        if sol is None:
            failures.append(idx)
        else:
            solutions[idx] = sol
            iter_counts[idx] += sol.iterations
    return _grid_result(zs, solutions, failures, iter_counts, want_solutions)


def _grid_result(zs, solutions, failures, iter_counts, want_solutions) -> GridResult:
    G = np.array([s.G if s is not None else complex(np.nan, np.nan) for s in solutions])
    sf = transforms.SpectralFunction(zs, G)
    raw = math.nan
    if not failures and len(zs) > 1 and np.ptp(zs.imag) <= 1e-12 * max(zs.imag.max(), 1.0) \
            and np.all(np.diff(zs.real) > 0):
        density = transforms.stieltjes_invert(sf)
        cdf, raw = transforms.cdf_from_density(zs.real, density)
        sf = transforms.SpectralFunction(zs, G, density, cdf)
    return GridResult(sf, solutions if want_solutions else [],
                      failures, iter_counts, raw)


# ---------------------------------------------------------------------------
# moments


def fde_moments(model: ModelSpec | PreparedModel, order: int, *,
                eta: float = 0.01, x_min: float | None = None,
                x_max: float | None = None, points: int | None = None,
                threads: int = 1, coverage: float = 0.98) -> list[float]:
    """Moments of the equivalent spectral measure by smoothed quadrature.

    Integrates x^k against the density at heights eta and eta/2 and removes
    the leading smoothing bias by Richardson extrapolation.  Raises
    CoverageError when the captured mass falls below the coverage threshold.
    """
    if order > 6:
        raise InputError("moments supported up to order 6")
    prep = model if isinstance(model, PreparedModel) else prepare(model)
    bound = prep.support_bound
    lo = x_min if x_min is not None else min(-bound, 0.0) - 1.0
    hi = x_max if x_max is not None else bound + 1.0
    if points is None:
        points = int(min(24001, max(1201, math.ceil((hi - lo) / (eta / 8.0)) + 1)))

    def window_moments(height: float) -> list[float]:
        res = solve_grid(prep, GridSpec(lo, hi, points, height), threads=threads,
                         want_solutions=False)
        if res.failures:
            raise FixedPointError(
                f"{len(res.failures)} grid points failed during moment quadrature")
        x = res.spectral.grid.real
        dens = np.clip(-res.spectral.G.imag / np.pi, 0.0, None)
        return [float(np.trapezoid(dens * x ** k, x)) for k in range(0, order + 1)]

    m_eta = window_moments(eta)
    m_half = window_moments(eta / 2.0)
    extrapolated = [2.0 * b - a for a, b in zip(m_eta, m_half)]
    if extrapolated[0] < coverage:
        raise CoverageError(
            f"window [{lo}, {hi}] captured mass {extrapolated[0]:.4f} < {coverage}")
    return extrapolated[1:]


# ---------------------------------------------------------------------------
# model files


def _build_h(entry: dict, N: int, size: int, base: str) -> CMatrix:
    kind = entry.get("kind", "file" if "file" in entry else None)
    if kind == "identity":
        out = np.zeros((N, size), dtype=np.complex128)
        d = min(N, size)
        out[:d, :d] = np.eye(d)
        return out
    if kind == "gaussian":
        seed = int(entry.get("seed", 0))
        scale = float(entry.get("scale", 1.0))
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed)))
        g = rng.standard_normal((N, size)) + 1j * rng.standard_normal((N, size))
        return scale / math.sqrt(2.0 * N) * g
    if kind == "file" or "file" in entry:
        return matcore.read_matrix_csv(os.path.join(base, entry["file"]))
    raise InputError(f"unknown H entry {entry!r}")


def _build_t(entry: dict, size: int, base: str) -> CMatrix:
    kind = entry.get("kind", "file" if "file" in entry else None)
    if kind == "identity":
        return np.eye(size, dtype=np.complex128)
    if kind == "diag":
        vals = entry.get("values")
        if vals is None or len(vals) != size:
            raise InputError(f"diag T needs exactly {size} values")
        return np.diag(np.asarray(vals, dtype=float)).astype(np.complex128)
    if kind == "projection":
        rank = int(entry.get("rank", -1))
        if not (0 <= rank <= size):
            raise InputError(f"projection rank must be in 0..{size}")
        return np.diag(np.array([1.0] * rank + [0.0] * (size - rank))).astype(np.complex128)
    if kind == "file" or "file" in entry:
        return matcore.read_matrix_csv(os.path.join(base, entry["file"]))
    raise InputError(f"unknown T entry {entry!r}")


def parse_model(doc: dict, base: str = ".") -> ModelSpec:
    try:
        k = int(doc["k"])
        N = int(doc["N"])
        sizes = [int(s) for s in doc["sizes"]]
        h_entries = doc["H"]
        t_entries = doc["T"]
    except KeyError as exc:
        raise InputError(f"model file missing field {exc}") from exc
    if len(sizes) != k or len(h_entries) != k or len(t_entries) != k:
        raise InputError("model file: sizes, H and T must each have k entries")
    H = []
    T = []
    for i in range(k):
        try:
            H.append(_build_h(h_entries[i], N, sizes[i], base))
            T.append(_build_t(t_entries[i], sizes[i], base))
        except FileNotFoundError as exc:
            raise InputError(f"model references missing file: {exc.filename}") from exc
    return model_spec(N, sizes, H, T)


def load_model(path: str | os.PathLike) -> ModelSpec:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError as exc:
        raise InputError(f"model file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return parse_model(doc, base=os.path.dirname(os.fspath(path)) or ".")
