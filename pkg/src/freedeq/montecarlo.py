"""Simulation of the random rotation model for cross-checking the solver.

Haar unitaries are drawn by QR of a complex Ginibre matrix with the phases
of R's diagonal folded back into Q's columns, which makes the factorization
unique and the law exactly invariant.  Each trial gets its own counter-based
stream keyed by (seed, trial index), so results do not depend on execution
order or thread count; reductions always run in trial order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GridError, InputError
from .fdesolver import ModelSpec
from .transforms import SpectralFunction


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be >= 1")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent substream for one trial, reproducible across schedules."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def sample_haar(N: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary from U(N)."""
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * ph


def sample_haar_batch(N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of count Haar unitaries, shape (count, N, N)."""
    z = (rng.standard_normal((count, N, N))
         + 1j * rng.standard_normal((count, N, N))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[:, None, :]


def sample_phi(model: ModelSpec, rng: np.random.Generator,
               return_matrix: bool = False):
    """Draw the U_i and realize the model sum; ascending eigenvalues.

    The U_i are drawn in block order from the given stream.
    """
    phi = np.zeros((model.N, model.N), dtype=np.complex128)
    for h, t in zip(model.H, model.T):
        u = sample_haar(t.shape[0], rng)
        rotated = u @ t @ u.conj().T
        phi += h @ rotated @ h.conj().T
    phi = (phi + phi.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(phi)
    return (eigs, phi) if return_matrix else (eigs, None)


def _trial_eigs(model: ModelSpec, seed: int, trial: int) -> np.ndarray:
    return sample_phi(model, trial_rng(seed, trial))[0]


def _all_eigs(model: ModelSpec, cfg: McConfig, threads: int = 1) -> np.ndarray:
    """(trials, N) eigenvalue array, always assembled in trial order."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda t: _trial_eigs(model, cfg.seed, t),
                                 range(cfg.trials)))
    else:
        rows = [_trial_eigs(model, cfg.seed, t) for t in range(cfg.trials)]
    return np.stack(rows)


def empirical_cauchy(model: ModelSpec, cfg: McConfig, zs, threads: int = 1
                     ) -> tuple[SpectralFunction, np.ndarray, np.ndarray]:
    """Trial-averaged resolvent trace on a grid.

    Returns (spectral function, stderr of Re G, stderr of Im G); per-trial
    eigenvalues are computed once and reused across the grid.
    """
    zs = np.asarray(zs, dtype=np.complex128)
    if np.any(zs.imag <= 0):
        raise GridError("empirical resolvent needs Im z > 0")
    eigs = _all_eigs(model, cfg, threads=threads)
    per_trial = np.mean(1.0 / (zs[None, :, None] - eigs[:, None, :]), axis=2)
    g = np.mean(per_trial, axis=0)
    if cfg.trials > 1:
        se_re = np.std(per_trial.real, axis=0, ddof=1) / np.sqrt(cfg.trials)
        se_im = np.std(per_trial.imag, axis=0, ddof=1) / np.sqrt(cfg.trials)
    else:
        se_re = np.zeros(len(zs))
        se_im = np.zeros(len(zs))
    return SpectralFunction(zs, g), se_re, se_im


def empirical_cdf(model: ModelSpec, cfg: McConfig, xs, threads: int = 1) -> np.ndarray:
    """Pooled empirical distribution function across all trials, on a grid."""
    xs = np.asarray(xs, dtype=float)
    pooled = np.sort(_all_eigs(model, cfg, threads=threads).ravel())
    return np.searchsorted(pooled, xs, side="right") / pooled.size
