"""Dense complex matrix backbone.

A matrix here is simply a 2-d complex128 numpy array; the helpers add the
shape/conditioning checks the rest of the package relies on.  Arrays are
treated as immutable once built and none of these routines mutates its
inputs, so values can be shared freely across threads.

File format: CSV with one matrix row per line, each cell a complex literal
``<re>`` or ``<re>+<im>i`` / ``<re>-<im>i`` (decimal or scientific), with an
optional first line ``# rows cols``.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import BoundsError, DimensionError, InputError, SingularMatrixError

CMatrix = np.ndarray

HERMITIAN_RTOL = 1e-12
PIVOT_RTOL = 1e-14


def as_cmatrix(data, rows: int | None = None, cols: int | None = None) -> CMatrix:
    """Coerce to a 2-d complex128 array, optionally checking the shape."""
    a = np.asarray(data, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got ndim={a.ndim}")
    if rows is not None and a.shape[0] != rows:
        raise DimensionError(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise DimensionError(f"expected {cols} cols, got {a.shape[1]}")
    return a


def trace(a) -> complex:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def symmetrize(a) -> CMatrix:
    """Hermitian part (a + a*)/2, used to absorb roundoff before eigensolves."""
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"symmetrize needs a square matrix, got {a.shape}")
    return (a + a.conj().T) / 2.0


def is_hermitian(a, rtol: float = HERMITIAN_RTOL) -> bool:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    scale = float(np.abs(a).max()) if a.size else 0.0
    if scale == 0.0:
        return True
    return float(np.abs(a - a.conj().T).max()) <= rtol * scale


def solve_linear(a, b, *, pivot_rtol: float = PIVOT_RTOL) -> CMatrix:
    """Solve A X = B by LU with a relative pivot threshold.

    Raises SingularMatrixError when the smallest pivot falls below
    pivot_rtol times max|A|.
    """
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"solve_linear needs a square A, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise DimensionError(f"B has {b.shape[0]} rows, expected {a.shape[0]}")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # pivot check below handles singularity
        lu, piv = lu_factor(a, check_finite=False)
    scale = float(np.abs(a).max())
    if scale == 0.0:
        raise SingularMatrixError("A is the zero matrix")
    pivots = np.abs(np.diagonal(lu))
    if float(pivots.min(initial=np.inf)) <= pivot_rtol * scale:
        raise SingularMatrixError(
            f"numerically singular system (min pivot {pivots.min():.3e}, scale {scale:.3e})"
        )
    return lu_solve((lu, piv), b, check_finite=False)


def hermitian_eig(a) -> tuple[np.ndarray, CMatrix]:
    """Eigendecomposition of (a + a*)/2: ascending real eigenvalues, unitary V."""
    h = symmetrize(a)
    w, v = np.linalg.eigh(h)
    return w, v


def block_view(a, rows, cols) -> CMatrix:
    """Copy of the submatrix A[rows, cols]; ranges are (start, stop) pairs."""
    a = as_cmatrix(a)
    r0, r1 = _as_range(rows, a.shape[0], "row")
    c0, c1 = _as_range(cols, a.shape[1], "col")
    return a[r0:r1, c0:c1].copy()


def _as_range(rng, limit: int, what: str) -> tuple[int, int]:
    if isinstance(rng, slice):
        start = 0 if rng.start is None else rng.start
        stop = limit if rng.stop is None else rng.stop
    else:
        start, stop = rng
    if not (0 <= start <= stop <= limit):
        raise BoundsError(f"{what} range ({start}, {stop}) out of bounds for size {limit}")
    return int(start), int(stop)


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return f"{z.real:.17g}"
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_complex(token: str) -> complex:
    s = token.strip()
    if not s:
        raise InputError("empty matrix cell")
    if not s.endswith(("i", "I")):
        try:
            return complex(float(s), 0.0)
        except ValueError as exc:
            raise InputError(f"bad complex literal {token!r}") from exc
    body = s[:-1]
    split = -1
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-" and body[idx - 1] not in "eE":
            split = idx
            break
    try:
        if split < 0:
            return complex(0.0, float(body if body not in ("", "+", "-") else body + "1"))
        re_part = body[:split]
        im_part = body[split:]
        if im_part in ("+", "-"):
            im_part += "1"
        return complex(float(re_part), float(im_part))
    except ValueError as exc:
        raise InputError(f"bad complex literal {token!r}") from exc


def write_matrix_csv(path: str | os.PathLike, a) -> None:
    a = as_cmatrix(a)
    with open(path, "w", encoding="ascii") as f:
        f.write(f"# {a.shape[0]} {a.shape[1]}\n")
        for row in a:
            f.write(",".join(format_complex(z) for z in row) + "\n")


def read_matrix_csv(path: str | os.PathLike) -> CMatrix:
    declared: tuple[int, int] | None = None
    rows: list[list[complex]] = []
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if declared is None and len(parts) == 2:
                    try:
                        declared = (int(parts[0]), int(parts[1]))
                    except ValueError:
                        pass
                continue
            try:
                rows.append([parse_complex(tok) for tok in line.split(",")])
            except InputError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: no matrix rows found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError(f"{path}: ragged rows")
    a = np.array(rows, dtype=np.complex128)
    if declared is not None and a.shape != declared:
        raise InputError(f"{path}: header declares {declared}, data is {a.shape}")
    return a
