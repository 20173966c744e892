"""Block-structured matrix spaces with a projection-valued expectation.

A space is a list of block sizes N_0..N_k summing to M; block i corresponds
to an orthogonal projection of normalized trace w_i = N_i / M.  A simple
element lives in one (row block, column block) cell and is stored as just
that cell; the ambient M x M realization is materialized only on demand.
Products across incompatible blocks are the zero element of the algebra,
returned as a flagged value rather than raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlockError, DimensionError
from .matcore import CMatrix, as_cmatrix


@dataclass(frozen=True)
class RectSpace:
    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise DimensionError("block sizes must be positive")

    @property
    def k(self) -> int:
        """Number of blocks, indexed 0..k-1."""
        return len(self.sizes)

    @property
    def M(self) -> int:
        return sum(self.sizes)

    @property
    def weights(self) -> tuple[float, ...]:
        m = self.M
        return tuple(s / m for s in self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for s in self.sizes[:-1]:
            out.append(out[-1] + s)
        return tuple(out)


def rect_space(sizes) -> RectSpace:
    return RectSpace(tuple(int(s) for s in sizes))


@dataclass(frozen=True)
class SimpleElement:
    space: RectSpace
    row_block: int
    col_block: int
    data: CMatrix
    is_zero: bool = False


def embed(space: RectSpace, i: int, j: int, a) -> SimpleElement:
    """Place the matrix a in block (i, j); everything else is zero."""
    _check_block(space, i)
    _check_block(space, j)
    a = as_cmatrix(a, rows=space.sizes[i], cols=space.sizes[j])
    return SimpleElement(space, i, j, a)


def zero_element(space: RectSpace, i: int, j: int) -> SimpleElement:
    _check_block(space, i)
    _check_block(space, j)
    data = np.zeros((space.sizes[i], space.sizes[j]), dtype=np.complex128)
    return SimpleElement(space, i, j, data, is_zero=True)


def _check_block(space: RectSpace, i: int) -> None:
    if not (0 <= i < space.k):
        raise BlockError(f"block index {i} outside 0..{space.k - 1}")


def ambient(e: SimpleElement) -> CMatrix:
    """M x M realization of a simple element."""
    out = np.zeros((e.space.M, e.space.M), dtype=np.complex128)
    r0 = e.space.offsets[e.row_block]
    c0 = e.space.offsets[e.col_block]
    out[r0:r0 + e.space.sizes[e.row_block], c0:c0 + e.space.sizes[e.col_block]] = e.data
    return out


def adjoint(e: SimpleElement) -> SimpleElement:
    return SimpleElement(e.space, e.col_block, e.row_block, e.data.conj().T, e.is_zero)


def multiply(a: SimpleElement, b: SimpleElement) -> SimpleElement:
    """Block product; incompatible blocks give the (flagged) zero element."""
    if a.space != b.space:
        raise BlockError("elements live in different spaces")
    if a.col_block != b.row_block or a.is_zero or b.is_zero:
        return zero_element(a.space, a.row_block, b.col_block)
    return SimpleElement(a.space, a.row_block, b.col_block, a.data @ b.data)


def cond_exp(space: RectSpace, a) -> CMatrix:
    """Projection-valued conditional expectation of an M x M matrix.

    Block i of the result is (trace of the (i, i) cell / N_i) times the
    identity; off-diagonal cells vanish.  Idempotent and trace preserving.
    """
    a = as_cmatrix(a, rows=space.M, cols=space.M)
    out = np.zeros_like(a)
    for i, (off, size) in enumerate(zip(space.offsets, space.sizes)):
        cell = a[off:off + size, off:off + size]
        mean = np.trace(cell) / size
        out[off:off + size, off:off + size] = mean * np.eye(size)
    return out


def compressed_trace(space: RectSpace, i: int, e: SimpleElement) -> complex:
    """Trace in the compressed block algebra: Tr(data) / N_i."""
    _check_block(space, i)
    if e.space != space:
        raise BlockError("element lives in a different space")
    if e.row_block != e.col_block:
        raise BlockError("compressed trace needs a diagonal-block element")
    if e.row_block != i:
        raise BlockError(f"element sits in block {e.row_block}, not {i}")
    return complex(np.trace(e.data)) / space.sizes[i]
