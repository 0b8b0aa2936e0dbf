"""Truncated Helson and Hankel matrices and streaming matrix-vector products."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from helson.errors import ContractError
from helson.index import UINT64_MAX, IndexOverflowError
from helson.moments import MomentSequence, OneVariable

#: beyond this size only :class:`HelsonOperator` products are offered
DENSE_LIMIT = 8192


@dataclass
class TruncatedMatrix:
    """The block ``A[n, m] = alpha(n m)`` for ``offset <= n, m <= N``.

    Row ``i`` of ``A`` corresponds to ``n = offset + i``.
    """

    seq: MomentSequence
    N: int
    offset: int
    A: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.N + 1)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    def to_csv(self) -> str:
        return matrix_csv(self.A)


@dataclass
class HankelTruncation:
    """Hankel matrix ``beta(kappa + kappa')`` on the cube ``0 <= kappa_j < K``.

    ``indices[i]`` is the multi-index of row ``i``; ordering is lexicographic
    with the last coordinate fastest, so a product sequence gives the
    Kronecker product of its one-variable truncations.
    """

    d: int
    K: int
    A: np.ndarray
    indices: np.ndarray

    def to_csv(self) -> str:
        return matrix_csv(self.A)


def _check_range(N: int, offset: int):
    if N < 1:
        raise ContractError("N must be >= 1")
    if offset not in (1, 2):
        raise ContractError("offset must be 1 or 2")
    if offset > N:
        raise ContractError("offset exceeds N, the truncation is empty")
    if N * N > UINT64_MAX:
        raise IndexOverflowError("products n*m leave the 64-bit range")


def _real_values(vals: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(vals):
        scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
        if np.max(np.abs(vals.imag), initial=0.0) > 1e-13 * scale:
            raise ContractError("Helson matrices here are real; the sequence has complex values")
        vals = vals.real.copy()
    return vals


def _needs_offset(seq: MomentSequence, offset: int):
    if offset == 1 and not seq.defined_at_one:
        raise ContractError("sequence is undefined at n = 1; use offset 2")


def build_helson(seq: MomentSequence, N: int, offset: int = 1) -> TruncatedMatrix:
    """Dense truncation of ``M(alpha)``; ``alpha`` is evaluated once per product value."""
    _check_range(N, offset)
    _needs_offset(seq, offset)
    if N - offset + 1 > DENSE_LIMIT:
        raise ContractError(f"dense storage stops at {DENSE_LIMIT}; use HelsonOperator")
    n = np.arange(offset, N + 1, dtype=np.uint64)
    # upper triangle only, then mirror: halves the distinct-product search
    iu = np.triu_indices(n.size)
    prods = n[iu[0]] * n[iu[1]]
    uniq, inv = np.unique(prods, return_inverse=True)
    vals = _real_values(seq.alpha_many(uniq))
    A = np.empty((n.size, n.size))
    A[iu] = vals[inv]
    A.T[iu] = vals[inv]
    return TruncatedMatrix(seq, N, offset, A)


class HelsonOperator:
    """Matrix-free ``x -> M x`` for the truncation ``offset..N``.

    Rows are generated in blocks on every call, so memory stays at
    ``block * N`` floats. For a fixed vector the result is deterministic and
    matches ``build_helson(...).A @ x`` row by row.
    """

    def __init__(self, seq: MomentSequence, N: int, offset: int = 1, block: int = 256):
        _check_range(N, offset)
        _needs_offset(seq, offset)
        self.seq, self.N, self.offset, self.block = seq, N, offset, block
        self._m = np.arange(offset, N + 1, dtype=np.uint64)

    @property
    def size(self) -> int:
        return self._m.size

    def rows(self, lo: int, hi: int) -> np.ndarray:
        """Rows ``lo..hi-1`` (0-based) of the truncation."""
        n = self._m[lo:hi]
        return _real_values(self.seq.alpha_many((n[:, None] * self._m[None, :]).ravel())).reshape(
            n.size, self._m.size
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise ContractError(f"vector must have length {self.size}")
        y = np.empty(self.size)
        for lo in range(0, self.size, self.block):
            hi = min(lo + self.block, self.size)
            R = self.rows(lo, hi)
            for i in range(hi - lo):
                y[lo + i] = R[i] @ x
        return y


def matvec(seq: MomentSequence, x: Sequence[float], offset: int = 1) -> np.ndarray:
    """``y_n = sum_m alpha(n m) x_m`` with ``x`` indexed ``offset..offset+len(x)-1``."""
    x = np.asarray(x, dtype=float)
    return HelsonOperator(seq, offset + x.size - 1, offset)(x)


def dense_rowwise_matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Reference product with the same per-row summation as :class:`HelsonOperator`."""
    return np.array([row @ x for row in A])


def _eval_1d(beta: Callable, ks: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(beta(ks), dtype=float)
        if vals.shape == ks.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(beta(int(k))) for k in ks])


def build_hankel_1d(beta: Callable | str, N: int) -> HankelTruncation:
    """``H[j, k] = beta(j + k)`` for ``0 <= j, k < N``."""
    if N < 1:
        raise ContractError("N must be >= 1")
    if isinstance(beta, str):
        beta = OneVariable(beta)
    vals = _eval_1d(beta, np.arange(2 * N - 1))
    j = np.arange(N)
    return HankelTruncation(1, N, vals[j[:, None] + j[None, :]], j[:, None].copy())


def cube_indices(d: int, K: int) -> np.ndarray:
    """All ``kappa`` in ``{0..K-1}**d`` in lexicographic order (last fastest)."""
    grids = np.meshgrid(*[np.arange(K)] * d, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def build_hankel_multi(beta, d: int, K: int) -> HankelTruncation:
    """Hankel truncation on the cube ``kappa_j < K`` in ``d`` variables.

    ``beta`` is either a sequence of ``d`` one-variable sequences (the product
    sequence ``prod_j beta_j(kappa_j)``) or a callable taking an integer array
    of shape ``(M, d)`` and returning ``M`` values.
    """
    if d < 1 or K < 1:
        raise ContractError("d and K must be >= 1")
    if K**d > DENSE_LIMIT:
        raise ContractError(f"cube has {K**d} points, more than {DENSE_LIMIT}")
    idx = cube_indices(d, K)
    sums = idx[:, None, :] + idx[None, :, :]
    flat = sums.reshape(-1, d)
    if callable(beta) and not isinstance(beta, (list, tuple)):
        vals = np.asarray(beta(flat), dtype=float)
    else:
        if len(beta) != d:
            raise ContractError("need one sequence per variable")
        vals = np.ones(flat.shape[0])
        for j, b in enumerate(beta):
            b = OneVariable(b) if isinstance(b, str) else b
            vals = vals * _eval_1d(b, flat[:, j])
    return HankelTruncation(d, K, vals.reshape(idx.shape[0], idx.shape[0]), idx)


def tensor_norm(norms: Sequence[float]) -> float:
    """Norm of a tensor product of operators: the product of the norms."""
    out = 1.0
    for x in norms:
        if not x >= 0:
            raise ContractError("operator norms are non-negative")
        out *= x
    return out


def matrix_csv(A: np.ndarray) -> str:
    """Row-major CSV with 17 significant digits."""
    buf = io.StringIO()
    np.savetxt(buf, np.atleast_2d(A), fmt="%.16e", delimiter=",")
    return buf.getvalue()
