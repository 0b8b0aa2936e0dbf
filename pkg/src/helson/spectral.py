"""Symmetric eigensolvers and operator-norm estimates along truncation schedules."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from helson.errors import ContractError, NumericalError
from helson.matrix import HelsonOperator, build_hankel_1d, build_helson
from helson.moments import MomentSequence

EPS = np.finfo(float).eps
#: eigenvalues below this fraction of the largest magnitude are flagged as zero
ZERO_THRESHOLD = 1e-12


@dataclass
class SpectralResult:
    """Ascending eigenvalues with a residual bound for each.

    ``residuals[i]`` bounds ``||A v_i - lambda_i v_i||`` for unit ``v_i``; when
    no vectors were computed it is the a-priori backward error bound of the
    solver.
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    vectors: np.ndarray | None = None
    method: str = ""
    converged: bool = True
    iterations: int = 0

    @property
    def numerically_zero(self) -> np.ndarray:
        scale = np.max(np.abs(self.eigenvalues), initial=0.0)
        return np.abs(self.eigenvalues) < ZERO_THRESHOLD * scale

    @property
    def lam_max(self) -> float:
        return float(self.eigenvalues[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("eigenvalue,residual\n")
        for lam, r in zip(self.eigenvalues, self.residuals):
            buf.write(f"{lam:.16e},{r:.16e}\n")
        return buf.getvalue()


def _check_symmetric(A: np.ndarray):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractError("matrix must be square")
    scale = np.max(np.abs(A), initial=0.0)
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * scale:
        raise ContractError("matrix is not symmetric")


def eig_dense(A: np.ndarray, vectors: bool = True, method: str = "lapack") -> SpectralResult:
    """All eigenvalues of a symmetric matrix.

    ``method="lapack"`` calls LAPACK's ``?syev`` (Householder tridiagonal
    reduction followed by implicit QL/QR); ``"householder-ql"`` runs
    :func:`tridiagonalize` and :func:`tridiagonal_ql` from this module, which
    is slow and meant for cross-checks on small matrices.
    """
    A = np.asarray(A, dtype=float)
    _check_symmetric(A)
    n = A.shape[0]
    if n == 0:
        return SpectralResult(np.zeros(0), np.zeros(0), np.zeros((0, 0)) if vectors else None, method)
    if method == "lapack":
        if vectors:
            w, V = scipy.linalg.eigh(A, driver="ev")
        else:
            w = scipy.linalg.eigh(A, eigvals_only=True, driver="ev")
            V = None
    elif method == "householder-ql":
        d, e, Q = tridiagonalize(A, vectors)
        w, Z = tridiagonal_ql(d, e, Q if vectors else None)
        order = np.argsort(w)
        w = w[order]
        V = Z[:, order] if vectors else None
    else:
        raise ContractError(f"unknown method {method!r}")
    if V is not None:
        res = np.linalg.norm(A @ V - V * w, axis=0)
    else:
        # backward stability of the reduction: |dA| <= c n eps ||A||
        res = np.full(n, n * EPS * np.linalg.norm(A, 2 if n <= 512 else "fro"))
    return SpectralResult(w, res, V, method)


def tridiagonalize(A: np.ndarray, vectors: bool = True):
    """Householder reduction ``A = Q T Q^T``; returns ``(diag, offdiag, Q)``.

    ``offdiag[i]`` couples rows ``i`` and ``i+1``.
    """
    T = np.array(A, dtype=float)
    n = T.shape[0]
    Q = np.eye(n) if vectors else None
    for k in range(n - 2):
        x = T[k + 1 :, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        v /= np.linalg.norm(v)
        # T <- H T H with H = I - 2 v v^T acting on rows/cols k+1..
        sub = T[k + 1 :, k:]
        sub -= 2.0 * np.outer(v, v @ sub)
        sub = T[k:, k + 1 :]
        sub -= 2.0 * np.outer(sub @ v, v)
        if vectors:
            Qs = Q[:, k + 1 :]
            Qs -= 2.0 * np.outer(Qs @ v, v)
    d = np.diag(T).copy()
    e = np.diag(T, 1).copy()
    return d, e, Q


def tridiagonal_ql(d: np.ndarray, e: np.ndarray, Z: np.ndarray | None = None, max_sweeps: int = 30):
    """Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.

    Returns unsorted eigenvalues and, when ``Z`` is given, ``Z`` times the
    accumulated rotations. Raises :class:`NumericalError` when an eigenvalue
    needs more than ``max_sweeps`` iterations.
    """
    d = np.array(d, dtype=float)
    n = d.size
    e = np.append(np.array(e, dtype=float), 0.0)
    Z = None if Z is None else np.array(Z, dtype=float)
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_sweeps:
                raise NumericalError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Z is not None:
                    zi1 = Z[:, i + 1].copy()
                    Z[:, i + 1] = s * Z[:, i] + c * zi1
                    Z[:, i] = c * Z[:, i] - s * zi1
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
                continue
            # early exit from the rotation loop (r == 0): retry this l
            continue
    return d, Z


def lanczos_extreme(
    matvec: Callable[[np.ndarray], np.ndarray],
    N: int,
    k: int = 1,
    max_iter: int | None = None,
    tol: float = 1e-10,
    seed: int = 0,
) -> SpectralResult:
    """Largest ``k`` eigenvalues of a symmetric operator given by ``matvec``.

    Lanczos with full reorthogonalization (two Gram-Schmidt passes). Stops
    when every wanted Ritz pair has ``|beta_m s_m| <= tol * |theta_max|``;
    residuals in the result are recomputed explicitly. ``converged`` is False
    if ``max_iter`` ran out; the best available pairs are still returned.
    """
    if not 1 <= k <= N:
        raise ContractError("need 1 <= k <= N")
    max_iter = min(N, max_iter or max(300, 20 * k))
    rng = np.random.default_rng(seed)
    V = np.zeros((N, max_iter + 1))
    alphas: list[float] = []
    betas: list[float] = []
    v = rng.standard_normal(N)
    V[:, 0] = v / np.linalg.norm(v)
    norm_est = 0.0
    theta = S = None
    converged = False
    m = 0
    for m in range(1, max_iter + 1):
        q = V[:, m - 1]
        # copies guard against operators that return or keep their argument
        w = np.array(matvec(q.copy()), dtype=float)
        a = float(q @ w)
        alphas.append(a)
        basis = V[:, :m]
        for _ in range(2):
            w -= basis @ (basis.T @ w)
        b = float(np.linalg.norm(w))
        norm_est = max(norm_est, abs(a) + b + (betas[-1] if betas else 0.0))
        theta, S = scipy.linalg.eigh_tridiagonal(np.array(alphas), np.array(betas))
        if m >= k:
            bounds = b * np.abs(S[-1, -k:])
            if np.all(bounds <= tol * max(abs(theta[-1]), EPS)):
                converged = True
                break
        if m == N:
            converged = True
            break
        if b <= 1e-14 * max(norm_est, EPS):
            # invariant subspace: continue from a fresh orthogonal direction
            w = rng.standard_normal(N)
            for _ in range(2):
                w -= basis @ (basis.T @ w)
            b_new = float(np.linalg.norm(w))
            betas.append(0.0)
            V[:, m] = w / b_new
            continue
        betas.append(b)
        V[:, m] = w / b
    kk = min(k, theta.size)
    vals = theta[-kk:]
    Y = V[:, :m] @ S[:, -kk:]
    Y /= np.linalg.norm(Y, axis=0)
    res = np.array([np.linalg.norm(matvec(Y[:, i].copy()) - vals[i] * Y[:, i]) for i in range(kk)])
    return SpectralResult(vals, res, Y, "lanczos", converged, m)


@dataclass
class NormSchedule:
    """``lambda_max`` along increasing truncations, plus an extrapolated limit."""

    sizes: list[int]
    lam_max: list[float]
    residuals: list[float]
    methods: list[str]
    limit: float | None = None
    slope: float | None = None
    spectra: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        return {
            "sizes": self.sizes,
            "lam_max": self.lam_max,
            "residuals": self.residuals,
            "methods": self.methods,
            "extrapolated_limit": self.limit,
            "fit_slope": self.slope,
        }


def extrapolate_log2(sizes: Sequence[int], values: Sequence[float]) -> tuple[float, float]:
    """Fit ``lambda(N) = lam_inf - a / log(N)**2`` to the last three points."""
    x = np.asarray(sizes[-3:], dtype=float)
    y = np.asarray(values[-3:], dtype=float)
    if x.size < 2:
        raise ContractError("extrapolation needs at least two sizes")
    X = np.stack([np.ones_like(x), -1.0 / np.log(x) ** 2], axis=1)
    (lam_inf, a), *_ = np.linalg.lstsq(X, y, rcond=None)
    return float(lam_inf), float(a)


def norm_schedule(
    seq: MomentSequence | Callable | str,
    sizes: Sequence[int],
    offset: int | None = None,
    dense_limit: int = 2048,
    extrapolate: bool = True,
    keep_spectra: bool = False,
) -> NormSchedule:
    """``lambda_max`` of truncations for each size in ``sizes``.

    A :class:`MomentSequence` gives Helson truncations ``offset..N`` (offset
    defaults to 2 for sequences undefined at 1); a one-variable callable or
    name gives Hankel truncations of dimension ``N``. Dense eigensolves are
    used up to ``dense_limit`` rows, Lanczos above.
    """
    sizes = [int(n) for n in sizes]
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ContractError("sizes must be strictly ascending")
    out = NormSchedule([], [], [], [])
    helson = isinstance(seq, MomentSequence)
    if helson and offset is None:
        offset = 1 if seq.defined_at_one else 2
    for N in sizes:
        dim = N - offset + 1 if helson else N
        if dim <= dense_limit:
            A = build_helson(seq, N, offset).A if helson else build_hankel_1d(seq, N).A
            r = eig_dense(A, vectors=False)
            lam, res, how = r.lam_max, float(r.residuals[-1]), "dense"
            if keep_spectra:
                out.spectra[N] = r.eigenvalues
        else:
            if helson:
                op = HelsonOperator(seq, N, offset)
            else:
                A = build_hankel_1d(seq, N).A
                op = lambda x, A=A: A @ x  # noqa: E731
            r = lanczos_extreme(op, dim, k=1)
            if not r.converged:
                raise NumericalError(f"Lanczos did not converge at N={N} (residual {r.residuals[-1]:.3e})")
            lam, res, how = r.lam_max, float(r.residuals[-1]), "lanczos"
        out.sizes.append(N)
        out.lam_max.append(lam)
        out.residuals.append(res)
        out.methods.append(how)
    for i in range(1, len(out.sizes)):
        slack = out.residuals[i] + out.residuals[i - 1] + 1e-12 * abs(out.lam_max[i])
        if out.lam_max[i] < out.lam_max[i - 1] - slack:
            raise NumericalError("lambda_max decreased along the schedule; eigensolver failure")
    if extrapolate and len(out.sizes) >= 2:
        out.limit, out.slope = extrapolate_log2(out.sizes, out.lam_max)
    return out
