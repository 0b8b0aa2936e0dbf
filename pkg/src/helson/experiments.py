"""Scripted studies: the multiplicative Hilbert matrix and the tensor-power counterexample.

Every study returns a plain dict that serializes to JSON with all computed
values, the grids used and the analytic targets.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from helson.errors import ContractError, NumericalError
from helson.matrix import DENSE_LIMIT, HelsonOperator, build_hankel_1d, build_hankel_multi, build_helson
from helson.moments import ClosedFormMoments
from helson.spectral import eig_dense, lanczos_extreme, norm_schedule

#: dimensions up to this get a full dense spectrum; above, only the extremes
FULL_SPECTRUM_LIMIT = 1024


def _extremes(matvec, dim: int) -> tuple[float, float, float]:
    top = lanczos_extreme(matvec, dim, k=1)
    bottom = lanczos_extreme(lambda x: -matvec(x), dim, k=1)
    if not (top.converged and bottom.converged):
        raise NumericalError(f"Lanczos did not converge at dimension {dim}")
    res = max(float(top.residuals[-1]), float(bottom.residuals[-1]))
    return -bottom.lam_max, top.lam_max, res


def mult_hilbert_study(sizes: Sequence[int], strict: bool = True) -> dict:
    """Spectra of ``1/(sqrt(nm) log(nm))`` on the indices ``2..size+1``.

    ``size`` is the matrix dimension. Small sizes get the full spectrum, larger
    ones the two extreme eigenvalues by Lanczos. The spectrum of the infinite
    matrix is ``[0, pi]``, so every truncation must lie in ``[-1e-10, pi)``
    with ``lambda_max`` non-decreasing in the size.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or sizes != sorted(sizes) or sizes[0] < 1:
        raise ContractError("sizes must be positive and ascending")
    seq = ClosedFormMoments("multiplicative-hilbert")
    rows = []
    for size in sizes:
        N = size + 1
        if size <= FULL_SPECTRUM_LIMIT:
            r = eig_dense(build_helson(seq, N, offset=2).A, vectors=False)
            lo, hi, res = float(r.eigenvalues[0]), r.lam_max, float(np.max(r.residuals))
            row = {"size": size, "method": "dense", "spectrum": r.eigenvalues.tolist()}
        else:
            if size <= DENSE_LIMIT:
                A = build_helson(seq, N, offset=2).A
                op = lambda x, A=A: A @ x  # noqa: E731
            else:
                op = HelsonOperator(seq, N, offset=2)
            lo, hi, res = _extremes(op, size)
            row = {"size": size, "method": "lanczos"}
        row.update(lam_min=lo, lam_max=hi, residual=res)
        rows.append(row)
    lam = [r["lam_max"] for r in rows]
    checks = {
        "lam_max_below_pi": all(x < math.pi for x in lam),
        "lam_min_nonnegative": all(r["lam_min"] >= -1e-10 for r in rows),
        "lam_max_monotone": all(b >= a - 1e-12 for a, b in zip(lam, lam[1:])),
    }
    if strict and not all(checks.values()):
        failed = [k for k, v in checks.items() if not v]
        raise NumericalError(f"multiplicative Hilbert checks failed: {failed}")
    return {"experiment": "mult-hilbert", "indices": "2..size+1", "target_spectrum": [0.0, math.pi],
            "rows": rows, "checks": checks}


def hankel_norm_study(name: str, sizes: Sequence[int]) -> dict:
    """``lambda_max`` of one-variable Hankel truncations against the known norm.

    ``hilbert`` (``1/(1+j)``) has norm ``pi``; ``ramp`` (``1/(2(k+2))``)
    has norm ``pi/2``. Truncations converge like ``1/log(N)**2``, so the
    study only checks strict growth, the bound, and that the fitted limit
    exceeds every computed value.
    """
    targets = {"hilbert": math.pi, "ramp": math.pi / 2}
    if name not in targets:
        raise ContractError(f"no known norm for {name!r}")
    sched = norm_schedule(name, sizes, dense_limit=512)
    lam = sched.lam_max
    checks = {
        "strictly_increasing": all(b > a for a, b in zip(lam, lam[1:])),
        "below_target": all(x < targets[name] for x in lam),
        "limit_above_all": sched.limit is not None and all(sched.limit > x for x in lam),
    }
    return {"experiment": f"hankel-{name}", "target_norm": targets[name], **sched.to_json(), "checks": checks}


# ---------------------------------------------------------------------------
# counterexample


def nu_kernel_integral(s: float) -> float:
    """``int_0^1 (1 - s t)**-2 t/2 dt`` for ``0 <= s < 1``.

    Closed form ``(log(1-s) + 1/(1-s) - 1) / (2 s**2)``; below ``s = 0.1`` the
    series ``sum_k (k+1) s**k / (2(k+2))`` avoids the cancellation.
    """
    if not 0 <= s < 1:
        raise ContractError("s must lie in [0, 1)")
    if s < 0.1:
        terms, k, term = [], 0, 1.0
        while True:
            t = (k + 1) * term / (2 * (k + 2))
            terms.append(t)
            if t < 1e-18:
                break
            k += 1
            term *= s
        return math.fsum(terms)
    return (math.log1p(-s) + 1 / (1 - s) - 1) / (2 * s * s)


def xnorm_factor(s: float) -> float:
    """``(1 - s**2) * nu_kernel_integral(s)``, at most 1 and tending to 1 as ``s -> 1``."""
    return (1 - s) * (1 + s) * nu_kernel_integral(s)


def default_s_grid(linear: int = 99, decades: int = 12, per_decade: int = 4) -> np.ndarray:
    """Uniform points in ``(0, 1)`` plus points ``1 - 10**-x`` crowding toward 1."""
    lin = np.linspace(0, 1, linear + 2)[1:-1]
    x = np.arange(2 * per_decade, decades * per_decade + 1) / per_decade
    return np.unique(np.concatenate([lin, 1 - 10.0 ** (-x)]))


def counterexample_xnorm(N: int, s_grid: Sequence[float] | None = None) -> dict:
    """Grid estimate of ``||mu_N||_X`` for ``mu_N = nu**N x delta_0 x ...``.

    The supremum factorizes over coordinates: a ``nu``-coordinate contributes
    ``xnorm_factor(s_j)``, a ``delta_0``-coordinate ``1 - s_j**2`` (maximal,
    equal to 1, at ``s_j = 0``). Over ``d`` coordinates the best value is the
    largest product; since every factor is at most 1 it is attained with a
    single ``nu``-coordinate.
    """
    if N < 1:
        raise ContractError("N must be >= 1")
    grid = default_s_grid() if s_grid is None else np.asarray(s_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(grid >= 1):
        raise ContractError("grid points must lie in (0, 1)")
    vals = np.array([xnorm_factor(float(s)) for s in grid])
    i = int(np.argmax(vals))
    best = float(vals[i])
    per_d = [best**d for d in range(1, N + 1)]
    return {"N": N, "sup": max(per_d), "argmax_s": float(grid[i]),
            "best_factor": best, "sup_by_d": per_d, "grid_size": int(grid.size)}


def counterexample_ratio(N: int, sizes: Sequence[int] = (256, 1024, 4096), s_grid=None) -> dict:
    """Lower-bound estimate of ``||M(alpha_N)|| / ||mu_N||_X`` and its exact target.

    ``lambda_hat`` is the largest computed ``lambda_max`` of the one-variable
    truncations of ``beta(k) = 1/(2(k+2))``; the tensor structure gives
    ``lambda_hat**N <= ||M(alpha_N)||``. The target is ``(pi/2)**N`` since the
    X-norm is 1.
    """
    if N < 1:
        raise ContractError("N must be >= 1")
    sched = norm_schedule("ramp", sizes, dense_limit=512)
    lam_hat = max(sched.lam_max)
    x = counterexample_xnorm(N, s_grid)
    return {"N": N, "lambda_hat": lam_hat, "estimate": lam_hat**N / x["sup"], "xnorm_grid": x["sup"],
            "target": (math.pi / 2) ** N, "schedule": sched.to_json()}


def tensor_identity_check(d: int = 2, K: int = 8) -> dict:
    """``lambda_max`` of the ``d``-fold cube truncation against the ``d``-th power of the 1-d one."""
    one = eig_dense(build_hankel_1d("ramp", K).A, vectors=False).lam_max
    multi = eig_dense(build_hankel_multi(["ramp"] * d, d, K).A, vectors=False).lam_max
    return {"d": d, "K": K, "lam_max_1d": one, "lam_max_multi": multi, "power": one**d,
            "abs_error": abs(multi - one**d)}


@dataclass
class CounterexampleConfig:
    """Parameters of the counterexample study."""

    N: int = 6
    sizes: tuple[int, ...] = (256, 1024, 4096)
    s_grid: list[float] | None = None
    tensor_d: int = 2
    tensor_K: int = 8

    def __post_init__(self):
        if self.N < 1:
            raise ContractError("N must be >= 1")

    def to_json(self) -> dict:
        out = asdict(self)
        out["sizes"] = list(self.sizes)
        return out


def counterexample_report(cfg: CounterexampleConfig | None = None) -> dict:
    cfg = cfg or CounterexampleConfig()
    sched = norm_schedule("ramp", cfg.sizes, dense_limit=512)
    lam_hat = max(sched.lam_max)
    x = counterexample_xnorm(cfg.N, cfg.s_grid)
    rows = []
    for n in range(1, cfg.N + 1):
        rows.append({"N": n, "estimate": lam_hat**n / x["sup"], "target": (math.pi / 2) ** n})
    targets = [r["target"] for r in rows]
    tensor = tensor_identity_check(cfg.tensor_d, cfg.tensor_K)
    checks = {
        "xnorm_at_most_one": x["sup"] <= 1 + 1e-12,
        "xnorm_refined_close_to_one": x["sup"] >= 0.999,
        "tensor_identity": tensor["abs_error"] <= 1e-10,
        "targets_increasing": all(b > a for a, b in zip(targets, targets[1:])),
    }
    return {"experiment": "counterexample", "config": cfg.to_json(), "xnorm": x, "lambda_hat": lam_hat,
            "hankel_schedule": sched.to_json(), "ratios": rows, "tensor": tensor, "checks": checks,
            "sample": {"s": 0.6, "factor": xnorm_factor(0.6)}}
