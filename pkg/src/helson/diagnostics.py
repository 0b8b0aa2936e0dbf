"""Boundedness tests: coefficient decay, window conditions and the Gram dual.

Every test computes a supremum over a finite set, which is a lower bound of
the true supremum. Verdicts follow one documented heuristic
(:func:`dyadic_verdict`): a finite computation never proves unboundedness,
so "unbounded" means sustained doubling growth was observed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from helson.errors import ContractError, UnsupportedInputError
from helson.matrix import cube_indices
from helson.moments import (
    ClosedFormMoments,
    DiscreteMeasure,
    HalfLineDensity,
    MomentSequence,
    OneVariable,
    kernel,
)
from helson.spectral import SpectralResult, eig_dense

BOUNDED, UNBOUNDED, INCONCLUSIVE = "bounded", "unbounded", "inconclusive"

#: running sup must grow by this factor over the second half of the levels
#: for the growth to count as still ongoing
GROWTH_FACTOR = 1.25
#: number of doublings needed for an "unbounded" verdict
MIN_DOUBLINGS = 3


@dataclass
class DiagnosticReport:
    """Outcome of one test.

    ``levels`` holds ``(level, running sup)`` along the test's schedule,
    ``witness`` the grid point or index where the supremum was attained.
    """

    test: str
    sup: float
    witness: object
    verdict: str
    levels: list[tuple[object, float]] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {
            "test": self.test,
            "sup": self.sup,
            "witness": _jsonable(self.witness),
            "verdict": self.verdict,
            "note": self.note,
        }


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (tuple, list, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def doubling_chain(running: Sequence[float]) -> list[int]:
    """Levels at which the running sup first exceeds twice the previous link."""
    chain: list[int] = []
    for i, r in enumerate(running):
        if r <= 0:
            continue
        if not chain or r >= 2.0 * running[chain[-1]]:
            chain.append(i)
    return chain


def dyadic_verdict(running: Sequence[float]) -> str:
    """Verdict from running suprema on a dyadic schedule.

    * unbounded: at least three doublings, and the sup still grows by
      :data:`GROWTH_FACTOR` over the second half of the schedule;
    * bounded: the sup grows by less than that factor over the second half;
    * inconclusive otherwise.
    """
    if len(running) == 0:
        return BOUNDED
    last, mid = running[-1], running[len(running) // 2 - (1 if len(running) > 1 else 0)]
    if not math.isfinite(last):
        return UNBOUNDED
    growing = last >= GROWTH_FACTOR * mid and last > 0
    if not growing:
        return BOUNDED
    if len(doubling_chain(running)) - 1 >= MIN_DOUBLINGS:
        return UNBOUNDED
    return INCONCLUSIVE


def _running_at(values: np.ndarray, positions: np.ndarray, checkpoints: Sequence) -> list[float]:
    # running sup of `values` over positions <= each checkpoint
    order = np.argsort(positions, kind="stable")
    pos = positions[order]
    run = np.maximum.accumulate(values[order])
    out = []
    for c in checkpoints:
        i = np.searchsorted(pos, c, side="right")
        out.append(float(run[i - 1]) if i else 0.0)
    return out


def _eval_1d(beta, ns) -> np.ndarray:
    try:
        vals = np.asarray(beta(np.asarray(ns)), dtype=float)
        if vals.shape == np.shape(ns):
            return vals
    except (TypeError, ValueError, OverflowError):
        pass
    return np.array([float(beta(int(n))) for n in ns])


def _sample_points(N: int, dense_max: int, start: int) -> np.ndarray:
    dense = np.arange(start, min(N, dense_max) + 1, dtype=object)
    dyadic = [2**k for k in range(1, N.bit_length()) if dense_max < 2**k <= N]
    if N > dense_max:
        dyadic.append(N)
    return np.concatenate([dense, np.asarray(sorted(set(dyadic)), dtype=object)])


def coeff_decay_1d(beta: Callable | str, N: int, dense_max: int = 1 << 20) -> DiagnosticReport:
    """``sup_{0 <= n <= N} (1+n)|beta(n)|`` (Widom-type decay test).

    Every ``n <= dense_max`` is evaluated, then powers of two up to ``N``.
    """
    if isinstance(beta, str):
        beta = OneVariable(beta)
    if N < 0:
        raise ContractError("N must be >= 0")
    ns = _sample_points(N, dense_max, 0)
    small = ns[ns <= dense_max].astype(np.int64)
    vals = [np.abs(_eval_1d(beta, small)) * (1.0 + small)]
    big = ns[ns > dense_max]
    if big.size:
        vals.append(np.array([abs(float(beta(int(n)))) * (1.0 + float(n)) for n in big]))
    v = np.concatenate(vals)
    pos = np.array([float(n) for n in ns])
    i = int(np.argmax(v))
    checkpoints = [2.0**k for k in range(0, max(1, int(N).bit_length()))] + [float(N)]
    running = _running_at(v, pos, checkpoints)
    return DiagnosticReport("coeff_decay_1d", float(v[i]), int(ns[i]), dyadic_verdict(running),
                            list(zip(checkpoints, running)))


def tensor_coeff_decay(beta, d: int, K: int) -> DiagnosticReport:
    """``sup`` over the cube ``kappa_j < K`` of ``|beta(kappa)| prod (1+kappa_j)``.

    ``beta`` is a sequence of ``d`` one-variable sequences (product case) or a
    callable on integer arrays of shape ``(M, d)``. Running sups are taken
    over the nested cubes ``kappa_j < 2**l``.
    """
    if d < 1 or K < 1:
        raise ContractError("d and K must be >= 1")
    if K**d > 1 << 22:
        raise ContractError("cube too large")
    idx = cube_indices(d, K)
    if callable(beta) and not isinstance(beta, (list, tuple)):
        vals = np.asarray(beta(idx), dtype=float)
    else:
        if len(beta) != d:
            raise ContractError("need one sequence per variable")
        vals = np.ones(idx.shape[0])
        for j, b in enumerate(beta):
            b = OneVariable(b) if isinstance(b, str) else b
            vals = vals * _eval_1d(b, idx[:, j])
    v = np.abs(vals) * np.prod(1.0 + idx, axis=1)
    i = int(np.argmax(v))
    edge = idx.max(axis=1) + 1  # smallest cube side containing the point
    checkpoints = [2**l for l in range(0, max(1, (K - 1).bit_length()) + 1) if 2**l < K] + [K]
    running = _running_at(v, edge, checkpoints)
    return DiagnosticReport("tensor_coeff_decay", float(v[i]), tuple(int(x) for x in idx[i]),
                            dyadic_verdict(running), list(zip(checkpoints, running)))


def _window_ratio(weights, coords, s) -> float:
    # coords: (atoms, d); s: (d,)
    inside = np.ones(len(weights), dtype=bool)
    for j, sj in enumerate(s):
        if sj != 0:
            t = coords[:, j]
            inside &= (np.abs(t) >= abs(sj)) & (t * sj > 0)
    return float(np.sum(weights[inside]) / np.prod(1.0 - np.asarray(s) ** 2))


def window_multi(measure: DiscreteMeasure, s_grid=None, max_points: int = 1 << 20) -> DiagnosticReport:
    """Carleson window test ``sup_s mu(I_s) / prod (1 - s_j**2)``.

    ``I_s = {t : |t_j| >= |s_j|, t_j s_j >= 0}``. Without a grid, ``s``
    ranges over the exact candidate set: each ``s_j`` is 0 or an atom
    coordinate, where the ratio jumps, so the supremum is exact. ``s_grid``
    may instead be an array of shape ``(G, d)`` over the sorted active
    coordinates (reported in ``witness``), giving a lower bound.
    """
    if any(p.is_bohr for _, p in measure.atoms):
        raise UnsupportedInputError("window sets of Bohr atoms are not finitely checkable; use halfline_window")
    active = sorted({j for _, p in measure.atoms for j in p.support})
    if not measure.atoms:
        return DiagnosticReport("window_multi", 0.0, None, BOUNDED, note="empty measure")
    w = np.array([wt for wt, _ in measure.atoms])
    coords = np.array([[p.coord(j) for j in active] for _, p in measure.atoms]).reshape(len(w), len(active))
    if s_grid is None:
        cands = [sorted({0.0, *coords[:, j].tolist()}) for j in range(len(active))]
        total = math.prod(len(c) for c in cands)
        if total > max_points:
            raise ContractError(f"{total} candidate windows; pass an explicit s_grid")
        grid = itertools.product(*cands)
        note = "exact supremum over the candidate windows"
    else:
        grid = np.atleast_2d(np.asarray(s_grid, dtype=float))
        if grid.shape[1] != len(active):
            raise ContractError(f"s_grid needs {len(active)} columns (coordinates {active})")
        if np.any(np.abs(grid) >= 1):
            raise ContractError("window parameters must lie in (-1, 1)")
        note = "supremum over the given grid (lower bound)"
    best, arg = -1.0, None
    for s in grid:
        r = _window_ratio(w, coords, s)
        if r > best:
            best, arg = r, tuple(float(x) for x in s)
    witness = {"coordinates": active, "s": arg}
    return DiagnosticReport("window_multi", best, witness, BOUNDED, note=note)


def default_halfline_grid(per_decade: int = 40, lo: float = 1e-12, hi: float = 1.0) -> np.ndarray:
    """``s`` values with ``s - 1/2`` log-spaced from ``hi`` down to ``lo``."""
    decades = math.log10(hi / lo)
    return 0.5 + np.logspace(math.log10(hi), math.log10(lo), int(round(decades * per_decade)) + 1)


def halfline_window(density: HalfLineDensity, s_grid=None) -> DiagnosticReport:
    """``sup_s nu((1/2, s]) / (s - 1/2)`` over a grid accumulating at ``1/2``.

    The grid is scanned from its right end towards ``1/2``; the running sup
    along that order feeds :func:`dyadic_verdict`. Mass at or below ``1/2``
    already forces ``alpha`` out of ``l^2``, which is reported as unbounded.
    """
    s = default_halfline_grid() if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any(s <= 0.5):
        raise ContractError("grid points must exceed 1/2")
    if density.a < 0.5 and float(density.mass(0.5)) > 0:
        m = float(density.mass(0.5))
        return DiagnosticReport("halfline_window", math.inf, {"mass_at_or_below_half": m}, UNBOUNDED,
                                note="mass at or below 1/2: alpha is not square summable")
    s = np.sort(s)[::-1]
    delta = s - 0.5
    lower = max(density.a, 0.5)
    ratio = (density.mass(s) - density.mass(lower)) / delta
    running = np.maximum.accumulate(ratio).tolist()
    i = int(np.argmax(ratio))
    # one level per decade of s - 1/2
    dec = np.floor(-np.log10(delta) + 1e-9)
    ends = [int(np.max(np.nonzero(dec == d)[0])) for d in np.unique(dec)]
    level_sups = [running[e] for e in ends]
    return DiagnosticReport("halfline_window", float(ratio[i]), float(s[i]), dyadic_verdict(level_sups),
                            [(float(delta[e]), running[e]) for e in ends],
                            note="supremum over the grid (lower bound)")


def _closed_big(name: str, n: int) -> float:
    # closed forms evaluated in floating point past the 64-bit range
    x = float(n)
    L = math.log(n)
    if name == "multiplicative-hilbert":
        return 1.0 / (math.sqrt(x) * L)
    if name == "sqrt-log":
        return 1.0 / (math.sqrt(x) * math.sqrt(L))
    if name == "power-of-two-hilbert":
        k = n.bit_length() - 1
        return 1.0 / (1 + k) if n == 1 << k else 0.0
    return 0.0


def helson_decay(seq: MomentSequence | Callable, N: int = 2**512, dense_max: int = 1 << 16) -> DiagnosticReport:
    """``sup_{2 <= n <= N} |alpha(n)| sqrt(n) log n``.

    Every ``n <= dense_max`` is evaluated, then powers of two up to ``N``.
    Moment sequences are limited to 64-bit ``n`` except closed forms, which
    are evaluated in floating point beyond; callables receive Python ints.
    """
    if N < 2:
        raise ContractError("N must be >= 2")
    if isinstance(seq, MomentSequence) and not isinstance(seq, ClosedFormMoments):
        N = min(N, 2**63)
    ns = _sample_points(N, dense_max, 2)
    small = ns[ns <= dense_max].astype(np.uint64)
    if isinstance(seq, MomentSequence):
        sv = np.concatenate([seq.alpha_many(c) for c in np.array_split(small, max(1, small.size // 4096))])
    else:
        sv = _eval_1d(seq, small.astype(np.int64))
    x = small.astype(float)
    vals = [np.abs(sv) * np.sqrt(x) * np.log(x)]
    big = [int(n) for n in ns[ns > dense_max]]
    if big:
        if isinstance(seq, ClosedFormMoments):
            bv = [_closed_big(seq.name, n) for n in big]
        elif isinstance(seq, MomentSequence):
            bv = seq.alpha_many(np.array(big, dtype=np.uint64)).tolist()
        else:
            bv = [float(seq(n)) for n in big]
        vals.append(np.array([abs(a) * math.sqrt(float(n)) * math.log(n) for a, n in zip(bv, big)]))
    v = np.concatenate(vals)
    logpos = np.array([math.log2(int(n)) for n in ns])
    i = int(np.argmax(v))
    checkpoints = list(range(1, int(N).bit_length())) + [math.log2(N)]
    running = _running_at(v, logpos, checkpoints)
    return DiagnosticReport("helson_decay", float(v[i]), int(ns[i]), dyadic_verdict(running),
                            list(zip(checkpoints, running)))


@dataclass
class GramDual:
    """``G[i, j] = sqrt(w_i w_j) K(lambda_i, lambda_j)`` and its spectrum."""

    G: np.ndarray
    spectrum: SpectralResult

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues


def gram_matrix(measure: DiscreteMeasure) -> np.ndarray:
    k = len(measure)
    G = np.empty((k, k))
    for i, (wi, pi) in enumerate(measure.atoms):
        for j in range(i, k):
            wj, pj = measure.atoms[j]
            G[i, j] = G[j, i] = math.sqrt(wi * wj) * float(np.real(kernel(pi, pj)))
    return G


def gram_dual(measure: DiscreteMeasure) -> GramDual:
    """Gram matrix of the kernels at the atoms; shares the nonzero spectrum of ``M(alpha)``."""
    G = gram_matrix(measure)
    return GramDual(G, eig_dense(G))
