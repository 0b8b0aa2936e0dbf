"""Finite-rank Helson forms built from differential operators at points.

A form is ``[f, g] = Lambda(f g)`` with
``Lambda(h) = sum_l s_l D(c_l1) ... D(c_lM) h (lambda_l)``. Everything here is
exact arithmetic on sparse polynomials except where noted (rank uses an SVD,
graded norms of Bohr points use prime zeta values).
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from helson.errors import ContractError
from helson.finiterank.polynomial import (
    Direction,
    SparsePolynomial,
    _csum,
    dir_derivative,
    poly_eval,
    poly_mul,
)
from helson.index import EMPTY, MultiIndex, factorize, nth_prime
from helson.moments import Point, kernel, point_from_json, prime_zeta_excluding

#: relative singular-value threshold for numerical rank
RANK_TOL = 1e-9


@dataclass(frozen=True)
class FactorizableOp:
    """``scalar * D(c_1) ... D(c_M)``; no directions means multiplication by ``scalar``."""

    scalar: complex = 1.0
    directions: tuple[Direction, ...] = ()

    @property
    def order(self) -> int:
        return len(self.directions)

    def apply(self, f: SparsePolynomial) -> SparsePolynomial:
        for c in self.directions:
            f = dir_derivative(f, c)
        return f * complex(self.scalar)

    @property
    def support(self) -> set[int]:
        return {j for c in self.directions for j in c.support}


@dataclass(frozen=True)
class HelsonFormSpec:
    """Finite list of ``(operator, point)`` pairs."""

    terms: tuple[tuple[FactorizableOp, Point], ...] = ()

    @classmethod
    def of(cls, terms: Iterable[tuple[FactorizableOp, Point]]) -> HelsonFormSpec:
        return cls(tuple(terms))

    @classmethod
    def point_mass(cls, pt: Point, weight: complex = 1.0) -> HelsonFormSpec:
        return cls(((FactorizableOp(weight), pt),))

    def __add__(self, other: HelsonFormSpec) -> HelsonFormSpec:
        return HelsonFormSpec(self.terms + other.terms)

    @property
    def max_order(self) -> int:
        return max((op.order for op, _ in self.terms), default=0)

    @property
    def variables(self) -> list[int]:
        """Direction supports together with explicit point supports."""
        out: set[int] = set()
        for op, pt in self.terms:
            out |= op.support
            out |= set(pt.support)
        return sorted(out)

    @property
    def direction_support(self) -> list[int]:
        return sorted({j for op, _ in self.terms for j in op.support})

    def to_json(self) -> dict:
        terms = []
        for op, pt in self.terms:
            s = complex(op.scalar)
            terms.append({
                "scalar": [s.real, s.imag],
                "directions": [c.to_json() for c in op.directions],
                "point": pt.to_json(),
            })
        return {"terms": terms}

    @classmethod
    def from_json(cls, obj: Mapping) -> HelsonFormSpec:
        if not isinstance(obj, Mapping) or "terms" not in obj:
            raise ContractError("form spec must be an object with 'terms'")
        terms = []
        for t in obj["terms"]:
            sc = t.get("scalar", [1.0, 0.0])
            scalar = complex(sc[0], sc[1] if len(sc) > 1 else 0.0) if isinstance(sc, list) else complex(sc)
            dirs = []
            for d in t.get("directions", []):
                coeffs = []
                for e in d:
                    if len(e) not in (2, 3):
                        raise ContractError("direction entries are [j, re] or [j, re, im]")
                    coeffs.append((int(e[0]), complex(e[1], e[2] if len(e) == 3 else 0.0)))
                dirs.append(Direction.of(coeffs))
            terms.append((FactorizableOp(scalar, tuple(dirs)), point_from_json(t["point"])))
        return cls(tuple(terms))


# ---------------------------------------------------------------------------
# builders for the standard examples


def evaluation_plus_derivative(pt: Point, c: Direction, a: complex = 1.0, b: complex = 1.0) -> HelsonFormSpec:
    """``a f(lambda) + b D(c) f(lambda)``."""
    return HelsonFormSpec(((FactorizableOp(a), pt), (FactorizableOp(b, (c,)), pt)))


def kronecker_1d(points: Sequence[complex], orders: Sequence[int], coeffs=None) -> HelsonFormSpec:
    """One-variable data ``sum_j sum_{i<=k_j} c_ji f^(i)(lambda_j)`` on ``z_1``.

    ``coeffs[j][i]`` defaults to 1.
    """
    if len(points) != len(orders):
        raise ContractError("need one order per point")
    terms = []
    e1 = Direction.unit(1)
    for j, (lam, k) in enumerate(zip(points, orders)):
        pt = Point.explicit({1: lam})
        for i in range(k + 1):
            c = 1.0 if coeffs is None else coeffs[j][i]
            terms.append((FactorizableOp(c, (e1,) * i), pt))
    return HelsonFormSpec(tuple(terms))


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def dirichlet_derivative(order: int, rho: float, J: int, scalar: complex = 1.0) -> HelsonFormSpec:
    """``h -> scalar * (d/ds)**order h(s)`` at ``s = rho`` on the first ``J`` variables.

    Under ``z_j = p_j**(-s)`` the derivative is the Euler operator
    ``E = -sum_j log(p_j) z_j d/dz_j``; powers of ``E`` at the Bohr point are
    expanded into constant-direction operators with Stirling numbers
    (``(z d/dz)**m = sum_i S(m, i) z**i (d/dz)**i``). The result agrees with
    the derivative on every polynomial in ``z_1..z_J``.
    """
    if order < 0 or J < 1:
        raise ContractError("need order >= 0 and J >= 1")
    pt = Point.bohr(rho)
    if order == 0:
        return HelsonFormSpec(((FactorizableOp(scalar), pt),))
    a = [-math.log(nth_prime(j)) for j in range(1, J + 1)]
    lam = [nth_prime(j) ** (-rho) for j in range(1, J + 1)]
    coef: dict[tuple[int, ...], float] = defaultdict(float)
    for m in _compositions(order, J):
        multi = math.factorial(order) / math.prod(math.factorial(x) for x in m)
        base = multi * math.prod(a[j] ** m[j] for j in range(J))
        for i in itertools.product(*[range(1, x + 1) if x else (0,) for x in m]):
            w = base
            for j in range(J):
                w *= _stirling2(m[j], i[j]) * lam[j] ** i[j]
            coef[i] += w
    terms = []
    for i, w in sorted(coef.items()):
        dirs = tuple(Direction.unit(j + 1) for j in range(J) for _ in range(i[j]))
        terms.append((FactorizableOp(scalar * w, dirs), pt))
    return HelsonFormSpec(tuple(terms))


# ---------------------------------------------------------------------------
# evaluation


def apply_functional(spec: HelsonFormSpec, h: SparsePolynomial) -> complex:
    """``Lambda(h)``."""
    return _csum(poly_eval(op.apply(h), pt) for op, pt in spec.terms)


def form_eval(spec: HelsonFormSpec, f: SparsePolynomial, g: SparsePolynomial) -> complex:
    """``[f, g] = Lambda(f g)``."""
    return apply_functional(spec, poly_mul(f, g))


def form_alpha(spec: HelsonFormSpec, n: int) -> complex:
    """``alpha(n) = [z**kappa(n), 1]``."""
    return form_eval(spec, SparsePolynomial.monomial(factorize(n)), SparsePolynomial.const())


# ---------------------------------------------------------------------------
# rank


def smooth_numbers(positions: Sequence[int], cap: int) -> list[int]:
    """All ``n <= cap`` whose prime factors sit at the given positions, ascending."""
    out = [1]
    for j in sorted(set(positions)):
        p = nth_prime(j)
        grown = []
        for n in out:
            m = n * p
            while m <= cap:
                grown.append(m)
                m *= p
        out.extend(grown)
    return sorted(out)


def form_matrix(spec: HelsonFormSpec, monomials: Sequence[int]) -> np.ndarray:
    """``F[i, k] = [z**kappa(n_i), z**kappa(n_k)]``, memoized by the product."""
    cache: dict[int, complex] = {}
    F = np.empty((len(monomials), len(monomials)), dtype=complex)
    for i, a in enumerate(monomials):
        for k in range(i, len(monomials)):
            n = a * monomials[k]
            v = cache.get(n)
            if v is None:
                v = cache[n] = form_alpha(spec, n)
            F[i, k] = F[k, i] = v
    return F


def numerical_rank(F: np.ndarray, tol: float = RANK_TOL) -> int:
    if F.size == 0:
        return 0
    sv = np.linalg.svd(F, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


@dataclass
class FormRank:
    """Rank of the form matrix per cap; ``stabilized`` when the last three agree."""

    rank: int
    stabilized: bool
    caps: list[int] = field(default_factory=list)
    ranks: list[int] = field(default_factory=list)
    sizes: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"rank": self.rank, "stabilized": self.stabilized, "caps": self.caps,
                "ranks": self.ranks, "matrix_sizes": self.sizes}


def form_rank(spec: HelsonFormSpec, degree_cap: int = 64, max_monomials: int = 1200) -> FormRank:
    """Numerical rank of ``[z**kappa, z**kappa']`` over monomials with ``n(kappa) <= cap``.

    Monomials use only the variables of the form. The cap is doubled until the
    rank is unchanged over two successive doublings or the monomial count
    would exceed ``max_monomials`` (then ``stabilized`` is False).
    """
    if degree_cap < 1:
        raise ContractError("degree cap must be >= 1")
    variables = spec.variables
    out = FormRank(0, False)
    cap = degree_cap
    while True:
        mons = smooth_numbers(variables, cap)
        if len(mons) > max_monomials:
            break
        r = numerical_rank(form_matrix(spec, mons))
        out.caps.append(cap)
        out.ranks.append(r)
        out.sizes.append(len(mons))
        out.rank = r
        if len(out.ranks) >= 3 and out.ranks[-1] == out.ranks[-2] == out.ranks[-3]:
            out.stabilized = True
            break
        cap *= 2
    return out


# ---------------------------------------------------------------------------
# graded norms and boundedness


def _bounded_multiindices(variables: Sequence[int], m: int):
    """All ``kappa`` supported on ``variables`` with ``|kappa| <= m``."""
    if not variables:
        yield EMPTY
        return
    for exps in itertools.product(range(m + 1), repeat=len(variables)):
        if sum(exps) <= m:
            yield MultiIndex.from_dict(dict(zip(variables, exps)))


def _h_complete(x: float, exclude: tuple[int, ...], r: int, cache: dict) -> float:
    """Complete homogeneous sum ``h_r`` of ``p**(-x)`` over primes outside ``exclude``."""
    key = (x, exclude)
    hs, ps = cache.setdefault(key, ([1.0], [0.0]))
    while len(hs) <= r:
        k = len(hs)
        while len(ps) <= k:
            ps.append(prime_zeta_excluding(len(ps) * x, exclude))
        hs.append(math.fsum(ps[i] * hs[k - i] for i in range(1, k + 1)) / k)
    return hs[r]


@dataclass
class GradedNorm:
    """``sum_{|kappa| = m} |Lambda(z**kappa)|**2`` or a divergence flag."""

    m: int
    value: float
    divergent: bool

    def to_json(self) -> dict:
        return {"m": self.m, "value": None if self.divergent else self.value, "divergent": self.divergent}


def graded_pieces(spec: HelsonFormSpec) -> dict[int, HelsonFormSpec]:
    """Split ``Lambda = sum_m Lambda^m`` by operator order."""
    out: dict[int, list] = defaultdict(list)
    for t in spec.terms:
        out[t[0].order].append(t)
    return {m: HelsonFormSpec(tuple(ts)) for m, ts in sorted(out.items())}


def commutation_terms(op: FactorizableOp, f1: SparsePolynomial, pt: Point) -> tuple[complex, list[FactorizableOp]]:
    """``D(c)(f1 f2)(lambda) = f1(lambda) D(c) f2(lambda) + sum_b D(b) f2(lambda)``.

    Returns ``f1(lambda)`` and the lower-order operators ``D(b)``, one per
    nonempty subset ``S`` of the directions: the scalar absorbs
    ``prod_{i in S} D(c_i) f1`` at ``lambda`` and the remaining directions act
    on ``f2`` (Leibniz rule).
    """
    M = op.order
    lower = []
    for r in range(1, M + 1):
        for S in itertools.combinations(range(M), r):
            g = f1
            for i in S:
                g = dir_derivative(g, op.directions[i])
            v = poly_eval(g, pt)
            if v != 0:
                rest = tuple(c for i, c in enumerate(op.directions) if i not in S)
                lower.append(FactorizableOp(complex(op.scalar) * v, rest))
    return poly_eval(f1, pt), lower


def graded_norm(spec: HelsonFormSpec, m: int, piece: bool = False, _cache: dict | None = None) -> GradedNorm:
    """Squared norm of ``Lambda`` restricted to homogeneous polynomials of degree ``m``.

    With ``piece=True`` only the order-``m`` operators of the form are used.
    Monomials split as ``kappa = kappa_A + kappa_B`` with ``A`` the form's
    variables. Explicit points vanish outside ``A``; for Bohr points the sum
    over ``kappa_B`` is a complete homogeneous symmetric sum of
    ``p**-(s + s')``, computed from prime zeta values by Newton's identities.
    That sum diverges once ``s + s' <= 1``.
    """
    if m < 0:
        raise ContractError("m must be >= 0")
    if piece:
        spec = graded_pieces(spec).get(m, HelsonFormSpec())
    cache = {} if _cache is None else _cache
    A = tuple(spec.variables)
    terms = list(spec.terms)
    bohr_s = sorted({pt.s for _, pt in terms if pt.is_bohr})
    parts: list[float] = []
    for kA in _bounded_multiindices(A, m):
        r = m - kA.degree
        mono = SparsePolynomial.monomial(kA)
        a = [poly_eval(op.apply(mono), pt) for op, pt in terms]
        if r == 0:
            parts.append(abs(_csum(a)) ** 2)
            continue
        groups = defaultdict(list)
        for (_, pt), v in zip(terms, a):
            if pt.is_bohr:
                groups[pt.s].append(v)
        G = {s: _csum(vs) for s, vs in groups.items()}
        scale = max((abs(v) for v in a), default=0.0)
        live = [s for s in bohr_s if abs(G[s]) > 1e-14 * scale]
        if not live:
            continue
        if 2 * live[0] <= 1:
            return GradedNorm(m, math.inf, True)
        acc = 0.0 + 0.0j
        for s, t in itertools.product(live, live):
            acc += G[s] * np.conj(G[t]) * _h_complete(s + t, A, r, cache)
        parts.append(acc.real)
    return GradedNorm(m, math.fsum(parts), False)


@dataclass
class GradedTotal:
    total: float
    divergent: bool
    terms: list[float]


def graded_total(spec: HelsonFormSpec, rtol: float = 1e-16, max_m: int = 2000) -> GradedTotal:
    """``sum_m graded_norm(spec, m)``, i.e. ``||Lambda||**2`` on ``H^2``."""
    cache: dict = {}
    terms: list[float] = []
    quiet = 0
    for m in range(max_m + 1):
        g = graded_norm(spec, m, _cache=cache)
        if g.divergent:
            return GradedTotal(math.inf, True, terms)
        terms.append(g.value)
        total = math.fsum(terms)
        if m > spec.max_order and g.value <= rtol * total:
            quiet += 1
            if quiet >= 3:
                return GradedTotal(total, False, terms)
        else:
            quiet = 0
    return GradedTotal(math.fsum(terms), True, terms)


@dataclass
class Boundedness:
    bounded: bool
    reasons: list[str]
    graded: list[GradedNorm]
    consistent: bool

    @property
    def verdict(self) -> str:
        return "bounded" if self.bounded else "unbounded"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reasons": self.reasons, "consistent": self.consistent,
                "graded": [g.to_json() for g in self.graded]}


def boundedness_check(spec: HelsonFormSpec) -> Boundedness:
    """Bounded iff every point lies in the open polydisc and in ``l^2``.

    Explicit points need ``|lambda_j| < 1``; Bohr points need ``s > 1/2``.
    Directions are finitely supported, hence always in ``l^2``. The verdict
    is compared with graded norms of orders ``0..max_order+1``: bounded specs
    must have all of them finite, and a Bohr point with ``s <= 1/2`` must
    make one of them diverge.
    """
    reasons = []
    bohr_bad = False
    for op, pt in spec.terms:
        if pt.is_bohr:
            if not pt.s > 0.5:
                reasons.append(f"Bohr point s={pt.s} <= 1/2 is not in l^2")
                bohr_bad = True
        else:
            for j, v in pt.coords:
                if not abs(v) < 1:
                    reasons.append(f"coordinate {j} = {v} outside the open disc")
    graded = []
    cache: dict = {}
    for m in range(spec.max_order + 2):
        graded.append(graded_norm(spec, m, _cache=cache))
    any_div = any(g.divergent for g in graded)
    bounded = not reasons
    consistent = (not any_div) if bounded else (any_div or not bohr_bad)
    return Boundedness(bounded, reasons, graded, consistent)


# ---------------------------------------------------------------------------
# analytic symbol


def _expand_op(op: FactorizableOp) -> list[tuple[complex, Counter]]:
    """``D(c_1)...D(c_M)`` as ``sum weight * prod_j d_j**k_j``."""
    acc: dict[tuple, list[complex]] = defaultdict(list)
    for combo in itertools.product(*[c.coeffs for c in op.directions]):
        w = complex(op.scalar)
        for _, v in combo:
            w *= complex(v)
        key = tuple(sorted(Counter(j for j, _ in combo).items()))
        acc[key].append(w)
    return [(_csum(ws), Counter(dict(k))) for k, ws in acc.items()]


def _check_bounded(spec: HelsonFormSpec):
    for _, pt in spec.terms:
        if pt.is_bohr and not pt.s > 0.5:
            raise ContractError("symbol needs a bounded spec (Bohr points need s > 1/2)")
        if not pt.is_bohr and any(not abs(v) < 1 for _, v in pt.coords):
            raise ContractError("symbol needs a bounded spec (points inside the polydisc)")


def symbol_eval(spec: HelsonFormSpec, w: Point) -> complex:
    """``B(w) = conj(Lambda_z K(z, w))``, whose Taylor coefficients are ``conj(alpha)``.

    ``K(z, w) = prod_j 1/(1 - z_j conj(w_j))``; the derivatives along the
    directions act on the finitely many factors ``j`` in the direction
    supports, in closed form: ``d_j**k (1 - z u)**-1 = k! u**k (1 - z u)**-(k+1)``.
    """
    _check_bounded(spec)
    if w.is_bohr and not w.s > 0.5:
        raise ContractError("w must lie in l^2 (Bohr s > 1/2)")
    if not w.is_bohr and any(not abs(v) < 1 for _, v in w.coords):
        raise ContractError("w must lie in the open polydisc")
    A = spec.direction_support
    u = {j: np.conj(w.coord(j)) for j in A}
    total = []
    for op, pt in spec.terms:
        lam = {j: pt.coord(j) for j in A}
        rest = complex(kernel(pt, w))
        for j in A:
            rest *= 1.0 - lam[j] * u[j]
        for weight, counts in _expand_op(op):
            v = weight * rest
            for j in A:
                k = counts.get(j, 0)
                v *= math.factorial(k) * u[j] ** k / (1.0 - lam[j] * u[j]) ** (k + 1)
            total.append(v)
    return np.conj(_csum(total))


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def symbol_taylor(spec: HelsonFormSpec, kappa: MultiIndex) -> complex:
    """Coefficient of ``w**kappa`` in the symbol, read off its series expansion.

    Per coordinate in the direction supports, ``k! u**k (1 - lambda u)**-(k+1)``
    contributes ``kappa_j!/(kappa_j - k)! * lambda_j**(kappa_j - k)``; every
    other coordinate contributes ``lambda_j**kappa_j`` from the kernel.
    """
    _check_bounded(spec)
    A = spec.direction_support
    kd = kappa.as_dict()
    total = []
    for op, pt in spec.terms:
        outside = {j: k for j, k in kd.items() if j not in A}
        if pt.is_bohr:
            base = math.exp(-pt.s * sum(k * math.log(nth_prime(j)) for j, k in outside.items()))
        else:
            base = 1.0
            for j, k in outside.items():
                base *= pt.coord(j) ** k
        if base == 0:
            continue
        for weight, counts in _expand_op(op):
            v = weight * base
            for j in A:
                k, n = counts.get(j, 0), kd.get(j, 0)
                if n < k:
                    v = 0.0
                    break
                lam = pt.coord(j)
                v *= _falling(n, k) * (lam ** (n - k) if n > k else 1.0)
            total.append(v)
    return np.conj(_csum(total))
