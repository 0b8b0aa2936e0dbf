"""Finite sums of elementary tensors ``s * a_1 (x) ... (x) a_m`` of directions.

Scalars and direction values may be floats, complex numbers or
:class:`fractions.Fraction`; with fractions every operation here is exact.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from helson.errors import ContractError
from helson.finiterank.polynomial import Direction

#: relative tolerance for linear dependence of floating-point partial products
DEP_TOL = 1e-12

Term = tuple[object, tuple[Direction, ...]]


@dataclass(frozen=True)
class SymmetricTensorRep:
    """``sum_k s_k a_k1 (x) ... (x) a_km``, all terms of the same order ``m``."""

    order: int
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        if self.order < 0:
            raise ContractError("order must be >= 0")
        for _, factors in self.terms:
            if len(factors) != self.order:
                raise ContractError("every term needs exactly `order` factors")

    @classmethod
    def of(cls, order: int, terms: Iterable[tuple[object, Sequence[Direction]]]) -> SymmetricTensorRep:
        return cls(order, tuple((s, tuple(f)) for s, f in terms))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def supports(self) -> list[int]:
        return sorted({j for _, fs in self.terms for a in fs for j in a.support})

    def evaluate(self, idx: Sequence[int]):
        """Tensor entry at ``(j_1, ..., j_m)``."""
        if len(idx) != self.order:
            raise ContractError("index length must equal the order")
        total = 0
        for s, fs in self.terms:
            v = s
            for a, j in zip(fs, idx):
                v = v * a[j]
                if v == 0:
                    break
            total = total + v
        return total

    def values(self, index_set: Sequence[int] | None = None) -> dict[tuple[int, ...], object]:
        """All entries over ``index_set**m`` (default: the union of supports)."""
        base = self.supports if index_set is None else list(index_set)
        return {idx: self.evaluate(idx) for idx in itertools.product(base, repeat=self.order)}


def _dir_key(a: Direction):
    return tuple((j, complex(v).real, complex(v).imag) for j, v in a.coeffs)


def _exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _divide_exactly(total: list, D: int):
    """``sum(total) / D`` computed exactly, returned in the type of the inputs."""
    if all(_exact(x) for x in total):
        return sum(total, Fraction(0)) / D
    if any(isinstance(x, complex) for x in total):
        re = sum((Fraction(complex(x).real) for x in total), Fraction(0)) / D
        im = sum((Fraction(complex(x).imag) for x in total), Fraction(0)) / D
        return complex(float(re), float(im))
    return float(sum((Fraction(x) for x in total), Fraction(0)) / D)


def sym(rep: SymmetricTensorRep) -> SymmetricTensorRep:
    """Average over factor permutations, expanded into elementary terms.

    Each orbit (multiset of factors) with scalar total ``S`` and ``D`` distinct
    arrangements becomes ``D`` terms of scalar ``S / D``. The division is done
    in exact rational arithmetic and rounded once, which makes ``sym``
    idempotent exactly, also for floats.
    """
    m = rep.order
    orbits: dict[tuple, list] = defaultdict(list)
    for s, fs in rep.terms:
        key = tuple(sorted(fs, key=_dir_key))
        orbits[key].append(s)
    out = []
    for key in sorted(orbits, key=lambda k: tuple(_dir_key(a) for a in k)):
        counts = Counter(key)
        D = math.factorial(m) // math.prod(math.factorial(c) for c in counts.values())
        scalar = _divide_exactly(orbits[key], D)
        if scalar == 0:
            continue
        arrangements = sorted(set(itertools.permutations(key)), key=lambda k: tuple(_dir_key(a) for a in k))
        out.extend((scalar, arr) for arr in arrangements)
    return SymmetricTensorRep(m, tuple(out))


# ---------------------------------------------------------------------------
# canonicalization


def _partial_product(fs: Sequence[Direction]) -> dict[tuple[int, ...], object]:
    entries: dict[tuple[int, ...], object] = {(): 1}
    for a in fs:
        entries = {k + (j,): v * w for k, v in entries.items() for j, w in a.coeffs}
    return entries


def _is_zero(vec: dict, scale: float, exact: bool) -> bool:
    if exact:
        return all(v == 0 for v in vec.values())
    return all(abs(v) <= DEP_TOL * scale for v in vec.values())


class _Basis:
    """Greedy row reduction; every reduced vector remembers its combination of originals."""

    def __init__(self, exact: bool):
        self.exact = exact
        self.rows: list[tuple[tuple, dict, dict]] = []  # (pivot, reduced, combination)

    def reduce(self, vec: dict) -> tuple[dict, dict]:
        r = dict(vec)
        acc: dict[int, object] = defaultdict(int)
        for piv, row, comb in self.rows:
            x = r.get(piv, 0)
            if x == 0:
                continue
            f = x / row[piv]
            for k, v in row.items():
                r[k] = r.get(k, 0) - f * v
            for i, c in comb.items():
                acc[i] = acc[i] + f * c
            r[piv] = 0
        return r, acc

    def add(self, k: int, r: dict, acc: dict):
        piv = max(r, key=lambda key: abs(r[key]))
        comb = {i: -c for i, c in acc.items()}
        comb[k] = 1
        self.rows.append((piv, r, comb))


def _combine(pairs: Iterable[tuple[object, Direction]]) -> dict[int, object]:
    out: dict[int, object] = defaultdict(int)
    for c, a in pairs:
        for j, v in a.coeffs:
            out[j] = out[j] + c * v
    return out


def _ratio(new: dict, old: dict, exact: bool):
    """``t`` with ``new == t * old`` when it exists (up to tolerance for floats)."""
    j0 = max(old, key=lambda j: abs(old[j]))
    t = new.get(j0, 0) / old[j0]
    scale = max(abs(v) for v in new.values()) if new else 0.0
    for j in set(new) | set(old):
        d = new.get(j, 0) - t * old.get(j, 0)
        if exact and d != 0:
            return None
        if not exact and abs(d) > DEP_TOL * max(scale, 1e-300):
            return None
    return t


def canonicalize(rep: SymmetricTensorRep) -> SymmetricTensorRep:
    """Remove linear dependence among the partial products ``a_1 (x) ... (x) a_{m-1}``.

    Partial products are reduced greedily in term order. A dependent one,
    ``P_d = sum_i x_di P_i`` over retained terms ``i``, is dropped and its last
    factor folded in: ``b_i += x_di * s_d a_dm``. Retained terms keep their
    scalar when the folded last factor is a multiple of the old one. Values
    are unchanged (exactly for fractions), and the term count never grows.
    """
    m = rep.order
    terms = list(rep.terms)
    if not terms:
        return rep
    exact = all(_exact(s) for s, _ in terms) and all(
        _exact(v) for _, fs in terms for a in fs for _, v in a.coeffs
    )
    basis = _Basis(exact)
    keep: list[int] = []
    folds: dict[int, list] = defaultdict(list)
    for k, (s, fs) in enumerate(terms):
        vec = _partial_product(fs[: m - 1]) if m > 0 else {(): 1}
        scale = max(abs(v) for v in vec.values())
        r, acc = basis.reduce(vec)
        if _is_zero(r, scale, exact):
            for i, c in acc.items():
                if c != 0:
                    folds[i].append((c * s, fs[-1] if m > 0 else None))
        else:
            basis.add(k, r, acc)
            keep.append(k)
    out = []
    for i in keep:
        s, fs = terms[i]
        if not folds[i]:
            out.append((s, fs))
            continue
        if m == 0:
            total = s + sum(c for c, _ in folds[i])
            if total != 0:
                out.append((total, fs))
            continue
        last = fs[-1]
        new = _combine([(s, last)] + folds[i])
        new = {j: v for j, v in new.items() if v != 0}
        if not new or _is_zero(new, max(abs(s) * max(abs(v) for _, v in last.coeffs), 1e-300), exact):
            continue
        old = dict(last.coeffs)
        t = _ratio(new, old, exact)
        if t is not None:
            out.append((t, fs))
        else:
            one = Fraction(1) if exact else 1.0
            out.append((one, fs[:-1] + (Direction.of(sorted(new.items())),)))
    return SymmetricTensorRep(m, tuple(out))
