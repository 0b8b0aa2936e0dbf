"""Sparse polynomials in the variables ``z_1, z_2, ...`` and directions.

Coefficient arithmetic accumulates with :func:`math.fsum` on the real and
imaginary parts, so results do not depend on term order; in particular
``poly_mul(f, g) == poly_mul(g, f)`` holds exactly.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from helson.errors import ContractError
from helson.index import EMPTY, MultiIndex, compose, multiindex_add
from helson.moments import Point


def _csum(values: Iterable[complex]) -> complex:
    vals = list(values)
    re = math.fsum(v.real for v in vals)
    im = math.fsum(v.imag for v in vals)
    return complex(re, im)


@dataclass(frozen=True)
class Direction:
    """Finitely supported vector ``c``; ``D(c) = sum_j c_j d/dz_j``.

    Values are kept as given (floats, complex numbers or fractions).
    """

    coeffs: tuple[tuple[int, object], ...]

    def __post_init__(self):
        prev = 0
        for j, _ in self.coeffs:
            if j <= prev:
                raise ContractError("direction indices must be increasing and >= 1")
            prev = j
        if not any(v != 0 for _, v in self.coeffs):
            raise ContractError("a direction must not be zero")

    @classmethod
    def of(cls, coeffs: Mapping[int, object] | Iterable[tuple[int, object]]) -> Direction:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[int, object] = {}
        for j, v in items:
            merged[int(j)] = merged.get(int(j), 0) + v
        return cls(tuple(sorted((j, v) for j, v in merged.items() if v != 0)))

    @classmethod
    def unit(cls, j: int, value=1.0) -> Direction:
        return cls(((j, value),))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.coeffs)

    def __getitem__(self, j: int):
        for jj, v in self.coeffs:
            if jj == j:
                return v
        return 0

    def as_dict(self) -> dict[int, object]:
        return dict(self.coeffs)

    def to_json(self) -> list:
        out = []
        for j, v in self.coeffs:
            v = complex(v)
            out.append([j, v.real, v.imag])
        return out


@dataclass
class SparsePolynomial:
    """``sum_kappa c_kappa z**kappa`` with no zero coefficients stored."""

    terms: dict[MultiIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: complex(v) for k, v in self.terms.items() if v != 0}

    @classmethod
    def const(cls, c: complex = 1.0) -> SparsePolynomial:
        return cls({EMPTY: c})

    @classmethod
    def monomial(cls, kappa: MultiIndex, c: complex = 1.0) -> SparsePolynomial:
        return cls({kappa: c})

    @classmethod
    def var(cls, j: int) -> SparsePolynomial:
        return cls({MultiIndex.unit(j): 1.0})

    @classmethod
    def from_dict(cls, terms: Mapping[MultiIndex | Mapping[int, int], complex]) -> SparsePolynomial:
        out: dict[MultiIndex, list[complex]] = defaultdict(list)
        for k, v in terms.items():
            k = k if isinstance(k, MultiIndex) else MultiIndex.from_dict(dict(k))
            out[k].append(complex(v))
        return cls({k: _csum(vs) for k, vs in out.items()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((k.degree for k in self.terms), default=-1)

    @property
    def variables(self) -> set[int]:
        return {j for k in self.terms for j in k.support}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: SparsePolynomial) -> SparsePolynomial:
        acc: dict[MultiIndex, list[complex]] = defaultdict(list)
        for p in (self, other):
            for k, v in p.terms.items():
                acc[k].append(v)
        return SparsePolynomial({k: _csum(vs) for k, vs in acc.items()})

    def __neg__(self) -> SparsePolynomial:
        return SparsePolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: SparsePolynomial) -> SparsePolynomial:
        return self + (-other)

    def __mul__(self, other) -> SparsePolynomial:
        if isinstance(other, SparsePolynomial):
            return poly_mul(self, other)
        return SparsePolynomial({k: v * other for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if not self.terms:
            return "SparsePolynomial(0)"
        parts = [f"({v:g})*z^{dict(k.entries)}" for k, v in sorted(self.terms.items(), key=_order)]
        return "SparsePolynomial(" + " + ".join(parts) + ")"


def _order(item):
    k = item[0]
    return (k.degree, k.entries)


def poly_mul(f: SparsePolynomial, g: SparsePolynomial) -> SparsePolynomial:
    """Product by convolution over multi-indices."""
    acc: dict[MultiIndex, list[complex]] = defaultdict(list)
    for ka, va in f.terms.items():
        for kb, vb in g.terms.items():
            acc[multiindex_add(ka, kb)].append(va * vb)
    return SparsePolynomial({k: _csum(vs) for k, vs in acc.items()})


def _lower(kappa: MultiIndex, j: int) -> MultiIndex:
    return MultiIndex.from_dict({**kappa.as_dict(), j: kappa[j] - 1})


def dir_derivative(f: SparsePolynomial, c: Direction) -> SparsePolynomial:
    """``D(c) f = sum_j c_j df/dz_j``, exactly."""
    acc: dict[MultiIndex, list[complex]] = defaultdict(list)
    cs = c.as_dict()
    for kappa, v in f.terms.items():
        for j, k in kappa:
            cj = cs.get(j)
            if cj is not None:
                acc[_lower(kappa, j)].append(complex(cj) * k * v)
    return SparsePolynomial({k: _csum(vs) for k, vs in acc.items()})


def monomial_value(kappa: MultiIndex, pt: Point) -> complex:
    """``lambda**kappa``; Bohr points give ``n(kappa)**(-s)``."""
    if pt.is_bohr:
        n = compose(kappa)
        return math.exp(-pt.s * math.log(n)) if n > 1 else 1.0
    return pt.monomial(kappa)


def poly_eval(f: SparsePolynomial, pt: Point) -> complex:
    """``sum_kappa f_kappa lambda**kappa``."""
    return _csum(v * monomial_value(k, pt) for k, v in f.terms.items())
