"""Measures, the moment sequences they generate, kernels and zeta values.

A moment sequence is any rule ``n -> alpha(n)``. The classes below produce it
from a discrete measure on the polydisc, from a density on the half-line
(through ``alpha(n) = int n**(-s) dnu(s)``), from a product of one-variable
sequences, from a closed formula, or from a finite-rank Helson form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import special

from helson.errors import ContractError, DivergenceError, DomainError
from helson.index import UINT64_MAX, IndexOverflowError, MultiIndex, factorize, nth_prime, primes

# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class Point:
    """A point of the infinite polydisc.

    Either finitely many explicit coordinates ``{j: lambda_j}`` (all others
    zero) or a Bohr point ``lambda_j = p_j**(-s)`` that is never materialized.
    Explicit values may be complex and are not range-checked here; measures
    and the boundedness check do that.
    """

    coords: tuple[tuple[int, complex], ...] = ()
    s: float | None = None

    def __post_init__(self):
        if self.s is not None:
            if self.coords:
                raise ContractError("a point is either explicit or Bohr, not both")
            if not math.isfinite(self.s):
                raise ContractError("Bohr exponent must be finite")
            return
        prev = 0
        for j, v in self.coords:
            if j <= prev:
                raise ContractError("coordinate indices must be increasing and >= 1")
            if v == 0:
                raise ContractError("zero coordinates are implicit and must be omitted")
            if not np.isfinite(v):
                raise ContractError("coordinates must be finite")
            prev = j

    @classmethod
    def explicit(cls, coords: Mapping[int, complex] | Iterable[tuple[int, complex]]) -> Point:
        items = coords.items() if isinstance(coords, Mapping) else coords
        merged: dict[int, complex] = {}
        for j, v in items:
            j = int(j)
            if j in merged:
                raise ContractError(f"coordinate {j} given twice")
            merged[j] = _num(v)
        return cls(tuple(sorted((j, v) for j, v in merged.items() if v != 0)))

    @classmethod
    def bohr(cls, s: float) -> Point:
        return cls(s=float(s))

    @classmethod
    def origin(cls) -> Point:
        return cls()

    @property
    def is_bohr(self) -> bool:
        return self.s is not None

    @property
    def support(self) -> tuple[int, ...]:
        """Indices of the stored coordinates (empty for Bohr points)."""
        return tuple(j for j, _ in self.coords)

    @property
    def is_real(self) -> bool:
        return all(isinstance(v, float) for _, v in self.coords)

    def coord(self, j: int) -> complex:
        if self.s is not None:
            return nth_prime(j) ** (-self.s)
        for jj, v in self.coords:
            if jj == j:
                return v
        return 0.0

    def monomial(self, kappa: MultiIndex) -> complex:
        """``lambda**kappa`` with the convention ``0**0 = 1``."""
        if self.s is not None:
            logn = sum(k * math.log(nth_prime(j)) for j, k in kappa)
            return math.exp(-self.s * logn)
        out = 1.0
        stored = dict(self.coords)
        for j, k in kappa:
            v = stored.get(j)
            if v is None:
                return 0.0
            out *= v**k
        return out

    def to_json(self) -> dict:
        if self.s is not None:
            return {"bohr": self.s}
        return {"explicit": [[j, *_num_json(v)] for j, v in self.coords]}

    def __repr__(self) -> str:
        if self.s is not None:
            return f"Point.bohr({self.s!r})"
        return f"Point.explicit({dict(self.coords)!r})"


def _num(v) -> complex | float:
    # keep reals real so measures stay real-valued
    if isinstance(v, complex) or np.iscomplexobj(v):
        v = complex(v)
        return v.real if v.imag == 0 else v
    return float(v)


def _num_json(v) -> list[float]:
    if isinstance(v, complex):
        return [v.real, v.imag]
    return [v]


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite positive combination of point masses ``sum w_l delta_{lambda_l}``."""

    atoms: tuple[tuple[float, Point], ...] = ()

    def __post_init__(self):
        for w, pt in self.atoms:
            if not (w > 0 and math.isfinite(w)):
                raise ContractError(f"atom weights must be positive and finite, got {w}")
            if not pt.is_bohr:
                for j, v in pt.coords:
                    if not isinstance(v, float):
                        raise ContractError("measure atoms must have real coordinates")
                    if not abs(v) < 1:
                        raise ContractError(f"coordinate {j} = {v} is outside (-1, 1)")

    @classmethod
    def of(cls, atoms: Iterable[tuple[float, Point]]) -> DiscreteMeasure:
        return cls(tuple((float(w), p) for w, p in atoms))

    def __len__(self) -> int:
        return len(self.atoms)

    def scaled(self, c: float) -> DiscreteMeasure:
        return DiscreteMeasure(tuple((c * w, p) for w, p in self.atoms))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_PANEL_WIDTH = 5.0


@dataclass(frozen=True)
class HalfLineDensity:
    """Density of a measure ``nu`` on ``(0, inf)``, read through ``n**(-s)``.

    ``kind`` is ``"lebesgue"`` (``ds`` on ``(1/2, inf)``), ``"poly"``
    (``sum c_i s**(lowest_power + i)`` on ``(a, b)``) or ``"ramp"``
    (``t/2`` on ``(0, 1)``).
    """

    kind: str = "lebesgue"
    a: float = 0.5
    b: float = math.inf
    coeffs: tuple[float, ...] = (1.0,)
    lowest_power: int = 0

    def __post_init__(self):
        if self.kind not in ("lebesgue", "poly", "ramp"):
            raise ContractError(f"unknown density kind {self.kind!r}")
        if not (0 <= self.a < self.b):
            raise ContractError("density interval must satisfy 0 <= a < b")
        if self.kind == "poly":
            self._validate_poly()

    @classmethod
    def lebesgue(cls) -> HalfLineDensity:
        return cls()

    @classmethod
    def ramp(cls) -> HalfLineDensity:
        return cls("ramp", 0.0, 1.0, (0.5,), 1)

    @classmethod
    def poly(cls, coeffs: Sequence[float], a: float, b: float = math.inf, lowest_power: int = 0):
        """Density ``sum_i coeffs[i] * s**(lowest_power + i)`` on ``(a, b)``."""
        cs = tuple(float(c) for c in coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        if not cs:
            raise ContractError("density polynomial is identically zero")
        return cls("poly", float(a), float(b), cs, int(lowest_power))

    @property
    def powers(self) -> np.ndarray:
        if self.kind == "lebesgue":
            return np.array([0])
        return np.arange(len(self.coeffs)) + self.lowest_power

    @property
    def _coeffs(self) -> np.ndarray:
        if self.kind == "lebesgue":
            return np.array([1.0])
        return np.asarray(self.coeffs, dtype=float)

    def _validate_poly(self):
        c, p = self._coeffs, self.powers
        if self.a == 0 and np.any((p <= -1) & (c != 0)):
            raise ContractError("negative powers need a > 0 to stay integrable")
        hi = self.b if math.isfinite(self.b) else self.a + 100.0
        grid = np.linspace(self.a, hi, 2001)[1:]
        if np.any(self.density(grid) < -1e-12 * np.max(np.abs(self.density(grid)))):
            raise ContractError("density takes negative values on its interval")
        if not math.isfinite(self.b) and c[np.argmax(p)] < 0:
            raise ContractError("density is eventually negative")

    def density(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        inside = (s > self.a) & (s < self.b)
        safe = np.where(inside, s, 1.0)
        vals = np.zeros_like(safe)
        for c, p in zip(self._coeffs, self.powers):
            vals = vals + c * safe ** float(p)
        return np.where(inside, vals, 0.0)

    def mass(self, x) -> np.ndarray:
        """``nu((a, x])``, the distribution function, in closed form."""
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        out = np.zeros_like(x)
        for c, p in zip(self._coeffs, self.powers):
            if p == -1:
                out = out + c * np.log(x / self.a)
            else:
                with np.errstate(over="ignore"):
                    out = out + c * (x ** float(p + 1) - self.a ** float(p + 1)) / (p + 1)
        return out

    @property
    def total_mass(self) -> float:
        if math.isfinite(self.b):
            return float(self.mass(self.b))
        if np.max(self.powers[self._coeffs != 0]) >= -1:
            return math.inf
        return float(self.mass(np.inf))

    def one_dim_moment(self, k: int) -> float:
        """``int t**k dnu(t)``, the one-variable reading on a bounded interval."""
        if not math.isfinite(self.b):
            raise DivergenceError("one-variable moments need a bounded interval")
        total = 0.0
        for c, p in zip(self._coeffs, self.powers):
            q = p + k + 1
            if q == 0:
                total += c * math.log(self.b / self.a)
            else:
                total += c * (self.b**q - self.a**q) / q
        return float(total)

    def _majorant(self, L: float) -> np.polynomial.Polynomial:
        # |rho(a + u/L)| <= Q(u) with Q having non-negative coefficients
        Q = np.polynomial.Polynomial([0.0])
        shift = np.polynomial.Polynomial([self.a, 1.0 / L])
        for c, p in zip(self._coeffs, self.powers):
            if p < 0:
                Q = Q + abs(c) * self.a ** float(p)
            else:
                Q = Q + abs(c) * shift ** int(p)
        return Q

    def moments(self, ns: np.ndarray) -> np.ndarray:
        """``int n**(-s) dnu(s)`` for every ``n`` in ``ns`` (all ``>= 2``)."""
        ns = np.asarray(ns, dtype=float)
        if ns.size == 0:
            return np.zeros(0)
        if np.any(ns < 2):
            raise ContractError("quadrature path needs n >= 2")
        L = np.log(ns)
        Q = self._majorant(float(L.min()))
        U = 40.0
        for _ in range(40):
            vals, tail = self._quad(L, U, Q)
            if np.all(tail <= 1e-14 * np.abs(vals)):
                break
            U *= 1.5
        else:  # pragma: no cover - would need a pathological density
            raise DivergenceError("half-line quadrature tail did not settle")
        return np.exp(-self.a * L) / L * vals

    def _quad(self, L: np.ndarray, U: float, Q) -> tuple[np.ndarray, np.ndarray]:
        # substitute u = (s - a) log n, so the weight becomes exp(-u)
        V = np.minimum((self.b - self.a) * L, U)
        t, w = _panel_rule(U)
        u = V[:, None] * t[None, :]
        s = self.a + u / L[:, None]
        rho = np.zeros_like(s)
        for c, p in zip(self._coeffs, self.powers):
            rho = rho + c * s ** float(p)
        vals = V * ((np.exp(-u) * rho) @ w)
        tail = np.where(V < (self.b - self.a) * L, math.exp(-U) * _sum_derivs(Q, U), 0.0)
        return vals, tail

    def to_json(self):
        if self.kind == "lebesgue":
            return "lebesgue"
        if self.kind == "ramp":
            return "ramp"
        return {
            "poly": list(self.coeffs),
            "interval": [self.a, None if math.isinf(self.b) else self.b],
            "lowest_power": self.lowest_power,
        }


def _panel_rule(U: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on ``[0, 1]`` for a ``[0, U]`` integral.

    Panels grow geometrically from width 1/8 (relative to U = 1 units of u)
    up to ``_PANEL_WIDTH`` so that densities with a pole just left of u = 0,
    such as ``s**-2``, still converge to rounding.
    """
    edges = [0.0]
    width = 0.125
    while edges[-1] < U:
        edges.append(min(U, edges[-1] + width))
        width = min(2 * width, _PANEL_WIDTH)
    e = np.asarray(edges) / U
    lo, hi = e[:-1, None], e[1:, None]
    x = (_GL_NODES[None, :] + 1.0) / 2.0
    t = (lo + (hi - lo) * x).ravel()
    w = ((hi - lo) * _GL_WEIGHTS[None, :] / 2.0).ravel()
    return t, w


def _sum_derivs(Q, U: float) -> float:
    # int_U^inf exp(-u) Q(u) du = exp(-U) * sum_j Q^(j)(U)
    total = 0.0
    while True:
        total += float(Q(U))
        if Q.degree() == 0:
            return total
        Q = Q.deriv()


# ---------------------------------------------------------------------------
# one-variable coefficient sequences


@dataclass(frozen=True)
class OneVariable:
    """A one-variable sequence ``beta(k)``, ``k >= 0``.

    Named sequences are ``"delta"``, ``"hilbert"`` (``1/(1+k)``) and
    ``"ramp"`` (``1/(2(k+2))``); otherwise ``values`` lists ``beta(0..)``
    and the sequence is zero past its end.
    """

    name: str | None = "delta"
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name is not None and self.name not in _ONE_VAR:
            raise ContractError(f"unknown one-variable sequence {self.name!r}")

    @classmethod
    def listed(cls, values: Sequence[float]) -> OneVariable:
        return cls(None, tuple(float(v) for v in values))

    def __call__(self, k):
        k = np.asarray(k)
        if self.name is not None:
            out = _ONE_VAR[self.name](k.astype(float))
        else:
            table = np.append(np.asarray(self.values, dtype=float), 0.0)
            out = table[np.minimum(k, len(self.values)).astype(np.int64)]
        return out if out.ndim else float(out)

    def to_json(self):
        return self.name if self.name is not None else list(self.values)


_ONE_VAR: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "delta": lambda k: (k == 0).astype(float),
    "hilbert": lambda k: 1.0 / (1.0 + k),
    "ramp": lambda k: 1.0 / (2.0 * (k + 2.0)),
}


# ---------------------------------------------------------------------------
# moment sequences


class MomentSequence:
    """Producer of ``alpha(n)``; subclasses implement :meth:`alpha_many`."""

    #: whether alpha(1) is finite
    defined_at_one = True
    #: whether values are always real
    real = True

    def alpha_many(self, ns) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, n: int):
        return alpha(self, n)

    def to_json(self) -> dict:
        raise NotImplementedError


def _as_uint(ns) -> np.ndarray:
    if isinstance(ns, np.ndarray) and ns.dtype.kind in "iu":
        arr = ns
    else:
        vals = list(ns) if not np.isscalar(ns) else [ns]
        for v in vals:
            if int(v) > UINT64_MAX:
                raise IndexOverflowError(f"{v} exceeds the 64-bit range")
        arr = np.asarray([int(v) for v in vals], dtype=np.uint64) if vals else np.zeros(0, np.uint64)
    if arr.size and arr.dtype.kind == "i" and arr.min() < 1:
        raise ContractError("moment index n must be >= 1")
    arr = arr.astype(np.uint64)
    if arr.size and arr.min() < 1:
        raise ContractError("moment index n must be >= 1")
    return arr


def _strip(ns: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Split ``ns = p**k * rest`` elementwise."""
    rest = ns.copy()
    k = np.zeros(ns.shape, dtype=np.int64)
    p = np.uint64(p)
    idx = np.nonzero(rest % p == 0)[0]
    while idx.size:
        rest[idx] //= p
        k[idx] += 1
        idx = idx[rest[idx] % p == 0]
    return k, rest


@dataclass(frozen=True)
class DiscreteMoments(MomentSequence):
    """``alpha(n) = sum_l w_l (lambda_l)**kappa(n)``."""

    measure: DiscreteMeasure = field(default_factory=DiscreteMeasure)

    def alpha_many(self, ns) -> np.ndarray:
        ns = _as_uint(ns)
        out = np.zeros(ns.shape)
        for w, pt in self.measure.atoms:
            if pt.is_bohr:
                out += w * np.exp(-pt.s * np.log(ns.astype(float)))
                continue
            val = np.full(ns.shape, w)
            rest = ns
            for j, v in pt.coords:
                k, rest = _strip(rest, nth_prime(j))
                val = val * v ** k.astype(float)
            out += np.where(rest == 1, val, 0.0)
        return out

    def to_json(self) -> dict:
        return {
            "type": "discrete",
            "atoms": [{"w": w, "point": p.to_json()} for w, p in self.measure.atoms],
        }


@dataclass(frozen=True)
class HalfLineMoments(MomentSequence):
    """``alpha(n) = int n**(-s) dnu(s)`` by Gauss-Legendre quadrature."""

    density: HalfLineDensity = field(default_factory=HalfLineDensity)

    @property
    def defined_at_one(self) -> bool:
        return math.isfinite(self.density.total_mass)

    def alpha_many(self, ns) -> np.ndarray:
        ns = _as_uint(ns)
        out = np.empty(ns.shape)
        one = ns == 1
        if one.any():
            m = self.density.total_mass
            if not math.isfinite(m):
                raise DivergenceError("alpha(1) is the total mass, which is infinite here")
            out[one] = m
        out[~one] = self.density.moments(ns[~one])
        return out

    def to_json(self) -> dict:
        return {"type": "halfline", "density": self.density.to_json()}


@dataclass(frozen=True)
class MultiplicativeMoments(MomentSequence):
    """``alpha(p**kappa) = prod_j beta_j(kappa_j)``; unlisted primes use delta."""

    factors: tuple[tuple[int, OneVariable], ...] = ()

    def __post_init__(self):
        js = [j for j, _ in self.factors]
        if js != sorted(set(js)) or (js and js[0] < 1):
            raise ContractError("prime positions must be distinct, sorted and >= 1")

    @classmethod
    def of(cls, factors: Mapping[int, OneVariable | str | Sequence[float]]) -> MultiplicativeMoments:
        items = []
        for j, b in sorted(factors.items()):
            if isinstance(b, str):
                b = OneVariable(b)
            elif not isinstance(b, OneVariable):
                b = OneVariable.listed(b)
            items.append((int(j), b))
        return cls(tuple(items))

    def alpha_many(self, ns) -> np.ndarray:
        ns = _as_uint(ns)
        out = np.ones(ns.shape)
        rest = ns
        for j, beta in self.factors:
            k, rest = _strip(rest, nth_prime(j))
            out = out * beta(k)
        return np.where(rest == 1, out, 0.0)

    def to_json(self) -> dict:
        return {"type": "multiplicative", "primes": {str(j): b.to_json() for j, b in self.factors}}


def _mult_hilbert(ns):
    x = ns.astype(float)
    return 1.0 / (np.sqrt(x) * np.log(x))


def _sqrt_log(ns):
    x = ns.astype(float)
    return 1.0 / (np.sqrt(x) * np.sqrt(np.log(x)))


def _pow2_hilbert(ns):
    k, rest = _strip(ns, 2)
    return np.where(rest == 1, 1.0 / (1.0 + k), 0.0)


def _delta(ns):
    return (ns == 1).astype(float)


# name -> (formula, defined at n = 1)
CLOSED_FORMS: dict[str, tuple[Callable[[np.ndarray], np.ndarray], bool]] = {
    "multiplicative-hilbert": (_mult_hilbert, False),
    "power-of-two-hilbert": (_pow2_hilbert, True),
    "delta": (_delta, True),
    "sqrt-log": (_sqrt_log, False),
}


@dataclass(frozen=True)
class ClosedFormMoments(MomentSequence):
    """Named sequences given by a formula.

    ``multiplicative-hilbert`` is ``1/(sqrt(n) log n)``, ``sqrt-log`` is
    ``1/(sqrt(n) sqrt(log n))`` (both for ``n >= 2``), ``power-of-two-hilbert``
    puts ``1/(1+k)`` at ``n = 2**k`` and ``delta`` is the unit at ``n = 1``.
    """

    name: str = "multiplicative-hilbert"

    def __post_init__(self):
        if self.name not in CLOSED_FORMS:
            raise ContractError(f"unknown closed form {self.name!r}; known: {sorted(CLOSED_FORMS)}")

    @property
    def defined_at_one(self) -> bool:
        return CLOSED_FORMS[self.name][1]

    def alpha_many(self, ns) -> np.ndarray:
        ns = _as_uint(ns)
        fn, at_one = CLOSED_FORMS[self.name]
        if not at_one and ns.size and ns.min() == 1:
            raise DivergenceError(f"{self.name} is undefined at n = 1")
        return fn(ns)

    def to_json(self) -> dict:
        return {"type": "closed", "name": self.name}


@dataclass(frozen=True)
class FormMoments(MomentSequence):
    """``alpha(n) = [z**kappa(n), 1]`` for a finite-rank Helson form (complex)."""

    spec: object = None  # helson.finiterank.forms.HelsonFormSpec

    real = False

    def alpha_many(self, ns) -> np.ndarray:
        from helson.finiterank.forms import form_alpha

        ns = _as_uint(ns)
        return np.array([form_alpha(self.spec, int(n)) for n in ns], dtype=complex)

    def to_json(self) -> dict:
        return {"type": "form", **self.spec.to_json()}


def alpha(seq: MomentSequence, n: int):
    """The moment ``alpha(n)`` of ``seq``."""
    n = int(n)
    if n < 1:
        raise ContractError("moment index n must be >= 1")
    if n > UINT64_MAX:
        raise IndexOverflowError(f"{n} exceeds the 64-bit range")
    v = seq.alpha_many(np.array([n], dtype=np.uint64))[0]
    return complex(v) if np.iscomplexobj(v) else float(v)


# ---------------------------------------------------------------------------
# zeta values and kernels


def zeta(x: float) -> float:
    """Riemann zeta for real ``x > 1``."""
    if not x > 1:
        raise DomainError(f"zeta(x) needs x > 1, got {x}")
    return float(special.zeta(x))


def zeta_minus_one(x: float) -> float:
    """``zeta(x) - 1`` without cancellation for large ``x``."""
    if not x > 1:
        raise DomainError(f"zeta(x) needs x > 1, got {x}")
    return float(special.zetac(x))


def _mobius(k: int) -> int:
    out = 1
    for _, e in factorize(k):
        if e > 1:
            return 0
        out = -out
    return out


def prime_zeta(x: float) -> float:
    """``sum_p p**(-x)`` over all primes, via ``sum_k mu(k)/k log zeta(kx)``."""
    if not x > 1:
        raise DomainError(f"prime zeta needs x > 1, got {x}")
    total = 0.0
    k = 1
    while True:
        term = math.log1p(zeta_minus_one(k * x)) / k
        mu = _mobius(k)
        total += mu * term
        # log zeta(kx) ~ 2**(-kx); stop once the terms are below rounding
        if term < 1e-18 * abs(total) or k * x > 80:
            return total
        k += 1


_TAIL_DIRECT = 10_000


def prime_zeta_excluding(x: float, exclude: Iterable[int] = ()) -> float:
    """``sum p_j**(-x)`` over prime positions not in ``exclude``."""
    excl = sorted(set(exclude))
    if x > 8:
        # terms fall so fast that a direct sum is exact to rounding
        ps = np.asarray(primes(_TAIL_DIRECT), dtype=float)
        mask = np.ones(ps.size, dtype=bool)
        for j in excl:
            if j <= ps.size:
                mask[j - 1] = False
        terms = ps[mask] ** (-x)
        return float(np.sum(terms[::-1]))
    return prime_zeta(x) - math.fsum(nth_prime(j) ** (-x) for j in excl)


def kernel(a: Point, b: Point) -> complex:
    """Reproducing kernel ``prod_j 1/(1 - a_j conj(b_j))`` of the polydisc."""
    if a.is_bohr and b.is_bohr:
        x = a.s + b.s
        if not x > 1:
            raise DivergenceError(f"kernel of Bohr points diverges for s + t = {x} <= 1")
        return zeta(x)
    if a.is_bohr:
        return np.conj(kernel(b, a))
    out = 1.0
    for j, v in a.coords:
        w = b.coord(j)
        if w == 0:
            continue
        d = 1.0 - v * np.conj(w)
        if d == 0:
            raise DivergenceError(f"kernel is singular at coordinate {j}")
        out = out / d
    return _num(out)


# ---------------------------------------------------------------------------
# JSON


def sequence_from_json(obj: Mapping) -> MomentSequence:
    """Parse ``{"type": ...}`` records into a :class:`MomentSequence`."""
    if not isinstance(obj, Mapping) or "type" not in obj:
        raise ContractError("moment spec must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "discrete":
        atoms = []
        for a in obj.get("atoms", []):
            atoms.append((float(a["w"]), point_from_json(a["point"])))
        return DiscreteMoments(DiscreteMeasure.of(atoms))
    if kind == "halfline":
        return HalfLineMoments(density_from_json(obj["density"]))
    if kind == "multiplicative":
        primes_ = obj.get("primes", {})
        return MultiplicativeMoments.of({int(j): b for j, b in primes_.items()})
    if kind == "closed":
        return ClosedFormMoments(obj["name"])
    if kind == "form":
        from helson.finiterank.forms import HelsonFormSpec

        return FormMoments(HelsonFormSpec.from_json(obj))
    raise ContractError(f"unknown moment spec type {kind!r}")


def point_from_json(obj: Mapping) -> Point:
    if "bohr" in obj:
        return Point.bohr(float(obj["bohr"]))
    if "explicit" in obj:
        coords = []
        for entry in obj["explicit"]:
            if len(entry) == 2:
                coords.append((int(entry[0]), float(entry[1])))
            elif len(entry) == 3:
                coords.append((int(entry[0]), complex(entry[1], entry[2])))
            else:
                raise ContractError("explicit coordinates are [j, re] or [j, re, im]")
        return Point.explicit(coords)
    raise ContractError("point must have 'explicit' or 'bohr'")


def density_from_json(obj) -> HalfLineDensity:
    if obj == "lebesgue":
        return HalfLineDensity.lebesgue()
    if obj == "ramp":
        return HalfLineDensity.ramp()
    if isinstance(obj, Mapping) and "poly" in obj:
        a, b = obj.get("interval", [0.5, None])
        return HalfLineDensity.poly(
            obj["poly"], a, math.inf if b is None else b, obj.get("lowest_power", 0)
        )
    raise ContractError(f"unknown density {obj!r}")
