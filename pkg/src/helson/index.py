"""Prime enumeration and the bijection n <-> kappa.

Every positive integer is ``n = p_1**k_1 * p_2**k_2 * ...`` with finitely many
non-zero exponents; :class:`MultiIndex` stores the non-zero pairs
``(j, k_j)`` with ``j`` the 1-based position of the prime.
"""

from __future__ import annotations

import bisect
import math
import threading
from array import array
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

UINT64_MAX = 2**64 - 1

# Largest n factorized through the smallest-prime-factor table; above it
# factorization falls back to trial division over the prime table.
_SPF_CAP = 1 << 22
# The prime table never grows past this bound; prime factors above it (and
# positions beyond the last tabulated prime) raise IndexRangeError.
SIEVE_CAP = 1 << 26


class IndexOverflowError(OverflowError):
    """An integer left the 64-bit unsigned range."""


class IndexRangeError(ValueError):
    """A prime factor is too large to locate in the prime sequence."""


@dataclass(frozen=True, slots=True)
class MultiIndex:
    """Finitely supported exponent vector, stored as sorted ``(j, k_j)`` pairs."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        prev = 0
        for j, k in self.entries:
            if j <= prev:
                raise ValueError("prime positions must be strictly increasing and >= 1")
            if k < 1:
                raise ValueError("exponents must be >= 1 (omit zero exponents)")
            prev = j

    @classmethod
    def from_dict(cls, exps: dict[int, int]) -> MultiIndex:
        if any(k < 0 for k in exps.values()):
            raise ValueError("exponents must be >= 0")
        return cls(tuple(sorted((j, k) for j, k in exps.items() if k)))

    @classmethod
    def unit(cls, j: int, k: int = 1) -> MultiIndex:
        return cls(((j, k),))

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, j: int) -> int:
        """Exponent at prime position ``j`` (0 when absent)."""
        for jj, k in self.entries:
            if jj == j:
                return k
            if jj > j:
                break
        return 0

    def __add__(self, other: MultiIndex) -> MultiIndex:
        return multiindex_add(self, other)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    @property
    def degree(self) -> int:
        """Total degree ``|kappa|``."""
        return sum(k for _, k in self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.entries)

    def __repr__(self) -> str:
        return f"MultiIndex({dict(self.entries)})"


_new = object.__new__
_set_entries = MultiIndex.__dict__["entries"].__set__


def _trusted(entries: tuple[tuple[int, int], ...]) -> MultiIndex:
    # skips validation for entries built internally
    obj = _new(MultiIndex)
    _set_entries(obj, entries)
    return obj


EMPTY = MultiIndex()


class _PrimeTable:
    """Append-only prime table grown by a segmented sieve.

    Readers always see a complete snapshot: growth builds new containers and
    swaps the references under a lock, never mutating a published one.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self.primes: list[int] = [2, 3, 5, 7, 11, 13]
        self.limit = 16  # every prime below `limit` is in `primes`
        self.spf = ([], array("l"))
        self.spf_limit = 0
        self._arr = None

    def ensure_count(self, count: int) -> list[int]:
        primes = self.primes
        if len(primes) >= count:
            return primes
        with self._lock:
            while len(self.primes) < count:
                if self.limit > SIEVE_CAP:
                    raise IndexRangeError(f"prime position {count} is beyond the table")
                self._extend(min(2 * self.limit, SIEVE_CAP + 1))
            return self.primes

    def ensure_limit(self, bound: int) -> list[int]:
        """Make sure every prime ``<= bound`` is tabulated."""
        bound = min(bound, SIEVE_CAP)
        if bound < self.limit:
            return self.primes
        with self._lock:
            if bound >= self.limit:
                self._extend(min(max(bound + 1, 2 * self.limit), SIEVE_CAP + 1))
            return self.primes

    def _extend(self, new_limit: int):
        lo, hi = self.limit, new_limit
        seg = np.ones(hi - lo, dtype=bool)
        for p in self.primes:
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            seg[start - lo :: p] = False
        # the segment may contain primes whose squares still fall inside it
        root = math.isqrt(hi - 1)
        for off in range(0, max(0, root - lo + 1)):
            if seg[off]:
                p = lo + off
                seg[p * p - lo :: p] = False
        found = (np.nonzero(seg)[0] + lo).tolist()
        self.primes = self.primes + found
        self.limit = hi

    def prime_array(self) -> np.ndarray:
        """The current prime table as an int64 array (cached per table size)."""
        arr, primes = self._arr, self.primes
        if arr is None or arr.size != len(primes):
            arr = np.array(primes, dtype=np.int64)
            self._arr = arr
        return arr

    def spf_table(self, bound: int):
        """Factor tables covering every ``n <= bound`` (see :func:`_build_spf`)."""
        if bound <= self.spf_limit:
            return self.spf
        with self._lock:
            if bound > self.spf_limit:
                size = 1 << max(16, (bound).bit_length())
                size = min(size, _SPF_CAP + 1)
                size = max(size, bound + 1)
                self.ensure_limit(size)
                self.spf = _build_spf(size)
                self.spf_limit = size - 1
            return self.spf


def _build_spf(size: int) -> tuple[list, array]:
    """Tables ``(pair, rest)`` with ``n = p_j**k * rest``, ``pair[n] = (j, k)``.

    ``p_j`` is the least prime factor of ``n``. Equal pairs share one tuple
    object, which keeps the table small and lets :func:`compose` memoize on them.
    """
    is_p = np.ones(size, dtype=bool)
    is_p[:2] = False
    root = math.isqrt(size - 1)
    for p in range(2, root + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    pi = np.cumsum(is_p)
    pos = np.where(is_p, pi, 0)
    lp = np.where(is_p, np.arange(size), 0)
    # larger primes first so that smaller ones overwrite their multiples
    for p in np.nonzero(is_p[: root + 1])[0][::-1]:
        pos[p * p :: p] = pi[p]
        lp[p * p :: p] = p
    rest = np.arange(size)
    rest[2:] //= lp[2:]
    k = np.zeros(size, dtype=np.int64)
    k[2:] = 1
    # strip further powers of the least prime
    active = np.nonzero(rest % np.maximum(lp, 1) == 0)[0]
    active = active[active >= 2]
    while active.size:
        rest[active] //= lp[active]
        k[active] += 1
        active = active[rest[active] % lp[active] == 0]

    interned: dict[tuple[int, int], tuple[int, int]] = {}
    pairs = [interned.setdefault(jk, jk) for jk in zip(pos.tolist(), k.tolist())]
    rest_arr = array("l")
    rest_arr.frombytes(rest.astype(np.dtype("l")).tobytes())
    return pairs, rest_arr


_TABLE = _PrimeTable()


def primes(count: int) -> list[int]:
    """First ``count`` primes in increasing order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _TABLE.ensure_count(count)[:count]


def nth_prime(j: int) -> int:
    """The prime at 1-based position ``j``."""
    if j < 1:
        raise ValueError("prime positions are 1-based")
    return _TABLE.ensure_count(j)[j - 1]


def prime_position(p: int) -> int:
    """1-based position of the prime ``p``."""
    if p > SIEVE_CAP:
        raise IndexRangeError(f"{p} is beyond the prime table (bound {SIEVE_CAP})")
    table = _TABLE.ensure_limit(p)
    i = bisect.bisect_left(table, p)
    if i == len(table) or table[i] != p:
        raise ValueError(f"{p} is not prime")
    return i + 1


def primes_up_to(bound: int) -> list[int]:
    if bound > SIEVE_CAP:
        raise IndexRangeError(f"prime tables stop at {SIEVE_CAP}")
    table = _TABLE.ensure_limit(bound)
    return table[: bisect.bisect_right(table, bound)]


def factorize(n: int) -> MultiIndex:
    """The multi-index ``kappa`` with ``n = p**kappa``."""
    tab = _TABLE
    if n > tab.spf_limit:
        if n > UINT64_MAX:
            raise IndexOverflowError(f"{n} exceeds the 64-bit range")
        if n > _SPF_CAP:
            return _trial_division(n)
        tab.spf_table(n)
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    pair, rest = tab.spf
    out = []
    append = out.append
    while n > 1:
        append(pair[n])
        n = rest[n]
    obj = _new(MultiIndex)
    _set_entries(obj, tuple(out))
    return obj


def _trial_division(n: int) -> MultiIndex:
    """Factor ``n`` above the table: small primes by hand, then split the cofactor.

    Cofactors inside the table finish there, primes are recognized by
    :func:`is_prime`, and only composite cofactors pay for a vectorized
    divisibility scan over the prime table.
    """
    exps: dict[int, int] = {}
    table = _TABLE.ensure_limit(min(math.isqrt(n), SIEVE_CAP))
    j = 0
    for j, p in enumerate(table[:_SMALL_PRIMES]):
        if p * p > n:
            break
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            exps[j + 1] = k
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m <= _TABLE.spf_limit:
            pair, rest = _TABLE.spf
            while m > 1:
                jj, k = pair[m]
                exps[jj] = exps.get(jj, 0) + k
                m = rest[m]
        elif is_prime(m):
            if m > SIEVE_CAP:
                raise IndexRangeError(f"{m} is a prime factor beyond {SIEVE_CAP}")
            pos = prime_position(m)
            exps[pos] = exps.get(pos, 0) + 1
        else:
            i = _find_divisor(m, j)
            p, k = table[i], 0
            while m % p == 0:
                m //= p
                k += 1
            exps[i + 1] = exps.get(i + 1, 0) + k
            stack.append(m)
    return _trusted(tuple(sorted(exps.items())))


# primes tried one by one before the cofactor is split
_SMALL_PRIMES = 168


def _find_divisor(m: int, start: int) -> int:
    """Table index of the least prime dividing the composite ``m``, scanning in growing chunks."""
    arr = _TABLE.prime_array()
    stop = int(np.searchsorted(arr, min(math.isqrt(m), SIEVE_CAP), side="right"))
    mm = np.uint64(m) if m > 2**63 - 1 else np.int64(m)
    vals = arr.astype(np.uint64) if m > 2**63 - 1 else arr
    chunk = 512
    while start < stop:
        hi = min(start + chunk, stop)
        hits = np.flatnonzero(mm % vals[start:hi] == 0)
        if hits.size:
            return start + int(hits[0])
        start, chunk = hi, chunk * 2
    raise IndexRangeError(f"{m} has no prime factor up to {SIEVE_CAP}")


def compose(kappa: MultiIndex | Iterable[tuple[int, int]]) -> int:
    """``p**kappa``; raises :class:`IndexOverflowError` past 64 bits."""
    n = 1
    if type(kappa) is MultiIndex:
        # validated entries: j >= 1, k >= 1
        rows = _POWER_ROWS
        for j, k in kappa.entries:
            try:
                n *= rows[j][k]
            except IndexError:
                n *= _prime_power(j, k)
    else:
        for j, k in kappa:
            n *= _prime_power(j, k)
            if n > UINT64_MAX:
                break
    if n > UINT64_MAX:
        raise IndexOverflowError("product exceeds the 64-bit range")
    return n


# rows[j] lists every power p_j**k within 64 bits; rows for small positions only
_POWER_ROWS: list[list[int]] = [[1]]
_POWER_ROWS_CAP = 1 << 17


def _power_row(p: int) -> list[int]:
    row, q = [1], p
    while q <= UINT64_MAX:
        row.append(q)
        q *= p
    return row


def _prime_power(j: int, k: int) -> int:
    # 2**64 already overflows, so k <= 63 keeps the power cheap
    if k > 63:
        raise IndexOverflowError(f"p_{j}^{k} exceeds the 64-bit range")
    if j < 1 or k < 0:
        raise ValueError("positions are >= 1 and exponents >= 0")
    rows = _POWER_ROWS
    if j < _POWER_ROWS_CAP and j >= len(rows):
        with _TABLE._lock:
            ps = _TABLE.ensure_count(min(max(j, 2 * len(rows)), _POWER_ROWS_CAP - 1))
            rows.extend(_power_row(p) for p in ps[len(rows) - 1 :])
    if j < len(rows):
        row = rows[j]
        if k >= len(row):
            raise IndexOverflowError(f"p_{j}^{k} exceeds the 64-bit range")
        return row[k]
    q = nth_prime(j) ** k
    if q > UINT64_MAX:
        raise IndexOverflowError(f"p_{j}^{k} exceeds the 64-bit range")
    return q


def multiindex_add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    """Componentwise sum; corresponds to multiplying the integers."""
    if not a.entries:
        return b
    if not b.entries:
        return a
    out = []
    ea, eb = a.entries, b.entries
    i = k = 0
    while i < len(ea) and k < len(eb):
        ja, ka = ea[i]
        jb, kb = eb[k]
        if ja == jb:
            out.append((ja, ka + kb))
            i += 1
            k += 1
        elif ja < jb:
            out.append(ea[i])
            i += 1
        else:
            out.append(eb[k])
            k += 1
    out.extend(ea[i:])
    out.extend(eb[k:])
    return _trusted(tuple(out))


def omega_big(n: int) -> int:
    """Number of prime factors of ``n`` counted with multiplicity."""
    return factorize(n).degree


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit integers."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
