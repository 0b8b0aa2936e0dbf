import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helson.index import (
    EMPTY,
    SIEVE_CAP,
    UINT64_MAX,
    IndexOverflowError,
    IndexRangeError,
    MultiIndex,
    compose,
    factorize,
    is_prime,
    multiindex_add,
    nth_prime,
    omega_big,
    prime_position,
    primes,
    primes_up_to,
)


def trial_factor(n):
    """Oracle: plain trial division into {prime: exponent}."""
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_small_examples():
    assert factorize(1) == EMPTY
    assert factorize(12) == MultiIndex.from_dict({1: 2, 2: 1})
    assert compose(MultiIndex.from_dict({3: 1})) == 5
    assert factorize(2**63) == MultiIndex.from_dict({1: 63})


def test_first_primes():
    assert primes(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert nth_prime(1000) == 7919
    assert prime_position(7919) == 1000
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.integers(min_value=1, max_value=10**10))
def test_factorize_matches_trial_division(n):
    expected = trial_factor(n)
    if max(expected, default=1) > SIEVE_CAP:
        with pytest.raises(IndexRangeError):
            factorize(n)
        return
    kappa = factorize(n)
    assert {nth_prime(j): k for j, k in kappa} == expected
    assert compose(kappa) == n


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_homomorphism(a, b):
    assert factorize(a * b) == multiindex_add(factorize(a), factorize(b))
    assert factorize(a * b) == factorize(a) + factorize(b)


def test_largest_uint64():
    n = UINT64_MAX
    assert compose(factorize(n)) == n
    assert omega_big(n) == sum(trial_factor(n).values())


def test_errors():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(IndexOverflowError):
        factorize(UINT64_MAX + 1)
    with pytest.raises(IndexOverflowError):
        compose(MultiIndex.from_dict({1: 64}))
    with pytest.raises(IndexOverflowError):
        compose(MultiIndex.from_dict({1: 40, 2: 20}))
    # a prime beyond the position table
    big = 18446744073709551557
    assert is_prime(big)
    with pytest.raises(IndexRangeError):
        factorize(big)
    with pytest.raises(IndexRangeError):
        nth_prime(SIEVE_CAP)


def test_multiindex_normal_form():
    a = MultiIndex.from_dict({3: 0, 1: 2})
    assert a == MultiIndex.from_dict({1: 2})
    assert a.degree == 2 and a.support == (1,)
    with pytest.raises(ValueError):
        MultiIndex.from_dict({0: 1})
    with pytest.raises(ValueError):
        MultiIndex.from_dict({1: -1})


def test_is_prime_against_sieve():
    ps = set(primes_up_to(10**4))
    assert all(is_prime(n) == (n in ps) for n in range(10**4 + 1))
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randrange(2, 10**9)
        assert is_prime(n) == (trial_factor(n) == {n: 1})
