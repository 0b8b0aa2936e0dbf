import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helson.errors import ContractError
from helson.finiterank.polynomial import (
    Direction,
    SparsePolynomial,
    dir_derivative,
    poly_eval,
    poly_mul,
)
from helson.index import MultiIndex, factorize
from helson.moments import Point
from strategies import random_poly

z1, z2 = SparsePolynomial.var(1), SparsePolynomial.var(2)
ONE = SparsePolynomial.const()


def test_mul_examples():
    assert poly_mul(z1, z2) == SparsePolynomial.monomial(MultiIndex.from_dict({1: 1, 2: 1}))
    assert poly_mul(z1 + z2, ONE) == z1 + z2
    sq = poly_mul(ONE + z1, ONE + z1)
    assert sq == SparsePolynomial.from_dict({MultiIndex(): 1, MultiIndex.unit(1): 2, MultiIndex.unit(1, 2): 1})


def test_derivative_examples():
    assert dir_derivative(poly_mul(z1, z1), Direction.unit(1)) == 2 * z1
    assert dir_derivative(SparsePolynomial.const(5), Direction.unit(1)).is_zero
    assert dir_derivative(poly_mul(z1, z2), Direction.of({1: 1, 2: 1})) == z1 + z2


def test_eval_examples():
    assert poly_eval(z1 + z2, Point.explicit({1: 0.5, 2: 1 / 3})) == pytest.approx(5 / 6)
    assert poly_eval(SparsePolynomial.monomial(factorize(6)), Point.bohr(1.0)) == pytest.approx(1 / 6)
    assert poly_eval(ONE, Point.bohr(0.7)) == 1


def test_zero_direction_rejected():
    with pytest.raises(ContractError):
        Direction.of({1: 0.0})


@given(st.integers(0, 2**31))
def test_mul_commutative_exactly(seed):
    rng = random.Random(seed)
    f, g = random_poly(rng), random_poly(rng)
    assert poly_mul(f, g) == poly_mul(g, f)


@given(st.integers(0, 2**31))
def test_leibniz_rule(seed):
    rng = random.Random(seed)
    f, g = random_poly(rng), random_poly(rng)
    c = Direction.of({1: complex(rng.randint(-2, 2), 1), 3: 2})
    lhs = dir_derivative(poly_mul(f, g), c)
    rhs = poly_mul(dir_derivative(f, c), g) + poly_mul(f, dir_derivative(g, c))
    assert lhs == rhs


@given(st.integers(0, 2**31))
def test_eval_is_ring_homomorphism(seed):
    rng = random.Random(seed)
    f, g = random_poly(rng), random_poly(rng)
    pt = Point.explicit({1: 0.5, 2: -0.25, 3: 0.125})  # dyadic values keep the products exact
    assert poly_eval(poly_mul(f, g), pt) == poly_eval(f, pt) * poly_eval(g, pt)


def test_derivatives_commute():
    rng = random.Random(9)
    f = random_poly(rng, terms=8)
    a, b = Direction.of({1: 2, 2: -1}), Direction.of({2: 3, 3: 1j})
    assert dir_derivative(dir_derivative(f, a), b) == dir_derivative(dir_derivative(f, b), a)
