import json
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helson.errors import ContractError
from helson.finiterank.forms import (
    FactorizableOp,
    HelsonFormSpec,
    apply_functional,
    boundedness_check,
    commutation_terms,
    dirichlet_derivative,
    evaluation_plus_derivative,
    form_alpha,
    form_eval,
    form_rank,
    graded_norm,
    graded_pieces,
    graded_total,
    kronecker_1d,
    smooth_numbers,
    symbol_eval,
    symbol_taylor,
)
from helson.finiterank.polynomial import Direction, SparsePolynomial, poly_eval, poly_mul
from helson.index import MultiIndex, compose, factorize
from helson.moments import DiscreteMeasure, DiscreteMoments, FormMoments, Point, sequence_from_json, zeta
from strategies import random_poly, random_spec

ONE = SparsePolynomial.const()
z1 = SparsePolynomial.var(1)
ORIGIN = Point.origin()
D1_AT_0 = HelsonFormSpec(((FactorizableOp(1.0, (Direction.unit(1),)), ORIGIN),))


def test_form_eval_examples():
    pm = HelsonFormSpec.point_mass(Point.explicit({1: 0.3}))
    assert form_eval(pm, ONE, ONE) == 1
    assert form_eval(D1_AT_0, z1, ONE) == 1
    assert form_eval(D1_AT_0, z1, z1) == 0
    kd = kronecker_1d([0.5], [1])
    assert form_eval(kd, ONE, ONE) == 1
    assert form_eval(kd, z1, ONE) == 0.5 + 1


def test_form_alpha_examples():
    pm = HelsonFormSpec.point_mass(Point.explicit({1: 0.5}))
    assert [form_alpha(pm, 2**k) for k in range(5)] == [2.0**-k for k in range(5)]
    assert form_alpha(pm, 3) == 0
    assert form_alpha(D1_AT_0, 2) == 1
    assert all(form_alpha(D1_AT_0, n) == 0 for n in range(3, 50))


@pytest.mark.parametrize("order", [1, 2, 3, 4])
@pytest.mark.parametrize("rho", [0.75, 1.0, 2.5])
def test_dirichlet_derivative_moments(order, rho):
    """Oracle: the order-th s-derivative of n**(-s) is (-log n)**order n**(-s)."""
    spec = dirichlet_derivative(order, rho, 3)
    for n in (2, 3, 5, 6, 12, 30, 45, 360):
        expected = (-math.log(n)) ** order * n ** (-rho)
        assert form_alpha(spec, n) == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_point_mass_matches_discrete_moments():
    pts = [(1.0, Point.explicit({1: 0.5, 2: -0.3})), (2.5, Point.explicit({3: 0.7})), (0.5, Point.bohr(1.3))]
    spec = HelsonFormSpec(tuple((FactorizableOp(w), p) for w, p in pts))
    seq = DiscreteMoments(DiscreteMeasure.of(pts))
    ns = np.arange(1, 400)
    np.testing.assert_allclose(FormMoments(spec).alpha_many(ns).real, seq.alpha_many(ns), rtol=1e-13, atol=1e-16)


@given(st.integers(0, 2**31))
def test_form_symmetry_and_helson_property(seed):
    rng = random.Random(seed)
    spec = random_spec(rng)
    f, g = random_poly(rng, max_deg=2), random_poly(rng, max_deg=2)
    assert form_eval(spec, f, g) == form_eval(spec, g, f)
    assert form_eval(spec, f, g) == form_eval(spec, poly_mul(f, g), ONE)


@given(st.integers(0, 2**31))
def test_commutation_formula(seed):
    rng = random.Random(seed)
    spec = random_spec(rng, max_order=3)
    f1, f2 = random_poly(rng, max_deg=2), random_poly(rng, max_deg=2)
    for op, pt in spec.terms:
        lhs = poly_eval(op.apply(poly_mul(f1, f2)), pt)
        v, lower = commutation_terms(op, f1, pt)
        assert all(b.order < max(op.order, 1) for b in lower)
        rhs = v * poly_eval(op.apply(f2), pt) + sum(poly_eval(b.apply(f2), pt) for b in lower)
        assert rhs == pytest.approx(lhs, rel=1e-10, abs=1e-10)


@given(st.integers(0, 2**31))
def test_graded_decomposition(seed):
    rng = random.Random(seed)
    spec = random_spec(rng, max_order=3)
    f = random_poly(rng, max_deg=3)
    pieces = graded_pieces(spec)
    total = sum(apply_functional(p, f) for p in pieces.values())
    assert total == pytest.approx(apply_functional(spec, f), rel=1e-12, abs=1e-12)


def test_kernel_is_ideal():
    """Elements of the kernel found on the monomial basis stay in it after multiplication."""
    spec = evaluation_plus_derivative(Point.explicit({1: 0.5, 2: 0.25}), Direction.of({1: 1.0, 2: 2.0}))
    mons = smooth_numbers(spec.variables, 64)
    F = np.array([[form_alpha(spec, a * b) for b in mons] for a in mons])
    _, sv, Vh = np.linalg.svd(F)
    rng = random.Random(0)
    null = Vh[int(np.sum(sv > 1e-9 * sv[0])):].conj()
    for row in null[:5]:
        f = SparsePolynomial({factorize(n): c for n, c in zip(mons, row)})
        for _ in range(3):
            h = random_poly(rng, nvars=2, terms=3, max_deg=2)
            fh = poly_mul(f, h)
            for m in mons[:10]:
                assert abs(form_eval(spec, fh, SparsePolynomial.monomial(factorize(m)))) < 1e-8


def test_rank_examples():
    r = form_rank(HelsonFormSpec.point_mass(Point.explicit({1: 0.5, 2: -0.3})))
    assert (r.rank, r.stabilized) == (1, True)
    r = form_rank(evaluation_plus_derivative(Point.explicit({1: 0.5, 2: 0.25}), Direction.of({1: 1.0, 2: 2.0})))
    assert (r.rank, r.stabilized) == (2, True)
    r = form_rank(kronecker_1d([0.5, -0.4], [1, 1]))
    assert (r.rank, r.stabilized) == (4, True)
    assert form_rank(kronecker_1d([0.5, -1 / 3], [1, 2])).rank == 5
    with pytest.raises(ContractError):
        form_rank(D1_AT_0, 0)


def test_rank_unstabilized_is_flagged():
    spec = dirichlet_derivative(2, 1.0, 6)
    r = form_rank(spec, 2, max_monomials=8)
    assert not r.stabilized


def test_graded_norm_examples():
    assert graded_norm(D1_AT_0, 1).value == 1
    b1 = HelsonFormSpec.point_mass(Point.bohr(1.0))
    assert graded_norm(b1, 0).value == 1
    # m = 1: sum over primes p**-2, the prime zeta value
    assert graded_norm(b1, 1).value == pytest.approx(0.45224742004106549850, rel=1e-12)
    assert graded_total(b1).total == pytest.approx(zeta(2), abs=1e-8)
    assert graded_norm(HelsonFormSpec.point_mass(Point.bohr(0.4)), 1).divergent


def test_graded_norm_explicit_brute_force():
    """Oracle: enumerate |kappa| = m over the active variables directly."""
    spec = evaluation_plus_derivative(Point.explicit({1: 0.5, 2: -0.25}), Direction.of({2: 1.0, 3: 0.5}))
    for m in range(4):
        brute = 0.0
        for a in range(m + 1):
            for b in range(m + 1 - a):
                kappa = MultiIndex.from_dict({1: a, 2: b, 3: m - a - b})
                brute += abs(form_alpha(spec, compose(kappa))) ** 2
        assert graded_norm(spec, m).value == pytest.approx(brute, rel=1e-13)


def test_graded_piece_option():
    spec = evaluation_plus_derivative(Point.explicit({1: 0.5}), Direction.unit(1))
    assert graded_norm(spec, 1, piece=True).value == 1.0
    assert graded_norm(spec, 1).value == pytest.approx((0.5 + 1) ** 2)


def test_boundedness_examples():
    ex = boundedness_check(HelsonFormSpec.point_mass(Point.explicit({1: 0.9, 5: -0.5})))
    assert ex.bounded and ex.consistent
    assert boundedness_check(HelsonFormSpec.point_mass(Point.bohr(1.0))).bounded
    b = boundedness_check(HelsonFormSpec.point_mass(Point.bohr(0.4)))
    assert not b.bounded and b.consistent
    d = boundedness_check(dirichlet_derivative(1, 0.45, 2))
    assert not d.bounded and d.consistent


def test_symbol_examples():
    half = Point.explicit({1: 0.5})
    assert symbol_eval(HelsonFormSpec.point_mass(half), half) == pytest.approx(4 / 3)
    assert symbol_eval(HelsonFormSpec(), half) == 0
    with pytest.raises(ContractError):
        symbol_eval(HelsonFormSpec.point_mass(Point.bohr(0.4)), half)


@given(st.integers(0, 2**31))
def test_symbol_taylor_is_conjugated_alpha(seed):
    rng = random.Random(seed)
    spec = random_spec(rng)
    for _ in range(5):
        kappa = MultiIndex.from_dict({j: rng.randint(0, 3) for j in (1, 2, 3, 4)})
        assert symbol_taylor(spec, kappa) == pytest.approx(form_alpha(spec, compose(kappa)).conjugate(),
                                                           rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_symbol_value_against_series(seed):
    """Oracle: sum conj(alpha(n)) w**kappa(n) over 3-smooth n, geometric tail below 1e-12."""
    rng = random.Random(seed)
    spec = random_spec(rng, nvars=2, bohr_ok=False)
    w = Point.explicit({1: complex(0.2, 0.1), 2: -0.15})
    series = sum(form_alpha(spec, n).conjugate() * w.monomial(factorize(n)) for n in smooth_numbers([1, 2], 2**45))
    assert symbol_eval(spec, w) == pytest.approx(series, rel=1e-9, abs=1e-10)


def test_symbol_with_bohr_point():
    """Point mass at Bohr(s) against an explicit w: the kernel is a finite product."""
    spec = HelsonFormSpec.point_mass(Point.bohr(1.0), weight=2.0)
    w = Point.explicit({1: 0.5, 2: 0.25})
    expected = 2.0 / ((1 - 0.5 / 2) * (1 - 0.25 / 3))
    assert symbol_eval(spec, w) == pytest.approx(expected, rel=1e-14)


def test_spec_json_round_trip():
    spec = dirichlet_derivative(2, 0.8, 2) + kronecker_1d([0.5 + 0.1j], [1])
    obj = json.loads(json.dumps(spec.to_json()))
    assert HelsonFormSpec.from_json(obj) == spec
    seq = sequence_from_json({"type": "form", **obj})
    assert seq.alpha_many([6])[0] == pytest.approx(form_alpha(spec, 6))
