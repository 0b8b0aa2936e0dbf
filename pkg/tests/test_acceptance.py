"""Acceptance suite: one test per criterion, each timed and reported on one line."""

import math
import random
import time

import numpy as np
import pytest

from helson.diagnostics import gram_dual, helson_decay
from helson.experiments import (
    counterexample_report,
    CounterexampleConfig,
    hankel_norm_study,
    mult_hilbert_study,
)
from helson.finiterank.forms import (
    HelsonFormSpec,
    boundedness_check,
    dirichlet_derivative,
    evaluation_plus_derivative,
    form_alpha,
    form_rank,
    graded_norm,
    graded_total,
    kronecker_1d,
    symbol_taylor,
)
from helson.finiterank.polynomial import Direction
from helson.finiterank.tensors import canonicalize, sym
from helson.index import MultiIndex, compose, factorize, multiindex_add
from helson.matrix import build_helson
from helson.moments import (
    ClosedFormMoments,
    DiscreteMeasure,
    DiscreteMoments,
    HalfLineDensity,
    HalfLineMoments,
    Point,
    zeta,
)
from helson.spectral import eig_dense
from strategies import random_spec, random_tensor, rngs


@pytest.fixture
def report(capsys):
    """Run the body, time it, print one PASS/FAIL line and re-raise on failure."""

    def _report(number, budget, body):
        t0 = time.perf_counter()
        err = None
        try:
            detail = body()
        except AssertionError as exc:
            err, detail = exc, str(exc).splitlines()[0] if str(exc) else "assertion failed"
        elapsed = time.perf_counter() - t0
        ok = err is None and elapsed < budget
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:2d}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s of {budget}s) {detail}")
        if err is not None:
            raise err
        assert elapsed < budget, f"criterion {number} took {elapsed:.1f}s, budget {budget}s"

    return _report


def test_01_bijection(report):
    def body():
        for n in range(1, 10**6 + 1):
            if compose(factorize(n)) != n:
                raise AssertionError(f"compose(factorize({n})) != {n}")
        rng = random.Random(1)
        for _ in range(10**4):
            a, b = rng.randint(1, 10**6), rng.randint(1, 10**6)
            assert factorize(a * b) == multiindex_add(factorize(a), factorize(b)), (a, b)
        return "identity on 1..1e6, 1e4 homomorphism pairs"

    report(1, 5, body)


def test_02_lebesgue_moments(report):
    def body():
        rng = np.random.default_rng(2)
        ns = rng.integers(2, 10**6 + 1, size=1000).astype(np.uint64)
        got = HalfLineMoments(HalfLineDensity.lebesgue()).alpha_many(ns)
        nf = ns.astype(float)
        err = float(np.max(np.abs(got - nf**-0.5 / np.log(nf))))
        assert err <= 1e-10, f"max error {err:.2e}"
        return f"max abs error {err:.1e}"

    report(2, 10, body)


ATOMS = [(1.0, {1: 0.5}), (0.7, {1: -0.3, 2: 0.3}), (1.3, {1: 0.2, 2: 0.25, 3: 0.2})]


def gram_oracle(atoms):
    """k x k matrix sqrt(w_i w_j) prod_j 1/(1 - a_j b_j), written out directly."""
    k = len(atoms)
    G = np.zeros((k, k))
    for i, (wi, a) in enumerate(atoms):
        for j, (wj, b) in enumerate(atoms):
            prod = 1.0
            for var in set(a) & set(b):
                prod /= 1 - a[var] * b[var]
            G[i, j] = math.sqrt(wi * wj) * prod
    return np.linalg.eigvalsh(G)


def test_03_gram_dual(report):
    def body():
        target = gram_oracle(ATOMS)
        measure = DiscreteMeasure.of([(w, Point.explicit(c)) for w, c in ATOMS])
        g = gram_dual(measure).eigenvalues
        assert np.allclose(np.sort(g), target, rtol=1e-13), (g, target)
        seq = DiscreteMoments(measure)
        tops = []
        for N in (256, 1024, 4096):
            ev = eig_dense(build_helson(seq, N).A, vectors=False).eigenvalues
            tops.append(np.sort(ev)[-3:])
        errs = [float(np.max(np.abs(t - target))) for t in tops]
        assert errs[-1] <= 1e-6, f"error at N=4096 {errs[-1]:.2e}"
        for lo, hi in zip(tops, tops[1:]):
            assert np.all(lo <= hi + 1e-14) and np.all(hi <= target + 1e-12), "not monotone from below"
        return "errors " + ", ".join(f"{e:.1e}" for e in errs) + " at N=256,1024,4096"

    report(3, 120, body)


def test_04_exact_ranks(report):
    def body():
        cases = [("point mass", HelsonFormSpec.point_mass(Point.explicit({1: 0.5, 2: -0.3})), 1),
                 ("evaluation plus derivative",
                  evaluation_plus_derivative(Point.explicit({1: 0.5, 2: 0.25}), Direction.of({1: 1.0, 2: 2.0})), 2)]
        cases += [(f"Dirichlet derivative n={n}", dirichlet_derivative(n, 1.0, 4), n + 1) for n in range(1, 5)]
        cases.append(("Kronecker k=(1,2)", kronecker_1d([0.5, -1 / 3], [1, 2]), 5))
        got = []
        for name, spec, expected in cases:
            r = form_rank(spec)
            assert r.rank == expected and r.stabilized, f"{name}: rank {r.rank} stabilized {r.stabilized}"
            got.append(r.rank)
        return f"ranks {got}"

    report(4, 60, body)


def test_05_boundedness_dichotomy(report):
    def body():
        one = HelsonFormSpec.point_mass(Point.bohr(1.0))
        b = boundedness_check(one)
        total = graded_total(one)
        assert b.bounded and b.consistent and not total.divergent
        err = abs(total.total - zeta(2))
        assert err <= 1e-8, f"graded total off by {err:.1e}"
        low = HelsonFormSpec.point_mass(Point.bohr(0.4))
        b = boundedness_check(low)
        assert not b.bounded and b.consistent
        assert graded_norm(low, 1).divergent and graded_total(low).divergent
        return f"s=1 total error {err:.1e}; s=0.4 divergent"

    report(5, 30, body)


def test_06_symbol_consistency(report):
    def body():
        rng = random.Random(6)
        specs = []
        while len(specs) < 5:
            spec = random_spec(rng, nvars=3, max_terms=3, max_order=2)
            if boundedness_check(spec).bounded:
                specs.append(spec)
        worst = 0.0
        for spec in specs:
            for _ in range(50):
                kappa = MultiIndex.from_dict({j: rng.randint(0, 4) for j in (1, 2, 3, 4)})
                a = symbol_taylor(spec, kappa)
                b = form_alpha(spec, compose(kappa)).conjugate()
                worst = max(worst, abs(a - b) / max(1.0, abs(b)))
        assert worst <= 1e-12, f"worst difference {worst:.1e}"
        return f"worst difference {worst:.1e} over 250 indices"

    report(6, 30, body)


def test_07_decay_diagnostics(report):
    def body():
        r = helson_decay(ClosedFormMoments("multiplicative-hilbert"))
        assert abs(r.sup - 1) <= 1e-15 and r.verdict == "bounded", (r.sup, r.verdict)
        r2 = helson_decay(ClosedFormMoments("sqrt-log"))
        assert r2.verdict == "unbounded", r2.verdict
        return f"sup {r.sup!r} bounded; sqrt-log sup {r2.sup:.3g} unbounded"

    report(7, 10, body)


def test_08_norm_property_suite(report):
    def body():
        sizes = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
        parts = []
        for name in ("hilbert", "ramp"):
            rep = hankel_norm_study(name, sizes)
            assert all(rep["checks"].values()), (name, rep["checks"])
            parts.append(f"{name} {rep['lam_max'][-1]:.4f}->{rep['extrapolated_limit']:.4f} (norm {rep['target_norm']:.4f})")
        mh = mult_hilbert_study([16, 64, 256, 1024, 4096], strict=False)
        assert all(mh["checks"].values()), mh["checks"]
        for row in mh["rows"]:
            spec = row.get("spectrum", [row["lam_min"], row["lam_max"]])
            assert min(spec) >= -1e-10 and max(spec) < math.pi
        parts.append(f"mult-hilbert lam_max {mh['rows'][-1]['lam_max']:.4f} < pi")
        return "; ".join(parts)

    report(8, 180, body)


def test_09_counterexample(report):
    def body():
        rep = counterexample_report(CounterexampleConfig(N=8))
        x = rep["xnorm"]["sup"]
        assert x <= 1 + 1e-12 and x >= 0.999, x
        assert rep["tensor"]["abs_error"] <= 1e-10, rep["tensor"]
        targets = [r["target"] for r in rep["ratios"]]
        assert all(b > a for a, b in zip(targets, targets[1:]))
        assert targets[-1] == pytest.approx((math.pi / 2) ** 8)
        return f"xnorm {x:.12f}, tensor error {rep['tensor']['abs_error']:.1e}, target(8) {targets[-1]:.3f}"

    report(9, 120, body)


def test_10_tensor_algebra(report):
    def body():
        for k, rng in enumerate(rngs(10, 100)):
            rep = random_tensor(rng, order=3, terms=5, support=3, exact=k % 2 == 0, pool=4)
            once = sym(rep)
            assert sym(once) == once, f"sym not idempotent on rep {k}"
        for rng in rngs(11, 100):
            rep = random_tensor(rng, order=3, terms=5, support=3, exact=True, pool=3)
            out = canonicalize(rep)
            assert out.values(range(1, 4)) == rep.values(range(1, 4))
            assert len(out) <= len(rep)
        return "sym idempotent on 100 reps; canonicalize exact on 100 reps"

    report(10, 30, body)
