import math

import numpy as np
import pytest

from helson.errors import ContractError
from helson.experiments import (
    CounterexampleConfig,
    counterexample_ratio,
    counterexample_report,
    counterexample_xnorm,
    default_s_grid,
    hankel_norm_study,
    mult_hilbert_study,
    nu_kernel_integral,
    tensor_identity_check,
    xnorm_factor,
)


def test_mult_hilbert_two_by_two():
    """Oracle: closed-form eigenvalues of the symmetric 2x2 block on indices 2, 3."""
    a, b, c = 1 / (2 * math.log(4)), 1 / (math.sqrt(6) * math.log(6)), 1 / (3 * math.log(9))
    disc = math.sqrt(((a - c) / 2) ** 2 + b * b)
    rep = mult_hilbert_study([2])
    row = rep["rows"][0]
    assert row["lam_max"] == pytest.approx((a + c) / 2 + disc, rel=1e-14)
    assert row["lam_min"] == pytest.approx((a + c) / 2 - disc, rel=1e-13)
    assert all(rep["checks"].values())


def test_mult_hilbert_monotone_and_bounded():
    rep = mult_hilbert_study([4, 16, 64, 256])
    lam = [r["lam_max"] for r in rep["rows"]]
    assert lam == sorted(lam) and lam[-1] < math.pi
    with pytest.raises(ContractError):
        mult_hilbert_study([16, 4])


def test_hankel_studies():
    rep = hankel_norm_study("ramp", [16, 64, 256])
    assert all(rep["checks"].values())
    assert rep["target_norm"] == math.pi / 2
    with pytest.raises(ContractError):
        hankel_norm_study("nope", [4, 8])


def test_nu_kernel_integral_against_quadrature():
    from scipy.integrate import quad

    for s in (1e-6, 0.05, 0.0999, 0.1, 0.3, 0.6, 0.9, 0.999):
        ref, _ = quad(lambda t: t / 2 / (1 - s * t) ** 2, 0, 1, epsabs=0, epsrel=1e-13)
        assert nu_kernel_integral(s) == pytest.approx(ref, rel=1e-12)
    assert nu_kernel_integral(0.0) == 0.25


def test_xnorm_factor_examples():
    assert xnorm_factor(0.6) == pytest.approx(0.5188527, abs=1e-7)
    assert xnorm_factor(1e-9) == pytest.approx(0.25, abs=1e-9)
    s = np.linspace(0.01, 0.99, 99)
    assert all(0 < xnorm_factor(x) < 1 for x in s)
    assert xnorm_factor(1 - 1e-12) > 0.999999999


def test_counterexample_xnorm():
    x = counterexample_xnorm(3)
    assert 0.999 <= x["sup"] <= 1
    assert x["sup_by_d"][0] == x["sup"]
    assert x["sup_by_d"] == sorted(x["sup_by_d"], reverse=True)
    with pytest.raises(ContractError):
        counterexample_xnorm(2, [0.5, 1.0])
    g = default_s_grid()
    assert g.min() > 0 and g.max() < 1 and np.all(np.diff(g) > 0)


def test_tensor_identity():
    t = tensor_identity_check(2, 8)
    assert t["abs_error"] <= 1e-10
    t3 = tensor_identity_check(3, 4)
    assert t3["abs_error"] <= 1e-10


def test_counterexample_ratio_and_report():
    r = counterexample_ratio(4, sizes=(64, 256))
    assert r["target"] == pytest.approx((math.pi / 2) ** 4)
    assert 1 < r["estimate"] < r["target"]
    rep = counterexample_report(CounterexampleConfig(N=4, sizes=(64, 256)))
    assert all(rep["checks"].values())
    targets = [row["target"] for row in rep["ratios"]]
    assert targets == sorted(targets)
    assert rep["sample"]["factor"] == pytest.approx(0.5188527, abs=1e-7)
    with pytest.raises(ContractError):
        CounterexampleConfig(N=0)
