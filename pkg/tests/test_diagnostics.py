import math

import numpy as np
import pytest

from helson.diagnostics import (
    BOUNDED,
    INCONCLUSIVE,
    UNBOUNDED,
    coeff_decay_1d,
    default_halfline_grid,
    dyadic_verdict,
    gram_dual,
    gram_matrix,
    halfline_window,
    helson_decay,
    tensor_coeff_decay,
    window_multi,
)
from helson.errors import UnsupportedInputError
from helson.matrix import build_helson
from helson.moments import (
    ClosedFormMoments,
    DiscreteMeasure,
    DiscreteMoments,
    HalfLineDensity,
    Point,
    zeta,
)


def test_helson_decay_exact_sup():
    rep = helson_decay(ClosedFormMoments("multiplicative-hilbert"))
    assert abs(rep.sup - 1.0) <= 1e-15
    assert rep.verdict == BOUNDED


def test_helson_decay_sqrt_log_unbounded():
    rep = helson_decay(ClosedFormMoments("sqrt-log"))
    assert rep.verdict == UNBOUNDED
    # sup_n sqrt(log n) at the last sample point 2**512
    assert rep.sup == pytest.approx(math.sqrt(512 * math.log(2)), rel=1e-12)


def test_helson_decay_callable():
    rep = helson_decay(lambda n: 1.0 / (n * math.log(n) + 1.0), N=2**40)
    assert rep.verdict == BOUNDED


def test_coeff_decay_1d():
    assert coeff_decay_1d("hilbert", 2**30).sup == pytest.approx(1.0)
    assert coeff_decay_1d("hilbert", 2**30).verdict == BOUNDED
    rep = coeff_decay_1d(lambda n: 1.0 / np.sqrt(1.0 + np.asarray(n, dtype=float)), 2**40)
    assert rep.verdict == UNBOUNDED


def test_tensor_coeff_decay():
    rep = tensor_coeff_decay(["hilbert", "hilbert"], 2, 64)
    assert rep.sup == pytest.approx(1.0) and rep.verdict == BOUNDED
    rep = tensor_coeff_decay(["ramp"] * 3, 3, 16)
    # (1+k)/(2(k+2)) increases to 1/2 per coordinate; sup at the far corner
    assert rep.sup == pytest.approx((16 / 34) ** 3, rel=1e-14)
    assert rep.witness == (15, 15, 15)


def test_dyadic_verdict_rules():
    assert dyadic_verdict([1.0] * 10) == BOUNDED
    assert dyadic_verdict([2.0**k for k in range(10)]) == UNBOUNDED
    assert dyadic_verdict([1, 1, 1, 1.5, 2.0]) == INCONCLUSIVE


def test_window_single_atom():
    m = DiscreteMeasure.of([(1.0, Point.explicit({1: 0.5}))])
    rep = window_multi(m)
    assert rep.sup == pytest.approx(4 / 3)
    assert rep.witness["s"] == (0.5,)


def test_window_two_atoms_exhaustive():
    atoms = [(1.0, Point.explicit({1: 0.5, 2: -0.3})), (2.0, Point.explicit({1: -0.2}))]
    rep = window_multi(DiscreteMeasure.of(atoms))
    # brute force over a fine grid never beats the exact candidate sup
    grid = np.array([[a, b] for a in np.linspace(-0.9, 0.9, 37) for b in np.linspace(-0.9, 0.9, 37)])
    assert window_multi(DiscreteMeasure.of(atoms), grid).sup <= rep.sup + 1e-15
    assert rep.sup == pytest.approx(max(3.0, 1 / (0.75 * 0.91), 2 / 0.96, 1 / 0.75))


def test_window_rejects_bohr():
    with pytest.raises(UnsupportedInputError):
        window_multi(DiscreteMeasure.of([(1.0, Point.bohr(1.0))]))


@pytest.mark.parametrize(
    "density, sup, verdict",
    [
        (HalfLineDensity.lebesgue(), 1.0, BOUNDED),
        (HalfLineDensity.poly((1.0,), 1.0, lowest_power=-2), 1 / 3, BOUNDED),
        (HalfLineDensity.ramp(), math.inf, UNBOUNDED),
    ],
)
def test_halfline_window(density, sup, verdict):
    rep = halfline_window(density)
    assert rep.verdict == verdict
    if math.isfinite(sup):
        assert rep.sup == pytest.approx(sup, rel=2e-2)
    else:
        assert rep.sup == math.inf


def test_halfline_grid_sup_is_exact_on_grid():
    """s**-2 on (1, inf): nu((1/2, s]) = 1 - 1/s, ratio maximal on the grid at its right end s = 3/2."""
    grid = default_halfline_grid()
    rep = halfline_window(HalfLineDensity.poly((1.0,), 1.0, lowest_power=-2), grid)
    ratio = np.where(grid > 1, (1 - 1 / grid) / (grid - 0.5), 0.0)
    assert rep.sup == pytest.approx(ratio.max(), rel=1e-14)
    assert rep.witness == 1.5


def test_halfline_log_mass():
    """s**-1 on (1/2, 1): nu((1/2, s]) = log(2s), ratio increases to 2 as s -> 1/2."""
    rep = halfline_window(HalfLineDensity.poly((1.0,), 0.5, 1.0, lowest_power=-1))
    assert rep.verdict == BOUNDED and rep.sup == pytest.approx(2.0, rel=1e-6)


def test_gram_dual_examples():
    g = gram_dual(DiscreteMeasure.of([(1.0, Point.explicit({1: 0.5}))]))
    np.testing.assert_allclose(g.eigenvalues, [4 / 3])
    g = gram_dual(DiscreteMeasure.of([(1.0, Point.bohr(1.0)), (1.0, Point.bohr(1.0))]))
    np.testing.assert_allclose(g.eigenvalues, [0.0, 2 * zeta(2)], atol=1e-14)


def test_gram_dual_matches_truncation():
    atoms = [(1.0, Point.explicit({1: 0.4})), (0.5, Point.explicit({1: -0.3, 2: 0.2}))]
    m = DiscreteMeasure.of(atoms)
    G = gram_matrix(m)
    ev = np.linalg.eigvalsh(build_helson(DiscreteMoments(m), 1024).A)[-2:]
    np.testing.assert_allclose(ev, np.linalg.eigvalsh(G), rtol=1e-6)
