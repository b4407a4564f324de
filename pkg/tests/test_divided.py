import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwtrace.divided import EUCLIDEAN, PSEUDOHYPERBOLIC, Cluster, dd_bound, divided_difference, newton_eval
from pwtrace.errors import BoundDegenerate, DuplicatePoints, EtaNonPositive, OrderOutOfRange
from pwtrace.geometry import UPPER, pseudo_distance


def random_cluster(rng, size, flavor):
    if flavor == PSEUDOHYPERBOLIC:
        pts = rng.uniform(-1, 1, size) + 1j * rng.uniform(0.5, 2, size)
        return Cluster.ordered(pts, PSEUDOHYPERBOLIC, UPPER)
    pts = rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size)
    return Cluster.ordered(pts, EUCLIDEAN)


def test_order_zero_is_identity():
    c = Cluster.ordered([1, 2, 3])
    assert divided_difference(c, [4.5 - 1j], 0) == 4.5 - 1j


def test_constant_values_vanish():
    c = Cluster.ordered([1j, 1 + 2j, 3j], PSEUDOHYPERBOLIC, UPPER)
    for k in (1, 2):
        assert divided_difference(c, [2.0] * 3, k) == 0


def test_euclidean_identity_function():
    c = Cluster((0.3 + 1j, 2.0))
    assert divided_difference(c, [0.3 + 1j, 2.0], 1) == pytest.approx(1.0)


def test_pseudohyperbolic_pair():
    c = Cluster((1j, 2j), PSEUDOHYPERBOLIC, UPPER)
    assert divided_difference(c, [0, 1], 1) == pytest.approx(3.0)


def test_newton_single_point_is_constant():
    c = Cluster((1 + 1j,))
    assert np.allclose(newton_eval(c, [2 - 1j], np.array([0, 5j, -3])), 2 - 1j)


def test_newton_linear_reproduction():
    c = Cluster((1.0, 2.0))
    assert newton_eval(c, [4, 7], 1.5) == pytest.approx(5.5)


def test_order_errors():
    c = Cluster.ordered([1, 2])
    with pytest.raises(OrderOutOfRange):
        divided_difference(c, [1, 2, 3], 2)
    with pytest.raises(OrderOutOfRange):
        divided_difference(c, [1], 1)
    with pytest.raises(DuplicatePoints):
        Cluster((1.0, 1.0))


def test_interpolation_identity(rng):
    for trial in range(200):
        flavor = EUCLIDEAN if trial % 2 else PSEUDOHYPERBOLIC
        c = random_cluster(rng, rng.integers(1, 6), flavor)
        vals = rng.normal(size=len(c)) + 1j * rng.normal(size=len(c))
        got = newton_eval(c, vals, c.array)
        assert np.max(np.abs(got - vals) / (1 + np.abs(vals))) < 1e-9


def test_polynomial_annihilation(rng):
    for _ in range(100):
        c = random_cluster(rng, 5, EUCLIDEAN)
        deg = rng.integers(0, 4)
        coef = rng.normal(size=deg + 1)
        vals = np.polyval(coef, c.array)
        for k in range(deg + 1, 5):
            assert abs(divided_difference(c, vals, k)) < 1e-9


@settings(max_examples=100)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(-3, 3), st.floats(0.1, 3), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_pair_order_swap(x1, y1, x2, y2, a1, a2):
    m1, m2 = complex(x1, y1), complex(x2, y2)
    if abs(m1 - m2) < 1e-3:
        return
    for flavor, hp in ((EUCLIDEAN, None), (PSEUDOHYPERBOLIC, UPPER)):
        d12 = divided_difference(Cluster((m1, m2), flavor, hp), [a1, a2], 1)
        d21 = divided_difference(Cluster((m2, m1), flavor, hp), [a2, a1], 1)
        assert abs(abs(d12) - abs(d21)) <= 1e-12 * (1 + abs(d12))


def test_dd_bound_examples():
    c1 = Cluster((1j,), PSEUDOHYPERBOLIC, UPPER)
    c2 = Cluster((1j, 2j), PSEUDOHYPERBOLIC, UPPER)
    assert dd_bound(c1, 0.3, 5.0, 0) == 5.0
    assert dd_bound(c2, 1.0, 1.0, 1) == pytest.approx(8 / 3)
    assert dd_bound(c2, 2.0, 1.0, 1) == pytest.approx(4 / 3)
    with pytest.raises(EtaNonPositive):
        dd_bound(c2, 0.0, 1.0, 1)
    with pytest.raises(OrderOutOfRange):
        dd_bound(c2, 1.0, 1.0, 2)


def test_dd_bound_degenerate_guard():
    # 1 - k/(2M) never vanishes for k <= M-1, but the guard is still exercised directly
    c = Cluster((1j,), PSEUDOHYPERBOLIC, UPPER)
    assert dd_bound(c, 1.0, 1.0, 0) == 1.0
    assert issubclass(BoundDegenerate, Exception)


def test_dd_bound_validity(rng):
    # K: box [-2, 2] x [0.2, 4]; groups near 0.5+2i, eta = rho distance to the box boundary
    edge = np.concatenate(
        [
            np.linspace(-2, 2, 400) + 0.2j,
            np.linspace(-2, 2, 400) + 4j,
            -2 + 1j * np.linspace(0.2, 4, 400),
            2 + 1j * np.linspace(0.2, 4, 400),
        ]
    )
    for _ in range(500):
        m = rng.integers(1, 5)
        pts = 0.5 + 2j + 0.4 * (rng.uniform(-1, 1, m) + 1j * rng.uniform(-1, 1, m))
        c = Cluster.ordered(pts, PSEUDOHYPERBOLIC, UPPER)
        eta = float(np.min(pseudo_distance(pts[:, None], edge[None, :])))
        coef = rng.normal(size=4) + 1j * rng.normal(size=4)
        sup = float(np.max(np.abs(np.polyval(coef, edge))))  # max modulus on the boundary
        vals = np.polyval(coef, c.array)
        for j in range(m):
            assert abs(divided_difference(c, vals, j)) <= dd_bound(c, eta, sup, j) * (1 + 1e-9)
