import numpy as np
import pytest

from pwtrace.clustering import (
    GridSpec,
    NodeSequence,
    Partition,
    adapted_partition,
    carleson_constant,
    density_radius,
    enclosing_rectangles,
    generalized_carleson_margin,
    halfplane_partition,
    n_coloring,
    neighbor_groups,
    singleton_partition,
)
from pwtrace.divided import EUCLIDEAN, PSEUDOHYPERBOLIC, Cluster
from pwtrace.errors import (
    CapacityExceeded,
    ClustersTooClose,
    EmptyGrid,
    EtaOutOfRange,
    NodeOnBoundary,
    OverlappingClusters,
    PartitionFailed,
)
from pwtrace.geometry import UPPER

from conftest import half_integer_lattice, paired_lattice


def test_node_sequence_validation():
    with pytest.raises(ValueError):
        NodeSequence([0, 1])
    with pytest.raises(ValueError):
        NodeSequence([1, 1])
    with pytest.raises(ValueError):
        NodeSequence([1, np.nan])
    assert len(NodeSequence([1, 2j])) == 2


def test_carleson_examples():
    assert carleson_constant([1j]) == 1.0
    assert carleson_constant([1j, 2j]) == pytest.approx(1 / 3)
    assert carleson_constant([1j, 4j]) == pytest.approx(3 / 5)
    with pytest.raises(NodeOnBoundary):
        carleson_constant([1.0, 1j])


def test_carleson_monotone_under_removal(rng):
    for _ in range(200):
        n = rng.integers(2, 9)
        z = rng.uniform(-3, 3, n) + 1j * rng.uniform(0.1, 3, n)
        drop = rng.integers(n)
        assert carleson_constant(np.delete(z, drop)) >= carleson_constant(z) * (1 - 1e-12)


def test_margin_single_cluster_is_one():
    part = Partition((Cluster.ordered([1j, 2j], PSEUDOHYPERBOLIC, UPPER),), 1.0, 2)
    assert generalized_carleson_margin(part, UPPER, GridSpec(-1, 1, 0, 3, 0.1)) == 1.0


def test_margin_two_singletons_against_grid_oracle():
    part = halfplane_partition([1j, 2j], UPPER, 1, linkage=0.1)
    grid = GridSpec(-1, 1, 0, 3, 0.01)
    got = generalized_carleson_margin(part, UPPER, grid)
    # independent oracle: |B|/min_n|B_n| is the larger of the two factor moduli
    xs = -1 + 0.01 * np.arange(201)
    ys = 0.01 * np.arange(301)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    z = z[z.imag > 0]
    oracle = np.min(np.maximum(np.abs((z - 1j) / (z + 1j)), np.abs((z - 2j) / (z + 2j))))
    assert got == pytest.approx(oracle, rel=1e-12)
    assert got > 0


def test_margin_empty_grid():
    part = halfplane_partition([1j], UPPER)
    with pytest.raises(EmptyGrid):
        generalized_carleson_margin(part, UPPER, GridSpec(-1, 1, -2, -1, 0.1))


def test_shared_point_rejected():
    c1 = Cluster((1j,), PSEUDOHYPERBOLIC, UPPER)
    c2 = Cluster((1j, 2j), PSEUDOHYPERBOLIC, UPPER)
    with pytest.raises(OverlappingClusters):
        Partition((c1, c2), 1.0, 2)


def test_adapted_half_integer_lattice():
    part = adapted_partition(half_integer_lattice(50), 1.0, 1)
    assert len(part) == 100
    assert all(len(c) == 1 and c.flavor == EUCLIDEAN and c.exp_sign == 1 for c in part.clusters)


def test_adapted_single_far_node():
    part = adapted_partition([5j], 1.0, 1)
    (c,) = part.clusters
    assert c.flavor == PSEUDOHYPERBOLIC and c.halfplane == UPPER and c.exp_sign == 1


def test_adapted_pairs():
    pts = np.array([[k + 0.5, k + 0.6] for k in range(21)]).ravel()
    part = adapted_partition(pts, 1.0, 2)
    assert len(part) == 21
    assert all(len(c) == 2 and c.flavor == EUCLIDEAN for c in part.clusters)
    assert part.delta0_prime == pytest.approx(0.9)


def test_adapted_capacity_exceeded_reports_group():
    pts = np.array([[k + 0.5, k + 0.55, k + 0.6] for k in range(5)]).ravel()
    with pytest.raises(CapacityExceeded) as info:
        adapted_partition(pts, 1.0, 2)
    assert len(info.value.group) == 3


def test_adapted_lower_half_plane_sign():
    part = adapted_partition([-5j, -5j + 0.1, 3.0], 1.0, 2)
    far = [c for c in part.clusters if c.flavor == PSEUDOHYPERBOLIC]
    assert len(far) == 1 and far[0].exp_sign == -1 and len(far[0]) == 2


def test_adapted_too_wide_group_fails():
    # a chain of links below eps/4 whose diameter reaches eps/2
    pts = 0.5 + 0.2 * np.arange(4)
    with pytest.raises(PartitionFailed):
        adapted_partition(pts, 1.0, 10)


def test_adapted_cover_and_strip_bound(rng):
    for _ in range(20):
        base = half_integer_lattice(20)
        z = base + 0.05 * (rng.normal(size=base.size) + 1j * rng.normal(size=base.size))
        far = 6.0 * np.arange(4) + rng.uniform(-0.5, 0.5, 4)
        z = np.concatenate([z, 3j + far, -4j - far[:3]])
        z = np.unique(z)
        eps = 0.8
        part = adapted_partition(z, eps, 3)
        covered = [p for c in part.clusters for p in c.points]
        assert len(covered) == len(z)
        assert set(covered) == {complex(v) for v in z}
        for c in part.clusters:
            if c.flavor == EUCLIDEAN:
                assert np.all(np.abs(c.array.imag) < 3 * eps)
            else:
                assert np.all(np.abs(c.array.imag) >= eps)


def test_adapted_default_epsilon_is_density_radius():
    z = half_integer_lattice(40)
    part = adapted_partition(z, None, 1)
    assert part.epsilon == pytest.approx(density_radius(z))
    assert part.epsilon == pytest.approx(0.5, abs=1e-6)


def test_paired_lattice_groups():
    part = adapted_partition(paired_lattice(100), 0.5, 2)
    assert max(len(c) for c in part.clusters) == 2
    assert part.rho0_prime < 0.25


def test_neighbor_examples():
    g = neighbor_groups([1, 2, 10], 2, 0.25)
    assert g[0].points == (1 + 0j,)
    g = neighbor_groups([1, 1.1], 2, 0.25)
    assert g[0].points == (1 + 0j, 1.1 + 0j)
    assert g[0].base == 1 and g[1].base == 1.1
    assert neighbor_groups([3 + 4j], 3, 0.25)[0].points == (3 + 4j,)


def test_neighbor_eta_range():
    for eta in (0.0, 0.5, 0.7):
        with pytest.raises(EtaOutOfRange):
            neighbor_groups([1, 2], 1, eta)


def test_neighbor_capacity_one_singletons(rng):
    z = rng.normal(size=30) + 1j * rng.normal(size=30)
    assert all(len(g) == 1 for g in neighbor_groups(z, 1, 0.4))


def test_neighbor_flavor_rule():
    (g1, g2) = neighbor_groups([5j, 5.2j], 2, 0.25)
    assert g1.flavor == PSEUDOHYPERBOLIC and len(g1) == 2
    (h1, h2) = neighbor_groups([0.5j, 1.5j], 2, 0.45)
    assert h1.flavor == EUCLIDEAN


def test_neighbor_tie_break_lexicographic():
    # 0.875 and 1.125 are exactly equally far from 1; the smaller one wins
    g = neighbor_groups([1, 0.875, 1.125], 2, 0.25)
    assert g[0].points == (0.875 + 0j, 1 + 0j)


def test_rectangles_single():
    part = halfplane_partition([2j], UPPER)
    cover = enclosing_rectangles(part, UPPER)
    (r,) = cover.rectangles
    assert r.center == 2j and r.width == 2 and r.height == 2
    assert r.contains(2j, margin=0.5)


def test_rectangles_far_apart():
    cover = enclosing_rectangles(halfplane_partition([1j, 100j], UPPER), UPPER)
    a, b = cover.rectangles
    assert not a.overlaps(b)
    assert cover.min_separation > 0


def test_rectangles_skip_strip_clusters():
    part = adapted_partition([0.5, 5j], 1.0, 1)
    cover = enclosing_rectangles(part, UPPER)
    assert len(cover) == 1


def test_rectangles_too_close():
    part = halfplane_partition([1j, 1.2j], UPPER, 1, linkage=0.01)
    with pytest.raises(ClustersTooClose) as info:
        enclosing_rectangles(part, UPPER)
    assert info.value.pair == (0, 1)


def test_rectangle_properties(rng):
    for _ in range(20):
        x = np.sort(rng.uniform(-50, 50, 8))
        x = x[np.concatenate([[True], np.diff(x) > 6])]
        z = x + 1j * rng.uniform(1, 2, len(x))
        part = halfplane_partition(z, UPPER)
        cover = enclosing_rectangles(part, UPPER)
        for idx, r in zip(cover.cluster_indices, cover.rectangles):
            assert np.all(r.contains(part.clusters[idx].array))
        assert cover.min_separation > 0
        assert cover.rho_to_boundary[0] > 0


def test_n_coloring():
    pts = np.array([[k + 0.5, k + 0.6] for k in range(5)]).ravel()
    classes = n_coloring(adapted_partition(pts, 1.0, 2))
    assert len(classes) == 2 and all(len(c) == 5 for c in classes)


def test_singleton_partition_flavors():
    part = singleton_partition([0.5, 2j, -3j], 1.0)
    flavors = {c.points[0]: (c.flavor, c.exp_sign) for c in part.clusters}
    assert flavors[0.5 + 0j] == (EUCLIDEAN, 1)
    assert flavors[2j] == (PSEUDOHYPERBOLIC, 1)
    assert flavors[-3j] == (PSEUDOHYPERBOLIC, -1)


def test_density_radius_lattice():
    assert density_radius(half_integer_lattice(100)) == pytest.approx(0.5, abs=1e-6)
