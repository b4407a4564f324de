"""Decomposition of finite node sets into small, well separated groups.

Covers the Carleson constant of a half-plane subsequence, the generalized
Carleson margin of a grouping, the adapted partition used by the trace norm
(far groups in their half-plane plus euclidean groups near the real axis),
the per-node neighbor groups, and the enclosing rectangles of half-plane
groups.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .divided import EUCLIDEAN, PSEUDOHYPERBOLIC, Cluster, lex_key
from .errors import (
    CapacityExceeded,
    ClustersTooClose,
    EmptyGrid,
    EtaOutOfRange,
    NodeOnBoundary,
    OverlappingClusters,
    PartitionFailed,
)
from .geometry import LOWER, UPPER, HalfPlane, Rectangle, delta_distance, pseudo_distance

_CHUNK = 2048


@dataclass(frozen=True)
class NodeSequence:
    """Finite set of distinct, finite, nonzero complex nodes."""

    nodes: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.nodes, dtype=complex)).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("nodes must be finite")
        if np.any(arr == 0):
            raise ValueError("0 is not allowed as a node; shift the sequence")
        if len(np.unique(arr)) != len(arr):
            raise ValueError("nodes must be pairwise distinct")
        arr.setflags(write=False)
        object.__setattr__(self, "nodes", arr)

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes.tolist())

    def index_of(self):
        return {complex(z): i for i, z in enumerate(self.nodes)}

    def subset(self, mask):
        return NodeSequence(self.nodes[mask])

    def in_halfplane(self, hp):
        return self.nodes[hp.contains(self.nodes)]

    @property
    def max_modulus(self):
        return float(np.max(np.abs(self.nodes))) if len(self) else 0.0


def as_nodes(seq):
    if isinstance(seq, NodeSequence):
        return seq.nodes
    return np.atleast_1d(np.asarray(seq, dtype=complex)).ravel()


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid ``[x_min, x_max] x [y_min, y_max]`` with uniform step."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    step: float

    def points(self):
        if self.step <= 0:
            raise EmptyGrid("grid step must be positive")
        nx = int(np.floor((self.x_max - self.x_min) / self.step + 1e-9)) + 1
        ny = int(np.floor((self.y_max - self.y_min) / self.step + 1e-9)) + 1
        if nx < 1 or ny < 1:
            raise EmptyGrid("grid has no points")
        xs = self.x_min + self.step * np.arange(nx)
        ys = self.y_min + self.step * np.arange(ny)
        return (xs[None, :] + 1j * ys[:, None]).ravel()


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of a node set by clusters of size at most ``capacity``.

    ``rho0`` is the largest pseudohyperbolic diameter among half-plane
    clusters, ``rho0_prime`` the largest euclidean diameter among strip
    clusters, and ``delta0_prime`` the smallest euclidean gap between two
    strip clusters (``inf`` when there are fewer than two).
    """

    clusters: tuple
    epsilon: float
    capacity: int
    rho0: float = 0.0
    rho0_prime: float = 0.0
    delta0_prime: float = float("inf")
    membership: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        clusters = tuple(self.clusters)
        membership = {}
        for n, c in enumerate(clusters):
            if len(c) > self.capacity:
                raise CapacityExceeded(
                    f"cluster {n} has {len(c)} points > capacity {self.capacity}", c.points
                )
            for z in c.points:
                if z in membership:
                    raise OverlappingClusters(f"node {z} belongs to clusters {membership[z]} and {n}")
                membership[z] = n
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "membership", membership)

    def __len__(self):
        return len(self.clusters)

    def nodes(self):
        return np.array(list(self.membership), dtype=complex)

    def cluster_of(self, z):
        return self.clusters[self.membership[complex(z)]]

    def strip_clusters(self):
        return [c for c in self.clusters if c.flavor == EUCLIDEAN]

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "capacity": self.capacity,
            "rho0": self.rho0,
            "rho0_prime": self.rho0_prime,
            "delta0_prime": self.delta0_prime,
            "clusters": [c.to_dict() for c in self.clusters],
        }


# ---------------------------------------------------------------------------
# Carleson-type quantities


def _require_inside(z, hp):
    if not np.all(hp.contains(z)):
        bad = z[~hp.contains(z)][0]
        raise NodeOnBoundary(f"node {bad} is not strictly inside {hp}")


def _log_interaction(targets, sources, hp):
    """Matrix of log|b_source(target)| (rows: targets)."""
    out = np.empty((len(targets), len(sources)))
    conj_shift = np.conj(sources) + 2j * hp.offset
    for lo in range(0, len(targets), _CHUNK):
        t = targets[lo : lo + _CHUNK, None]
        with np.errstate(divide="ignore"):
            out[lo : lo + _CHUNK] = np.log(np.abs(t - sources[None, :])) - np.log(np.abs(t - conj_shift[None, :]))
    return out


def carleson_constant(seq, hp=UPPER):
    """Truncated Carleson constant ``min_l prod_{m != l} |b_m(l)|`` of a finite set.

    An empty or one-point set gives 1.
    """
    return float(np.exp(log_carleson_constant(seq, hp)))


def log_carleson_constant(seq, hp=UPPER):
    """Logarithm of :func:`carleson_constant`; stays finite where the constant underflows."""
    z = as_nodes(seq)
    if len(z) < 2:
        return 0.0
    _require_inside(z, hp)
    logs = _log_interaction(z, z, hp)
    np.fill_diagonal(logs, 0.0)
    return float(np.min(logs.sum(axis=1)))


def generalized_carleson_margin(partition: Partition, hp: HalfPlane, grid: GridSpec) -> float:
    """Grid estimate of the best constant in ``|B(z)| > c * min_n |B_n(z)|``.

    Since ``B`` is the product of the group products ``B_n``, the ratio at z
    equals the product of all group factors except the smallest one; this
    avoids 0/0 at the nodes.
    """
    pts = grid.points()
    pts = pts[hp.contains(pts)]
    if len(pts) == 0:
        raise EmptyGrid("no grid point lies strictly inside the half-plane")
    for c in partition.clusters:
        _require_inside(c.array, hp)
    group_logs = np.empty((len(partition), len(pts)))
    for n, c in enumerate(partition.clusters):
        group_logs[n] = _log_interaction(pts, c.array, hp).sum(axis=1)
    if len(partition) == 1:
        return 1.0
    # drop the smallest factor by sorting, so a grid point on a node (-inf) is harmless
    total_minus_min = np.sort(group_logs, axis=0)[1:].sum(axis=0)
    return float(np.exp(np.min(total_minus_min)))


# ---------------------------------------------------------------------------
# single-linkage grouping


def _linkage_pairs(z, threshold, metric, hp=None):
    """Index pairs (i, j) with distance < threshold, found by a sweep along Re."""
    order = np.argsort(z.real, kind="stable")
    zs = z[order]
    xs = zs.real
    if metric == "euclidean":
        reach = np.full(len(zs), threshold)
    else:
        # rho(z, w) < t forces |Re z - Re w| < t (h_z + h_w) / sqrt(1 - t^2)
        # and h_w <= h_z (1 + t) / (1 - t)
        t = min(threshold, 0.999)
        h = hp.height(zs)
        reach = t * h * (1 + (1 + t) / (1 - t)) / np.sqrt(1 - t * t)
    rows, cols = [], []
    for i in range(len(zs)):
        hi = np.searchsorted(xs, xs[i] + reach[i], side="right")
        if hi <= i + 1:
            continue
        cand = np.arange(i + 1, hi)
        if metric == "euclidean":
            d = np.abs(zs[cand] - zs[i])
        else:
            d = pseudo_distance(zs[cand], zs[i], hp)
        hit = cand[d < threshold]
        rows.extend([i] * len(hit))
        cols.extend(hit.tolist())
    # sweep is one-sided in i; make sure far-reaching j's are also covered
    return order[np.array(rows, dtype=int)], order[np.array(cols, dtype=int)]


def single_linkage(z, threshold, metric="euclidean", hp=None):
    """Connected components of the graph joining points closer than ``threshold``.

    Returns a list of index arrays, ordered by the (Re, Im) of their first point.
    """
    z = np.asarray(z, dtype=complex)
    n = len(z)
    if n == 0:
        return []
    r1, c1 = _linkage_pairs(z, threshold, metric, hp)
    if metric != "euclidean":
        # the reach bound is taken from the left point; repeat from the right
        r2, c2 = _linkage_pairs(-np.conj(z), threshold, metric, hp)
        r1, c1 = np.concatenate([r1, r2]), np.concatenate([c1, c2])
    graph = coo_matrix((np.ones(len(r1)), (r1, c1)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    out = [np.array(sorted(g, key=lambda i: lex_key(z[i]))) for g in groups.values()]
    out.sort(key=lambda g: lex_key(z[g[0]]))
    return out


def _euclid_diameter(z):
    return float(np.max(np.abs(z[:, None] - z[None, :]))) if len(z) > 1 else 0.0


def _rho_diameter(z, hp):
    return float(np.max(pseudo_distance(z[:, None], z[None, :], hp))) if len(z) > 1 else 0.0


def _min_gap_between(clusters):
    """Smallest euclidean distance between points of different clusters."""
    if len(clusters) < 2:
        return float("inf")
    pts = np.concatenate([c.array for c in clusters])
    labels = np.concatenate([[n] * len(c) for n, c in enumerate(clusters)])
    xy = np.column_stack([pts.real, pts.imag])
    tree = cKDTree(xy)
    k = min(len(pts), max(len(c) for c in clusters) + 1)
    dist, idx = tree.query(xy, k=k)
    dist = np.atleast_2d(dist.T).T
    idx = np.atleast_2d(idx.T).T
    other = labels[idx] != labels[:, None]
    return float(np.min(np.where(other, dist, np.inf)))


def adapted_partition(seq, epsilon=None, capacity=1):
    """Group the nodes into far half-plane clusters and near-axis strip clusters.

    Off-axis nodes are first grouped per half-plane by single linkage in the
    pseudohyperbolic metric (threshold ``epsilon/4``). Groups that never
    enter the strip ``|Im z| < epsilon`` become pseudohyperbolic clusters;
    all other nodes, including the real ones, are regrouped by euclidean
    single linkage with the same threshold. Clusters meeting the closed
    upper half-plane carry ``exp_sign=+1``, the others ``-1``.

    Raises ``CapacityExceeded`` when a group is larger than ``capacity`` and
    ``PartitionFailed`` when a group is too wide (diameter >= epsilon/2) or
    a strip cluster leaves ``|Im z| < 3 epsilon``.
    """
    seq = seq if isinstance(seq, NodeSequence) else NodeSequence(seq)
    if epsilon is None:
        epsilon = density_radius(seq)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    z = seq.nodes
    link = epsilon / 4.0
    far, strip = [], [z[z.imag == 0]]
    for hp, sign in ((UPPER, 1), (LOWER, -1)):
        pts = z[hp.contains(z)]
        for g in single_linkage(pts, link, "pseudo", hp):
            grp = pts[g]
            if np.all(np.abs(grp.imag) >= epsilon):
                if len(grp) > capacity:
                    raise CapacityExceeded(
                        f"half-plane group of {len(grp)} points exceeds capacity {capacity}", grp
                    )
                far.append(Cluster.ordered(grp, PSEUDOHYPERBOLIC, hp, exp_sign=sign))
            else:
                strip.append(grp)
    strip_pts = np.concatenate(strip)
    strip_clusters = []
    for g in single_linkage(strip_pts, link, "euclidean"):
        grp = strip_pts[g]
        if len(grp) > capacity:
            raise CapacityExceeded(f"strip group of {len(grp)} points exceeds capacity {capacity}", grp)
        sign = 1 if np.any(grp.imag >= 0) else -1
        strip_clusters.append(Cluster.ordered(grp, EUCLIDEAN, None, exp_sign=sign))

    rho0 = max((_rho_diameter(c.array, c.halfplane) for c in far), default=0.0)
    rho0_prime = max((_euclid_diameter(c.array) for c in strip_clusters), default=0.0)
    for c in far:
        if _rho_diameter(c.array, c.halfplane) >= epsilon / 2:
            raise PartitionFailed("half-plane cluster pseudohyperbolic diameter >= epsilon/2", c.points)
    for c in strip_clusters:
        if _euclid_diameter(c.array) >= epsilon / 2:
            raise PartitionFailed("strip cluster diameter >= epsilon/2", c.points)
        if np.any(np.abs(c.array.imag) >= 3 * epsilon):
            raise PartitionFailed("strip cluster leaves |Im z| < 3 epsilon", c.points)
    clusters = sorted(far + strip_clusters, key=lambda c: lex_key(c.points[0]))
    return Partition(
        tuple(clusters),
        float(epsilon),
        int(capacity),
        rho0=rho0,
        rho0_prime=rho0_prime,
        delta0_prime=_min_gap_between(strip_clusters),
    )


def halfplane_partition(seq, hp=UPPER, capacity=1, linkage=0.25):
    """Pseudohyperbolic single-linkage grouping of a set lying in one half-plane."""
    z = as_nodes(seq)
    _require_inside(z, hp)
    clusters = []
    for g in single_linkage(z, linkage, "pseudo", hp):
        grp = z[g]
        if len(grp) > capacity:
            raise CapacityExceeded(f"group of {len(grp)} points exceeds capacity {capacity}", grp)
        clusters.append(Cluster.ordered(grp, PSEUDOHYPERBOLIC, hp, exp_sign=hp.sign))
    rho0 = max((_rho_diameter(c.array, hp) for c in clusters), default=0.0)
    return Partition(tuple(clusters), 4.0 * linkage, capacity, rho0=rho0)


def singleton_partition(seq, epsilon=1.0):
    """Every node on its own; strip/half-plane flavor follows ``|Im z| < epsilon``."""
    clusters = []
    for zz in sorted(as_nodes(seq).tolist(), key=lex_key):
        if abs(zz.imag) >= epsilon:
            hp = UPPER if zz.imag > 0 else LOWER
            clusters.append(Cluster((zz,), PSEUDOHYPERBOLIC, hp, exp_sign=hp.sign))
        else:
            clusters.append(Cluster((zz,), EUCLIDEAN, None, exp_sign=1 if zz.imag >= 0 else -1))
    strip = [c for c in clusters if c.flavor == EUCLIDEAN]
    return Partition(tuple(clusters), float(epsilon), 1, delta0_prime=_min_gap_between(strip))


def n_coloring(partition: Partition):
    """Split the nodes into ``capacity`` classes, the k-th point of every cluster in class k."""
    classes = [[] for _ in range(partition.capacity)]
    for c in partition.clusters:
        for k, zz in enumerate(c.points):
            classes[k].append(zz)
    return [np.array(cl, dtype=complex) for cl in classes if cl]


# ---------------------------------------------------------------------------
# neighbor groups


def neighbor_groups(seq, capacity, eta):
    """For every node, the group of its ``capacity`` nearest neighbors in the
    mixed distance that also lie within distance ``eta``.

    Ties are broken in favor of the lexicographically smaller (Re, Im) node.
    A group is euclidean when it meets ``|Im z| < 1`` and pseudohyperbolic
    (in the half-plane of its points) otherwise; its exponential sign is +1
    when it meets the closed upper half-plane. The node itself is the base
    point of its group.
    """
    if not 0 < eta < 0.5:
        raise EtaOutOfRange(f"eta must lie in (0, 1/2), got {eta}")
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    z = as_nodes(seq)
    n = len(z)
    k = min(capacity, n)
    groups = []
    for lo in range(0, n, _CHUNK):
        block = z[lo : lo + _CHUNK]
        d = delta_distance(block[:, None], z[None, :])
        for r, lam in enumerate(block):
            order = np.lexsort((z.imag, z.real, d[r]))[:k]
            members = z[order[d[r, order] < eta]]
            groups.append(_neighbor_cluster(lam, members))
    return groups


def _neighbor_cluster(lam, members):
    if np.any(np.abs(members.imag) < 1):
        flavor, hp = EUCLIDEAN, None
    else:
        flavor, hp = PSEUDOHYPERBOLIC, (UPPER if lam.imag > 0 else LOWER)
    sign = 1 if np.any(members.imag >= 0) else -1
    return Cluster.ordered(members, flavor, hp, exp_sign=sign, base=lam)


# ---------------------------------------------------------------------------
# rectangles


@dataclass(frozen=True)
class RectangleCover:
    """One rectangle per half-plane cluster plus the measured constants.

    ``side_ratio`` collects ``side / height(center)`` (the comparability of
    side lengths with the distance to the boundary line), ``rho_to_boundary``
    the (min, max) pseudohyperbolic distance of cluster nodes to the edges of
    their own rectangle, and ``min_separation`` the smallest pseudohyperbolic
    distance between two rectangles.
    """

    halfplane: HalfPlane
    rectangles: tuple
    cluster_indices: tuple
    side_ratio: tuple = (1.0, 1.0)
    rho_to_boundary: tuple = (0.0, 0.0)
    min_separation: float = float("inf")

    def __len__(self):
        return len(self.rectangles)


def _rho_sets(a, b, hp):
    return float(np.min(pseudo_distance(a[:, None], b[None, :], hp)))


def enclosing_rectangles(partition: Partition, hp: HalfPlane, per_side=64) -> RectangleCover:
    """Square around each pseudohyperbolic cluster of ``hp``.

    Center is the cluster centroid and the side equals the centroid's height
    above the boundary line; it is widened (up to 1.8 times the height) if
    some node would touch the edge. Strip clusters are skipped.
    """
    rects, idx, ratios, to_bd = [], [], [], []
    for n, c in enumerate(partition.clusters):
        if c.flavor != PSEUDOHYPERBOLIC or c.halfplane != hp:
            continue
        center = complex(np.mean(c.array))
        h = float(hp.height(center))
        side = h
        spread = float(np.max(np.maximum(np.abs(c.array.real - center.real), np.abs(c.array.imag - center.imag))))
        if spread >= 0.4 * side:
            side = min(2.5 * spread, 1.8 * h)
        rect = Rectangle(center, side, side)
        if not np.all(rect.contains(c.array, margin=1e-12 * (1 + h))):
            raise ClustersTooClose(f"cluster {n} is too wide for an enclosing rectangle", (n, n))
        bd = rect.boundary(per_side)
        dist = pseudo_distance(c.array[:, None], bd[None, :], hp).min(axis=1)
        to_bd.extend(dist.tolist())
        ratios.append(side / h)
        rects.append(rect)
        idx.append(n)
    min_sep = float("inf")
    boundaries = [r.boundary(per_side) for r in rects]
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            if rects[i].overlaps(rects[j]):
                raise ClustersTooClose(
                    f"rectangles of clusters {idx[i]} and {idx[j]} intersect", (idx[i], idx[j])
                )
            quick = float(pseudo_distance(rects[i].center, rects[j].center, hp))
            if quick > 0.99 and quick > min_sep:
                continue
            min_sep = min(min_sep, _rho_sets(boundaries[i], boundaries[j], hp))
    if rects and min_sep <= 0:
        raise ClustersTooClose("rectangles are not separated", None)
    return RectangleCover(
        hp,
        tuple(rects),
        tuple(idx),
        side_ratio=(min(ratios, default=1.0), max(ratios, default=1.0)),
        rho_to_boundary=(min(to_bd, default=0.0), max(to_bd, default=0.0)),
        min_separation=min_sep,
    )


# ---------------------------------------------------------------------------
# relative density


def density_radius(seq, window=None, step=None):
    """Largest distance from a point of the real window to the node set.

    The default window is ``[-R/2, R/2]`` with ``R`` the largest node modulus,
    the region where a finite truncation is representative.
    """
    z = as_nodes(seq)
    if window is None:
        half = 0.5 * float(np.max(np.abs(z)))
        window = (-half, half)
    lo, hi = window
    if step is None:
        step = max((hi - lo) / 20000.0, 1e-6)
    xs = np.arange(lo, hi + 0.5 * step, step)
    tree = cKDTree(np.column_stack([z.real, z.imag]))
    dist, _ = tree.query(np.column_stack([xs, np.zeros_like(xs)]))
    return float(np.max(dist))
