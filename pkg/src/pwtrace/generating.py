"""The generating function S of a node set and the weights built from it.

``S(z) = prod_{|lambda| < R} (1 - z/lambda)`` is a symmetric truncation of
the canonical product. Products are accumulated as sums of complex
logarithms so that thousands of factors neither overflow nor underflow.
"""

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .clustering import Partition, as_nodes
from .errors import NodeNotInSequence, SZero

_CHUNK = 1 << 20  # entries of a (points x nodes) block
S_ZERO_THRESHOLD = 1e-12
NODE_TOLERANCE = 1e-8


def _nodes_within(seq, radius):
    z = as_nodes(seq)
    if radius is None:
        return z
    return z[np.abs(z) < radius]


def _log_product(z, nodes):
    """``sum_lambda log(1 - z/lambda)`` for every z, with -inf real part at zeros."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if len(nodes) == 0:
        return out.reshape(z.shape)
    rows = max(1, _CHUNK // len(nodes))
    with np.errstate(divide="ignore", invalid="ignore"):
        for lo in range(0, len(flat), rows):
            zz = flat[lo : lo + rows, None]
            f = 1.0 - zz / nodes[None, :]
            # complex division need not return exactly 1 at a node
            hit = (zz == nodes[None, :]) | (f == 0)
            logs = np.log(np.where(hit, 1.0, f))
            acc = logs.sum(axis=1)
            acc[hit.any(axis=1)] = -np.inf
            out[lo : lo + rows] = acc
    return out.reshape(z.shape)


def _exp_log(lp):
    with np.errstate(invalid="ignore", over="ignore"):
        val = np.where(np.isneginf(lp.real), 0.0, np.exp(np.where(np.isneginf(lp.real), 0.0, lp)))
    return val[()] if val.ndim == 0 else val


def eval_S(seq, z, radius=None):
    """Truncated generating function at z (scalar or array).

    Uses the nodes with ``|lambda| < radius`` (all nodes when radius is None).
    A node hit returns exactly 0.
    """
    return _exp_log(_log_product(z, _nodes_within(seq, radius)))


def log_abs_S(seq, z, radius=None):
    """``log|S(z)|``; ``-inf`` at nodes."""
    lp = _log_product(z, _nodes_within(seq, radius)).real
    return lp[()] if lp.ndim == 0 else lp


def _find_node(nodes, lam):
    lam = complex(lam)
    d = np.abs(nodes - lam)
    i = int(np.argmin(d)) if len(nodes) else -1
    if i < 0 or d[i] > NODE_TOLERANCE * (1 + abs(lam)):
        raise NodeNotInSequence(f"{lam} is not a node")
    return i


def _log_S_prime(nodes, i):
    lam = nodes[i]
    others = np.delete(nodes, i)
    return np.log(-1.0 / lam) + _log_product(lam, others)


def eval_S_prime(seq, lam, radius=None):
    """``S'(lambda) = -(1/lambda) prod_{mu != lambda} (1 - lambda/mu)`` at a node."""
    nodes = _nodes_within(seq, radius)
    try:
        i = _find_node(nodes, lam)
    except NodeNotInSequence:
        _find_node(as_nodes(seq), lam)
        raise NodeNotInSequence(f"{lam} lies outside the truncation radius {radius}")
    lam = nodes[i]
    # multiply by -1/lambda outside the logarithm so real data stays real
    return complex(-1.0 / lam * _exp_log(_log_product(lam, np.delete(nodes, i))))


class GeneratingFunction:
    """Truncated S for a fixed node set, with a one-entry cache for grid reuse."""

    def __init__(self, seq, radius=None):
        self.nodes = _nodes_within(seq, radius)
        self.radius = radius
        self._key = None
        self._val = None

    def log(self, z):
        z = np.asarray(z, dtype=complex)
        key = (z.shape, z.tobytes())
        if key != self._key:
            self._val = _log_product(z, self.nodes)
            self._key = key
        return self._val

    def __call__(self, z):
        return _exp_log(self.log(z))

    def log_prime(self, lam):
        return complex(_log_S_prime(self.nodes, _find_node(self.nodes, lam)))

    def prime(self, lam):
        return complex(np.exp(self.log_prime(lam)))


# ---------------------------------------------------------------------------
# d_N


def _cluster_tables(partition):
    pts = np.concatenate([c.array for c in partition.clusters])
    starts = np.cumsum([0] + [len(c) for c in partition.clusters[:-1]])
    return pts, starts


def log_d_N(partition: Partition, x):
    """``log d_N(x)`` and the minimizing cluster index, vectorized over real x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pts, starts = _cluster_tables(partition)
    vals = np.empty(len(x))
    idx = np.empty(len(x), dtype=int)
    rows = max(1, _CHUNK // len(pts))
    with np.errstate(divide="ignore"):
        for lo in range(0, len(x), rows):
            logs = np.log(np.abs(x[lo : lo + rows, None] - pts[None, :]))
            per = np.add.reduceat(logs, starts, axis=1)
            idx[lo : lo + rows] = np.argmin(per, axis=1)
            vals[lo : lo + rows] = per[np.arange(per.shape[0]), idx[lo : lo + rows]]
    return vals, idx


def d_N_eval(partition: Partition, x):
    """``d_N(x) = min_n prod_{lambda in tau_n} |x - lambda|`` and the argmin cluster.

    Scalar x gives ``(value, index)``; an array gives two arrays.
    """
    scalar = np.ndim(x) == 0
    lv, idx = log_d_N(partition, x)
    val = np.exp(lv)
    if scalar:
        return float(val[0]), int(idx[0])
    return val, idx


def cluster_products(partition: Partition, x):
    """Matrix ``p_n(x)`` (rows: x, columns: clusters)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pts, starts = _cluster_tables(partition)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(x[:, None] - pts[None, :]))
    return np.exp(np.add.reduceat(logs, starts, axis=1))


# ---------------------------------------------------------------------------
# weights


def _log_omega(gen, partition, g):
    cl = partition.cluster_of(g)
    others = np.array([p for p in cl.points if p != complex(g)], dtype=complex)
    return gen.log_prime(g).real - float(np.sum(np.log(np.abs(g - others))))


def weights_omega(seq, gamma, partition: Partition, radius=None):
    """``omega_n = |S'(gamma_n)| / prod_{lambda in cluster, lambda != gamma_n} |gamma_n - lambda|``."""
    gen = GeneratingFunction(seq, radius)
    return np.array([np.exp(_log_omega(gen, partition, complex(g))) for g in np.atleast_1d(gamma)])


def log_weight_ratio(gen, partition, x):
    """``log(|S(x)| / d_N(x))`` with the removable value at nodes."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ls = gen.log(x).real
    ld, idx = log_d_N(partition, x)
    with np.errstate(invalid="ignore"):
        out = ls - ld
    bad = ~np.isfinite(out)
    for i in np.flatnonzero(bad):
        cl = partition.clusters[idx[i]]
        hit = cl.array[np.argmin(np.abs(cl.array - x[i]))]
        out[i] = _log_omega(gen, partition, complex(hit))
    return out, bad


class AlphaResult(NamedTuple):
    alpha: float
    ratio: float
    degenerate: bool


def weight_ratio_alpha(x, n, omegas, partition: Partition, seq, radius=None) -> AlphaResult:
    """Best exponent ``alpha`` in ``omega_n^alpha omega_{n+1}^(1-alpha) ~ |S(x)|/d_N(x)``.

    ``ratio`` is ``omega_n^alpha omega_{n+1}^(1-alpha) d_N(x) / |S(x)|`` at the
    optimal alpha. The log of the ratio is affine in alpha, so the minimizer
    of its modulus over [0, 1] is the root when it lies inside, otherwise
    the better endpoint; ties keep the smallest alpha.
    At a node the removable value of ``|S|/d_N`` is used and the result is
    flagged ``degenerate``.
    """
    x = float(x)
    gen = GeneratingFunction(seq, radius)
    ls = float(gen.log(x).real)
    ld, _ = log_d_N(partition, x)
    degenerate = False
    if not np.isfinite(ls) or np.exp(ls) < S_ZERO_THRESHOLD * (1 + abs(x)):
        nodes = partition.nodes()
        if np.min(np.abs(nodes - x)) > NODE_TOLERANCE * (1 + abs(x)):
            raise SZero(f"|S({x})| vanishes away from the nodes")
        target, _ = log_weight_ratio(gen, partition, np.array([x]))
        target = float(target[0])
        degenerate = True
    else:
        target = ls - float(ld[0])
    la, lb = np.log(omegas[n]), np.log(omegas[n + 1])
    # g(alpha) = alpha * la + (1 - alpha) * lb - target
    g0, g1 = lb - target, la - target
    if g0 == g1:
        alpha = 0.0
    elif g0 * g1 <= 0:
        alpha = g0 / (g0 - g1)
    else:
        alpha = 0.0 if abs(g0) <= abs(g1) else 1.0
    alpha = float(min(1.0, max(0.0, alpha)))
    ratio = float(np.exp(alpha * la + (1 - alpha) * lb - target))
    return AlphaResult(alpha, ratio, degenerate)


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class WeightProfile:
    """``|S(x)|``, ``d_N(x)`` and the weight ``(|S(x)|/d_N(x))^p`` on a real grid.

    ``weight`` holds ``inf`` where d_N vanishes (grid point on a node).
    """

    grid: np.ndarray
    s_values: np.ndarray
    dN_values: np.ndarray
    weight: np.ndarray
    p: float

    @property
    def ratio(self):
        return self.weight

    def __len__(self):
        return len(self.grid)

    def rows(self):
        for x, s, d, w in zip(self.grid, self.s_values, self.dN_values, self.weight):
            yield x, s, d, w

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "abs_S", "d_N", "weight"])
        for x, s, d, w in self.rows():
            writer.writerow([_fmt(x), _fmt(s), _fmt(d), "inf" if d == 0 else _fmt(w)])


def _fmt(v):
    v = float(v)
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def weight_profile(seq, partition: Partition, grid, p=2.0, radius=None) -> WeightProfile:
    """Sample the weight ``(|S|/d_N)^p`` on the given real grid."""
    xs = np.asarray(grid, dtype=float)
    gen = GeneratingFunction(seq, radius)
    s_abs = np.abs(gen(xs))
    d, _ = d_N_eval(partition, xs) if xs.ndim else (np.array([d_N_eval(partition, xs)[0]]), None)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(d == 0, np.inf, (s_abs / np.where(d == 0, 1.0, d)) ** p)
    return WeightProfile(xs, s_abs, np.asarray(d), w, float(p))
