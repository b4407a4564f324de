"""Restriction to a node set, trace-space norms, interpolants and
numerical checks for band-limited functions.
"""

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .clustering import Partition, as_nodes, neighbor_groups
from .divided import PSEUDOHYPERBOLIC, Cluster, newton_coefficients
from .errors import DerivativeZero, FlavorMismatch, MissingTraceValue, PoleOnContour, ZeroNormWarning
from .generating import NODE_TOLERANCE, GeneratingFunction, _log_product
from .geometry import HalfPlane, Rectangle

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

_EVAL_CHUNK = 4096


@dataclass(frozen=True)
class SpaceParams:
    tau: float = np.pi
    p: float = 2.0
    epsilon: Optional[float] = None
    capacity: int = 1

    def __post_init__(self):
        # tau = 0 drops the exponential factor from the norms
        if not self.tau >= 0:
            raise ValueError("tau must be nonnegative")
        if not 1 < self.p < np.inf:
            raise ValueError("p must lie in (1, inf)")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if int(self.capacity) < 1:
            raise ValueError("capacity must be at least 1")

    def to_dict(self):
        return {"tau": self.tau, "p": self.p, "epsilon": self.epsilon, "capacity": self.capacity}


@dataclass(frozen=True)
class BandlimitedFunction:
    """An entire function given by its evaluator, with its declared exponential type."""

    evaluator: Callable
    declared_type: float
    description: str = ""

    def __call__(self, z):
        out = self.evaluator(np.asarray(z, dtype=complex))
        return out[()] if np.ndim(out) == 0 else out

    def scaled(self, c):
        ev = self.evaluator
        return BandlimitedFunction(lambda z: c * ev(z), self.declared_type, f"{c}*{self.description}")

    def __add__(self, other):
        f, g = self.evaluator, other.evaluator
        tau = max(self.declared_type, other.declared_type)
        return BandlimitedFunction(lambda z: f(z) + g(z), tau, f"{self.description}+{other.description}")


class TraceData:
    """Complex value per node; lookup by node value."""

    def __init__(self, nodes, values):
        self.nodes = np.atleast_1d(np.asarray(nodes, dtype=complex)).ravel()
        self.values = np.atleast_1d(np.asarray(values, dtype=complex)).ravel()
        if len(self.nodes) != len(self.values):
            raise ValueError("one value per node is required")
        self._index = {complex(z): i for i, z in enumerate(self.nodes)}

    @classmethod
    def from_mapping(cls, mapping):
        keys = list(mapping)
        return cls(keys, [mapping[k] for k in keys])

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, z):
        try:
            return self.values[self._index[complex(z)]]
        except KeyError:
            raise MissingTraceValue(f"no trace value at node {z}") from None

    def take(self, points):
        return np.array([self[z] for z in points], dtype=complex)

    def support(self):
        mask = self.values != 0
        return self.nodes[mask], self.values[mask]

    def as_dict(self):
        return dict(zip(self.nodes.tolist(), self.values.tolist()))


def restrict(f, seq) -> TraceData:
    """Values of f at every node."""
    z = as_nodes(seq)
    return TraceData(z, np.asarray(f(z), dtype=complex) * np.ones(len(z)))


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormTerm:
    """Contribution ``weight * sum_k |c_k|^p`` of one group."""

    cluster: Cluster
    weight: float
    coefficients: np.ndarray
    value: float

    def to_dict(self):
        return {
            "points": list(self.cluster.points),
            "base": self.cluster.base,
            "flavor": self.cluster.flavor,
            "exp_sign": self.cluster.exp_sign,
            "weight": self.weight,
            "coefficients": self.coefficients.tolist(),
            "term": self.value,
        }


def _group_term(a, cluster, tau, p, weight):
    vals = a.take(cluster.points)
    if tau:
        vals = vals * np.exp(cluster.exp_sign * 1j * tau * cluster.array)
    coef = newton_coefficients(cluster, vals)
    return NormTerm(cluster, float(weight), coef, float(weight * np.sum(np.abs(coef) ** p)))


def _finish(terms, p, breakdown):
    norm = float(sum(t.value for t in terms) ** (1.0 / p))
    return (norm, terms) if breakdown else norm


def trace_norm_partition(a: TraceData, partition: Partition, params: SpaceParams, breakdown=False):
    """Norm of a trace relative to a partition into groups.

    Each group contributes ``(1 + |Im base|) sum_k |Delta^k(a e^{+-i tau .})|^p``
    with the group's own divided-difference flavor and exponential sign.
    """
    terms = [_group_term(a, c, params.tau, params.p, 1 + abs(c.base.imag)) for c in partition.clusters]
    return _finish(terms, params.p, breakdown)


def trace_norm_neighbors(a: TraceData, seq, params: SpaceParams, eta: float, breakdown=False):
    """Norm of a trace built on the neighbor group of every node."""
    groups = neighbor_groups(seq, params.capacity, eta)
    terms = [_group_term(a, g, params.tau, params.p, 1 + abs(g.base.imag)) for g in groups]
    return _finish(terms, params.p, breakdown)


def trace_norm_halfplane(a: TraceData, partition: Partition, hp: HalfPlane, p=2.0, breakdown=False):
    """Half-plane trace norm: groups weighted by the height of their base point."""
    for c in partition.clusters:
        if c.flavor != PSEUDOHYPERBOLIC or c.halfplane != hp:
            raise FlavorMismatch(f"cluster {c.points} is not a pseudohyperbolic cluster of {hp}")
    terms = [_group_term(a, c, 0.0, p, float(hp.height(c.base))) for c in partition.clusters]
    return _finish(terms, p, breakdown)


# ---------------------------------------------------------------------------
# interpolants


def sinc_kernel(x0, tau) -> BandlimitedFunction:
    """``sin(tau (z - x0)) / (tau (z - x0))``, equal to 1 at x0."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    x0 = float(x0)

    def ev(z):
        u = tau * (np.asarray(z, dtype=complex) - x0)
        small = np.abs(u) < 1e-8
        safe = np.where(small, 1.0, u)
        return np.where(small, 1.0 - u * u / 6.0, np.sin(safe) / safe)

    return BandlimitedFunction(ev, float(tau), f"sinc(x0={x0}, tau={tau})")


def cardinal_interpolant(a: TraceData, seq, radius=None, generating=None) -> BandlimitedFunction:
    """``f(z) = sum_lambda a(lambda) S(z) / (S'(lambda)(z - lambda))`` over the support of a.

    Near a support node the quotient ``S(z)/(z - lambda)`` is evaluated as
    ``-(1/lambda) prod_{mu != lambda}(1 - z/mu)``, which is exact at the node.
    ``generating`` may pass a shared :class:`GeneratingFunction` to reuse
    S evaluations on a common grid.
    """
    gen = generating or GeneratingFunction(seq, radius)
    supp, coef = a.support()
    node_idx = []
    log_dS = []
    for lam in supp:
        d = np.abs(gen.nodes - lam)
        if len(d) == 0 or d.min() != 0:
            raise DerivativeZero(f"support node {lam} is not a zero of the truncated S")
        i = int(np.argmin(d))
        ld = gen.log_prime(lam)
        if not np.isfinite(ld.real):
            raise DerivativeZero(f"S'({lam}) vanishes")
        node_idx.append(i)
        log_dS.append(ld)
    log_dS = np.array(log_dS, dtype=complex)

    def ev(z):
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = z.ravel()
        out = np.zeros(len(z), dtype=complex)
        if len(supp) == 0:
            return out.reshape(shape)
        log_s = gen.log(z)
        for lo in range(0, len(z), _EVAL_CHUNK):
            zz = z[lo : lo + _EVAL_CHUNK]
            ls = log_s[lo : lo + _EVAL_CHUNK]
            diff = zz[:, None] - supp[None, :]
            near = np.abs(diff) < NODE_TOLERANCE * (1 + np.abs(supp[None, :]))
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                terms = np.exp(ls[:, None] - log_dS[None, :]) / diff
            terms = np.where(np.isneginf(ls.real)[:, None] & ~near, 0.0, terms)
            for r, c in zip(*np.nonzero(near)):
                lam = supp[c]
                others = np.delete(gen.nodes, node_idx[c])
                lq = np.log(-1.0 / lam) + _log_product(zz[r], others)
                terms[r, c] = np.exp(lq - log_dS[c])
                # the other terms carry the factor S(z), which vanishes at lam
                if zz[r] == lam:
                    terms[r, np.arange(len(supp)) != c] = 0.0
            out[lo : lo + _EVAL_CHUNK] = terms @ coef
        return out.reshape(shape)

    tau_hint = float(np.pi * len(gen.nodes) / (2 * max(np.max(np.abs(gen.nodes)), 1e-300))) if len(gen.nodes) else 0.0
    return BandlimitedFunction(ev, tau_hint, "cardinal interpolant")


# ---------------------------------------------------------------------------
# Paley-Wiener checks


def _line_integral(f, p, T, step, shift=0.0):
    n = int(round(2 * T / step))
    xs = np.linspace(-T, T, n + 1)
    vals = np.abs(f(xs + 1j * shift)) ** p
    return float(_trapezoid(vals, xs))


def pw_lp_norm(f, p, window, step=0.05) -> float:
    """``(int_{-T}^{T} |f(x)|^p dx)^(1/p)`` by the trapezoid rule."""
    return _line_integral(f, p, window, step) ** (1.0 / p)


def plancherel_polya_ratio(f, p, a, tau, window, step=0.05) -> float:
    """``int |f(x + ia)|^p dx / (e^{tau p |a|} int |f(x)|^p dx)``; should not exceed 1."""
    base = _line_integral(f, p, window, step)
    if base == 0:
        warnings.warn("zero norm: ratio set to 0", ZeroNormWarning, stacklevel=2)
        return 0.0
    shifted = base if a == 0 else _line_integral(f, p, window, step, shift=a)
    return shifted / (np.exp(tau * p * abs(a)) * base)


def pointwise_bound_ratio(f, p, tau, z, norm) -> float:
    """``|f(z)| (1 + |Im z|)^(1/p) e^{-tau |Im z|} / ||f||_p``."""
    if not norm > 0:
        warnings.warn("zero norm: ratio set to 0", ZeroNormWarning, stacklevel=2)
        return 0.0
    y = abs(complex(z).imag)
    return float(abs(f(complex(z))) * (1 + y) ** (1.0 / p) * np.exp(-tau * y) / norm)


def _five_point_derivative(fn, z, h):
    return (fn(z - 2 * h) - 8 * fn(z - h) + 8 * fn(z + h) - fn(z + 2 * h)) / (12 * h)


def residue_identity_gap(rect: Rectangle, numerator, denominator, cluster: Optional[Cluster] = None, panels=1024, order=8):
    """Relative gap between a contour integral of ``numerator/denominator``
    around ``rect`` and ``2 pi i`` times the residues at the cluster nodes.

    The contour is split into ``panels`` Gauss-Legendre panels per side.
    The residues assume simple zeros of the denominator at the nodes:
    ``numerator(lambda) / denominator'(lambda)``.
    """
    t, wq = np.polynomial.legendre.leggauss(order)
    corners = rect.corners()
    total = 0j
    scale = max(rect.width, rect.height)
    for a, b in zip(corners, corners[1:] + corners[:1]):
        edges = a + (b - a) * np.arange(panels + 1) / panels
        lo, hi = edges[:-1, None], edges[1:, None]
        zq = (0.5 * (lo + hi) + 0.5 * (hi - lo) * t[None, :]).ravel()
        jac = (0.5 * (hi - lo) * wq[None, :]).ravel()
        den = np.asarray(denominator(zq), dtype=complex)
        if np.any(np.abs(den) < 1e-14 * (1 + np.max(np.abs(den)))):
            raise PoleOnContour("denominator vanishes on the contour")
        total += np.sum(np.asarray(numerator(zq), dtype=complex) / den * jac)
    res = 0j
    if cluster is not None:
        pts = cluster.array
        if np.any(~rect.contains(pts)):
            raise PoleOnContour("cluster node outside the rectangle")
        if np.any(~rect.contains(pts, margin=1e-12 * scale)):
            raise PoleOnContour("cluster node on the contour")
        h = 1e-3 * scale
        for lam in pts:
            res += complex(numerator(lam)) / complex(_five_point_derivative(denominator, lam, h))
    target = 2j * np.pi * res
    return float(abs(total - target) / (1 + abs(target)))
