"""Divided differences on small node groups and the Newton-type interpolant.

Two calculi are supported. The *pseudohyperbolic* one divides by Blaschke
factors ``b_{mu_k}(mu_j)`` of a half-plane; the *euclidean* one divides by
``mu_j - mu_k`` and is the classical Newton scheme.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BoundDegenerate,
    DuplicatePoints,
    EtaNonPositive,
    OrderOutOfRange,
)
from .geometry import HalfPlane, blaschke_factor

EUCLIDEAN = "euclidean"
PSEUDOHYPERBOLIC = "pseudohyperbolic"


def lex_key(z):
    z = complex(z)
    return (z.real, z.imag)


@dataclass(frozen=True)
class Cluster:
    """An ordered group of distinct nodes with its divided-difference flavor.

    ``base_index`` points at the distinguished node whose imaginary part
    weighs the group in the trace norms; ``exp_sign`` selects the
    multiplier ``exp(+i tau z)`` or ``exp(-i tau z)``.
    """

    points: tuple
    flavor: str = EUCLIDEAN
    halfplane: Optional[HalfPlane] = None
    base_index: int = -1
    exp_sign: int = 1
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if not pts:
            raise ValueError("a cluster needs at least one point")
        if not all(np.isfinite(p.real) and np.isfinite(p.imag) for p in pts):
            raise ValueError("cluster points must be finite")
        if len(set(pts)) != len(pts):
            raise DuplicatePoints(f"repeated point in cluster {pts}")
        if self.flavor not in (EUCLIDEAN, PSEUDOHYPERBOLIC):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor == PSEUDOHYPERBOLIC:
            if self.halfplane is None:
                raise ValueError("pseudohyperbolic cluster needs a half-plane")
            if not all(self.halfplane.contains(p) for p in pts):
                raise ValueError("pseudohyperbolic cluster must lie strictly inside its half-plane")
        if self.exp_sign not in (1, -1):
            raise ValueError("exp_sign must be +1 or -1")
        base = self.base_index % len(pts)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "base_index", base)
        object.__setattr__(self, "_array", np.array(pts, dtype=complex))

    @classmethod
    def ordered(cls, points, flavor=EUCLIDEAN, halfplane=None, exp_sign=1, base=None):
        """Build a cluster with the canonical (Re, Im) ordering.

        The base point is the last point of the ordering unless ``base`` names
        one of the points explicitly.
        """
        pts = sorted((complex(p) for p in points), key=lex_key)
        base_index = -1 if base is None else pts.index(complex(base))
        return cls(tuple(pts), flavor, halfplane, base_index, exp_sign)

    def __len__(self):
        return len(self.points)

    @property
    def array(self):
        return self._array

    @property
    def base(self):
        return self.points[self.base_index]

    def factor(self, k, z):
        """The k-th Newton basis factor evaluated at z."""
        mu = self.points[k]
        if self.flavor == PSEUDOHYPERBOLIC:
            return blaschke_factor(z, mu, self.halfplane)
        return np.asarray(z, dtype=complex) - mu

    def to_dict(self):
        return {
            "points": list(self.points),
            "flavor": self.flavor,
            "halfplane": None if self.halfplane is None else self.halfplane.to_dict(),
            "base": self.base,
            "exp_sign": self.exp_sign,
        }


def newton_coefficients(cluster: Cluster, values: Sequence[complex]) -> np.ndarray:
    """All divided differences ``Delta^k(a_1, ..., a_{k+1})`` for k = 0..len(values)-1.

    Uses the tableau ``T_k[j] = Delta^k(a_1..a_k, a_j)``, which is exactly the
    defining recursion with the first k arguments held fixed.
    """
    a = np.array(values, dtype=complex)
    n = len(a)
    if n > len(cluster):
        raise OrderOutOfRange(f"{n} values for a cluster of {len(cluster)} points")
    mu = cluster.array
    coef = np.empty(n, dtype=complex)
    row = a.copy()
    for k in range(n):
        coef[k] = row[k]
        if k == n - 1:
            break
        den = cluster.factor(k, mu[k + 1 : n])
        if np.any(den == 0):
            raise DuplicatePoints("zero denominator in divided difference")
        row[k + 1 : n] = (row[k + 1 : n] - row[k]) / den
    return coef


def divided_difference(cluster: Cluster, values: Sequence[complex], order: int) -> complex:
    """Divided difference of the given order on the first ``order + 1`` points.

    >>> from pwtrace.geometry import UPPER
    >>> c = Cluster((1j, 2j), PSEUDOHYPERBOLIC, UPPER)
    >>> round(abs(divided_difference(c, [0, 1], 1)), 12)
    3.0
    """
    if order < 0 or order > len(cluster) - 1:
        raise OrderOutOfRange(f"order {order} outside 0..{len(cluster) - 1}")
    if len(values) < order + 1:
        raise OrderOutOfRange(f"order {order} needs {order + 1} values, got {len(values)}")
    return complex(newton_coefficients(cluster, list(values)[: order + 1])[order])


def newton_eval(cluster: Cluster, values: Sequence[complex], z):
    """Evaluate the Newton-type interpolant ``sum_k Delta^k prod_{l<k} phi_l(z)``.

    ``phi_l`` is the Blaschke factor at the l-th node (pseudohyperbolic
    flavor) or ``z - mu_l`` (euclidean flavor). The result takes the given
    value at every node of the cluster.
    """
    if len(values) != len(cluster):
        raise OrderOutOfRange("newton_eval needs one value per cluster point")
    coef = newton_coefficients(cluster, values)
    z = np.asarray(z, dtype=complex)
    acc = np.full(z.shape, coef[-1], dtype=complex)
    for k in range(len(coef) - 2, -1, -1):
        acc = coef[k] + cluster.factor(k, z) * acc
    return acc[()] if acc.ndim == 0 else acc


def dd_bound(cluster: Cluster, eta: float, sup_norm: float, order: int) -> float:
    """Upper bound for ``|Delta^j f|`` on a group at pseudohyperbolic distance
    at least ``eta`` from the boundary of a compact set where ``|f| <= sup_norm``.

    The bound is ``(2/eta)^j * prod_{k=0..j} 1/(1 - k/(2M)) * sup_norm`` with
    ``M`` the number of points in the group.
    """
    if eta <= 0:
        raise EtaNonPositive(f"eta must be positive, got {eta}")
    m = len(cluster)
    if order < 0 or order > m - 1:
        raise OrderOutOfRange(f"order {order} outside 0..{m - 1}")
    c = (2.0 / eta) ** order
    for k in range(order + 1):
        shrink = 1.0 - k / (2.0 * m)
        if shrink <= 0:
            raise BoundDegenerate(f"1 - {k}/(2*{m}) is not positive")
        c /= shrink
    return c * sup_norm
