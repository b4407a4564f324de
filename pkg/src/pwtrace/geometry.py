"""Half-plane primitives: Blaschke factors and the two metrics on the plane.

All functions accept Python complex scalars or numpy arrays and broadcast.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator

# only guards genuine poles
POLE_THRESHOLD = 1e-300


@dataclass(frozen=True)
class HalfPlane:
    """The open half-plane ``Im z > offset`` (sign=+1) or ``Im z < offset`` (sign=-1)."""

    sign: int = 1
    offset: float = 0.0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        if not np.isfinite(self.offset):
            raise ValueError("offset must be finite")

    @classmethod
    def upper(cls, offset=0.0):
        return cls(1, float(offset))

    @classmethod
    def lower(cls, offset=0.0):
        return cls(-1, float(offset))

    def contains(self, z):
        """Strict membership; boundary points are *not* inside."""
        return self.sign * (np.imag(z) - self.offset) > 0

    def height(self, z):
        """Distance from z to the boundary line (signed, positive inside)."""
        return self.sign * (np.imag(z) - self.offset)

    def to_dict(self):
        return {"sign": "upper" if self.sign > 0 else "lower", "offset": self.offset}


UPPER = HalfPlane.upper()
LOWER = HalfPlane.lower()


def blaschke_factor(z, mu, hp=UPPER):
    """Un-normalized Blaschke factor ``(z - mu) / (z - conj(mu) - 2i a)``.

    The formula does not depend on which side of ``Im z = a`` is meant; ``hp``
    only supplies the offset. The modulus is < 1 when z and mu lie in the
    same open half-plane and equals 1 on the boundary line.
    """
    z = np.asarray(z, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    den = z - np.conj(mu) - 2j * hp.offset
    if np.any(np.abs(den) < POLE_THRESHOLD):
        raise DegenerateDenominator(f"Blaschke factor pole hit at z={z!r}, mu={mu!r}")
    out = (z - mu) / den
    return out[()] if out.ndim == 0 else out


def pseudo_distance(z, w, hp=UPPER):
    """Pseudohyperbolic distance ``|b_w(z)|`` in the half-plane ``hp``.

    Returns 0 when z == w; boundary points give 1.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    num = np.abs(z - w)
    den = np.abs(z - np.conj(w) - 2j * hp.offset)
    same = num == 0
    if np.any((den < POLE_THRESHOLD) & ~same):
        raise DegenerateDenominator("pseudohyperbolic distance undefined for these points")
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(same, 0.0, num / np.where(same, 1.0, den))
    return out[()] if out.ndim == 0 else out


def delta_distance(z, w):
    """Mixed distance ``|z - w| / (1 + |z - conj(w)|)``.

    Behaves like the Euclidean distance near the real axis and like the
    pseudohyperbolic one far from it. Note that it is not bounded by 1.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = np.abs(z - w) / (1.0 + np.abs(z - np.conj(w)))
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Rectangle:
    """Closed axis-parallel rectangle centered at ``center`` (width along Re)."""

    center: complex
    width: float
    height: float

    def contains(self, z, margin=0.0):
        """True when z lies inside with at least ``margin`` to every side."""
        z = np.asarray(z, dtype=complex)
        dx = np.abs(z.real - self.center.real)
        dy = np.abs(z.imag - self.center.imag)
        return (dx <= self.width / 2 - margin) & (dy <= self.height / 2 - margin)

    def corners(self):
        c, hw, hh = self.center, self.width / 2, self.height / 2
        return (c - hw - 1j * hh, c + hw - 1j * hh, c + hw + 1j * hh, c - hw + 1j * hh)

    def boundary(self, per_side=64):
        """Points on the boundary, counter-clockwise, ``per_side`` per edge."""
        corners = self.corners()
        t = np.arange(per_side) / per_side
        edges = [a + (b - a) * t for a, b in zip(corners, corners[1:] + corners[:1])]
        return np.concatenate(edges)

    def overlaps(self, other):
        return (
            abs(self.center.real - other.center.real) <= (self.width + other.width) / 2
            and abs(self.center.imag - other.center.imag) <= (self.height + other.height) / 2
        )

    def to_dict(self):
        return {"center": self.center, "width": self.width, "height": self.height}
