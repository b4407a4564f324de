"""Grid estimators for Muckenhoupt-type weight conditions and Hilbert transforms.

The supremum over all intervals (or index windows) is replaced by a maximum
over grid-aligned ones, so every estimate is a lower bound. Reports carry the
per-scale maxima so that trends, not single numbers, drive the verdict.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import CoincidentPoint, NonPositiveEntry, NonPositiveWeightEverywhere, SingularSampleGap

WEIGHT_FLOOR = 1e-300
GROWTH_THRESHOLD = 1.25
BOUNDED_TOLERANCE = 0.10

BOUNDED = "bounded"
GROWING = "growing"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ApReport:
    estimate: float
    per_scale: list
    verdict: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "estimate": self.estimate,
            "per_scale": [{"scale": s, "max_ratio": m} for s, m in self.per_scale],
            "verdict": self.verdict,
            "params": dict(self.params),
        }


def classify_trend(maxima, growth_threshold=GROWTH_THRESHOLD):
    """Verdict from per-scale maxima ordered by increasing scale.

    "growing" when the last two successive ratios both exceed
    ``growth_threshold``, or when the growth is sustained: the last three
    increments are positive and of comparable size (min/max >= 1/2) and
    together exceed 5% of the top value. The second rule catches the slow,
    logarithmic growth of borderline weights. "bounded" when the top value
    moved by at most 10% from the previous scale.
    """
    m = np.asarray(maxima, dtype=float)
    if len(m) < 3 or not np.all(np.isfinite(m)):
        return INCONCLUSIVE if len(m) < 3 else GROWING
    top = m[-3:]
    if np.all(top[1:] / top[:-1] > growth_threshold):
        return GROWING
    if len(m) >= 4:
        inc = np.diff(m[-4:])
        if np.all(inc > 0) and inc.min() >= 0.5 * inc.max() and inc.sum() > 0.05 * m[-1]:
            return GROWING
    if abs(m[-1] / m[-2] - 1.0) <= BOUNDED_TOLERANCE:
        return BOUNDED
    return INCONCLUSIVE


def _ap_windows(cw, cv, lengths, p):
    """Max of (avg w)(avg v)^(p-1) over all windows with the given lengths.

    ``cw``/``cv`` are cumulative sums (in the same length unit as ``lengths``).
    """
    best = 0.0
    for m in lengths:
        aw = (cw[m:] - cw[:-m]) / m
        av = (cv[m:] - cv[:-m]) / m
        r = aw * av ** (p - 1)
        best = max(best, float(np.max(r)))
    return best


def _sample_weight(weight, window, step):
    if callable(weight):
        lo, hi = window
        n = int(round((hi - lo) / step))
        # cell centers: a weight vanishing at a grid-aligned point is still sampled
        xs = lo + step * (np.arange(n) + 0.5)
        return xs, np.asarray(weight(xs), dtype=float), step
    xs, ws = (np.asarray(a, dtype=float) for a in weight)
    if len(xs) < 2:
        raise NonPositiveWeightEverywhere("need at least two samples")
    h = float(xs[-1] - xs[0]) / (len(xs) - 1)
    if window is not None:
        keep = (xs >= window[0]) & (xs <= window[1])
        xs, ws = xs[keep], ws[keep]
    return xs, ws, h


def continuous_ap(weight, p, scales, window=None, step=None) -> ApReport:
    """Grid estimate of ``sup_I (avg_I w)(avg_I w^(-1/(p-1)))^(p-1)``.

    ``weight`` is either a callable (sampled at cell centers of ``window``
    with spacing ``step``, default ``min(scales)/4``) or a pair
    ``(xs, ws)`` on a uniform grid. For every scale the intervals are all
    grid-aligned intervals of that length; averages are trapezoid integrals
    divided by the interval length.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    scales = sorted(float(s) for s in scales)
    if callable(weight):
        if window is None:
            raise ValueError("a window is needed to sample a callable weight")
        step = step or scales[0] / 4.0
    xs, ws, h = _sample_weight(weight, window, step)
    if not np.any(ws > WEIGHT_FLOOR):
        raise NonPositiveWeightEverywhere("weight vanishes on the whole grid")
    if np.any(~(ws > WEIGHT_FLOOR)) or np.any(~np.isfinite(ws)):
        bad = xs[~((ws > WEIGHT_FLOOR) & np.isfinite(ws))][0]
        raise NonPositiveWeightEverywhere(f"weight is zero, negative or infinite at x={bad}")
    dual = ws ** (-1.0 / (p - 1.0))
    # cumulative trapezoid in units of the grid step: constants integrate exactly
    cw = np.concatenate([[0.0], np.cumsum(0.5 * (ws[1:] + ws[:-1]))])
    cv = np.concatenate([[0.0], np.cumsum(0.5 * (dual[1:] + dual[:-1]))])
    per_scale = []
    for s in scales:
        m = int(round(s / h))
        if m < 1 or m >= len(xs):
            continue
        per_scale.append((m * h, _ap_windows(cw, cv, [m], p)))
    est = max((r for _, r in per_scale), default=float("nan"))
    return ApReport(
        est,
        per_scale,
        classify_trend([r for _, r in per_scale]),
        {"p": p, "grid": {"x_min": float(xs[0]), "x_max": float(xs[-1]), "step": h, "n": len(xs)}},
    )


def discrete_ap(w, p, max_window=None) -> ApReport:
    """Exhaustive ``max (avg w)(avg w^(-1/(p-1)))^(p-1)`` over index windows.

    Every window of length ``1..max_window`` is visited. ``per_scale`` groups
    lengths in dyadic bins ``[2^k, 2^(k+1))`` and records the largest length
    of each bin as its scale.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    w = np.asarray(w, dtype=float)
    if np.any(~(w > 0)) or np.any(~np.isfinite(w)):
        raise NonPositiveEntry("discrete weights must be positive and finite")
    n = len(w)
    max_window = n if max_window is None else min(int(max_window), n)
    dual = w ** (-1.0 / (p - 1.0))
    cw = np.concatenate([[0.0], np.cumsum(w)])
    cv = np.concatenate([[0.0], np.cumsum(dual)])
    per_scale = []
    lo = 1
    while lo <= max_window:
        hi = min(2 * lo - 1, max_window)
        per_scale.append((hi, _ap_windows(cw, cv, range(lo, hi + 1), p)))
        lo *= 2
    est = max(r for _, r in per_scale)
    return ApReport(est, per_scale, classify_trend([r for _, r in per_scale]), {"p": p, "n": n, "max_window": max_window})


# ---------------------------------------------------------------------------
# Hilbert transforms


def _midpoint_richardson(g, h, n):
    def mid(k):
        s = h * (np.arange(k) + 0.5) / k
        return np.sum(g(s)) * h / k

    return (4.0 * mid(2 * n) - mid(n)) / 3.0


def _quad_complex(fn, a, b, **kw):
    re = integrate.quad(lambda t: fn(t).real, a, b, limit=400, **kw)[0]
    im = integrate.quad(lambda t: fn(t).imag, a, b, limit=400, **kw)[0]
    return re + 1j * im


def hilbert_pv(f, z, T=np.inf, exclusion=1.0, panels=512):
    """``int f(t)/(t - z) dt`` over ``[-T, T]``, as a principal value for real z.

    ``f`` is a callable of a real array, or a pair ``(ts, fs)`` of samples on
    a uniform grid. For a callable and real z the part within ``exclusion``
    of z is folded into ``int_0^h (f(z+s) - f(z-s))/s ds`` (smooth at 0),
    integrated by the midpoint rule with Richardson extrapolation; the rest
    uses adaptive quadrature. Sampled input with real z requires z to sit on
    a sample or halfway between two, so the grid straddles it symmetrically.
    """
    z = complex(z)
    if not callable(f):
        return _hilbert_sampled(f, z)
    g = lambda t: np.asarray(f(t), dtype=complex)  # noqa: E731
    if z.imag != 0:
        x = z.real
        lo = -T if np.isfinite(T) else -np.inf
        hi = T if np.isfinite(T) else np.inf
        fn = lambda t: g(np.asarray(t)) / (t - z)  # noqa: E731
        mid = min(max(x, lo), hi)
        return complex(_quad_complex(fn, lo, mid) + _quad_complex(fn, mid, hi))
    x = z.real
    h = min(exclusion, T - abs(x)) if np.isfinite(T) else exclusion
    if h <= 0:
        raise SingularSampleGap("evaluation point at or beyond the integration window")
    folded = lambda s: (g(x + s) - g(x - s)) / s  # noqa: E731
    inner = _midpoint_richardson(folded, h, panels)
    fn = lambda t: g(np.asarray(t)) / (t - x)  # noqa: E731
    right = _quad_complex(fn, x + h, T if np.isfinite(T) else np.inf)
    left = _quad_complex(fn, -T if np.isfinite(T) else -np.inf, x - h)
    return complex(inner + left + right)


def _hilbert_sampled(samples, z):
    ts, fs = (np.asarray(a) for a in samples)
    fs = fs.astype(complex)
    h = float(ts[-1] - ts[0]) / (len(ts) - 1)
    wts = np.full(len(ts), h)
    wts[0] = wts[-1] = h / 2
    if z.imag != 0:
        return complex(np.sum(wts * fs / (ts - z)))
    pos = (z.real - ts[0]) / h
    k = int(round(pos))
    if abs(pos - k) < 1e-6:
        # on a sample: skip it, the neighbors pair off symmetrically (step 2h rule)
        keep = (np.arange(len(ts)) - k) % 2 == 1
        return complex(np.sum(2 * h * fs[keep] / (ts[keep] - z.real)))
    k = int(np.floor(pos))
    if abs(pos - k - 0.5) < 1e-6:
        return complex(np.sum(wts * fs / (ts - z.real)))
    raise SingularSampleGap(f"grid does not straddle {z.real} symmetrically")


def discrete_hilbert(gamma, sigma, a):
    """``(H a)_n = sum_j a_j / (gamma_j - sigma_n)`` for every ``sigma_n``."""
    gamma = np.asarray(gamma, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if len(a) != len(gamma):
        raise ValueError("need one coefficient per gamma point")
    diff = gamma[None, :] - sigma[:, None]
    if np.any(diff == 0):
        raise CoincidentPoint("some gamma_j equals some sigma_n")
    return (a[None, :] / diff).sum(axis=1)
