"""Evidence reports for the sufficient conditions on a node set.

Both reports share one pipeline and differ only in the grouping: the plain
report treats every node as its own group, the grouped report uses the
adapted partition at capacity N. With N = 1 the two coincide.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clustering import (
    NodeSequence,
    adapted_partition,
    log_carleson_constant,
    density_radius,
    n_coloring,
    singleton_partition,
)
from .divided import EUCLIDEAN
from .errors import PWTraceError
from .generating import GeneratingFunction, log_weight_ratio, weights_omega
from .geometry import HalfPlane
from .muckenhoupt import BOUNDED, GROWING, continuous_ap, discrete_ap
from .traces import SpaceParams

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

ENTRY_NAMES = (
    "relative_density",
    "carleson_per_halfplane",
    "S_convergence_trend",
    "Ap_profile",
    "discrete_Ap_profile",
)

CARLESON_STABILITY = 0.6
TYPE_TOLERANCE = 0.25
DENSITY_SPACING_FACTOR = 10.0


@dataclass
class ConditionEntry:
    name: str
    verdict: str
    evidence: dict = field(default_factory=dict)
    notes: str = ""

    def to_dict(self):
        return {"name": self.name, "verdict": self.verdict, "evidence": self.evidence, "notes": self.notes}


@dataclass
class ConditionReport:
    mode: str
    params: dict
    entries: list

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def verdicts(self):
        return {e.name: e.verdict for e in self.entries}

    @property
    def all_pass(self):
        return all(e.verdict == PASS for e in self.entries)

    def to_dict(self):
        return {"mode": self.mode, "params": self.params, "entries": [e.to_dict() for e in self.entries]}


@dataclass(frozen=True)
class CheckGrids:
    """Optional overrides for the estimator grids.

    ``radius`` is the truncation radius R (default: largest node modulus,
    all nodes used). ``a_values`` are the boundary offsets probed for the
    Carleson test. ``ap_window``/``ap_step``/``ap_scales`` fix the real grid
    of the weight test (default half-width ``min(R/8, sqrt(R)/2)``, where
    truncating S changes the weight by a bounded factor only).
    """

    radius: Optional[float] = None
    a_values: Optional[tuple] = None
    ap_window: Optional[tuple] = None
    ap_step: Optional[float] = None
    ap_scales: Optional[tuple] = None
    max_window: int = 512


def _workers():
    try:
        return max(1, int(os.environ.get("PWTRACE_THREADS", "4")))
    except ValueError:
        return 1


def _ap_verdict(v):
    return PASS if v == BOUNDED else FAIL if v == GROWING else INCONCLUSIVE


# ---------------------------------------------------------------------------
# individual estimators


def _density_entry(z, R, r):
    half = R / 2
    count = int(np.sum(np.abs(z.real) <= half))
    spacing = 2 * half / count if count else np.inf
    threshold = min(half / 4, DENSITY_SPACING_FACTOR * spacing)
    verdict = PASS if r < threshold else FAIL
    return ConditionEntry(
        "relative_density",
        verdict,
        {"r": r, "window": [-half, half], "mean_spacing": spacing, "threshold": threshold},
        "largest distance from a real point of the window to the nodes",
    )


def _carleson_entry(classes, R, a_values):
    rows = []
    ok = True
    for ci, cls in enumerate(classes):
        cls = cls[np.abs(cls) < R]
        for a in a_values:
            for hp in (HalfPlane.upper(a), HalfPlane.lower(a)):
                sub = cls[hp.contains(cls)]
                half = sub[np.abs(sub) < R / 2]
                row = {"class": ci, "a": a, "side": "upper" if hp.sign > 0 else "lower", "n": len(sub)}
                if len(half) < 2:
                    row.update(log_constant=0.0, log_constant_half=0.0, vacuous=True)
                    rows.append(row)
                    continue
                l_full = log_carleson_constant(sub, hp)
                l_half = log_carleson_constant(half, hp)
                stable = np.isfinite(l_full) and l_full - l_half >= np.log(CARLESON_STABILITY)
                ok &= bool(stable)
                row.update(log_constant=l_full, log_constant_half=l_half, vacuous=False)
                rows.append(row)
    return ConditionEntry(
        "carleson_per_halfplane",
        PASS if ok else FAIL,
        {"probes": rows, "stability": CARLESON_STABILITY},
        "constant at radius R against radius R/2; decay signals an inseparable subsequence",
    )


def _s_trend_entry(z, R, tau):
    radii = [R / 8, R / 4, R / 2, R]
    xs = np.linspace(-R / 16, R / 16, 129)
    vals = [GeneratingFunction(z, rad)(xs) for rad in radii]
    diffs = [float(np.max(np.abs(vals[i] - vals[i + 1]) / (1 + np.abs(vals[i + 1])))) for i in range(3)]
    trend = all(diffs[i + 1] <= diffs[i] * (1 + 1e-6) + 1e-14 for i in range(2))
    gen = GeneratingFunction(z, R)
    y1, y2 = R / 32, R / 16
    l1, l2 = gen.log(np.array([1j * y1, 1j * y2])).real
    type_est = float((l2 - l1) / (y2 - y1))
    type_ok = abs(type_est - tau) <= TYPE_TOLERANCE * tau
    return ConditionEntry(
        "S_convergence_trend",
        PASS if trend and type_ok else FAIL,
        {
            "radii": radii,
            "successive_differences": diffs,
            "nonincreasing": trend,
            "type_estimate": type_est,
            "tau": tau,
        },
        "truncation differences on |x| <= R/16; growth rate of log|S(iy)| for y in [R/32, R/16]",
    )


def _ap_grid(R, r, eps, grids):
    if grids.ap_window is not None:
        lo, hi = grids.ap_window
    else:
        half = min(R / 8, 0.5 * np.sqrt(R))
        lo, hi = -half, half
    step = grids.ap_step or min(r, eps) / 16
    n = max(2, int(round((hi - lo) / step)))
    step = (hi - lo) / n
    xs = lo + step * (np.arange(n) + 0.5)
    if grids.ap_scales is not None:
        scales = sorted(grids.ap_scales)
    else:
        scales = []
        s = 4 * step
        while s <= (hi - lo) * (1 + 1e-12):
            scales.append(s)
            s *= 2
    return xs, step, scales, (lo, hi)


def _ap_entry(z, partition, R, p, xs, scales):
    gen = GeneratingFunction(z, R)
    logw, at_node = log_weight_ratio(gen, partition, xs)
    rep = continuous_ap((xs, np.exp(p * logw)), p, scales)
    ev = rep.to_dict()
    ev["nodes_on_grid"] = int(np.sum(at_node))
    return ConditionEntry("Ap_profile", _ap_verdict(rep.verdict), ev, "weight (|S(x)|/d_N(x))^p")


def _select_gamma(partition, window, eps):
    lo, hi = window
    bases = [c.base for c in partition.clusters if c.flavor == EUCLIDEAN]
    bases = sorted((b for b in bases if lo <= b.real <= hi), key=lambda b: (b.real, b.imag))
    out = []
    for b in bases:
        if not out or b.real - out[-1].real >= eps / 4:
            out.append(b)
    return np.array(out, dtype=complex)


def _discrete_entry(z, partition, R, p, window, eps, max_window):
    gamma = _select_gamma(partition, window, eps)
    if len(gamma) < 4:
        return ConditionEntry(
            "discrete_Ap_profile", INCONCLUSIVE, {"n_gamma": len(gamma)}, "too few strip nodes in the window"
        )
    om = weights_omega(z, gamma, partition, R)
    rep = discrete_ap(om**p, p, min(max_window, len(gamma)))
    ev = rep.to_dict()
    ev.update(n_gamma=len(gamma), omega_min=float(om.min()), omega_max=float(om.max()))
    return ConditionEntry("discrete_Ap_profile", _ap_verdict(rep.verdict), ev, "weights omega_n^p on strip base points")


# ---------------------------------------------------------------------------
# orchestration


def _guard(name, fn, *args):
    try:
        return fn(*args)
    except (PWTraceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return ConditionEntry(name, INCONCLUSIVE, {"error": type(exc).__name__}, str(exc))


def _run(mode, seq, params, grids, make_partition):
    grids = grids or CheckGrids()
    seq = seq if isinstance(seq, NodeSequence) else NodeSequence(seq)
    z = seq.nodes
    R0 = seq.max_modulus
    R = grids.radius or np.nextafter(R0, np.inf)
    z_in = z[np.abs(z) < R]
    r = density_radius(z_in, window=(-R / 2, R / 2))
    eps = params.epsilon or r
    partition = make_partition(z_in, eps)
    # at height h the truncated constant drifts like h^2/R; keep probes where that is small
    cap = min(R / 32, 0.25 * np.sqrt(R))
    a_values = grids.a_values or tuple(float(np.clip(a, -cap, cap)) for a in (-2 * r, -r, r, 2 * r))
    xs, step, scales, window = _ap_grid(R, r, eps, grids)
    classes = n_coloring(partition)
    jobs = [
        ("relative_density", _density_entry, z_in, R, r),
        ("carleson_per_halfplane", _carleson_entry, classes, R, a_values),
        ("S_convergence_trend", _s_trend_entry, z_in, R, params.tau),
        ("Ap_profile", _ap_entry, z_in, partition, R, params.p, xs, scales),
        ("discrete_Ap_profile", _discrete_entry, z_in, partition, R, params.p, window, eps, grids.max_window),
    ]
    with ThreadPoolExecutor(max_workers=min(len(jobs), _workers())) as pool:
        futures = [pool.submit(_guard, name, fn, *args) for name, fn, *args in jobs]
        entries = [f.result() for f in futures]
    return ConditionReport(
        mode,
        {
            **params.to_dict(),
            "epsilon_used": eps,
            "radius": float(R),
            "n_nodes": len(z_in),
            "n_groups": len(partition),
            "ap_window": list(window),
            "ap_step": step,
        },
        entries,
    )


def check_LS(seq, params: SpaceParams, grids: Optional[CheckGrids] = None) -> ConditionReport:
    """Evidence that a node set is a complete interpolating sequence (every node its own group)."""
    return _run("ls", seq, params, grids, lambda z, eps: singleton_partition(z, eps))


def check_HN(seq, params: SpaceParams, grids: Optional[CheckGrids] = None) -> ConditionReport:
    """Evidence for the grouped conditions at capacity ``params.capacity``.

    Raises ``PartitionFailed`` when the node set cannot be grouped at
    (epsilon, capacity).
    """
    return _run("hn", seq, params, grids, lambda z, eps: adapted_partition(z, eps, params.capacity))
