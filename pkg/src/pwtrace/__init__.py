"""Restriction and interpolation on Paley-Wiener spaces for clustered node sets."""

from .clustering import (
    GridSpec,
    NodeSequence,
    Partition,
    RectangleCover,
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
from .conditions import CheckGrids, ConditionEntry, ConditionReport, check_HN, check_LS
from .divided import EUCLIDEAN, PSEUDOHYPERBOLIC, Cluster, dd_bound, divided_difference, newton_eval
from .errors import *  # noqa: F401,F403
from .generating import (
    WeightProfile,
    d_N_eval,
    eval_S,
    eval_S_prime,
    weight_profile,
    weight_ratio_alpha,
    weights_omega,
)
from .geometry import LOWER, UPPER, HalfPlane, Rectangle, blaschke_factor, delta_distance, pseudo_distance
from .muckenhoupt import ApReport, continuous_ap, discrete_ap, discrete_hilbert, hilbert_pv
from .traces import (
    BandlimitedFunction,
    SpaceParams,
    TraceData,
    cardinal_interpolant,
    plancherel_polya_ratio,
    pointwise_bound_ratio,
    pw_lp_norm,
    residue_identity_gap,
    restrict,
    sinc_kernel,
    trace_norm_halfplane,
    trace_norm_neighbors,
    trace_norm_partition,
)

__version__ = "0.1.0"
