"""Command-line front end: ``pwtrace partition|check|norm|profile|interpolate``.

Exit codes: 0 success, 1 malformed input / IO / missing trace,
2 grouping failure, 3 vanishing derivative of the generating function.
"""

import argparse
import json
import sys

import numpy as np

from .clustering import NodeSequence, adapted_partition, density_radius, halfplane_partition, neighbor_groups
from .conditions import CheckGrids, check_HN, check_LS
from .errors import DerivativeZero, PartitionFailed, PWTraceError
from .generating import weight_profile
from .geometry import HalfPlane
from .io import MalformedInput, SequenceFile, _complex_list, dumps, parse_grid
from .traces import (
    SpaceParams,
    TraceData,
    cardinal_interpolant,
    trace_norm_halfplane,
    trace_norm_neighbors,
    trace_norm_partition,
)

EXIT_OK, EXIT_INPUT, EXIT_PARTITION, EXIT_DERIVATIVE = 0, 1, 2, 3


def _params(args, doc):
    fp = doc.params
    tau = args.tau if args.tau is not None else fp.get("tau", np.pi)
    p = args.p if args.p is not None else fp.get("p", 2.0)
    eps = args.epsilon if args.epsilon is not None else fp.get("epsilon")
    cap = args.capacity if args.capacity is not None else fp.get("capacity", 1)
    try:
        return SpaceParams(float(tau), float(p), None if eps is None else float(eps), int(cap))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"bad parameters: {exc}") from exc


def _epsilon(params, nodes):
    return params.epsilon if params.epsilon is not None else density_radius(nodes)


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _trace(doc):
    if doc.trace is None:
        raise MalformedInput("this command needs a 'trace' in the input file")
    return TraceData(doc.nodes, doc.trace)


def cmd_partition(args):
    doc = SequenceFile.load(args.input)
    params = _params(args, doc)
    if args.kind == "neighbors":
        groups = neighbor_groups(doc.nodes, params.capacity, args.eta)
        out = {"kind": "neighbors", "capacity": params.capacity, "eta": args.eta, "clusters": groups}
    else:
        part = adapted_partition(NodeSequence(doc.nodes), _epsilon(params, doc.nodes), params.capacity)
        out = {"kind": "adapted", **part.to_dict()}
    _emit(args, dumps(out) + "\n")
    return EXIT_OK


def _grids(args):
    kw = {}
    if args.grid:
        xs = parse_grid(args.grid)
        if len(xs) < 2:
            raise MalformedInput("the check grid needs at least two points")
        kw.update(ap_window=(float(xs[0]), float(xs[-1])), ap_step=float(xs[1] - xs[0]))
    if args.radius is not None:
        kw["radius"] = args.radius
    return CheckGrids(**kw)


def cmd_check(args):
    doc = SequenceFile.load(args.input)
    params = _params(args, doc)
    fn = check_HN if args.mode == "hn" else check_LS
    rep = fn(NodeSequence(doc.nodes), params, _grids(args))
    _emit(args, dumps(rep) + "\n")
    return EXIT_OK


def cmd_norm(args):
    doc = SequenceFile.load(args.input)
    params = _params(args, doc)
    a = _trace(doc)
    if args.space == "neighbors":
        norm, terms = trace_norm_neighbors(a, doc.nodes, params, args.eta, breakdown=True)
    elif args.space == "halfplane":
        hp = HalfPlane(1 if args.halfplane == "upper" else -1, args.offset)
        part = halfplane_partition(doc.nodes, hp, params.capacity)
        norm, terms = trace_norm_halfplane(a, part, hp, params.p, breakdown=True)
    else:
        part = adapted_partition(NodeSequence(doc.nodes), _epsilon(params, doc.nodes), params.capacity)
        norm, terms = trace_norm_partition(a, part, params, breakdown=True)
    _emit(args, dumps({"space": args.space, "norm": norm, "p": params.p, "terms": terms}) + "\n")
    return EXIT_OK


def cmd_profile(args):
    doc = SequenceFile.load(args.input)
    params = _params(args, doc)
    xs = parse_grid(args.grid)
    part = adapted_partition(NodeSequence(doc.nodes), _epsilon(params, doc.nodes), params.capacity)
    prof = weight_profile(doc.nodes, part, xs, params.p, args.radius)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            prof.write_csv(fh)
    else:
        prof.write_csv(sys.stdout)
    return EXIT_OK


def cmd_interpolate(args):
    doc = SequenceFile.load(args.input)
    a = _trace(doc)
    if args.eval:
        try:
            with open(args.eval, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read {args.eval}: {exc}") from exc
        if isinstance(raw, dict):
            raw = raw.get("points")
        pts = _complex_list(raw, "points")
    else:
        pts = doc.nodes
    f = cardinal_interpolant(a, doc.nodes, args.radius)
    vals = np.atleast_1d(f(pts))
    _emit(args, dumps({"points": list(pts), "values": list(vals)}) + "\n")
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="sequence file (JSON)")
    common.add_argument("--capacity", type=int, help="largest group size N")
    common.add_argument("--epsilon", type=float, help="strip half-width and linkage scale")
    common.add_argument("--tau", type=float, help="exponential type")
    common.add_argument("--p", type=float, help="integrability exponent")
    common.add_argument("--radius", type=float, help="truncation radius of the generating function")
    common.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="pwtrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", parents=[common], help="group the nodes")
    p.add_argument("--kind", choices=["adapted", "neighbors"], default="adapted")
    p.add_argument("--eta", type=float, default=0.25)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("check", parents=[common], help="condition report")
    p.add_argument("--mode", choices=["ls", "hn"], default="ls")
    p.add_argument("--grid", help="XMIN:XMAX:STEP of the weight test")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("norm", parents=[common], help="trace norm with per-group terms")
    p.add_argument("--space", choices=["partition", "neighbors", "halfplane"], default="partition")
    p.add_argument("--eta", type=float, default=0.25)
    p.add_argument("--halfplane", choices=["upper", "lower"], default="upper")
    p.add_argument("--offset", type=float, default=0.0)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("profile", parents=[common], help="weight profile as CSV")
    p.add_argument("--grid", default="-5:5:0.01", help="XMIN:XMAX:STEP")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("interpolate", parents=[common], help="evaluate the cardinal interpolant")
    p.add_argument("--eval", help="JSON list of points (default: the nodes)")
    p.set_defaults(func=cmd_interpolate)
    return parser


def _join_grid(argv):
    # "--grid -5:5:0.01" would read the value as an option; glue it to the flag
    out = []
    it = iter(argv)
    for a in it:
        if a == "--grid":
            out.append("--grid=" + next(it, ""))
        else:
            out.append(a)
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(_join_grid(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except PartitionFailed as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc), "group": list(exc.group)}) + "\n")
        return EXIT_PARTITION
    except DerivativeZero as exc:
        sys.stderr.write(dumps({"error": "DerivativeZero", "message": str(exc)}) + "\n")
        return EXIT_DERIVATIVE
    except (PWTraceError, OSError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
