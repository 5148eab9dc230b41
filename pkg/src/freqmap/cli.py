"""Command-line interface: ``freqmap <command> [options]``; results go to stdout as JSON lines."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .core import Election, GSTree, frequency_matrix
from .embedding import build_catalog, embed, misrepresentation_table
from .errors import FreqMapError
from .fitting import FIT_FAMILIES, fit_model, kemeny_mle_phi
from .io import (
    read_matrix_csv,
    read_soc,
    read_tree,
    write_layout_csv,
    write_layout_svg,
    write_matrix_csv,
    write_ratios_csv,
    write_soc,
)
from .metric import positionwise_distance
from .models import ModelSpec, model_matrix
from .samplers import SampleRequest, empirical_matrix_distance, sample_election

TREE_SHAPES = ("caterpillar", "balanced", "flat")
BASE_MODELS = ("ic", "conitzer", "walsh", "gs-tree", *TREE_SHAPES)
MODELS = (
    "ic", "mallows", "mallows-mixture", "conitzer", "walsh", "gs-tree", "mallows-filtered",
    *TREE_SHAPES, "phi-conitzer", "phi-walsh",
)


class UsageError(Exception):
    """Bad flag combination detected after parsing (exit code 2)."""


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=False) + "\n")


def _number(text: str, flag: str, exact: bool):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: not a number: {text!r}") from None
    return value if exact else float(value)


def _unit(args, name: str, flag: str):
    raw = getattr(args, name)
    if raw is None:
        return None
    value = _number(raw, flag, args.precision == "rational")
    if not 0 <= value <= 1:
        raise FreqMapError(f"{flag} must lie in [0, 1], got {raw}")
    return value


def _tree(args, model: str) -> GSTree:
    m = args.m
    if model == "caterpillar":
        return GSTree.caterpillar(m)
    if model == "balanced":
        try:
            return GSTree.balanced(m)
        except FreqMapError as exc:
            raise FreqMapError(f"--m: {exc}") from None
    if model == "flat":
        return GSTree.flat(m)
    if args.tree is None:
        raise UsageError("--tree is required for --model gs-tree")
    try:
        return read_tree(args.tree)
    except FreqMapError as exc:
        raise FreqMapError(f"--tree: {exc}") from None


def _plain(model: str, args) -> ModelSpec:
    if model in TREE_SHAPES or model == "gs-tree":
        return ModelSpec("gs-tree", args.m, tree=_tree(args, model))
    return ModelSpec(model, args.m)


def build_spec(args) -> ModelSpec:
    model = args.model
    if args.m is None or args.m < 1:
        raise UsageError("--m must be a positive integer")
    phi = _unit(args, "phi", "--phi")
    norm = _unit(args, "normphi", "--normphi")
    p = _unit(args, "p", "--p")
    psi = _unit(args, "psi", "--psi")
    central = None
    if args.central:
        try:
            central = tuple(int(c) - 1 for c in args.central.split(","))
        except ValueError:
            raise UsageError(f"--central: expected comma-separated candidate ids, got {args.central!r}") from None
    dispersed = model in ("mallows", "mallows-mixture", "mallows-filtered", "phi-conitzer", "phi-walsh")
    if dispersed and (phi is None) == (norm is None):
        raise UsageError(f"--model {model} needs exactly one of --phi or --normphi")
    if not dispersed and (phi is not None or norm is not None):
        raise UsageError(f"--model {model} takes no --phi/--normphi")
    if model != "mallows-mixture" and (p is not None or psi is not None):
        raise UsageError("--p and --psi only apply to --model mallows-mixture")
    if model == "mallows-mixture" and p is None:
        raise UsageError("--model mallows-mixture needs --p")
    if model != "mallows-filtered" and args.base is not None:
        raise UsageError("--base only applies to --model mallows-filtered")
    if central is not None and model not in ("mallows", "mallows-mixture"):
        raise UsageError("--central only applies to mallows and mallows-mixture")
    try:
        if model == "mallows":
            return ModelSpec("mallows", args.m, phi=phi, norm_phi=norm, central=central)
        if model == "mallows-mixture":
            return ModelSpec("mallows-mixture", args.m, phi=phi, norm_phi=norm, p=p, psi=psi, central=central)
        if model in ("mallows-filtered", "phi-conitzer", "phi-walsh"):
            if model == "mallows-filtered":
                if args.base is None:
                    raise UsageError("--model mallows-filtered needs --base")
                base = _plain(args.base, args)
            else:
                base = ModelSpec(model.split("-")[1], args.m)
            return ModelSpec("mallows-filtered", args.m, phi=phi, norm_phi=norm, base=base)
        return _plain(model, args)
    except FreqMapError as exc:
        raise FreqMapError(f"--model {model}: {exc}") from None


def _load_matrix(path: str, flag: str) -> np.ndarray:
    try:
        if Path(path).suffix.lower() == ".csv":
            return read_matrix_csv(path)
        return frequency_matrix(read_soc(path))
    except FreqMapError as exc:
        raise FreqMapError(f"{flag}: {exc}") from None


def _load_election(path: str, flag: str = "--election") -> Election:
    try:
        return read_soc(path)
    except FreqMapError as exc:
        raise FreqMapError(f"{flag}: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_matrix(args) -> int:
    spec = build_spec(args)
    exact = args.precision == "rational"
    mat = model_matrix(spec, exact=exact)
    write_matrix_csv(mat, args.out)
    _emit({"command": "matrix", "model": args.model, "m": spec.m, "precision": args.precision, "out": args.out})
    return 0


def cmd_distance(args) -> int:
    a = _load_matrix(args.a, "--a")
    b = _load_matrix(args.b, "--b")
    if a.shape != b.shape:
        raise FreqMapError(f"--b: candidate count {b.shape[0]} differs from --a ({a.shape[0]})")
    report = positionwise_distance(a, b).to_dict()
    report["distance"] = report["raw"] if args.raw else report["normalized"]
    _emit({"command": "distance", **report})
    return 0


def cmd_sample(args) -> int:
    spec = build_spec(args)
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    e = sample_election(SampleRequest(spec, args.n, args.seed))
    write_soc(e, args.out, title=f"{args.model} m={args.m} n={args.n} seed={args.seed}")
    _emit({"command": "sample", "model": args.model, "m": spec.m, "n": e.n, "seed": args.seed,
           "unique_orders": len(e.votes), "out": args.out})
    return 0


def cmd_fit(args) -> int:
    e = _load_election(args.election)
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    bad = [f for f in families if f not in FIT_FAMILIES]
    if bad or not families:
        raise UsageError(f"--families: unsupported {bad or families}; choose from {','.join(FIT_FAMILIES)}")
    results = [fit_model(e, f, grid_step=args.grid_step, p_step=args.p_step, threads=args.threads) for f in families]
    results.sort(key=lambda r: r.distance)
    for r in results:
        _emit({"command": "fit", "election": Path(args.election).name, **r.to_dict()})
    return 0


def cmd_map(args) -> int:
    catalog = build_catalog(args.m)
    layout = embed(catalog, seed=args.seed, max_iter=args.max_iter, eps=args.eps, threads=args.threads)
    write_layout_csv(layout, args.out)
    table = misrepresentation_table(layout)
    ratios = np.array([r for _, _, r in table])
    if args.svg:
        write_layout_svg(layout, args.svg)
    if args.ratios:
        write_ratios_csv(table, args.ratios)
    _emit({
        "command": "map",
        "m": args.m,
        "points": len(catalog),
        "stress": layout.stress,
        "iterations": layout.iterations,
        "ratio_band_fraction": float(np.mean((ratios >= 0.8) & (ratios <= 1.15))),
        "out": args.out,
    })
    return 0


def cmd_variance(args) -> int:
    spec = build_spec(args)
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    if args.trials < 1:
        raise UsageError("--trials must be a positive integer")
    summary = empirical_matrix_distance(spec, args.n, args.trials, seed=args.seed, threads=args.threads)
    _emit({"command": "variance", "model": args.model, "m": spec.m, "n": args.n, "seed": args.seed,
           **summary.to_dict()})
    return 0


def cmd_kemeny(args) -> int:
    e = _load_election(args.election)
    _emit({"command": "kemeny", **kemeny_mle_phi(e).to_dict()})
    return 0


# ---------------------------------------------------------------------------
# parser


def _model_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--model", required=True, choices=MODELS, help="vote distribution")
    g.add_argument("--m", type=int, required=True, help="number of candidates")
    g.add_argument("--normphi", help="normalized dispersion in [0, 1]")
    g.add_argument("--phi", help="raw dispersion in [0, 1] (accepts p/q)")
    g.add_argument("--p", help="mallows-mixture: weight of the component around the central vote")
    g.add_argument("--psi", help="mallows-mixture: dispersion of the reversed component (same scale as phi)")
    g.add_argument("--tree", help="gs-tree: JSON file of nested lists of 1-based candidate ids")
    g.add_argument("--base", choices=BASE_MODELS, help="mallows-filtered: underlying distribution")
    g.add_argument("--central", help="central vote as comma-separated 1-based ids (default 1,2,...,m)")
    return p


def _globals(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="unsigned 64-bit seed (default 0)")
    p.add_argument("--threads", type=int, default=d(1), help="worker threads for batch work (default 1)")
    p.add_argument("--precision", choices=("rational", "float"), default=d("float"),
                   help="rational: exact model matrices where supported")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freqmap",
        description="Frequency matrices of vote distributions, positionwise distances, fitting and maps.",
        parents=[_globals(False)],
    )
    parser.add_argument("--version", action="version", version=f"freqmap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = [_globals(True)]
    model = [_model_options(), *common]

    p = sub.add_parser("matrix", parents=model, help="write a model's expected frequency matrix")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("distance", parents=common, help="positionwise distance between two elections or matrices")
    p.add_argument("--a", required=True, help=".soc election or .csv matrix")
    p.add_argument("--b", required=True, help=".soc election or .csv matrix")
    p.add_argument("--raw", action="store_true", help="report the unnormalized distance as 'distance'")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("sample", parents=model, help="sample an election and write it as .soc")
    p.add_argument("--n", type=int, required=True, help="number of voters")
    p.add_argument("--out", required=True, help="output .soc")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", parents=common, help="closest grid distribution per family")
    p.add_argument("--election", required=True, help=".soc election")
    p.add_argument("--families", default="mallows,phi-conitzer,phi-walsh",
                   help=f"comma-separated subset of {','.join(FIT_FAMILIES)}")
    p.add_argument("--grid-step", type=float, default=0.001, help="norm-phi grid step (default 0.001)")
    p.add_argument("--p-step", type=float, default=0.05, help="mixture weight grid step (default 0.05)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("map", parents=common, help="build and embed the skeleton map")
    p.add_argument("--m", type=int, required=True, help="number of candidates (even)")
    p.add_argument("--out", required=True, help="layout CSV (label,x,y)")
    p.add_argument("--svg", help="optional SVG scatter")
    p.add_argument("--ratios", help="optional CSV of misrepresentation ratios")
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--eps", type=float, default=1e-6)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("variance", parents=model, help="distance of sampled elections to the model matrix")
    p.add_argument("--n", type=int, required=True, help="voters per election")
    p.add_argument("--trials", type=int, required=True, help="number of sampled elections")
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("kemeny", parents=common, help="Kemeny consensus and dispersion estimate")
    p.add_argument("--election", required=True, help=".soc election")
    p.set_defaults(func=cmd_kemeny)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if not 0 <= args.seed < 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FreqMapError, OSError) as exc:
        sys.stderr.write(f"freqmap: error: {exc}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
