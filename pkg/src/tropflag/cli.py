"""Command-line interface.

Commands: check, skeleton, cells, matroids, realize, gen, experiment,
example.  Exit codes: 0 all checked properties hold, 1 a checked
property fails, 2 input or usage error.  Reports embed their full input
plus a digest, so any run can be replayed bit-identically (timing_ms is
informational and excluded from replay comparisons).
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from .core import DomainError, ParseError, format_rational, format_subset
from .files import (
    digest,
    instance_from_dict,
    instance_to_dict,
    load_json,
    matrix_from_dict,
    pretty_json,
)
from .geometry import (
    WeightedConfig,
    skeleton_equal,
    subdivision_cells,
    subdivision_cells_single,
)
from .matroid import analyze_cells, possibility_experiment
from .realization import ZeroMinorError, random_flag_matrix
from .tropical import FlagInstance, PluckerVector, check_flag

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

LARGE_GROUND_SET = 6  # subdivision-bearing commands guard n above this

EXAMPLE_NAMES = ("paper-ex1-invalid", "paper-ex1-x23", "paper-ex1-y234")


def builtin_example(name: str) -> dict:
    """The bundled demonstration instances on Delta(2,3;4)."""
    if name not in EXAMPLE_NAMES:
        raise DomainError(f"unknown example {name!r}; choose from {', '.join(EXAMPLE_NAMES)}")
    ones_d2 = {"14": 1} if name == "paper-ex1-x23" else {"14": 1, "23": 1}
    ones_d3 = {} if name == "paper-ex1-y234" else {"234": 1}
    from .core import enumerate_subsets

    def layer(d, ones):
        weights = {}
        for s in enumerate_subsets(4, d):
            weights[s] = ones.get(format_subset(s), 0)
        return PluckerVector.from_weights(4, d, weights)

    flag = FlagInstance((layer(2, ones_d2), layer(3, ones_d3)))
    return instance_to_dict(flag, {"provenance": f"builtin example {name}"})


def _violation_dict(v) -> dict:
    out = {
        "kind": v.kind,
        "S": format_subset(v.S),
        "terms": [format_rational(t) for t in v.terms],
    }
    if v.kind == "plucker":
        out["quad"] = list(v.indices)
    else:
        out["T"] = format_subset(v.T)
    return out


def _functional_dict(f) -> dict:
    return {"a": [format_rational(c) for c in f.a], "b": format_rational(f.b)}


def _cells_dict(subdivision) -> list:
    return [
        {
            "vertices": [str(v.subset) for v in cell.vertices],
            "functional": _functional_dict(cell.functional),
        }
        for cell in subdivision.cells
    ]


def make_report(command: str, input_obj, result, started: float) -> dict:
    return {
        "command": command,
        "input": input_obj,
        "input_digest": digest(input_obj),
        "result": result,
        "timing_ms": round((time.time() - started) * 1000, 3),
    }


def emit(obj, output: str | None) -> None:
    text = pretty_json(obj)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(args) -> tuple[FlagInstance, dict, dict]:
    if not args.input:
        raise ParseError("--input is required for this command")
    raw = load_json(args.input)
    flag, metadata = instance_from_dict(raw)
    return flag, metadata, raw


def _two_layer(flag: FlagInstance) -> WeightedConfig:
    if len(flag.layers) != 2:
        raise ParseError(f"this command needs a two-layer instance, got {len(flag.layers)} layers")
    return WeightedConfig.from_flag(flag)


def cmd_check(args) -> int:
    started = time.time()
    flag, _, raw = _load_instance(args)
    report_data = check_flag(flag, all_pairs=True)
    result = {
        "valid": report_data.is_valid,
        "plucker": [
            {"layer": i, "violations": [_violation_dict(v) for v in layer]}
            for i, layer in enumerate(report_data.plucker)
        ],
        "incidence": [
            {"layers": [a, b], "violations": [_violation_dict(v) for v in vs]}
            for a, b, vs in report_data.incidence
        ],
    }
    emit(make_report("check", raw, result, started), args.output)
    return EXIT_OK if report_data.is_valid else EXIT_FAIL


def cmd_skeleton(args) -> int:
    started = time.time()
    flag, _, raw = _load_instance(args)
    cfg = _two_layer(flag)
    report_data = skeleton_equal(cfg)
    relations = check_flag(flag, all_pairs=True)
    consistent = report_data.equal == relations.is_valid
    result = {
        "equal": report_data.equal,
        "new_edges": [[str(a), str(b)] for a, b in report_data.new_edges],
        "relations_valid": relations.is_valid,
        "agreement": "consistent" if consistent else "inconsistent",
    }
    emit(make_report("skeleton", raw, result, started), args.output)
    return EXIT_OK if report_data.equal and consistent else EXIT_FAIL


def cmd_cells(args) -> int:
    started = time.time()
    flag, _, raw = _load_instance(args)
    if len(flag.layers) == 1:
        subdivision = subdivision_cells_single(flag.layers[0])
    else:
        subdivision = subdivision_cells(_two_layer(flag))
    result = {"cell_count": len(subdivision.cells), "cells": _cells_dict(subdivision)}
    emit(make_report("cells", raw, result, started), args.output)
    return EXIT_OK


def cmd_matroids(args) -> int:
    started = time.time()
    flag, _, raw = _load_instance(args)
    cfg = _two_layer(flag)
    analyses = analyze_cells(cfg)
    rows = []
    all_good = True
    for analysis in analyses:
        witness = analysis.quotient_witness
        rows.append(
            {
                "cell": [str(v.subset) for v in analysis.cell.vertices],
                "bases_p": [str(b) for b in analysis.bases_p],
                "bases_q": [str(b) for b in analysis.bases_q],
                "matroidal_p": analysis.matroidal_p,
                "matroidal_q": analysis.matroidal_q,
                "concordant": analysis.concordant,
                "quotient_witness": None
                if witness is None
                else {"B": str(witness[0]), "i": witness[1]},
                "internal_edges": [[str(a), str(b)] for a, b in analysis.internal_edges],
            }
        )
        layer_ok = (not analysis.bases_p or analysis.matroidal_p) and (
            not analysis.bases_q or analysis.matroidal_q
        )
        concord_ok = analysis.concordant is None or analysis.concordant
        if not (layer_ok and concord_ok and analysis.edge_free):
            all_good = False
    result = {"cells": rows, "all_concordant": all_good}
    emit(make_report("matroids", raw, result, started), args.output)
    return EXIT_OK if all_good else EXIT_FAIL


def cmd_realize(args) -> int:
    if not args.input:
        raise ParseError("--input is required for realize")
    raw = load_json(args.input)
    fm, metadata = matrix_from_dict(raw)
    try:
        flag = fm.tropicalized_layers()
    except ZeroMinorError as exc:
        emit(
            {
                "error": "zero-minor",
                "column_sets": [str(s) for s in exc.column_sets],
            },
            args.output,
        )
        return EXIT_FAIL
    out_meta = {"provenance": "realize", "matrix_digest": digest(raw)}
    out_meta.update(metadata)
    emit(instance_to_dict(flag, out_meta), args.output)
    return EXIT_OK


def _guard_size(n: int, allow_large: bool) -> None:
    if n > LARGE_GROUND_SET and not allow_large:
        raise ParseError(
            f"n={n} exceeds the default budget (n <= {LARGE_GROUND_SET}); pass --allow-large"
        )


def cmd_gen(args) -> int:
    _guard_size(args.n, args.allow_large)
    if args.mode == "random-weights":
        rng = random.Random(args.seed)
        from .core import enumerate_subsets

        layers = []
        for d in (args.p, args.q):
            count = len(enumerate_subsets(args.n, d))
            layers.append(
                PluckerVector.from_values(args.n, d, [rng.randint(-3, 3) for _ in range(count)])
            )
        flag = FlagInstance(tuple(layers))
        metadata = {"provenance": "gen random-weights", "seed": args.seed, "validated": False}
    elif args.mode == "realizable":
        fm = random_flag_matrix(args.n, (args.p, args.q), args.seed)
        flag = fm.tropicalized_layers()
        report = check_flag(flag, all_pairs=True)
        if not report.is_valid:
            raise RuntimeError("realizable generator produced an invalid instance")
        metadata = {
            "provenance": "gen realizable",
            "seed": args.seed,
            "resamples": fm.resamples,
            "validated": True,
        }
    else:
        raise ParseError(f"unknown mode {args.mode!r}")
    emit(instance_to_dict(flag, metadata), args.output)
    return EXIT_OK


def cmd_experiment(args) -> int:
    started = time.time()
    _guard_size(args.n, args.allow_large)
    report = possibility_experiment(args.n, args.p, args.q, args.trials, args.seed, args.mode)
    params = {
        "n": args.n,
        "p": args.p,
        "q": args.q,
        "trials": args.trials,
        "seed": args.seed,
        "mode": args.mode,
    }
    result = {
        "quadrants": report.quadrants,
        "cells_total": report.cells_total,
        "skipped_na": report.skipped_na,
        "resamples_total": report.resamples_total,
        "counterexamples": list(report.counterexamples),
    }
    emit(make_report("experiment", params, result, started), args.output)
    return EXIT_OK


def cmd_example(args) -> int:
    emit(builtin_example(args.name), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropflag",
        description="Exact flag Dressian membership, weight-polytope subdivisions, "
        "and matroid concordance analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_input=False):
        p.add_argument("--input", help="input JSON file")
        p.add_argument("--output", help="write the result to this file instead of stdout")
        p.add_argument("--allow-large", action="store_true", help="override size budget guards")

    for name, fn, doc in (
        ("check", cmd_check, "verify the tropical Plücker and incidence relations"),
        ("skeleton", cmd_skeleton, "compare the induced subdivision's 1-skeleton with the polytope's"),
        ("cells", cmd_cells, "list the maximal cells of the induced subdivision"),
        ("matroids", cmd_matroids, "per-cell matroid and concordance analysis"),
        ("realize", cmd_realize, "tropicalize a polynomial matrix into a weight instance"),
    ):
        p = sub.add_parser(name, help=doc)
        add_common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("gen", help="generate a weight instance")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("random-weights", "realizable"), default="random-weights")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment", help="search cells for edge-free/concordance disagreement")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("random-weights", "realizable"), default="random-weights")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("example", help="emit a bundled demonstration instance")
    add_common(p)
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # runtime failures: budget exhaustion, engine errors
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
