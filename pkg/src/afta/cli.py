"""Command-line front end.

Subcommands: ``validate``, ``pmc``, ``pec``, ``oracle-check``, ``export``.
Exit codes are a stable contract: 0 success, 1 cross-check mismatch, 2
validation or usage problem, 3 I/O problem, 4 resource limit exceeded.
All stdout output is deterministic for fixed inputs and flags; timing goes
to stderr and only under ``--verbose``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Sequence

from . import bdd as _bdd
from . import mdp as _mdp
from . import model as _model
from . import oracle as _oracle
from . import pareto as _pareto
from .errors import ModelError, ResourceLimitError

__all__ = ["main"]


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_scenario(path: str) -> _model.QuantifiedScenario:
    return _model.parse_model(_read_text(path))


def _load_order(path: str) -> list[str]:
    names = []
    for line in _read_text(path).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line)
    return names


def _fmt_num(value: float) -> str:
    if value == math.inf:
        return "inf"
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _elapsed_note(label: str, start: float, verbose: bool) -> None:
    if verbose:
        ms = (time.perf_counter() - start) * 1000.0
        print(f"{label}: {ms:.2f} ms", file=sys.stderr)


def _block_structure(scenario: _model.QuantifiedScenario) -> dict[str, list[str]]:
    if scenario.uses_blocks:
        groups: dict[str, list[str]] = {}
        for leaf in scenario.failures + scenario.attacks:
            block = scenario.aft.node(leaf).block
            groups.setdefault(str(block), []).append(leaf)
        return {k: sorted(v) for k, v in sorted(groups.items(), key=lambda kv: int(kv[0]))}
    chain = scenario.observation_chain
    return {f"observed[{i}]": sorted(q) for i, q in enumerate(chain)}


def _cmd_validate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.model)
    summary = {
        "nodes": len(scenario.aft.nodes),
        "failures": len(scenario.failures),
        "attacks": len(scenario.attacks),
        "blocks": _block_structure(scenario),
        "default_order": list(_model.linearize(scenario)),
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        print(f"nodes: {summary['nodes']}")
        print(f"failures: {summary['failures']}")
        print(f"attacks: {summary['attacks']}")
        for block, members in summary["blocks"].items():
            print(f"block {block}: {', '.join(members)}")
        print(f"default order: {' '.join(summary['default_order'])}")
    return 0


def _witness_jsonable(
    witness: _pareto.WitnessStrategy, diagram: _bdd.DecisionDiagram, scenario
) -> dict[str, object]:
    out: dict[str, object] = {
        "point": {"prob": witness.point.prob, "cost": "inf" if witness.point.cost == math.inf else witness.point.cost},
        "attacks": sorted(witness.attacks),
    }
    if witness.table is not None:
        failure_order = [v for v in diagram.order if v in scenario.failure_set]
        out["failure_order"] = failure_order
        out["table"] = [
            {"outcome": "".join(str(b) for b in bits), "fires": sorted(fired)}
            for bits, fired in witness.table
        ]
    return out


def _print_front_text(front, verbose_head: list[str]) -> None:
    for line in verbose_head:
        print(line)
    print("front:")
    for i, d in enumerate(front):
        print(f"  {i}: prob={_fmt_num(d.prob)} cost={_fmt_num(d.cost)}")


def _cmd_analyze(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.model)
    order = _load_order(args.order) if args.order else None
    t0 = time.perf_counter()
    diagram = _bdd.build_robdd(scenario, order)
    _elapsed_note("bdd build", t0, args.verbose)
    analyze = _pareto.pmc if args.mode == "pmc" else _pareto.pec
    t1 = time.perf_counter()
    annotated = analyze(diagram, scenario, epsilon=args.epsilon)
    _elapsed_note("front computation", t1, args.verbose)
    if args.verbose:
        print(f"max per-node front size: {annotated.max_front_size()}", file=sys.stderr)
    print(f"wall time: {(time.perf_counter() - t0) * 1000.0:.2f} ms", file=sys.stderr)
    front = annotated.front

    witness = None
    if args.witness is not None:
        try:
            witness = _pareto.extract_witness(annotated, args.witness)
        except IndexError as exc:
            raise ModelError(str(exc)) from None

    if args.format == "csv":
        if witness is not None:
            raise ModelError("--witness requires json or text output")
        sys.stdout.write(_pareto.front_to_csv(front))
        return 0
    if args.format == "json":
        payload: dict[str, object] = {
            "mode": args.mode,
            "bdd_nodes": diagram.node_count(),
            "front": _pareto.front_to_jsonable(front),
        }
        if witness is not None:
            payload["witness"] = _witness_jsonable(witness, diagram, scenario)
        print(json.dumps(payload, indent=2))
        return 0
    _print_front_text(front, [f"mode: {args.mode}", f"bdd nodes: {diagram.node_count()}"])
    if witness is not None:
        print(f"witness for point {args.witness}:")
        print(f"  attacks: {', '.join(sorted(witness.attacks)) or '(none)'}")
        if witness.table is not None:
            failure_order = [v for v in diagram.order if v in scenario.failure_set]
            print(f"  failure order: {' '.join(failure_order) or '(none)'}")
            for bits, fired in witness.table:
                word = "".join(str(b) for b in bits)
                print(f"  on {word or '-'}: {', '.join(sorted(fired)) or '(none)'}")
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.model)
    order = _load_order(args.order) if args.order else None
    modes = ["pmc", "pec"] if args.mode == "both" else [args.mode]
    count = _oracle.strategy_count(scenario)
    if count > args.max_strategies:
        raise ResourceLimitError(
            f"{count} strategies exceed the enumeration limit of {args.max_strategies}",
            count=count,
        )
    diagram = _bdd.build_robdd(scenario, order)
    checks: dict[str, dict[str, object]] = {}
    all_match = True
    for mode in modes:
        if mode == "pmc":
            analytic = _pareto.pmc(diagram, scenario).front
            reference = _oracle.oracle_pmc(scenario, limit=args.max_strategies)
        else:
            analytic = _pareto.pec(diagram, scenario).front
            reference = _oracle.oracle_pec(scenario, limit=args.max_strategies)
        match = tuple(analytic) == tuple(reference)
        all_match = all_match and match
        checks[mode] = {
            "match": match,
            "analytic": _pareto.front_to_jsonable(analytic),
            "oracle": _pareto.front_to_jsonable(reference),
        }
    if args.format == "json":
        print(json.dumps({"strategies": count, "checks": checks}, indent=2))
    else:
        print(f"{count} strategies enumerated")
        for mode, result in checks.items():
            if result["match"]:
                print(f"{mode}: fronts match")
            else:
                print(f"{mode}: MISMATCH")
                print(f"  analytic: {result['analytic']}")
                print(f"  oracle:   {result['oracle']}")
    return 0 if all_match else 1


def _cmd_export(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.model)
    order = _load_order(args.order) if args.order else None
    diagram = _bdd.build_robdd(scenario, order)
    if args.what == "bdd-dot":
        text = _bdd.to_dot(diagram)
    else:
        m = _mdp.to_mdp(diagram, scenario)
        text = _mdp.serialize_mdp(m, "native" if args.what == "mdp-native" else "checker")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afta",
        description=(
            "Pareto analysis of attack-fault trees: compromise probability "
            "versus worst-case or expected attacker cost."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="parse a model and print a summary")
    p_validate.add_argument("model", help="path to a JSON model document")
    p_validate.add_argument("--format", choices=["json", "text"], default="json")
    p_validate.add_argument("--verbose", action="store_true")
    p_validate.set_defaults(handler=_cmd_validate)

    for mode in ("pmc", "pec"):
        help_text = (
            "probability vs. worst-case cost front"
            if mode == "pmc"
            else "probability vs. expected cost front"
        )
        p = sub.add_parser(mode, help=help_text)
        p.add_argument("model", help="path to a JSON model document")
        p.add_argument("--order", help="file with one leaf id per line overriding the variable order")
        p.add_argument("--format", choices=["json", "csv", "text"], default="json")
        p.add_argument("--witness", type=int, default=None, metavar="N",
                       help="also extract the strategy realizing front point N")
        p.add_argument("--epsilon", type=float, default=0.0,
                       help="opt-in relative pruning of near-duplicate points (default: exact)")
        p.add_argument("--verbose", action="store_true")
        p.set_defaults(handler=_cmd_analyze, mode=mode)

    p_check = sub.add_parser("oracle-check", help="compare analytic fronts against brute force")
    p_check.add_argument("model", help="path to a JSON model document")
    p_check.add_argument("--mode", choices=["pmc", "pec", "both"], default="both")
    p_check.add_argument("--order", help="file with one leaf id per line overriding the variable order")
    p_check.add_argument("--max-strategies", type=int, default=_oracle.DEFAULT_STRATEGY_LIMIT)
    p_check.add_argument("--format", choices=["json", "text"], default="json")
    p_check.add_argument("--verbose", action="store_true")
    p_check.set_defaults(handler=_cmd_oracle_check)

    p_export = sub.add_parser("export", help="write derived artifacts")
    p_export.add_argument("model", help="path to a JSON model document")
    p_export.add_argument("what", choices=["bdd-dot", "mdp-native", "mdp-checker"])
    p_export.add_argument("--order", help="file with one leaf id per line overriding the variable order")
    p_export.add_argument("-o", "--output", help="output path (default: stdout)")
    p_export.set_defaults(handler=_cmd_export)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "epsilon", 0.0) < 0:
        print("error: --epsilon must be nonnegative", file=sys.stderr)
        return 2
    if getattr(args, "max_strategies", 1) < 1:
        print("error: --max-strategies must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
