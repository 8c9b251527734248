"""``ego-ranker`` command line.

Exit codes: 0 success, 1 bad input data, 2 bad configuration or state,
3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _io
from .circles import CircleAssignment
from .colley import RatingResult
from .config import RunConfig
from .errors import (
    BadTierSpec,
    ConfigError,
    CorruptState,
    EgoRankerError,
    EmptyFriendSet,
    OutOfOrderBatch,
    ParseErrors,
    SolveFailure,
)
from .events import FORMATS, load_stream
from .pipeline import build_record, rank_record
from .scoring import WindowSpec
from .state import StateStore
from .synth import Scenario, aggregate

log = logging.getLogger("ego_ranker")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

CIRCLE_COLORS = ("#d7301f", "#fc8d59", "#fdcc8a", "#b3cde3", "#8c96c6", "#88419d")
OVERFLOW_COLOR = "#bdbdbd"


class UsageError(EgoRankerError):
    pass


def _load_config(args) -> RunConfig:
    return RunConfig.load(args.config)


def _load_input(args):
    try:
        return load_stream(args.input, args.format, lenient=args.lenient)
    except FileNotFoundError:
        raise UsageError(f"input file {args.input} not found") from None


def write_results(out: Path, result: RatingResult, circles: CircleAssignment) -> tuple[Path, Path]:
    base = _io.safe_name(result.ego)
    doc = result.to_json()
    doc["residual"] = _io.Sci(doc["residual"])
    ratings_path = out / f"{base}.ratings.json"
    circles_path = out / f"{base}.circles.json"
    _io.atomic_write(ratings_path, _io.dumps(doc, places=6))
    _io.atomic_write(circles_path, _io.dumps(circles.to_json()))
    return ratings_path, circles_path


def cmd_rank(args) -> int:
    config = _load_config(args)
    out = Path(args.out)
    if args.input:
        stream = _load_input(args)
        _report_skipped(stream)
        spec = config.window_spec(stream)
        users = stream.users()

        def record_of(ego):
            return build_record(stream, ego, spec, config.weights)

    else:
        store = StateStore(config.state_dir)
        if not store.exists():
            raise ConfigError(f"no --input given and no state in {config.state_dir}")
        store.window_spec(config)
        users = store.egos()

        def record_of(ego):
            return store.load(ego).finalized(config.weights)

    egos = users if args.ego == "all" else [args.ego]
    if args.ego != "all" and args.ego not in users:
        raise EmptyFriendSet(f"ego {args.ego!r} has no interactions; nothing to rank")
    for ego in egos:
        result, circles = rank_record(record_of(ego), config.layout, config.tolerance)
        paths = write_results(out, result, circles)
        print(f"{ego}: {len(result.ranking)} friend(s) -> {paths[0]}")
    return EXIT_OK


def _report_skipped(stream) -> None:
    for lineno, msg in stream.skipped:
        print(f"warning: skipped line {lineno}: {msg}", file=sys.stderr)
    if stream.skipped:
        print(f"warning: {len(stream.skipped)} malformed line(s) skipped", file=sys.stderr)


def cmd_ingest(args) -> int:
    config = _load_config(args)
    stream = _load_input(args)
    _report_skipped(stream)
    store = StateStore(config.state_dir)
    egos = None if args.ego == "all" else [args.ego]
    summary = store.ingest(stream, config, egos, source=str(args.input))
    for w in summary.warnings:
        print(f"warning: {w}", file=sys.stderr)
    n_warn = len(summary.warnings) + len(stream.skipped)
    print(f"ingested {summary.events} event(s) for {len(summary.egos)} ego(s); {n_warn} warning(s)")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_config(args)
    try:
        doc = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {args.scenario}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario is not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a JSON object")
    scenario = Scenario.from_json(doc)
    spec = WindowSpec(config.window_length, config.epoch_start or 0)
    reports = scenario.run(spec, config.weights, config.layout, config.tolerance)
    out = Path(args.out)
    for seed, report in zip(scenario.seeds, reports):
        _io.atomic_write(out / f"report_seed{seed}.json", _io.dumps({"seed": seed, **report.to_json()}, places=4))
    agg = aggregate(reports)
    _io.atomic_write(out / "aggregate.json", _io.dumps(agg, places=4))
    print(
        f"{len(reports)} run(s): median kendall_tau {agg['median_kendall_tau']:.4f}, "
        f"median circle_accuracy {agg['median_circle_accuracy']:.4f}"
    )
    return EXIT_OK


def _dot_id(name: str) -> str:
    return json.dumps(name, ensure_ascii=False)


def export_dot(ratings_doc: dict, circles_doc: dict) -> str:
    """Star graph around the ego; nodes carry their circle, edges their rating."""
    try:
        ego = ratings_doc["ego"]
        ratings = [(r["friend"], float(r["rating"])) for r in ratings_doc["ratings"]]
        circles = CircleAssignment.from_json(circles_doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed result file: {exc!r}") from None
    if circles.ego != ego:
        raise UsageError(f"ratings are for {ego!r} but circles are for {circles.ego!r}")
    members = [f for c in circles.circles for f in c] + list(circles.overflow)
    if sorted(members) != sorted(f for f, _ in ratings) or len(set(members)) != len(members):
        raise UsageError("ratings and circles list different friends")
    lines = [
        f"graph {_dot_id(ego)} {{",
        f"  {_dot_id(ego)} [shape=doublecircle, style=filled, fillcolor=\"#ffffff\"];",
    ]
    for friend, _ in ratings:
        k = circles.circle_index(friend)
        overflow = k == len(circles.circles)
        color = OVERFLOW_COLOR if overflow else CIRCLE_COLORS[k % len(CIRCLE_COLORS)]
        lines.append(f"  {_dot_id(friend)} [circle={k}, style=filled, fillcolor=\"{color}\"];")
    for friend, rating in ratings:
        lines.append(f"  {_dot_id(ego)} -- {_dot_id(friend)} [label=\"{rating:.6f}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args) -> int:
    docs = []
    for path in (args.ratings, args.circles):
        try:
            docs.append(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
    text = export_dot(*docs)
    if args.out:
        _io.atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ego-ranker", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, input_required):
        p.add_argument("--input", required=input_required, help="event file")
        p.add_argument("--format", choices=FORMATS, default="csv")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--ego", default="all", help="user ID or 'all'")
        p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")

    p = sub.add_parser("rank", help="rate and layer friends (from --input, or from ingested state)")
    add_common(p, input_required=False)
    p.add_argument("--out", default="ego_ranker_out", help="output directory")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("ingest", help="fold an event batch into the state directory")
    add_common(p, input_required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("simulate", help="synthetic recovery evaluation")
    p.add_argument("--scenario", required=True)
    p.add_argument("--config")
    p.add_argument("--out", default="ego_ranker_sim", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export-dot", help="Graphviz star graph from result files")
    p.add_argument("--ratings", required=True)
    p.add_argument("--circles", required=True)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ParseErrors as exc:
        for lineno, err in exc.errors:
            print(f"error: line {lineno}: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (OutOfOrderBatch, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, EmptyFriendSet, CorruptState, BadTierSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolveFailure as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
