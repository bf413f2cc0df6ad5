"""Command-line interface.

Subcommands: track, sweep, events, render, generate, oracle. File-format
details live in the README; exit codes are 0 (success), 2 (bad input or
usage), 1 (anything else).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .alluvial import build_layout, layout_to_svg
from .errors import (
    DynatrackError,
    GenerationError,
    OracleSizeError,
    ParseError,
    SchemaError,
    SequenceValidationError,
)
from .generator import ScenarioSpec, generate
from .metrics import classify_events, summary_stats, total_consistency
from .model import ClusteringSequence, parse_sequence, sequence_to_json_bytes
from .oracle import brute_force_track
from .resultdoc import (
    build_document,
    clustering_from_labels,
    document_to_bytes,
    load_document,
)
from .tracking import track

SWEEP_HEADER = (
    "x,dc_count,mean_lifespan,weighted_mean_lifespan,"
    "consistency_all,consistency_resident"
)


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _write(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _load_input(args) -> ClusteringSequence:
    return parse_sequence(_read(args.input), args.format)


def cmd_track(args) -> int:
    if args.history < 0:
        return _usage_error("--history must be non-negative")
    seq = _load_input(args)
    result = track(seq, args.history)
    doc = build_document(seq, result, __version__)
    _write(args.output, document_to_bytes(doc))
    return 0


def cmd_oracle(args) -> int:
    if args.history < 0:
        return _usage_error("--history must be non-negative")
    seq = _load_input(args)
    result = brute_force_track(seq, args.history)
    doc = build_document(seq, result, __version__)
    _write(args.output, document_to_bytes(doc))
    return 0


def _fmt_ratio(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def cmd_sweep(args) -> int:
    if args.history_min < 0:
        return _usage_error("--history-min must be non-negative")
    if args.history_min > args.history_max:
        return _usage_error("--history-min must not exceed --history-max")
    seq = _load_input(args)
    rows = []
    records = []
    for x in range(args.history_min, args.history_max + 1):
        result = track(seq, x)
        stats = summary_stats(result)
        cons_all = total_consistency(result, "all_members")
        cons_res = total_consistency(result, "residents_only")
        rows.append(
            f"{x},{stats.dc_count},"
            f"{stats.mean_lifespan if stats.mean_lifespan is not None else ''},"
            f"{stats.weighted_mean_lifespan if stats.weighted_mean_lifespan is not None else ''},"
            f"{_fmt_ratio(cons_all)},{_fmt_ratio(cons_res)}"
        )
        records.append(
            {
                "x": x,
                "dc_count": stats.dc_count,
                "lifespan_histogram": stats.lifespan_histogram,
                "mean_lifespan": stats.mean_lifespan,
                "weighted_mean_lifespan": stats.weighted_mean_lifespan,
                "consistency_all": cons_all,
                "consistency_resident": cons_res,
            }
        )
    csv_text = SWEEP_HEADER + "\n" + "\n".join(rows) + "\n"
    _write(args.output, csv_text.encode("utf-8"))
    if args.json:
        payload = json.dumps(
            {"schema": 1, "sweep": records}, sort_keys=True, separators=(",", ":")
        )
        _write(args.json, (payload + "\n").encode("utf-8"))
    for key in ("consistency_all", "consistency_resident"):
        defined = [r for r in records if r[key] is not None]
        if defined:
            best = max(r[key] for r in defined)
            xs = [str(r["x"]) for r in defined if r[key] == best]
            print(
                f"best {key}: {best:.6f} at x = {', '.join(xs)}",
                file=sys.stderr,
            )
    return 0


def cmd_events(args) -> int:
    seq, labels, x = load_document(_read(args.result))
    result = clustering_from_labels(seq, labels, x)
    events = [dataclasses.asdict(ev) for ev in classify_events(result, seq)]
    for entry in events:
        entry["related"] = list(entry["related"])
    payload = json.dumps(
        {"schema": 1, "events": events},
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
    )
    _write(args.output, (payload + "\n").encode("utf-8"))
    return 0


def cmd_render(args) -> int:
    seq, labels, _x = load_document(_read(args.result))
    layout = build_layout(seq, labels, gap=args.gap)
    svg = layout_to_svg(layout, block_width=args.block_width)
    _write(args.output, svg.encode("utf-8"))
    if args.layout_json:
        payload = json.dumps(
            layout.to_json_dict(), sort_keys=True, separators=(",", ":")
        )
        _write(args.layout_json, (payload + "\n").encode("utf-8"))
    return 0


def cmd_generate(args) -> int:
    spec = ScenarioSpec.from_json(_read(args.spec))
    seq, truth = generate(spec)
    _write(args.output, sequence_to_json_bytes(seq))
    if args.labels:
        payload = json.dumps(
            {"schema": 1, "ground_truth": truth},
            sort_keys=True,
            separators=(",", ":"),
        )
        _write(args.labels, (payload + "\n").encode("utf-8"))
    return 0


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynatrack",
        description=(
            "Track dynamic clusters through a sequence of snapshot "
            "clusterings, classify their life-cycle events, score "
            "parametrisations, and render alluvial diagrams."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True, help="input sequence file")
        p.add_argument(
            "--format",
            choices=("json", "csv"),
            default="json",
            help="input format (default: json)",
        )

    p = sub.add_parser("track", help="detect dynamic clusters")
    add_input(p)
    p.add_argument(
        "--history", type=int, required=True, help="history horizon (x >= 0)"
    )
    p.add_argument("--output", help="result document path (default: stdout)")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser(
        "oracle", help="brute-force reference labelling (small inputs)"
    )
    add_input(p)
    p.add_argument("--history", type=int, required=True)
    p.add_argument("--output", help="result document path (default: stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="scan a range of history values")
    add_input(p)
    p.add_argument("--history-min", type=int, required=True)
    p.add_argument("--history-max", type=int, required=True)
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument(
        "--json", help="also write full records (incl. histograms) as JSON"
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("events", help="life-cycle events of a tracking result")
    p.add_argument("--result", required=True, help="document written by `track`")
    p.add_argument("--output", help="events JSON path (default: stdout)")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("render", help="alluvial SVG of a tracking result")
    p.add_argument("--result", required=True, help="document written by `track`")
    p.add_argument("--output", help="SVG path (default: stdout)")
    p.add_argument("--layout-json", help="also write the layout as JSON")
    p.add_argument(
        "--block-width", type=float, default=20.0, help="block width in px"
    )
    p.add_argument(
        "--gap", type=float, default=2.0, help="vertical gap between blocks"
    )
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("generate", help="synthesise a scenario fixture")
    p.add_argument("--spec", required=True, help="scenario JSON path")
    p.add_argument("--output", help="sequence JSON path (default: stdout)")
    p.add_argument("--labels", help="ground-truth labels JSON path")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SequenceValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, GenerationError, OracleSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DynatrackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
