"""Command-line interface.

Subcommands mirror the pipeline stages: ``parse`` (normalize and echo a
specification), ``elaborate`` (dump the timed-automata network),
``transform`` (dump the demultiplexed, urgency-rewritten network),
``emit`` (write PRISM model + properties files) and ``classify`` (run
the full analysis and print the verdict report).

Exit codes: 0 success, 1 specification/structure errors, 2 analysis
resource limits.  Diagnostics go to stderr, reports to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .classify import (
    ClassifyOptions,
    analyzed_partition,
    classify_pipeline,
    run_pipeline,
)
from .elaborate import check_zeno_free, elaborate
from .parser import parse_file
from .prism import emit
from .resolver import pretty_print, resolve_targets
from .semantics import DEFAULT_TRANSITION_CAP, AnalysisLimitError
from .syntax import SpecError
from .tast import NetworkError, dump_dot, dump_network
from .transform import demux_channels, emulate_urgency

STATE_CAP_ENV = "MIRELA_STATE_CAP"


def _default_cap() -> int:
    raw = os.environ.get(STATE_CAP_ENV)
    return int(raw) if raw else DEFAULT_TRANSITION_CAP


def _parse_scale(raw: str) -> int | str | None:
    if raw == "auto":
        return "auto"
    if raw == "none":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"scale must be 'auto', 'none' or a positive integer, not {raw!r}"
        ) from None
    if value <= 0:
        raise argparse.ArgumentTypeError("scale must be positive")
    return value


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mirela",
        description="Compile component specifications to timed-automata "
        "networks and detect indefinite waiting.",
    )
    p.add_argument("--version", action="version", version=f"mirela {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and echo the normalized specification")
    sp.add_argument("input", type=Path)

    se = sub.add_parser("elaborate", help="dump the elaborated network")
    se.add_argument("input", type=Path)
    se.add_argument("--dot", action="store_true", help="emit Graphviz instead of text")

    st = sub.add_parser("transform", help="dump the demuxed, urgency-rewritten network")
    st.add_argument("input", type=Path)
    st.add_argument("--dot", action="store_true", help="emit Graphviz instead of text")

    sm = sub.add_parser("emit", help="write PRISM model and properties files")
    sm.add_argument("input", type=Path)
    sm.add_argument("--scale", type=_parse_scale, default="auto",
                    help="'auto' (gcd of all constants), 'none', or a divisor")
    sm.add_argument("--out-dir", type=Path, default=None,
                    help="output directory (default: alongside the input)")

    sc = sub.add_parser("classify", help="classify all wait locations")
    sc.add_argument("input", type=Path)
    sc.add_argument("--scale", type=_parse_scale, default="auto",
                    help="'auto' (gcd of all constants), 'none', or a divisor")
    sc.add_argument("--include-memories", action="store_true",
                    help="also classify memory wait locations read by a rendering loop")
    sc.add_argument("--full-formulas", action="store_true",
                    help="evaluate all three formulas even when the verdict is already decided")
    sc.add_argument("--format", choices=("human", "json"), default="human")
    sc.add_argument("--state-cap", type=int, default=None,
                    help=f"transition exploration cap (default {DEFAULT_TRANSITION_CAP}, "
                    f"or ${STATE_CAP_ENV})")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (SpecError, NetworkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AnalysisLimitError as exc:
        print(f"analysis limit: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _load(path: Path):
    return resolve_targets(parse_file(path))


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "parse":
        spec = _load(args.input)
        for warning in spec.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        print(pretty_print(spec), end="")
        return 0

    if args.command == "elaborate":
        net = elaborate(_load(args.input))
        for violation in check_zeno_free(net):
            print(f"warning: zeno risk: {violation}", file=sys.stderr)
        print(dump_dot(net) if args.dot else dump_network(net), end="")
        return 0

    if args.command == "transform":
        net = emulate_urgency(demux_channels(elaborate(_load(args.input))))
        print(dump_dot(net) if args.dot else dump_network(net), end="")
        return 0

    if args.command == "emit":
        spec = _load(args.input)
        options = ClassifyOptions(scale=args.scale)
        pipe = run_pipeline(spec, options, build=False)
        partition = analyzed_partition(spec, pipe.partition)
        emitted = emit(pipe.scaled, partition, scale=pipe.scale)
        out_dir = args.out_dir if args.out_dir is not None else args.input.parent
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = args.input.stem
        model_path = out_dir / f"{stem}.prism"
        props_path = out_dir / f"{stem}.props"
        model_path.write_text(emitted.model, encoding="utf-8")
        props_path.write_text(emitted.properties, encoding="utf-8")
        print(f"wrote {model_path} and {props_path}", file=sys.stderr)
        return 0

    assert args.command == "classify"
    cap = args.state_cap if args.state_cap is not None else _default_cap()
    options = ClassifyOptions(
        scale=args.scale,
        include_memories=args.include_memories,
        full_formulas=args.full_formulas,
        transition_cap=cap,
    )
    spec = _load(args.input)
    for warning in spec.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    pipe = run_pipeline(spec, options)
    report = classify_pipeline(pipe, options)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.human_table(), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
