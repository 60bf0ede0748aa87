"""rehab: command-line front end.

Subcommands: ``rewrite`` (file or stdin to stdout, diagnostics on stderr),
``check`` (interactivity assertions, non-zero exit on failure), ``proxy``,
``corpus``, and ``report``. stdout of ``rewrite`` carries only document bytes
so it pipes cleanly into build steps.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import SUPPORTED_BOOTSTRAP_MAJORS, __version__
from .check import check_bytes
from .corpus import (
    FetchSettings,
    load_ranked_list,
    load_records,
    report_csv,
    run as corpus_run,
    summarize,
)
from .proxy import ProxyConfig, serve
from .rewrite import RewriteConfig, overhead, rewrite_document


def _read_input(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as handle:
        return handle.read()


def _parse_listen(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {value!r}")
    return (host, int(port))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rehab",
        description="Rewrite Bootstrap UI components into HTML+CSS alternatives "
                    "that work without JavaScript.")
    majors = "/".join(str(m) for m in SUPPORTED_BOOTSTRAP_MAJORS)
    parser.add_argument("--version", action="version",
                        version=f"rehab {__version__} (Bootstrap majors {majors})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rewrite = sub.add_parser("rewrite", help="rewrite one HTML document")
    p_rewrite.add_argument("file", help="input file, or - for stdin")
    p_rewrite.add_argument("--highlight", action="store_true",
                           help="outline the generated alternatives")
    p_rewrite.add_argument("--tabs", choices=("radio", "target"), default="radio",
                           help="state mechanism for navs/tabs")
    p_rewrite.add_argument("--stats", nargs="?", const="-", default=None,
                           metavar="FILE",
                           help="write stats JSON to FILE (default stderr)")

    p_check = sub.add_parser("check", help="rewrite, then assert interactivity")
    p_check.add_argument("file", help="input file, or - for stdin")
    p_check.add_argument("--tabs", choices=("radio", "target"), default="radio")

    p_proxy = sub.add_parser("proxy", help="run the rewriting HTTP proxy")
    p_proxy.add_argument("--listen", type=_parse_listen, default=("127.0.0.1", 8080),
                         metavar="HOST:PORT")
    p_proxy.add_argument("--mode", choices=("reverse", "forward"), default="reverse")
    p_proxy.add_argument("--upstream", default=None,
                         help="reverse mode: base URL every path maps onto")
    p_proxy.add_argument("--block", action="append", default=[], metavar="PAT",
                         help="answer script URLs containing PAT with an empty body")
    p_proxy.add_argument("--refresh", type=int, default=None, metavar="N",
                         help="inject a Refresh: N header on HTML (needs --no-cache)")
    p_proxy.add_argument("--no-cache", action="store_true",
                         help="disable HTTP caching on all responses")
    p_proxy.add_argument("--highlight", action="store_true")
    p_proxy.add_argument("--stats", default=None, metavar="FILE",
                         help="append one JSONL record per HTML response")

    p_corpus = sub.add_parser("corpus", help="fetch and measure a ranked domain list")
    p_corpus.add_argument("--list", required=True, dest="list_path",
                          help="CSV of rank,domain lines")
    p_corpus.add_argument("--top", type=int, default=None,
                          help="only the N best-ranked domains")
    p_corpus.add_argument("--seed", type=int, default=0)
    p_corpus.add_argument("--out", required=True, help="JSONL output path")
    p_corpus.add_argument("--parallel", type=int, default=4)
    p_corpus.add_argument("--timeout", type=float, default=30.0)

    p_report = sub.add_parser("report", help="summarize corpus/proxy records")
    p_report.add_argument("records", help="JSONL records file")
    p_report.add_argument("--csv", default=None, metavar="FILE",
                          help="also write metric,min,q1,median,q3,max,count CSV")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "rewrite":
        try:
            data = _read_input(args.file)
        except OSError as exc:
            print(f"rehab: {exc}", file=sys.stderr)
            return 1
        config = RewriteConfig(tabs_mechanism=args.tabs, highlight=args.highlight)
        result = rewrite_document(data, config)
        sys.stdout.buffer.write(result.html)
        sys.stdout.buffer.flush()
        if args.stats is not None:
            stats = {
                "duration_ms": result.stats.duration_ms,
                "node_count": result.stats.node_count,
                "instances_by_kind": result.stats.instances_by_kind,
                "original_size": result.stats.original_size,
                "transformed_size": result.stats.transformed_size,
                "original_compressed": result.stats.original_compressed,
                "transformed_compressed": result.stats.transformed_compressed,
                "compression": result.stats.compression,
                "overhead": overhead(result),
                "warnings": [list(w) for w in result.warnings],
            }
            payload = json.dumps(stats, indent=2)
            if args.stats == "-":
                print(payload, file=sys.stderr)
            else:
                with open(args.stats, "w", encoding="utf-8") as handle:
                    handle.write(payload + "\n")
        return 0

    if args.command == "check":
        try:
            data = _read_input(args.file)
        except OSError as exc:
            print(f"rehab: {exc}", file=sys.stderr)
            return 1
        failures = check_bytes(data, RewriteConfig(tabs_mechanism=args.tabs))
        for failure in failures:
            print(f"FAIL {failure}", file=sys.stderr)
        if failures:
            return 1
        print("all interactivity and accessibility checks passed", file=sys.stderr)
        return 0

    if args.command == "proxy":
        rewrite_config = RewriteConfig(highlight=args.highlight,
                                       compression_for_stats="auto")
        try:
            config = ProxyConfig(
                listen=args.listen,
                mode=args.mode,
                upstream=args.upstream,
                rewrite=rewrite_config,
                block_scripts=args.block,
                inject_refresh_seconds=args.refresh,
                disable_caching=args.no_cache,
                stats_sink=args.stats,
            )
        except ValueError as exc:
            print(f"rehab: {exc}", file=sys.stderr)
            return 2
        try:
            serve(config)
        except OSError as exc:
            print(f"rehab: cannot bind {args.listen}: {exc}", file=sys.stderr)
            return 1
        return 0

    if args.command == "corpus":
        try:
            entries = load_ranked_list(_read_input(args.list_path))
        except OSError as exc:
            print(f"rehab: {exc}", file=sys.stderr)
            return 1
        if args.top is not None:
            entries = entries[: args.top]
        settings = FetchSettings(seed=args.seed, parallelism=args.parallel,
                                 timeout=args.timeout)
        records = corpus_run(entries, settings, sink_path=args.out)
        print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
        return 0

    if args.command == "report":
        try:
            records = load_records(_read_input(args.records))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"rehab: {exc}", file=sys.stderr)
            return 1
        report = summarize(records)
        print(json.dumps(report, indent=2))
        if args.csv:
            with open(args.csv, "w", encoding="utf-8") as handle:
                handle.write(report_csv(report))
        return 0

    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
