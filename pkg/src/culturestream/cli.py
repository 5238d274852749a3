"""Command-line interface.

Subcommands:

    ingest    normalize a corpus into a transaction stream + skip report
    measure   culture vectors and the per-window measure series
    facts     per-fact institutionness and burst episodes
    network   directed practice graphs and group statistics
    synth     generate a synthetic corpus + roster from the generative model
    report    the full artifact set (measure + facts + network + manifest)
    selftest  run the built-in check battery

Exit codes: 0 success, 1 usage/configuration error, 2 data error,
3 selftest failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline, selftest, synth
from .corpus import parse_timestamp
from .errors import ConfigError, DataError
from .facts import INSTITUTIONNESS_VARIANTS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SELFTEST = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def _add_run_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="settings file with 'key = value' lines")
    sub.add_argument("--corpus", type=Path, help="line-delimited JSON corpus")
    sub.add_argument("--roster", type=Path, help="CSV mapping user,group")
    sub.add_argument("--follow-edges", type=Path, help="CSV follow edge list source,target")
    sub.add_argument("--out", type=Path, help="output directory")
    sub.add_argument("--epoch", help="observation start (ISO-8601 or epoch seconds)")
    sub.add_argument("--weeks", type=int, help="number of observation windows")
    sub.add_argument("--width-seconds", type=float, help="window width (default 604800)")
    sub.add_argument("--rbo-p", type=float, help="reproduction persistence (default 0.9)")
    sub.add_argument(
        "--inst-variant",
        choices=INSTITUTIONNESS_VARIANTS,
        help="institutionness threshold variant (default literal)",
    )
    sub.add_argument("--practices", help="comma-separated practice subset")
    sub.add_argument("--markers", help="event markers, comma-separated window:label")
    sub.add_argument(
        "--restrict-to-roster",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="keep only user references to roster members (default on)",
    )
    sub.add_argument(
        "--retweet-hashtags",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="count hashtags inside retweeted text (default on)",
    )


def _merged_values(args: argparse.Namespace) -> dict[str, str]:
    """Config file settings overridden by any explicitly given flags."""
    values: dict[str, str] = {}
    if args.config is not None:
        values.update(pipeline.parse_config_file(args.config))
    overrides = {
        "corpus": args.corpus,
        "roster": args.roster,
        "follow_edges": args.follow_edges,
        "out": args.out,
        "epoch": args.epoch,
        "weeks": args.weeks,
        "width_seconds": args.width_seconds,
        "rbo_p": args.rbo_p,
        "inst_variant": args.inst_variant,
        "practices": args.practices,
        "markers": args.markers,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = str(value)
    for key, flag in (
        ("restrict_to_roster", args.restrict_to_roster),
        ("retweet_hashtags", args.retweet_hashtags),
    ):
        if flag is not None:
            values[key] = "true" if flag else "false"
    return values


def _run_stages(args: argparse.Namespace, stages: frozenset) -> int:
    config = pipeline.build_run_config(_merged_values(args))
    manifest = pipeline.run_pipeline(config, stages)
    print(f"wrote {len(manifest['artifacts'])} artifacts to {config.out_dir}")
    failed = {name: s for name, s in manifest["practices"].items() if s != "ok"}
    for name, s in sorted(failed.items()):
        print(f"warning: {name}: {s}", file=sys.stderr)
    return EXIT_DATA if failed else EXIT_OK


def _cmd_report(args) -> int:
    return _run_stages(args, pipeline.ALL_STAGES)


def _cmd_measure(args) -> int:
    return _run_stages(args, frozenset({"ingest", "vectors", "series"}))


def _cmd_facts(args) -> int:
    return _run_stages(args, frozenset({"facts"}))


def _cmd_network(args) -> int:
    return _run_stages(args, frozenset({"network"}))


def _cmd_ingest(args) -> int:
    config = pipeline.build_run_config(_merged_values(args))
    counts = pipeline.run_ingest(config)
    print(
        f"read {counts['records_read']} records: "
        f"{counts['transactions']} transactions, "
        f"{sum(counts['skipped'].values())} skipped"
    )
    return EXIT_OK


def _parse_groups(text: str) -> list[tuple[str, int]]:
    groups = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, size = item.partition(":")
        try:
            groups.append((name, int(size)))
        except ValueError:
            raise ConfigError(f"--groups: expected NAME:SIZE, got {item!r}")
    if not groups:
        raise ConfigError("--groups: at least one NAME:SIZE entry required")
    return groups


def _parse_injection(text: str) -> synth.BurstInjection:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--burst: expected FACT:ONSET:END:MULTIPLIER, got {text!r}")
    try:
        return synth.BurstInjection(parts[0], int(parts[1]), int(parts[2]), float(parts[3]))
    except ValueError as exc:
        raise ConfigError(f"--burst: {exc}")


def _cmd_synth(args) -> int:
    try:
        config = synth.SynthConfig(
            groups=_parse_groups(args.groups),
            windows=args.weeks,
            rate=args.rate,
            alpha=args.alpha,
            hom=args.hom,
            seed=args.seed,
            burst_injections=[_parse_injection(b) for b in (args.burst or [])],
            warmup_facts=args.warmup_facts,
            warmup_tokens=args.warmup_tokens,
            epoch=parse_timestamp(args.epoch),
            width=args.width_seconds,
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    transactions, roster = synth.generate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    synth.write_corpus_jsonl(transactions, out / "corpus.jsonl")
    synth.write_roster_csv(roster, out / "roster.csv")
    print(
        f"wrote {len(transactions)} transactions for {len(roster)} members "
        f"to {out / 'corpus.jsonl'}"
    )
    return EXIT_OK


def _cmd_selftest(args) -> int:
    try:
        results = selftest.run(args.only or None)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(selftest.format_results(results))
    return EXIT_SELFTEST if selftest.failures(results) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="culturestream",
        description="Socio-cultural measures over group-attributed communication streams.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, handler, doc in (
        ("ingest", _cmd_ingest, "normalize a corpus into transactions + skip report"),
        ("measure", _cmd_measure, "culture vectors and per-window measure series"),
        ("facts", _cmd_facts, "per-fact institutionness and burst episodes"),
        ("network", _cmd_network, "directed practice graphs and group statistics"),
        ("report", _cmd_report, "full artifact set with manifest"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_run_options(p)
        p.set_defaults(func=handler)

    p = sub.add_parser("synth", help="generate a synthetic corpus and roster")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    p.add_argument("--weeks", type=int, default=13, help="windows to generate (default 13)")
    p.add_argument("--groups", default="A:20,B:20", help="comma-separated NAME:SIZE list")
    p.add_argument("--rate", type=float, default=2.0,
                   help="expected transactions per member, window, practice (default 2)")
    p.add_argument("--alpha", type=float, default=0.1,
                   help="new-fact probability for tagging (default 0.1)")
    p.add_argument("--hom", type=float, default=0.5,
                   help="probability a user reference stays in-group (default 0.5)")
    p.add_argument("--burst", action="append", metavar="FACT:ONSET:END:MULT",
                   help="burst injection; repeatable")
    p.add_argument("--warmup-facts", type=int, default=0,
                   help="pre-existing background facts (default 0)")
    p.add_argument("--warmup-tokens", type=int, default=1,
                   help="initial references per pre-existing fact (default 1)")
    p.add_argument("--epoch", default="0", help="stream start (default epoch second 0)")
    p.add_argument("--width-seconds", type=float, default=7 * 86400.0,
                   help="window width (default 604800)")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("selftest", help="run the built-in check battery")
    p.add_argument("--only", action="append", metavar="NAME",
                   help="run a single named check; repeatable")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
