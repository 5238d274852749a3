"""End-to-end orchestration: ingest, bin, measure, facts, network, manifest.

The run configuration can come from a key-value config file, command-line
flags, or both (flags win).  Config file format, one setting per line:

    # comment
    corpus = fixtures/demo_corpus.jsonl
    roster = fixtures/demo_roster.csv
    epoch = 2013-07-20T00:00:00Z
    weeks = 13

Relative paths in a config file are resolved against the file's directory.
All artifacts are CSV except the manifest (JSON with config hash, input
checksums, and per-artifact row counts).  Outputs are deterministic: two
runs over the same inputs produce byte-identical directories.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import binning, facts, measures, network
from .corpus import (
    load_corpus,
    load_roster,
    parse_timestamp,
    write_ingest_report,
    write_transactions_jsonl,
)
from .errors import ConfigError
from .measures import RboParams

logger = logging.getLogger(__name__)

TEMPORAL_PRACTICES = ("tagging", "retweeting", "mentioning")
USER_PRACTICES = ("retweeting", "mentioning")

ALL_STAGES = frozenset({"ingest", "vectors", "series", "facts", "network"})


@dataclass
class RunConfig:
    corpus: Path
    roster: Path
    out_dir: Path
    epoch: float
    count: int
    width: float = 7 * 86400.0
    follow_edges: Optional[Path] = None
    practices: tuple[str, ...] = TEMPORAL_PRACTICES
    rbo_p: float = 0.9
    inst_variant: str = "literal"
    restrict_to_roster: bool = True
    include_retweet_hashtags: bool = True
    markers: list[tuple[int, str]] = field(default_factory=list)

    def validate(self) -> None:
        if not Path(self.corpus).is_file():
            raise ConfigError(f"corpus not found: {self.corpus}")
        if not Path(self.roster).is_file():
            raise ConfigError(f"roster not found: {self.roster}")
        if self.follow_edges is not None and not Path(self.follow_edges).is_file():
            raise ConfigError(f"follow edge list not found: {self.follow_edges}")
        if self.count < 2:
            raise ConfigError("need at least 2 windows for reproduction series")
        if self.width <= 0:
            raise ConfigError("window width must be positive")
        if not (0.0 <= self.rbo_p < 1.0):
            raise ConfigError("rbo persistence must be in [0, 1)")
        if self.inst_variant not in facts.INSTITUTIONNESS_VARIANTS:
            raise ConfigError(f"unknown institutionness variant {self.inst_variant!r}")
        for practice in self.practices:
            if practice not in TEMPORAL_PRACTICES:
                raise ConfigError(f"unknown practice {practice!r}")
        for window, _ in self.markers:
            if not (1 <= window <= self.count):
                raise ConfigError(f"marker window {window} outside 1..{self.count}")

    def span(self) -> tuple[float, float]:
        return (self.epoch, self.epoch + self.width * self.count)


def parse_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    base = Path(path).parent
    path_keys = {"corpus", "roster", "follow_edges", "out"}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{line_no}: empty key")
        if key in path_keys and value:
            value = str((base / value) if not Path(value).is_absolute() else Path(value))
        values[key] = value
    return values


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_markers(value: str) -> list[tuple[int, str]]:
    markers = []
    for item in value.split(","):
        item = item.strip()
        if not item:
            continue
        window, _, label = item.partition(":")
        try:
            markers.append((int(window), label))
        except ValueError:
            raise ConfigError(f"markers: expected 'window:label', got {item!r}")
    return markers


def build_run_config(values: dict[str, str]) -> RunConfig:
    """Typed RunConfig from merged string settings (file values + flags)."""
    missing = [key for key in ("corpus", "roster", "out", "epoch", "weeks") if not values.get(key)]
    if missing:
        raise ConfigError(f"missing required settings: {', '.join(missing)}")
    try:
        epoch = parse_timestamp(values["epoch"])
    except ValueError as exc:
        raise ConfigError(f"epoch: {exc}")
    try:
        count = int(values["weeks"])
        width = float(values.get("width_seconds", 7 * 86400))
        rbo_p = float(values.get("rbo_p", 0.9))
    except ValueError as exc:
        raise ConfigError(str(exc))
    practices = tuple(
        p.strip() for p in values.get("practices", ",".join(TEMPORAL_PRACTICES)).split(",") if p.strip()
    )
    return RunConfig(
        corpus=Path(values["corpus"]),
        roster=Path(values["roster"]),
        out_dir=Path(values["out"]),
        epoch=epoch,
        count=count,
        width=width,
        follow_edges=Path(values["follow_edges"]) if values.get("follow_edges") else None,
        practices=practices,
        rbo_p=rbo_p,
        inst_variant=values.get("inst_variant", "literal"),
        restrict_to_roster=_parse_bool(values.get("restrict_to_roster", "true"), "restrict_to_roster"),
        include_retweet_hashtags=_parse_bool(
            values.get("retweet_hashtags", "true"), "retweet_hashtags"
        ),
        markers=_parse_markers(values.get("markers", "")),
    )


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _config_echo(config: RunConfig) -> dict:
    # out_dir is deliberately excluded so runs into different directories
    # stay byte-identical.
    return {
        "corpus": str(config.corpus),
        "roster": str(config.roster),
        "follow_edges": str(config.follow_edges) if config.follow_edges else None,
        "epoch": config.epoch,
        "count": config.count,
        "width": config.width,
        "practices": list(config.practices),
        "rbo_p": config.rbo_p,
        "inst_variant": config.inst_variant,
        "restrict_to_roster": config.restrict_to_roster,
        "include_retweet_hashtags": config.include_retweet_hashtags,
        "markers": [[w, label] for w, label in config.markers],
    }


def _row_count(path) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        return max(sum(1 for _ in fh) - 1, 0)


def run_pipeline(
    config: RunConfig,
    stages: frozenset = ALL_STAGES,
    write_manifest: bool = True,
) -> dict:
    """Run the selected stages and return the manifest.

    Nothing is written before the configuration validates.  A failure inside
    one practice is recorded in the manifest and does not disturb the other
    practices' artifacts.
    """
    config.validate()

    with open(config.roster, encoding="utf-8") as fh:
        roster = load_roster(fh)
    groups = sorted(set(roster.values()))
    span = config.span()
    with open(config.corpus, encoding="utf-8") as fh:
        ingest = load_corpus(
            fh,
            roster,
            span,
            restrict_to_roster=config.restrict_to_roster,
            include_retweet_hashtags=config.include_retweet_hashtags,
        )
    if not ingest.transactions:
        logger.warning("corpus produced no transactions; artifacts will be header-only")

    spec = binning.WindowSpec(epoch=config.epoch, count=config.count, width=config.width)
    vectors, dropped = binning.bin_transactions(ingest.transactions, spec)

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, int] = {}
    status: dict[str, str] = {}
    rbo = RboParams(config.rbo_p)

    def emit(name: str, writer) -> None:
        path = out / name
        writer(path)
        artifacts[name] = _row_count(path)

    if "ingest" in stages:
        emit("ingest_report.csv", lambda p: write_ingest_report(ingest, p))

    for practice in config.practices:
        try:
            practice_vectors = {k: v for k, v in vectors.items() if k[2] == practice}
            if "vectors" in stages:
                emit(
                    f"vectors_{practice}.csv",
                    lambda p, pv=practice_vectors: binning.write_vectors_csv(pv, p),
                )
            if "series" in stages:
                for measure in measures.MEASURES:
                    per_group = measures.build_series(
                        vectors, spec, practice, groups, measure, rbo
                    )
                    avg = measures.average_series(per_group) if per_group else None
                    emit(
                        f"{measure}_{practice}.csv",
                        lambda p, g=per_group, a=avg: measures.write_series_csv(g, a, p),
                    )
            if "facts" in stages:
                rows = facts.fact_measures(vectors, spec, groups, practice, config.inst_variant)
                emit(f"facts_{practice}.csv", lambda p, r=rows: facts.write_fact_csv(r, p))
            if "network" in stages and practice in USER_PRACTICES:
                graph = network.build_graph(ingest.transactions, practice, roster)
                stats = network.group_stats(graph)
                emit(
                    f"network_{practice}.csv",
                    lambda p, s=stats, pr=practice: network.write_stats_csv(s, pr, p),
                )
                emit(f"edges_{practice}.csv", lambda p, g=graph: network.write_edges_csv(g, p))
            status[practice] = "ok"
        except Exception as exc:  # isolate practice failures
            logger.exception("practice %s failed", practice)
            status[practice] = f"failed: {exc}"

    if "network" in stages and config.follow_edges is not None:
        try:
            with open(config.follow_edges, encoding="utf-8") as fh:
                edges = network.load_follow_edges(fh)
            graph, skipped_edges = network.build_follow_graph(edges, roster)
            if skipped_edges:
                logger.info("skipped %d follow edges outside the roster", skipped_edges)
            stats = network.group_stats(graph)
            emit(
                "network_following.csv",
                lambda p, s=stats: network.write_stats_csv(s, "following", p),
            )
            emit("edges_following.csv", lambda p, g=graph: network.write_edges_csv(g, p))
            status["following"] = "ok"
        except Exception as exc:
            logger.exception("following network failed")
            status["following"] = f"failed: {exc}"

    echo = _config_echo(config)
    inputs = {
        "corpus": {"path": str(config.corpus), "sha256": _sha256_file(config.corpus)},
        "roster": {"path": str(config.roster), "sha256": _sha256_file(config.roster)},
    }
    if config.follow_edges is not None:
        inputs["follow_edges"] = {
            "path": str(config.follow_edges),
            "sha256": _sha256_file(config.follow_edges),
        }
    manifest = {
        "config": echo,
        "config_sha256": hashlib.sha256(
            json.dumps(echo, sort_keys=True).encode("utf-8")
        ).hexdigest(),
        "inputs": inputs,
        "ingest": {
            "records_read": ingest.records_read,
            "transactions": len(ingest.transactions),
            "skipped": dict(ingest.skipped),
            "dropped_outside_grid": dropped,
        },
        "artifacts": artifacts,
        "practices": status,
        "markers": [[w, label] for w, label in config.markers],
    }
    if write_manifest:
        (out / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    return manifest


def run_ingest(config: RunConfig) -> dict:
    """Ingest only: normalized transaction stream plus the skip report."""
    config.validate()
    with open(config.roster, encoding="utf-8") as fh:
        roster = load_roster(fh)
    with open(config.corpus, encoding="utf-8") as fh:
        ingest = load_corpus(
            fh,
            roster,
            config.span(),
            restrict_to_roster=config.restrict_to_roster,
            include_retweet_hashtags=config.include_retweet_hashtags,
        )
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_transactions_jsonl(ingest.transactions, out / "transactions.jsonl")
    write_ingest_report(ingest, out / "ingest_report.csv")
    return {
        "records_read": ingest.records_read,
        "transactions": len(ingest.transactions),
        "skipped": dict(ingest.skipped),
    }
