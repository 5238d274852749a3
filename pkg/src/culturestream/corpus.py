"""Ingest raw communication records into a validated transaction stream.

A transaction is one communicative act: an author (who belongs to exactly one
group) referencing one or more facts through a practice.  Practices and the
fact kinds they reference:

    tagging    -> hashtag
    retweeting -> retweetee (a user handle)
    mentioning -> mentionee (a user handle)
    following  -> followee  (a user handle)

Two line-delimited JSON record schemas are accepted (one object per line):

    raw:           {"id": ..., "user": ..., "timestamp": ..., "text": ...}
    pre-extracted: {"id": ..., "user": ..., "timestamp": ..., "practice": ...,
                    "facts": [...]}

Timestamps may be epoch seconds or ISO-8601 strings (naive times are read as
UTC).  Malformed lines are counted and reported, never fatal; a roster that
maps one user to two different groups is a hard error.
"""

from __future__ import annotations

import csv
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Optional

from .errors import DataError

logger = logging.getLogger(__name__)

PRACTICES = ("tagging", "retweeting", "mentioning", "following")

KIND_FOR_PRACTICE = {
    "tagging": "hashtag",
    "retweeting": "retweetee",
    "mentioning": "mentionee",
    "following": "followee",
}

USER_KINDS = frozenset({"retweetee", "mentionee", "followee"})

# Canonical skip reasons, in report order.
SKIP_REASONS = ("malformed", "duplicate_id", "unknown_author", "outside_window", "no_facts")

_HASHTAG_RE = re.compile(r"#(\w+)")
# "RT username" and "RT @username", optional trailing colon.
_RT_RE = re.compile(r"\bRT\s+@?([A-Za-z0-9_]+):?", re.IGNORECASE)
_MENTION_RE = re.compile(r"@([A-Za-z0-9_]+)")


@dataclass(frozen=True)
class Fact:
    """A referenced cultural object: a hashtag or a user handle."""

    kind: str
    key: str


@dataclass(frozen=True)
class Transaction:
    """One communicative act by an author, referencing one or more facts."""

    id: str
    author: str
    group: str
    timestamp: float
    practice: str
    facts: tuple[Fact, ...]


def normalize_handle(raw: str) -> str:
    """Canonical user handle: leading '@' stripped, lowercased.

    Raises ValueError for empty handles or handles containing whitespace.
    """
    handle = raw.strip().lstrip("@").lower()
    if not handle:
        raise ValueError("empty user handle")
    if any(c.isspace() for c in handle):
        raise ValueError(f"whitespace in user handle: {raw!r}")
    return handle


def fold_hashtag(token: str) -> str:
    """ASCII-fold and lowercase a hashtag token; may return ''."""
    folded = unicodedata.normalize("NFKD", token).encode("ascii", "ignore").decode("ascii")
    return folded.lower()


def _dedupe(keys: Iterable[str]) -> list[str]:
    seen = set()
    out = []
    for k in keys:
        if k not in seen:
            seen.add(k)
            out.append(k)
    return out


def extract_facts(
    text: str,
    roster: Optional[set[str]] = None,
    restrict_to_roster: bool = True,
    include_retweet_hashtags: bool = True,
) -> dict[str, list[str]]:
    """Extract per-practice fact keys from a raw message.

    Returns {"tagging": [...], "retweeting": [...], "mentioning": [...]} with
    normalized, per-message-deduplicated keys in first-occurrence order.

    A username captured by an RT pattern is a retweetee and is never also
    counted as a mentionee of the same message.  With restrict_to_roster,
    user-kind facts outside the roster are dropped (hashtags are never
    restricted).  With include_retweet_hashtags=False, hashtags at or after
    the first RT marker are dropped (the part before it is the author's own
    comment).
    """
    roster = roster or set()

    rt_matches = list(_RT_RE.finditer(text))
    rt_spans = [m.span() for m in rt_matches]
    retweetees = _dedupe(m.group(1).lower() for m in rt_matches)

    mentionees = []
    for m in _MENTION_RE.finditer(text):
        if any(start <= m.start() < end for start, end in rt_spans):
            continue
        mentionees.append(m.group(1).lower())
    rt_set = set(retweetees)
    mentionees = [u for u in _dedupe(mentionees) if u not in rt_set]

    if restrict_to_roster:
        retweetees = [u for u in retweetees if u in roster]
        mentionees = [u for u in mentionees if u in roster]

    hashtags = []
    cutoff = rt_matches[0].start() if (rt_matches and not include_retweet_hashtags) else None
    for m in _HASHTAG_RE.finditer(text):
        if cutoff is not None and m.start() >= cutoff:
            continue
        tag = fold_hashtag(m.group(1))
        if tag:
            hashtags.append(tag)
    hashtags = _dedupe(hashtags)

    return {"tagging": hashtags, "retweeting": retweetees, "mentioning": mentionees}


def load_roster(lines: Iterable[str]) -> dict[str, str]:
    """Parse a roster CSV with header ``user,group`` into handle -> group.

    A user listed under two different groups is a hard error; exact repeats
    are tolerated.
    """
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty roster")
    if [h.strip().lower() for h in header[:2]] != ["user", "group"]:
        raise DataError(f"roster must start with header 'user,group', got {header!r}")

    roster: dict[str, str] = {}
    for row_no, row in enumerate(reader, 2):
        if not row or not "".join(row).strip():
            continue
        if len(row) < 2:
            raise DataError(f"roster row {row_no}: expected 'user,group', got {row!r}")
        user = normalize_handle(row[0])
        group = row[1].strip()
        if not group:
            raise DataError(f"roster row {row_no}: empty group for user {user!r}")
        if user in roster and roster[user] != group:
            raise DataError(
                f"roster row {row_no}: user {user!r} mapped to both "
                f"{roster[user]!r} and {group!r}"
            )
        roster[user] = group
    return roster


def parse_timestamp(value) -> float:
    """Epoch seconds from an int/float, a numeric string, or ISO-8601."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        s = value.strip()
        try:
            return float(s)
        except ValueError:
            pass
        if s.endswith(("Z", "z")):
            s = s[:-1] + "+00:00"
        dt = datetime.fromisoformat(s)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()
    raise ValueError(f"unparseable timestamp: {value!r}")


@dataclass
class IngestResult:
    """Validated transactions plus an accounting of every skipped record."""

    transactions: list[Transaction] = field(default_factory=list)
    records_read: int = 0
    skipped: dict[str, int] = field(default_factory=lambda: {r: 0 for r in SKIP_REASONS})
    malformed_lines: list[tuple[int, str]] = field(default_factory=list)

    @property
    def skipped_total(self) -> int:
        return sum(self.skipped.values())


def _facts_from_keys(practice: str, keys: Iterable, roster: dict[str, str],
                     restrict_to_roster: bool) -> list[Fact]:
    kind = KIND_FOR_PRACTICE[practice]
    cleaned = []
    for raw in keys:
        if not isinstance(raw, str):
            continue
        if kind == "hashtag":
            key = fold_hashtag(raw.lstrip("#"))
            if not key:
                continue
        else:
            try:
                key = normalize_handle(raw)
            except ValueError:
                continue
            if restrict_to_roster and key not in roster:
                continue
        cleaned.append(key)
    return [Fact(kind, k) for k in _dedupe(cleaned)]


def load_corpus(
    lines: Iterable[str],
    roster: dict[str, str],
    window: tuple[float, float],
    restrict_to_roster: bool = True,
    include_retweet_hashtags: bool = True,
) -> IngestResult:
    """Single-pass ingest of line-delimited records into Transactions.

    ``window`` is the half-open observation span [start, end) in epoch
    seconds.  Emits one Transaction per (record, practice) with non-empty
    facts; every record either contributes transactions or is counted under
    exactly one skip reason, so

        records_read == distinct emitted record ids + skipped_total
    """
    start, end = window
    result = IngestResult()
    roster_handles = set(roster)
    seen_ids: set[str] = set()

    for line_no, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped:
            continue
        result.records_read += 1

        try:
            rec = json.loads(stripped)
            if not isinstance(rec, dict):
                raise ValueError("record is not an object")
            rec_id = str(rec["id"])
            author = normalize_handle(str(rec["user"]))
            ts = parse_timestamp(rec["timestamp"])
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            result.skipped["malformed"] += 1
            result.malformed_lines.append((line_no, str(exc)))
            logger.debug("line %d malformed: %s", line_no, exc)
            continue

        if rec_id in seen_ids:
            result.skipped["duplicate_id"] += 1
            continue
        seen_ids.add(rec_id)

        group = roster.get(author)
        if group is None:
            result.skipped["unknown_author"] += 1
            continue
        if not (start <= ts < end):
            result.skipped["outside_window"] += 1
            continue

        if "practice" in rec or "facts" in rec:
            practice = rec.get("practice")
            if practice not in PRACTICES or not isinstance(rec.get("facts"), list):
                result.skipped["malformed"] += 1
                result.malformed_lines.append((line_no, "bad practice/facts fields"))
                continue
            per_practice = {practice: rec["facts"]}
            emitted = 0
            for prac, keys in per_practice.items():
                facts = _facts_from_keys(prac, keys, roster, restrict_to_roster)
                if facts:
                    result.transactions.append(
                        Transaction(rec_id, author, group, ts, prac, tuple(facts))
                    )
                    emitted += 1
            if emitted == 0:
                result.skipped["no_facts"] += 1
            continue

        text = rec.get("text")
        if not isinstance(text, str):
            result.skipped["malformed"] += 1
            result.malformed_lines.append((line_no, "missing text field"))
            continue
        extracted = extract_facts(
            text,
            roster_handles,
            restrict_to_roster=restrict_to_roster,
            include_retweet_hashtags=include_retweet_hashtags,
        )
        emitted = 0
        for practice in ("tagging", "retweeting", "mentioning"):
            keys = extracted[practice]
            if not keys:
                continue
            kind = KIND_FOR_PRACTICE[practice]
            facts = tuple(Fact(kind, k) for k in keys)
            result.transactions.append(
                Transaction(rec_id, author, group, ts, practice, facts)
            )
            emitted += 1
        if emitted == 0:
            result.skipped["no_facts"] += 1

    return result


def validate_transactions(
    transactions: Iterable[Transaction],
    roster: dict[str, str],
    window: tuple[float, float],
) -> list[str]:
    """Check every emitted transaction against the stream contract.

    Returns a list of violation messages (empty when the stream is clean).
    """
    start, end = window
    violations = []
    rt_by_id: dict[str, set[str]] = {}
    mention_by_id: dict[str, set[str]] = {}

    for t in transactions:
        where = f"transaction {t.id}/{t.practice}"
        if not t.facts:
            violations.append(f"{where}: empty facts")
        if roster.get(t.author) != t.group:
            violations.append(f"{where}: author/group not in roster")
        if not (start <= t.timestamp < end):
            violations.append(f"{where}: timestamp outside window")
        if t.practice not in PRACTICES:
            violations.append(f"{where}: unknown practice")
        else:
            kind = KIND_FOR_PRACTICE[t.practice]
            for f in t.facts:
                if f.kind != kind:
                    violations.append(f"{where}: fact kind {f.kind} mismatches practice")
                if not f.key or f.key != f.key.lower() or f.key.startswith(("#", "@")):
                    violations.append(f"{where}: unnormalized fact key {f.key!r}")
        keys = [f.key for f in t.facts]
        if len(set(keys)) != len(keys):
            violations.append(f"{where}: duplicate facts within transaction")
        if t.practice == "retweeting":
            rt_by_id.setdefault(t.id, set()).update(keys)
        elif t.practice == "mentioning":
            mention_by_id.setdefault(t.id, set()).update(keys)

    for rec_id, rts in rt_by_id.items():
        overlap = rts & mention_by_id.get(rec_id, set())
        if overlap:
            violations.append(
                f"record {rec_id}: {sorted(overlap)} counted as both retweetee and mentionee"
            )
    return violations


def write_ingest_report(result: IngestResult, path) -> None:
    """Write the skip accounting as CSV ``reason,count``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["reason", "count"])
        for reason in SKIP_REASONS:
            writer.writerow([reason, result.skipped.get(reason, 0)])


def write_transactions_jsonl(transactions: Iterable[Transaction], path) -> None:
    """Write a stream in the pre-extracted record schema, one object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in transactions:
            fh.write(
                json.dumps(
                    {
                        "id": t.id,
                        "user": t.author,
                        "timestamp": t.timestamp,
                        "practice": t.practice,
                        "facts": [f.key for f in t.facts],
                    },
                    sort_keys=True,
                )
                + "\n"
            )
