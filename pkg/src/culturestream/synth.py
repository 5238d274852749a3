"""Theory-driven synthetic transaction streams for validating the measures.

Three mechanisms, all seed-deterministic:

  cumulative advantage   each tagging act starts a new hashtag with
                         probability alpha, otherwise reuses an existing one
                         proportionally to its cumulative count (urn scheme,
                         shared across groups so popular facts are shared)
  homophily mixing       retweet/mention targets are drawn from the sender's
                         own group with probability hom, otherwise uniformly
                         from the whole roster (minus the sender)
  burst injection        during a window interval, a designated hashtag's
                         selection odds are multiplied

The urn can be warm-started with a population of background facts
(warmup_facts, warmup_tokens initial references each).  Injected facts are
seeded the same way, as ordinary members of that initial culture rather than
founders, so the multiplier - not first-mover advantage - is what makes them
burst.  With warmup_tokens well above 1 the initial shares are deterministic
and the founding-era volatility of a cold urn disappears.

Activity is Poisson per member, window, and practice.  The output is a
regular Transaction stream plus a roster, both writable in the formats the
ingest layer consumes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import Fact, Transaction, write_transactions_jsonl

GENERATED_PRACTICES = ("tagging", "retweeting", "mentioning")


@dataclass(frozen=True)
class BurstInjection:
    fact: str
    onset: int
    end: int
    multiplier: float

    def active(self, window: int) -> bool:
        return self.onset <= window <= self.end


@dataclass
class SynthConfig:
    groups: list[tuple[str, int]]  # (group id, member count)
    windows: int
    rate: float  # expected transactions per member, window, and practice
    alpha: float  # new-fact probability in (0, 1]
    hom: float  # probability a user reference stays in-group
    seed: int
    burst_injections: list[BurstInjection] = field(default_factory=list)
    warmup_facts: int = 0  # pre-existing background facts
    warmup_tokens: int = 1  # initial references per pre-existing fact
    practices: tuple[str, ...] = GENERATED_PRACTICES
    epoch: float = 0.0
    width: float = 7 * 86400.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must be in (0, 1]")
        if not (0.0 <= self.hom <= 1.0):
            raise ValueError("hom must be in [0, 1]")
        if self.windows < 1 or self.rate < 0:
            raise ValueError("need windows >= 1 and rate >= 0")
        if self.warmup_facts < 0 or self.warmup_tokens < 1:
            raise ValueError("need warmup_facts >= 0 and warmup_tokens >= 1")
        bad = [p for p in self.practices if p not in GENERATED_PRACTICES]
        if bad or not self.practices:
            raise ValueError(f"practices must be a non-empty subset of {GENERATED_PRACTICES}")

    def roster(self) -> dict[str, str]:
        members = {}
        for group, size in self.groups:
            for i in range(size):
                members[f"{group.lower()}{i:03d}"] = group
        return members


class _FactUrn:
    """Cumulative-advantage urn over hashtag keys with optional odds boosts.

    Sampling an existing fact is a uniform draw from the token list, which is
    exactly count-proportional; a boosted fact first claims its extra odds
    mass (multiplier - 1) * count.
    """

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.tokens: list[str] = []
        self.counts: dict[str, int] = {}
        self.serial = 0

    def seed_fact(self, key: str, tokens: int = 1) -> None:
        if key not in self.counts:
            self.counts[key] = tokens
            self.tokens.extend([key] * tokens)

    def draw(self, alpha: float, boosts: dict[str, float]) -> str:
        if not self.tokens or self.rng.random() < alpha:
            self.serial += 1
            key = f"h{self.serial:05d}"
        else:
            key = self._draw_existing(boosts)
        self.tokens.append(key)
        self.counts[key] = self.counts.get(key, 0) + 1
        return key

    def _draw_existing(self, boosts: dict[str, float]) -> str:
        total = float(len(self.tokens))
        extras = [
            (key, (mult - 1.0) * self.counts[key])
            for key, mult in boosts.items()
            if key in self.counts and mult > 1.0
        ]
        extra_mass = sum(mass for _, mass in extras)
        u = self.rng.random() * (total + extra_mass)
        if u >= total:
            u -= total
            for key, mass in extras:
                if u < mass:
                    return key
                u -= mass
            return extras[-1][0]  # guard against float round-off
        return self.tokens[int(u)]


def generate(config: SynthConfig) -> tuple[list[Transaction], dict[str, str]]:
    """Deterministic synthetic stream for the configured mechanisms."""
    rng = np.random.default_rng(config.seed)
    roster = config.roster()
    members = list(roster)
    index_of = {m: i for i, m in enumerate(members)}
    same_group = {
        m: [o for o in members if roster[o] == roster[m] and o != m] for m in members
    }
    urn = _FactUrn(rng)
    for i in range(config.warmup_facts):
        urn.seed_fact(f"w{i + 1:05d}", config.warmup_tokens)
    for injection in config.burst_injections:
        urn.seed_fact(injection.fact, config.warmup_tokens)

    transactions: list[Transaction] = []
    serial = 0
    for window in range(1, config.windows + 1):
        boosts = {
            inj.fact: inj.multiplier
            for inj in config.burst_injections
            if inj.active(window)
        }
        window_start = config.epoch + (window - 1) * config.width
        for member in members:
            for practice in config.practices:
                for _ in range(rng.poisson(config.rate)):
                    if practice == "tagging":
                        fact = Fact("hashtag", urn.draw(config.alpha, boosts))
                    else:
                        target = _draw_target(
                            rng, member, members, index_of, same_group[member], config.hom
                        )
                        if target is None:
                            continue
                        kind = "retweetee" if practice == "retweeting" else "mentionee"
                        fact = Fact(kind, target)
                    serial += 1
                    transactions.append(
                        Transaction(
                            id=f"s{serial:07d}",
                            author=member,
                            group=roster[member],
                            timestamp=window_start + rng.random() * config.width,
                            practice=practice,
                            facts=(fact,),
                        )
                    )
    return transactions, roster


def _draw_target(rng, member, members, index_of, own_group, hom) -> Optional[str]:
    if rng.random() < hom:
        if not own_group:
            return None
        return own_group[int(rng.random() * len(own_group))]
    if len(members) < 2:
        return None
    # uniform over the whole roster minus the sender
    pick = int(rng.random() * (len(members) - 1))
    if pick >= index_of[member]:
        pick += 1
    return members[pick]


def write_corpus_jsonl(transactions: list[Transaction], path) -> None:
    """Emit the pre-extracted record schema, one JSON object per line."""
    write_transactions_jsonl(transactions, path)


def write_roster_csv(roster: dict[str, str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "group"])
        for user in sorted(roster):
            writer.writerow([user, roster[user]])
