"""Runtime self-checks for the measure implementations.

Each check is small, named, and independent; ``run()`` executes them all and
reports per-check pass/fail.  The battery includes hand-computed reference
values for every measure, an exhaustive cross-check of the institutionness
scan, and an algebraic cross-check of the burst cost model, so a broken
build fails loudly before it produces plausible-looking numbers.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional

from . import facts, measures, synth
from .binning import CultureVector, WindowSpec, bin_transactions, rank_vector
from .corpus import Fact, load_corpus
from .facts import FactSeries

# Hand-computed reference values (see the matching checks for the arithmetic).
FOCUS_3_1 = 0.18872187554086717
COSINE_AB_A = 0.7071067811865475
RBO_SWAP_09 = 0.90
RBO_SWAP_05 = 0.50
RBO_TOP10_MASS_09 = 0.6513215599
BURST_WEIGHT_1_5 = 0.667656963122613


def _tag(key: str) -> Fact:
    return Fact("hashtag", key)


def _vector(counts: dict[str, int], group="G", window=1, practice="tagging") -> CultureVector:
    return CultureVector(group, window, practice, {_tag(k): c for k, c in counts.items()})


def _approx(a: float, b: float, tol: float = 1e-12) -> bool:
    return abs(a - b) <= tol


# ---------------------------------------------------------------------------
# focus


def check_focus_single_fact() -> None:
    assert measures.focus(_vector({"a": 5})) == 1.0


def check_focus_uniform() -> None:
    value = measures.focus(_vector({"a": 2, "b": 2, "c": 2, "d": 2}))
    assert _approx(value, 0.0), value


def check_focus_known_vector() -> None:
    # {a: 3, b: 1}: H = -(3/4)log2(3/4) - (1/4)log2(1/4) = 0.811278...,
    # focus = 1 - H / log2(2) = 0.188721...
    value = measures.focus(_vector({"a": 3, "b": 1}))
    assert _approx(value, FOCUS_3_1), value


# ---------------------------------------------------------------------------
# similarity


def check_similarity_identical() -> None:
    v = _vector({"a": 2, "b": 7})
    assert _approx(measures.pair_similarity(v, v), 1.0)


def check_similarity_disjoint() -> None:
    assert measures.pair_similarity(_vector({"a": 3}), _vector({"b": 3})) == 0.0


def check_similarity_known_pair() -> None:
    # (1,1)·(1,0) / (sqrt(2) * 1) = 1/sqrt(2)
    value = measures.pair_similarity(_vector({"a": 1, "b": 1}), _vector({"a": 1}))
    assert _approx(value, COSINE_AB_A), value


def check_similarity_needs_other_groups() -> None:
    vectors = {("G", 1, "tagging"): _vector({"a": 1})}
    assert measures.group_similarity("G", 1, "tagging", vectors) is None


# ---------------------------------------------------------------------------
# reproduction (rank-biased overlap)


def check_rbo_identical() -> None:
    assert measures.rbo_extended(["a", "b", "c"], ["a", "b", "c"], 0.9) == 1.0


def check_rbo_swapped_pair() -> None:
    # Agreement 0 at depth 1, 1 at depth 2; (1-p)(0 + p) + p^2 = 0.9 at p=0.9.
    value = measures.rbo_extended(["a", "b"], ["b", "a"], 0.9)
    assert _approx(value, RBO_SWAP_09), value


def check_rbo_persistence_sensitivity() -> None:
    # The same pair at p=0.5: 0.5*(0 + 0.5) + 0.25 = 0.5.
    value = measures.rbo_extended(["a", "b"], ["b", "a"], 0.5)
    assert _approx(value, RBO_SWAP_05), value


def check_rbo_top_depth_mass() -> None:
    # The convergent part assigns (1-p) p^(d-1) to depth d, so depths 1..10
    # carry 1 - p^10 of it: about 65% at p = 0.9.
    p = 0.9
    mass = sum((1.0 - p) * p ** (d - 1) for d in range(1, 11))
    assert _approx(mass, 1.0 - p**10), mass
    assert _approx(mass, RBO_TOP10_MASS_09, 1e-10), mass


def check_rbo_ranking_tie_break() -> None:
    ranked = rank_vector(_vector({"b": 2, "a": 2, "c": 1}))
    assert [f.key for f, _ in ranked] == ["a", "b", "c"], ranked


# ---------------------------------------------------------------------------
# institutionness


def _brute_force_institutionness(r, h0, variant) -> int:
    best = 0
    for h in range(0, len(r) + 1):
        satisfied = 0
        for rt, h0t in zip(r, h0):
            if h0t is None:
                continue
            ok = rt >= h / h0t if variant == "literal" else rt / h0t >= h
            if ok:
                satisfied += 1
        if satisfied >= h:
            best = max(best, h)
    return best


def check_institutionness_matches_brute_force() -> None:
    rng = random.Random(20130722)
    for trial in range(200):
        n = 13
        r = [rng.randint(0, 50) for _ in range(n)]
        h0: list[Optional[float]] = [
            None if rng.random() < 0.15 else rng.uniform(0.1, 5.0) for _ in range(n)
        ]
        for variant in facts.INSTITUTIONNESS_VARIANTS:
            got = facts.institutionness_value(r, h0, variant)
            want = _brute_force_institutionness(r, h0, variant)
            assert got == want, (trial, variant, r, h0, got, want)
            assert 0 <= got <= n


def check_week_rate_known() -> None:
    # One group, one window, counts {a: 3, b: 1}: 4 references / 2 facts = 2.
    spec = WindowSpec(epoch=0.0, count=2, width=1.0)
    vectors = {("G", 1, "tagging"): _vector({"a": 3, "b": 1})}
    assert facts.avg_rate(vectors, spec, "tagging") == [2.0, None]


# ---------------------------------------------------------------------------
# burstiness


def check_burst_known_weight() -> None:
    # r=(1,5), d=(10,10): p0=0.3, p1=0.6.  Window 2 improvement is
    # 5 ln 2 + 5 ln(4/7) = 0.667657; window 1 is negative.
    series = FactSeries("G", "tagging", _tag("a"), [1, 5], [10, 10])
    episodes = facts.burst_episodes(series)
    assert len(episodes) == 1, episodes
    ep = episodes[0]
    assert (ep.onset, ep.end) == (2, 2), (ep.onset, ep.end)
    assert _approx(ep.weight, BURST_WEIGHT_1_5, 1e-9), ep.weight


def check_burst_cost_routes_agree() -> None:
    rng = random.Random(90210)
    for _ in range(50):
        d = [rng.randint(0, 40) for _ in range(13)]
        r = [rng.randint(0, dt) for dt in d]
        if sum(r) == 0:
            r[0] = d[0] = max(d[0], 1)
        series = FactSeries("G", "tagging", _tag("a"), r, d)
        via_costs = facts.burst_improvements(series)
        closed = facts.improvement_closed_form(series)
        for a, b in zip(via_costs, closed):
            assert _approx(a, b, 1e-9), (r, d, a, b)


def check_burst_episode_segmentation() -> None:
    # r=(3,3,0,3), d=(10,10,40,10): windows 1, 2, 4 improve, window 3 does
    # not, so the episodes are [1,2] and [4,4] and the first weighs twice
    # the second.
    series = FactSeries("G", "tagging", _tag("a"), [3, 3, 0, 3], [10, 10, 40, 10])
    episodes = facts.normalize_bursts(facts.burst_episodes(series))
    spans = [(e.onset, e.end) for e in episodes]
    assert spans == [(1, 2), (4, 4)], spans
    assert episodes[0].normalized == 1.0
    assert episodes[1].normalized == 0.5, episodes[1].normalized


def check_burst_zero_week_splits_episodes() -> None:
    # A week with no activity at all is neutral (cost 0 in both states) and
    # therefore breaks a run: r=(6,0,6,0), d=(10,0,10,40) yields [1,1] and
    # [3,3], not [1,3].
    series = FactSeries("G", "tagging", _tag("a"), [6, 0, 6, 0], [10, 0, 10, 40])
    g0, g1 = facts.burst_costs(series)[1]
    assert (g0, g1) == (0.0, 0.0)
    spans = [(e.onset, e.end) for e in facts.burst_episodes(series)]
    assert spans == [(1, 1), (3, 3)], spans


def check_burst_normalization_strongest_is_one() -> None:
    series = FactSeries("G", "tagging", _tag("a"), [3, 3, 0, 3], [10, 10, 40, 10])
    episodes = facts.normalize_bursts(facts.burst_episodes(series))
    assert max(e.normalized for e in episodes) == 1.0


# ---------------------------------------------------------------------------
# stream plumbing


def check_window_binning_half_open() -> None:
    spec = WindowSpec(epoch=100.0, count=3, width=10.0)
    assert spec.index_of(100.0) == 1
    assert spec.index_of(109.999) == 1
    assert spec.index_of(110.0) == 2
    assert spec.index_of(129.999) == 3
    assert spec.index_of(130.0) is None
    assert spec.index_of(99.999) is None


def check_absent_group_week_has_no_vector() -> None:
    spec = WindowSpec(epoch=0.0, count=2, width=10.0)
    from .corpus import Transaction

    t = Transaction("x1", "u", "G", 3.0, "tagging", (_tag("a"),))
    vectors, dropped = bin_transactions([t], spec)
    assert dropped == 0
    assert ("G", 1, "tagging") in vectors
    assert ("G", 2, "tagging") not in vectors


def check_synth_deterministic() -> None:
    config = synth.SynthConfig(
        groups=[("A", 3), ("B", 3)], windows=2, rate=1.0, alpha=0.3, hom=0.5, seed=7
    )
    first, roster_a = synth.generate(config)
    second, roster_b = synth.generate(config)
    assert roster_a == roster_b
    assert first == second
    assert first, "expected a non-empty stream"


def check_ingest_conservation() -> None:
    config = synth.SynthConfig(
        groups=[("A", 4), ("B", 4)], windows=2, rate=1.5, alpha=0.3, hom=0.5, seed=11
    )
    transactions, roster = synth.generate(config)
    lines = [
        json.dumps(
            {
                "id": t.id,
                "user": t.author,
                "timestamp": t.timestamp,
                "practice": t.practice,
                "facts": [f.key for f in t.facts],
            }
        )
        for t in transactions
    ]
    lines.append("this is not json")
    lines.append(json.dumps({"id": "dup", "user": "a000", "timestamp": 1.0,
                             "practice": "tagging", "facts": ["x"]}))
    lines.append(json.dumps({"id": "dup", "user": "a000", "timestamp": 1.0,
                             "practice": "tagging", "facts": ["x"]}))
    lines.append(json.dumps({"id": "ghost", "user": "nobody", "timestamp": 1.0,
                             "practice": "tagging", "facts": ["x"]}))
    span = (config.epoch, config.epoch + config.width * config.windows)
    result = load_corpus(lines, roster, span)
    emitted_ids = {t.id for t in result.transactions}
    assert result.records_read == len(emitted_ids) + result.skipped_total, (
        result.records_read,
        len(emitted_ids),
        result.skipped,
    )


CHECKS: list[tuple[str, Callable[[], None]]] = [
    ("focus_single_fact", check_focus_single_fact),
    ("focus_uniform", check_focus_uniform),
    ("focus_known_vector", check_focus_known_vector),
    ("similarity_identical", check_similarity_identical),
    ("similarity_disjoint", check_similarity_disjoint),
    ("similarity_known_pair", check_similarity_known_pair),
    ("similarity_needs_other_groups", check_similarity_needs_other_groups),
    ("rbo_identical", check_rbo_identical),
    ("rbo_swapped_pair", check_rbo_swapped_pair),
    ("rbo_persistence_sensitivity", check_rbo_persistence_sensitivity),
    ("rbo_top_depth_mass", check_rbo_top_depth_mass),
    ("rbo_ranking_tie_break", check_rbo_ranking_tie_break),
    ("institutionness_matches_brute_force", check_institutionness_matches_brute_force),
    ("week_rate_known", check_week_rate_known),
    ("burst_known_weight", check_burst_known_weight),
    ("burst_cost_routes_agree", check_burst_cost_routes_agree),
    ("burst_episode_segmentation", check_burst_episode_segmentation),
    ("burst_zero_week_splits_episodes", check_burst_zero_week_splits_episodes),
    ("burst_normalization_strongest_is_one", check_burst_normalization_strongest_is_one),
    ("window_binning_half_open", check_window_binning_half_open),
    ("absent_group_week_has_no_vector", check_absent_group_week_has_no_vector),
    ("synth_deterministic", check_synth_deterministic),
    ("ingest_conservation", check_ingest_conservation),
]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def run(names: Optional[list[str]] = None) -> list[CheckResult]:
    """Execute the battery (or a named subset) and collect results."""
    selected = CHECKS if not names else [(n, f) for n, f in CHECKS if n in set(names)]
    if names:
        known = {n for n, _ in CHECKS}
        unknown = [n for n in names if n not in known]
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(unknown)}")
    results = []
    for name, func in selected:
        try:
            func()
        except AssertionError as exc:
            results.append(CheckResult(name, False, str(exc)))
        except Exception as exc:  # broken code should fail the check, not the runner
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
        else:
            results.append(CheckResult(name, True))
    return results


def format_results(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        mark = "ok  " if r.ok else "FAIL"
        suffix = f"  ({r.detail})" if (not r.ok and r.detail) else ""
        lines.append(f"{mark} {r.name}{suffix}")
    failed = sum(1 for r in results if not r.ok)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)


def failures(results: list[CheckResult]) -> int:
    return sum(1 for r in results if not r.ok)
