"""Aggregate directed practice graphs and their statistics.

One graph per user-referencing practice (retweeting, mentioning, following)
over the whole observation span.  Arc weight counts the transactions in which
the source referenced the target (1 per follow edge); self-references are
dropped and both endpoints must be roster members.

Statistics per group and for the TOTAL scope:

  density     distinct arcs inside the scope over |scope| * (|scope| - 1),
              on the group-induced subgraph
  degrees     averaged over scope members, counting arcs to/from any roster
              member, not only within the group
  homophily   per sender, the fraction of out-going weight staying inside
              the sender's own group; scope score is the mean over members
              with any out-activity
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .corpus import Transaction, USER_KINDS

TOTAL = "TOTAL"

NETWORK_PRACTICES = ("retweeting", "mentioning", "following")


@dataclass
class PracticeGraph:
    practice: str
    group_of: dict[str, str]  # roster restricted to this graph's universe
    arcs: dict[tuple[str, str], int] = field(default_factory=dict)

    def nodes(self) -> set[str]:
        """Roster members active in the practice as source or target."""
        active = set()
        for src, tgt in self.arcs:
            active.add(src)
            active.add(tgt)
        return active

    def out_weight(self, node: str) -> int:
        return sum(w for (s, _), w in self.arcs.items() if s == node)

    def total_weight(self) -> int:
        return sum(self.arcs.values())


def build_graph(
    transactions: Iterable[Transaction], practice: str, roster: dict[str, str]
) -> PracticeGraph:
    """Fold user-reference transactions of one practice into a weighted graph."""
    if practice not in NETWORK_PRACTICES:
        raise ValueError(f"no user graph for practice {practice!r}")
    graph = PracticeGraph(practice, dict(roster))
    for t in transactions:
        if t.practice != practice:
            continue
        src = t.author
        for fact in t.facts:
            if fact.kind not in USER_KINDS:
                continue
            tgt = fact.key
            if tgt == src or tgt not in roster:
                continue
            graph.arcs[(src, tgt)] = graph.arcs.get((src, tgt), 0) + 1
    return graph


def build_follow_graph(
    edges: Iterable[tuple[str, str]], roster: dict[str, str]
) -> tuple[PracticeGraph, int]:
    """Unweighted following graph from an edge list; returns (graph, skipped).

    Edges with unknown endpoints or self-loops are skipped; repeats collapse
    to weight 1.
    """
    graph = PracticeGraph("following", dict(roster))
    skipped = 0
    for src, tgt in edges:
        if src == tgt or src not in roster or tgt not in roster:
            skipped += 1
            continue
        graph.arcs[(src, tgt)] = 1
    return graph, skipped


def load_follow_edges(lines: Iterable[str]) -> list[tuple[str, str]]:
    """Parse a follow edge CSV with header ``source,target``."""
    from .corpus import normalize_handle
    from .errors import DataError

    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty follow edge list")
    if [h.strip().lower() for h in header[:2]] != ["source", "target"]:
        raise DataError(f"follow edges must start with header 'source,target', got {header!r}")
    edges = []
    for row in reader:
        if not row or not "".join(row).strip():
            continue
        try:
            edges.append((normalize_handle(row[0]), normalize_handle(row[1])))
        except (ValueError, IndexError):
            continue
    return edges


def density(graph: PracticeGraph, scope: set[str]) -> Optional[float]:
    """Distinct-arc density of the scope-induced subgraph; None below 2 nodes."""
    n = len(scope)
    if n < 2:
        return None
    inside = sum(1 for (s, t) in graph.arcs if s in scope and t in scope)
    return inside / (n * (n - 1))


def degree_weight_stats(
    graph: PracticeGraph, scope: set[str]
) -> Optional[tuple[float, float, float, float]]:
    """(k_out, k_in, w_out, w_in) averaged over scope members.

    Degrees and weights count arcs to or from any node in the graph, not
    only arcs staying inside the scope.
    """
    if not scope:
        return None
    k_out = {n: 0 for n in scope}
    k_in = {n: 0 for n in scope}
    w_out = {n: 0 for n in scope}
    w_in = {n: 0 for n in scope}
    for (src, tgt), weight in graph.arcs.items():
        if src in k_out:
            k_out[src] += 1
            w_out[src] += weight
        if tgt in k_in:
            k_in[tgt] += 1
            w_in[tgt] += weight
    n = len(scope)
    return (
        sum(k_out.values()) / n,
        sum(k_in.values()) / n,
        sum(w_out.values()) / n,
        sum(w_in.values()) / n,
    )


def homophily_by_node(graph: PracticeGraph) -> dict[str, float]:
    """Per sender: share of out-going weight directed to same-group targets.

    Nodes without out-arcs are absent (they carry no homophily signal).
    """
    same: dict[str, int] = {}
    total: dict[str, int] = {}
    for (src, tgt), weight in graph.arcs.items():
        total[src] = total.get(src, 0) + weight
        if graph.group_of.get(src) == graph.group_of.get(tgt):
            same[src] = same.get(src, 0) + weight
    return {node: same.get(node, 0) / tot for node, tot in total.items()}


def homophily(graph: PracticeGraph) -> dict[str, Optional[float]]:
    """Mean individual homophily per group plus the TOTAL scope.

    Groups with no active senders map to None.
    """
    per_node = homophily_by_node(graph)
    groups = sorted(set(graph.group_of.values()))
    out: dict[str, Optional[float]] = {}
    for group in groups:
        values = [h for node, h in per_node.items() if graph.group_of.get(node) == group]
        out[group] = sum(values) / len(values) if values else None
    out[TOTAL] = sum(per_node.values()) / len(per_node) if per_node else None
    return out


@dataclass
class GroupNetworkStats:
    group: str
    nodes: int
    density: Optional[float]
    k_out: Optional[float]
    k_in: Optional[float]
    w_out: Optional[float]
    w_in: Optional[float]
    homophily: Optional[float]


def group_stats(graph: PracticeGraph) -> list[GroupNetworkStats]:
    """Stats rows for every group (sorted) followed by the TOTAL scope."""
    nodes = graph.nodes()
    by_group: dict[str, set[str]] = {}
    for node in nodes:
        by_group.setdefault(graph.group_of[node], set()).add(node)
    hom = homophily(graph)
    rows = []
    for group in sorted(set(graph.group_of.values())):
        scope = by_group.get(group, set())
        dw = degree_weight_stats(graph, scope)
        rows.append(
            GroupNetworkStats(
                group,
                len(scope),
                density(graph, scope),
                dw[0] if dw else None,
                dw[1] if dw else None,
                dw[2] if dw else None,
                dw[3] if dw else None,
                hom.get(group),
            )
        )
    dw = degree_weight_stats(graph, nodes)
    rows.append(
        GroupNetworkStats(
            TOTAL,
            len(nodes),
            density(graph, nodes),
            dw[0] if dw else None,
            dw[1] if dw else None,
            dw[2] if dw else None,
            dw[3] if dw else None,
            hom.get(TOTAL),
        )
    )
    return rows


def write_stats_csv(stats: list[GroupNetworkStats], practice: str, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["practice", "group", "nodes", "density", "k_out", "k_in", "w_out", "w_in", "homophily"]
        )
        for s in stats:
            writer.writerow(
                [practice, s.group, s.nodes]
                + [_fmt(v) for v in (s.density, s.k_out, s.k_in, s.w_out, s.w_in, s.homophily)]
            )


def write_edges_csv(graph: PracticeGraph, path) -> None:
    """Export arcs as ``source,target,weight,source_group,target_group``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "weight", "source_group", "target_group"])
        for (src, tgt) in sorted(graph.arcs):
            writer.writerow(
                [src, tgt, graph.arcs[(src, tgt)], graph.group_of[src], graph.group_of[tgt]]
            )


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else format(value, ".10g")
