"""Directed multigraph over discussions with linked/related edge kinds.

Post-level link records are lifted to question level (an answer's link
attributes to its parent question). Duplicate-kind links point to already-
covered material and are dropped, as are self-edges left after lifting.
Several post-level links between the same two discussions collapse to one
edge per kind carrying a multiplicity; citation counting defaults to the
per-link-occurrence convention (sums multiplicities) with a per-source mode
available.

Endpoints that do not resolve to a corpus discussion are kept and flagged
external (dumps reference deleted posts; such links persist). Externals
stay out of snowball frontiers but remain auditable here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Discussion
from .records import LINK_DUPLICATE, LINK_LINKED, PostLinkRecord, RelatedEdgeRecord

KIND_LINKED = "linked"
KIND_RELATED = "related"
KINDS = (KIND_LINKED, KIND_RELATED)

COUNT_PER_LINK = "per_link"
COUNT_PER_SOURCE = "per_source"


@dataclass(frozen=True)
class CitationCounts:
    linked_in: int
    related_in: int

    @property
    def total(self) -> int:
        return self.linked_in + self.related_in

    def to_json(self) -> dict:
        return {
            "linked_in": self.linked_in,
            "related_in": self.related_in,
            "total": self.total,
        }


@dataclass
class DiscussionGraph:
    nodes: set = field(default_factory=set)
    corpus_ids: set = field(default_factory=set)
    external_ids: set = field(default_factory=set)
    # (source, target, kind) -> multiplicity
    edges: dict = field(default_factory=dict)
    out_adj: dict = field(default_factory=dict)  # node -> kind -> {target: mult}
    in_adj: dict = field(default_factory=dict)  # node -> kind -> {source: mult}
    dropped_duplicate_links: int = 0
    dropped_self_edges: int = 0

    def add_edge(self, source: int, target: int, kind: str, mult: int = 1) -> None:
        key = (source, target, kind)
        self.edges[key] = self.edges.get(key, 0) + mult
        for node in (source, target):
            self.nodes.add(node)
            self.out_adj.setdefault(node, {k: {} for k in KINDS})
            self.in_adj.setdefault(node, {k: {} for k in KINDS})
        out_m = self.out_adj[source][kind]
        out_m[target] = out_m.get(target, 0) + mult
        in_m = self.in_adj[target][kind]
        in_m[source] = in_m.get(source, 0) + mult

    def edge_count(self, kind: str) -> int:
        """Total multiplicity of edges of one kind."""
        return sum(m for (_s, _t, k), m in self.edges.items() if k == kind)

    def is_external(self, node: int) -> bool:
        return node in self.external_ids


def build_graph(
    postlinks: Iterable[PostLinkRecord],
    related_edges: Iterable[RelatedEdgeRecord],
    discussions: Iterable[Discussion],
) -> DiscussionGraph:
    """Lift post links to question level and merge in related edges.

    Unresolvable post ids are treated as external endpoint ids as-is (their
    parent question cannot be known without the post).
    """
    graph = DiscussionGraph()
    post_to_question: dict[int, int] = {}
    for d in discussions:
        graph.corpus_ids.add(d.id)
        graph.nodes.add(d.id)
        graph.out_adj.setdefault(d.id, {k: {} for k in KINDS})
        graph.in_adj.setdefault(d.id, {k: {} for k in KINDS})
        post_to_question[d.id] = d.id
        for a in d.answers:
            post_to_question[a.id] = d.id

    def lift(post_id: int) -> int:
        if post_id in post_to_question:
            return post_to_question[post_id]
        graph.external_ids.add(post_id)
        return post_id

    for link in postlinks:
        if link.link_kind == LINK_DUPLICATE:
            graph.dropped_duplicate_links += 1
            continue
        if link.link_kind != LINK_LINKED:
            continue
        source = lift(link.source_post_id)
        target = lift(link.target_post_id)
        if source == target:
            graph.dropped_self_edges += 1
            continue
        graph.add_edge(source, target, KIND_LINKED)

    for edge in related_edges:
        source = lift(edge.source_question_id)
        target = lift(edge.target_question_id)
        if source == target:
            graph.dropped_self_edges += 1
            continue
        graph.add_edge(source, target, KIND_RELATED)

    return graph


def out_neighbors(graph: DiscussionGraph, ids: Iterable[int], kind: str) -> set:
    """Targets of kind-edges whose source is in ids, minus ids themselves."""
    ids = set(ids)
    result: set = set()
    for node in ids:
        adj = graph.out_adj.get(node)
        if adj:
            result.update(adj[kind])
    return result - ids


def in_neighbors(graph: DiscussionGraph, ids: Iterable[int], kind: str) -> set:
    """Sources of kind-edges whose target is in ids, minus ids themselves."""
    ids = set(ids)
    result: set = set()
    for node in ids:
        adj = graph.in_adj.get(node)
        if adj:
            result.update(adj[kind])
    return result - ids


def citation_count(
    graph: DiscussionGraph, node: int, mode: str = COUNT_PER_LINK
) -> CitationCounts:
    """Incoming citations by kind.

    per_link sums edge multiplicities (several links from one discussion all
    count); per_source counts distinct citing discussions.
    """
    if node not in graph.nodes:
        raise KeyError(f"unknown graph node: {node}")
    in_adj = graph.in_adj[node]
    if mode == COUNT_PER_LINK:
        linked = sum(in_adj[KIND_LINKED].values())
        related = sum(in_adj[KIND_RELATED].values())
    elif mode == COUNT_PER_SOURCE:
        linked = len(in_adj[KIND_LINKED])
        related = len(in_adj[KIND_RELATED])
    else:
        raise ValueError(f"unknown citation count mode: {mode}")
    return CitationCounts(linked_in=linked, related_in=related)


def top_cited(
    graph: DiscussionGraph,
    ids: Iterable[int],
    n: int,
    mode: str = COUNT_PER_LINK,
) -> list[tuple[int, CitationCounts]]:
    """The n most-cited of the given ids, total descending, ties by id."""
    rows = []
    for node in set(ids):
        if node in graph.nodes:
            counts = citation_count(graph, node, mode)
        else:
            counts = CitationCounts(0, 0)
        rows.append((node, counts))
    rows.sort(key=lambda row: (-row[1].total, row[0]))
    return rows[:n]


def write_edge_list(graph: DiscussionGraph, fh) -> int:
    """Export edges one per line: source target kind multiplicity."""
    n = 0
    for (source, target, kind) in sorted(graph.edges):
        fh.write(f"{source}\t{target}\t{kind}\t{graph.edges[(source, target, kind)]}\n")
        n += 1
    return n
