"""Discussion graph: lifting, neighborhoods, citation counting."""

import random
from datetime import datetime, timezone

import pytest

from glsb.corpus import assemble
from glsb.linkgraph import (
    COUNT_PER_SOURCE,
    KIND_LINKED,
    KIND_RELATED,
    build_graph,
    citation_count,
    in_neighbors,
    out_neighbors,
    top_cited,
    write_edge_list,
)
from glsb.records import (
    LINK_DUPLICATE,
    LINK_LINKED,
    ORIGIN_API,
    PostLinkRecord,
    RelatedEdgeRecord,
)
from tests.conftest import make_answer, make_question

T0 = datetime(2024, 4, 6, tzinfo=timezone.utc)


def postlink(link_id, source, target, kind=LINK_LINKED):
    return PostLinkRecord(
        id=link_id, source_post_id=source, target_post_id=target,
        link_kind=kind, created_at=T0,
    )


def related(source, target, rank=1):
    return RelatedEdgeRecord(
        source_question_id=source, target_question_id=target,
        rank=rank, origin=ORIGIN_API,
    )


def simple_corpus(question_ids, answers=()):
    """answers: (answer_id, question_id) pairs."""
    posts = [make_question(qid) for qid in question_ids]
    posts += [make_answer(qid, aid=aid) for aid, qid in answers]
    return assemble(posts, []).discussions


class TestBuildGraph:
    def test_answer_link_lifts_to_question(self):
        discussions = simple_corpus([1, 2], answers=[(10, 1)])
        graph = build_graph([postlink(1, 10, 2)], [], discussions)
        assert graph.edges == {(1, 2, KIND_LINKED): 1}

    def test_duplicate_kind_dropped_and_counted(self):
        discussions = simple_corpus([1, 2])
        graph = build_graph(
            [postlink(1, 1, 2, LINK_DUPLICATE), postlink(2, 1, 2)], [], discussions
        )
        assert graph.dropped_duplicate_links == 1
        assert graph.edges == {(1, 2, KIND_LINKED): 1}

    def test_self_edge_after_lifting_dropped(self):
        discussions = simple_corpus([1], answers=[(10, 1)])
        graph = build_graph([postlink(1, 10, 1)], [], discussions)
        assert graph.dropped_self_edges == 1
        assert graph.edges == {}

    def test_external_endpoint_kept_and_flagged(self):
        discussions = simple_corpus([1])
        graph = build_graph([postlink(1, 1, 999)], [], discussions)
        assert graph.edges == {(1, 999, KIND_LINKED): 1}
        assert graph.is_external(999)
        assert not graph.is_external(1)

    def test_multiplicity_collapses_parallel_links(self):
        discussions = simple_corpus([1, 2], answers=[(10, 1), (11, 1)])
        links = [postlink(1, 10, 2), postlink(2, 11, 2), postlink(3, 1, 2)]
        graph = build_graph(links, [], discussions)
        assert graph.edges == {(1, 2, KIND_LINKED): 3}

    def test_parallel_edges_of_different_kinds_preserved(self):
        discussions = simple_corpus([1, 2])
        graph = build_graph([postlink(1, 1, 2)], [related(1, 2)], discussions)
        assert graph.edges == {(1, 2, KIND_LINKED): 1, (1, 2, KIND_RELATED): 1}

    def test_hand_verified_fixture(self):
        # 6 post links + 4 related edges over 5 questions; adjacency by hand
        discussions = simple_corpus([1, 2, 3, 4, 5], answers=[(10, 1), (20, 2)])
        links = [
            postlink(1, 1, 2),
            postlink(2, 10, 3),   # lifts to 1 -> 3
            postlink(3, 20, 1),   # lifts to 2 -> 1
            postlink(4, 4, 5),
            postlink(5, 4, 5),    # multiplicity 2
            postlink(6, 3, 3, LINK_DUPLICATE),  # dropped
        ]
        rel = [related(1, 4), related(4, 1, 2), related(5, 2), related(2, 5, 2)]
        graph = build_graph(links, rel, discussions)
        assert graph.edges == {
            (1, 2, KIND_LINKED): 1,
            (1, 3, KIND_LINKED): 1,
            (2, 1, KIND_LINKED): 1,
            (4, 5, KIND_LINKED): 2,
            (1, 4, KIND_RELATED): 1,
            (4, 1, KIND_RELATED): 1,
            (5, 2, KIND_RELATED): 1,
            (2, 5, KIND_RELATED): 1,
        }
        assert graph.dropped_duplicate_links == 1


class TestNeighbors:
    def graph(self):
        discussions = simple_corpus([1, 2, 3, 4])
        return build_graph(
            [postlink(1, 1, 2), postlink(2, 1, 3), postlink(3, 4, 1)],
            [related(2, 4)],
            discussions,
        )

    def test_empty_ids(self):
        assert out_neighbors(self.graph(), set(), KIND_LINKED) == set()
        assert in_neighbors(self.graph(), set(), KIND_LINKED) == set()

    def test_out_neighbors(self):
        assert out_neighbors(self.graph(), {1}, KIND_LINKED) == {2, 3}

    def test_in_neighbors(self):
        assert in_neighbors(self.graph(), {1}, KIND_LINKED) == {4}

    def test_members_excluded_from_result(self):
        assert out_neighbors(self.graph(), {1, 2}, KIND_LINKED) == {3}

    def test_against_edge_scan(self):
        graph = self.graph()
        for ids in ({1}, {2}, {1, 4}, {2, 3, 4}):
            for kind in (KIND_LINKED, KIND_RELATED):
                scan_out = {
                    t for (s, t, k) in graph.edges if k == kind and s in ids
                } - ids
                scan_in = {
                    s for (s, t, k) in graph.edges if k == kind and t in ids
                } - ids
                assert out_neighbors(graph, ids, kind) == scan_out
                assert in_neighbors(graph, ids, kind) == scan_in


class TestCitations:
    def test_worked_example(self, citation_example_ids):
        ids = citation_example_ids
        discussions = simple_corpus(
            [ids["target"], *ids["linked_sources"], ids["related_source"]]
        )
        links = [
            postlink(i + 1, src, ids["target"])
            for i, src in enumerate(ids["linked_sources"])
        ]
        graph = build_graph(
            links, [related(ids["related_source"], ids["target"])], discussions
        )
        counts = citation_count(graph, ids["target"])
        assert (counts.linked_in, counts.related_in, counts.total) == (2, 1, 3)

    def test_isolated_node(self):
        graph = build_graph([], [], simple_corpus([1]))
        counts = citation_count(graph, 1)
        assert (counts.linked_in, counts.related_in, counts.total) == (0, 0, 0)

    def test_unknown_id_raises(self):
        graph = build_graph([], [], simple_corpus([1]))
        with pytest.raises(KeyError):
            citation_count(graph, 42)

    def test_fan_in_five_matches_edge_scan(self):
        discussions = simple_corpus([1, 2, 3, 4, 5, 6])
        links = [postlink(i, src, 1) for i, src in enumerate((2, 3, 4), 1)]
        rel = [related(5, 1), related(6, 1)]
        graph = build_graph(links, rel, discussions)
        counts = citation_count(graph, 1)
        scan_linked = sum(
            m for (s, t, k), m in graph.edges.items()
            if t == 1 and k == KIND_LINKED
        )
        scan_related = sum(
            m for (s, t, k), m in graph.edges.items()
            if t == 1 and k == KIND_RELATED
        )
        assert counts.linked_in == scan_linked == 3
        assert counts.related_in == scan_related == 2
        assert counts.total == 5

    def test_per_source_mode(self):
        # two links from the same discussion: 2 per-link, 1 per-source
        discussions = simple_corpus([1, 2], answers=[(10, 2), (11, 2)])
        graph = build_graph(
            [postlink(1, 10, 1), postlink(2, 11, 1)], [], discussions
        )
        assert citation_count(graph, 1).linked_in == 2
        assert citation_count(graph, 1, COUNT_PER_SOURCE).linked_in == 1


class TestTopCited:
    def two_tie_shape_graph(self):
        """Fan-in shape with two total-count ties: related 6,6,4,3 and one
        2-linked + 1-related node."""
        targets = {8286: 6, 11144: 6, 718: 4, 15505: 3}
        qids = list(targets) + [16372]
        sources = list(range(100, 140))
        discussions = simple_corpus(qids + sources)
        rel = []
        src = iter(sources)
        for target, n in targets.items():
            for _ in range(n):
                rel.append(related(next(src), target))
        rel.append(related(next(src), 16372))
        links = [postlink(1, 130, 16372), postlink(2, 131, 16372)]
        return build_graph(links, rel, discussions), qids

    def test_two_tie_shape_ordering(self):
        graph, qids = self.two_tie_shape_graph()
        ranking = top_cited(graph, qids, 5)
        assert [qid for qid, _c in ranking] == [8286, 11144, 718, 15505, 16372]
        counts = dict(ranking)
        assert counts[16372].linked_in == 2 and counts[16372].related_in == 1
        # ties at 6 and at 3 resolved by ascending id
        assert counts[8286].total == counts[11144].total == 6
        assert counts[15505].total == counts[16372].total == 3

    def test_n_larger_than_ids(self):
        graph, qids = self.two_tie_shape_graph()
        assert len(top_cited(graph, qids, 50)) == len(qids)

    def test_restricted_to_ids(self):
        graph, qids = self.two_tie_shape_graph()
        ranking = top_cited(graph, [718, 15505], 5)
        assert [qid for qid, _c in ranking] == [718, 15505]


class TestProperties:
    def random_graph(self, rng):
        n = rng.randint(2, 12)
        qids = list(range(1, n + 1))
        discussions = simple_corpus(qids)
        links = []
        rel = []
        rank: dict[int, int] = {}
        for i in range(rng.randint(0, 25)):
            s, t = rng.sample(qids, 2)
            if rng.random() < 0.5:
                links.append(postlink(i + 1, s, t))
            else:
                rank[s] = rank.get(s, 0) + 1
                rel.append(
                    RelatedEdgeRecord(
                        source_question_id=s, target_question_id=t,
                        rank=rank[s], origin=ORIGIN_API,
                    )
                )
        return build_graph(links, rel, discussions), qids, len(links), len(rel)

    def test_duality_and_conservation(self):
        rng = random.Random(2024)
        for _ in range(200):
            graph, qids, n_linked, n_related = self.random_graph(rng)
            for x in qids:
                for kind in (KIND_LINKED, KIND_RELATED):
                    for y in out_neighbors(graph, {x}, kind):
                        assert x in in_neighbors(graph, {y}, kind)
                    for y in in_neighbors(graph, {x}, kind):
                        assert x in out_neighbors(graph, {y}, kind)
            total_linked = sum(
                citation_count(graph, q).linked_in for q in qids
            )
            total_related = sum(
                citation_count(graph, q).related_in for q in qids
            )
            assert total_linked == n_linked == graph.edge_count(KIND_LINKED)
            assert total_related == n_related == graph.edge_count(KIND_RELATED)

    def test_build_deterministic_and_idempotent(self):
        rng = random.Random(5)
        graph1, qids, _, _ = self.random_graph(rng)
        rng = random.Random(5)
        graph2, _, _, _ = self.random_graph(rng)
        assert graph1.edges == graph2.edges
        assert graph1.external_ids == graph2.external_ids


def test_edge_list_export(tmp_path):
    discussions = simple_corpus([1, 2])
    graph = build_graph([postlink(1, 1, 2)], [related(2, 1)], discussions)
    out = tmp_path / "edges.tsv"
    with open(out, "w") as fh:
        n = write_edge_list(graph, fh)
    assert n == 2
    assert out.read_text() == "1\t2\tlinked\t1\n2\t1\trelated\t1\n"
