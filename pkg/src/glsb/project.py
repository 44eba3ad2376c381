"""On-disk project state shared by the CLI and the HTTP service.

A project is a plain directory (easy to archive as a replication package):

    project.json        identity, configs, iteration index
    corpus/             corpus store (records + manifest)
    labels.jsonl        append-only label audit log
    iterations/N.jsonl  candidate lists per iteration
    tokens.json         request-token ledger for idempotent mutations

Configuration is captured into each iteration record when the iteration
starts and never changes afterwards, so reports are reproducible from the
directory alone. Reports generated by any path over the same directory are
byte-identical: the report timestamp is derived from project state (the
newest label's timestamp), not from the wall clock.
"""

from __future__ import annotations

import json
import shutil
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import corpus as corpus_mod
from . import linkgraph, metrics, review, search, similarity, snowball
from .ingest import read_store
from .records import ORIGIN_API, ORIGIN_LOCAL

PROJECT_FILE = "project.json"
CORPUS_DIR = "corpus"
LABELS_FILE = "labels.jsonl"
ITERATIONS_DIR = "iterations"
TOKENS_FILE = "tokens.json"

ITER_KIND_SEARCH = "search"
ITER_KIND_SNOWBALL = "snowball"

_project_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


class ProjectError(Exception):
    pass


def _lock_for(path: Path) -> threading.Lock:
    key = str(Path(path).resolve())
    with _locks_guard:
        return _project_locks.setdefault(key, threading.Lock())


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class ProjectConfig:
    search_spec: search.SearchSpec
    similarity_config: similarity.SimilarityConfig
    frontier: snowball.FrontierFilter | None  # None -> floor of start-set averages
    schema: review.LabelSchema
    related_origin: str = ORIGIN_API  # which related edges feed the graph
    citation_mode: str = linkgraph.COUNT_PER_LINK
    top_cited_n: int = 5

    def to_json(self) -> dict:
        return {
            "search_spec": self.search_spec.to_json(),
            "similarity_config": self.similarity_config.to_json(),
            "frontier": None if self.frontier is None else self.frontier.to_json(),
            "schema": self.schema.to_json(),
            "related_origin": self.related_origin,
            "citation_mode": self.citation_mode,
            "top_cited_n": self.top_cited_n,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ProjectConfig":
        frontier = d.get("frontier")
        return cls(
            search_spec=search.SearchSpec.from_json(d["search_spec"]),
            similarity_config=similarity.SimilarityConfig.from_json(
                d["similarity_config"]
            ),
            frontier=None if frontier is None else snowball.FrontierFilter.from_json(frontier),
            schema=review.LabelSchema.from_json(d["schema"]),
            related_origin=d.get("related_origin", ORIGIN_API),
            citation_mode=d.get("citation_mode", linkgraph.COUNT_PER_LINK),
            top_cited_n=d.get("top_cited_n", 5),
        )


def default_config(terms: tuple[str, ...] = ("debt", "shortcut")) -> ProjectConfig:
    return ProjectConfig(
        search_spec=search.SearchSpec(terms=terms),
        similarity_config=similarity.SimilarityConfig(),
        frontier=None,
        schema=review.LabelSchema(),
    )


class Project:
    """One review project rooted at a directory."""

    def __init__(self, root: Path) -> None:
        self.root = Path(root)
        self._state = json.loads((self.root / PROJECT_FILE).read_text("utf-8"))
        self.config = ProjectConfig.from_json(self._state["config"])
        self._corpus_cache = None
        self._graph_cache = None
        self._store_cache: review.ReviewStore | None = None
        self.lock = _lock_for(self.root)

    # -- creation ----------------------------------------------------------

    @classmethod
    def create(
        cls,
        root: Path,
        corpus_source: Path,
        config: ProjectConfig | None = None,
        project_id: str | None = None,
    ) -> "Project":
        root = Path(root)
        corpus_source = Path(corpus_source)
        if not (corpus_source / "manifest.json").is_file():
            raise ProjectError(f"missing corpus store at {corpus_source}")
        if (root / PROJECT_FILE).exists():
            raise ProjectError(f"project already exists at {root}")
        root.mkdir(parents=True, exist_ok=True)
        shutil.copytree(corpus_source, root / CORPUS_DIR, dirs_exist_ok=True)
        (root / ITERATIONS_DIR).mkdir(exist_ok=True)
        state = {
            "id": project_id or root.name,
            "created_at": _now_iso(),
            "config": (config or default_config()).to_json(),
            "iterations": [],
        }
        (root / PROJECT_FILE).write_text(
            json.dumps(state, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        return cls(root)

    @property
    def id(self) -> str:
        return self._state["id"]

    @property
    def iterations(self) -> list[dict]:
        return self._state["iterations"]

    def _save_state(self) -> None:
        (self.root / PROJECT_FILE).write_text(
            json.dumps(self._state, indent=2, sort_keys=True) + "\n", "utf-8"
        )

    # -- token ledger (idempotent mutations) --------------------------------

    def _tokens(self) -> dict:
        path = self.root / TOKENS_FILE
        if path.exists():
            return json.loads(path.read_text("utf-8"))
        return {}

    def _remember_token(self, token: str, outcome: dict) -> None:
        tokens = self._tokens()
        tokens[token] = outcome
        (self.root / TOKENS_FILE).write_text(
            json.dumps(tokens, indent=2, sort_keys=True) + "\n", "utf-8"
        )

    def _replay_token(self, token: str | None) -> dict | None:
        if token is None:
            return None
        return self._tokens().get(token)

    # -- corpus and graph ---------------------------------------------------

    def corpus(self) -> dict[int, corpus_mod.Discussion]:
        if self._corpus_cache is None:
            store = read_store(self.root / CORPUS_DIR)
            assembled = corpus_mod.assemble(store.posts, store.comments)
            self._corpus_cache = assembled.by_id()
            self._raw_store = store
        return self._corpus_cache

    def graph(self) -> linkgraph.DiscussionGraph:
        if self._graph_cache is None:
            discussions = list(self.corpus().values())
            store = self._raw_store
            if self.config.related_origin == ORIGIN_LOCAL:
                index = similarity.build_index(discussions, self.config.similarity_config)
                related = similarity.generate_related_edges(index)
            else:
                related = [
                    e for e in store.related_edges if e.origin == ORIGIN_API
                ]
            self._graph_cache = linkgraph.build_graph(
                store.postlinks, related, discussions
            )
        return self._graph_cache

    def review_store(self) -> review.ReviewStore:
        if self._store_cache is None:
            self._store_cache = review.ReviewStore(
                self.root / LABELS_FILE, allowed_ids=self._screenable_ids()
            )
        return self._store_cache

    def _screenable_ids(self) -> set:
        """Ids labels may target: the active iteration's screened candidates.

        Earlier iterations are frozen once the next one starts (they were
        fully resolved at that point, and the derived start set must not
        drift under late labels).
        """
        current = self.active_iteration()
        if current is None:
            return set()
        return self._iteration_screened_ids(current["index"])

    # -- iterations ----------------------------------------------------------

    def _iteration_path(self, index: int) -> Path:
        return self.root / ITERATIONS_DIR / f"{index}.jsonl"

    def _iteration_record(self, index: int) -> dict:
        for record in self.iterations:
            if record["index"] == index:
                return record
        raise ProjectError(f"no iteration {index}")

    def active_iteration(self) -> dict | None:
        return self.iterations[-1] if self.iterations else None

    def _iteration_screened_ids(self, index: int) -> set:
        """Candidates actually put in front of reviewers for one iteration."""
        record = self._iteration_record(index)
        ids = set()
        with open(self._iteration_path(index), encoding="utf-8") as fh:
            for line in fh:
                row = json.loads(line)
                if record["kind"] == ITER_KIND_SEARCH or row.get("passed_filters"):
                    ids.add(row.get("discussion_id"))
        return ids

    def iteration_candidates(self, index: int) -> list[snowball.Candidate]:
        record = self._iteration_record(index)
        if record["kind"] != ITER_KIND_SNOWBALL:
            raise ProjectError(f"iteration {index} is not a snowball iteration")
        out = []
        with open(self._iteration_path(index), encoding="utf-8") as fh:
            for line in fh:
                out.append(snowball.Candidate.from_json(json.loads(line)))
        return out

    def run_startset(self, token: str | None = None) -> dict:
        """Iteration 0: string search, then the structural filters.

        Matched-but-filtered discussions are recorded in the iteration
        record's diagnostics counts; screened candidates land in 0.jsonl.
        """
        replay = self._replay_token(token)
        if replay is not None:
            return replay
        if self.iterations:
            raise ProjectError("start set already exists")
        discussions = self.corpus()
        matches = search.match(self.config.search_spec, list(discussions.values()))
        screened = []
        dropped_incomplete = 0
        dropped_untrustworthy = 0
        for qid, hits in matches:
            d = discussions[qid]
            if not d.complete:
                dropped_incomplete += 1
                continue
            if not d.trustworthy:
                dropped_untrustworthy += 1
                continue
            screened.append((qid, hits))
        with open(self._iteration_path(0), "w", encoding="utf-8") as fh:
            for qid, hits in screened:
                fh.write(
                    json.dumps(
                        {
                            "discussion_id": qid,
                            "hits": [h.to_json() for h in hits],
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        record = {
            "index": 0,
            "kind": ITER_KIND_SEARCH,
            "created_at": _now_iso(),
            "matched": len(matches),
            "screened": len(screened),
            "dropped_incomplete": dropped_incomplete,
            "dropped_untrustworthy": dropped_untrustworthy,
        }
        self._state["iterations"].append(record)
        self._save_state()
        self._store_cache = None  # allowed ids changed
        outcome = {"iteration": record}
        if token:
            self._remember_token(token, outcome)
        return outcome

    def unresolved_ids(self, index: int) -> list[int]:
        store = self.review_store()
        out = []
        for cid in sorted(self._iteration_screened_ids(index)):
            state = review.consensus_for(cid, store.labels_for(cid))
            if not state.is_final():
                out.append(cid)
        return out

    def start_set_for_next(self) -> snowball.StartSet:
        """Valid discussions accumulated over all finished iterations."""
        store = self.review_store()
        ids: set = set()
        for record in self.iterations:
            ids |= review.valid_set(
                self._iteration_screened_ids(record["index"]), store
            )
        return snowball.StartSet(
            project_id=self.id, ids=frozenset(ids), iteration=len(self.iterations)
        )

    def run_snowball_iteration(self, token: str | None = None) -> dict:
        replay = self._replay_token(token)
        if replay is not None:
            return replay
        if not self.iterations:
            raise ProjectError("run the start set first")
        current = self.active_iteration()
        unresolved = self.unresolved_ids(current["index"])
        if unresolved:
            raise ProjectError(
                f"unresolved labels block the next iteration: "
                f"{len(unresolved)} discussions pending (first: {unresolved[:5]})"
            )
        start = self.start_set_for_next()
        if not start.ids:
            raise ProjectError("no valid discussions to snowball from")
        discussions = self.corpus()
        frontier = self.config.frontier
        if frontier is None:
            frontier = snowball.default_filter_from_start(start, discussions)
        examined: set = set()
        for record in self.iterations:
            examined |= self._iteration_screened_ids(record["index"])
        candidates = snowball.run_iteration(
            start, self.graph(), discussions, frontier, examined
        )
        index = len(self.iterations)
        with open(self._iteration_path(index), "w", encoding="utf-8") as fh:
            for c in candidates:
                fh.write(json.dumps(c.to_json(), sort_keys=True) + "\n")
        record = {
            "index": index,
            "kind": ITER_KIND_SNOWBALL,
            "created_at": _now_iso(),
            "start_size": len(start.ids),
            "frontier": frontier.to_json(),
            "candidates": len(candidates),
            "passed": sum(1 for c in candidates if c.passed_filters),
        }
        self._state["iterations"].append(record)
        self._save_state()
        self._store_cache = None
        outcome = {"iteration": record}
        if token:
            self._remember_token(token, outcome)
        return outcome

    # -- review --------------------------------------------------------------

    def submit_label(self, label: review.Label) -> review.ConsensusState:
        return review.submit_label(label, self.config.schema, self.review_store())

    def queue(self, reviewer_id: str) -> list[int]:
        current = self.active_iteration()
        if current is None:
            return []
        ids = self._iteration_screened_ids(current["index"])
        return review.screening_queue(ids, self.review_store(), reviewer_id)

    # -- threads (for rendering) ----------------------------------------------

    def thread(self, discussion_id: int) -> dict:
        discussions = self.corpus()
        if discussion_id not in discussions:
            raise KeyError(f"unknown discussion: {discussion_id}")
        d = discussions[discussion_id]
        hits = search.match(self.config.search_spec, [d])
        hit_list = [h.to_json() for h in hits[0][1]] if hits else []
        graph = self.graph()
        links = {"incoming": [], "outgoing": []}
        if discussion_id in graph.nodes:
            for kind in linkgraph.KINDS:
                for src, mult in sorted(graph.in_adj[discussion_id][kind].items()):
                    links["incoming"].append(
                        {"peer": src, "kind": kind, "multiplicity": mult}
                    )
                for tgt, mult in sorted(graph.out_adj[discussion_id][kind].items()):
                    links["outgoing"].append(
                        {"peer": tgt, "kind": kind, "multiplicity": mult}
                    )
        store = self.review_store()
        state = review.consensus_for(discussion_id, store.labels_for(discussion_id))
        return {
            "question": d.question.to_json(),
            "answers": [a.to_json() for a in d.answers],
            "comments": {
                str(pid): [c.to_json() for c in clist]
                for pid, clist in sorted(d.comments.items())
            },
            "discussion_score": d.discussion_score,
            "answer_count": d.answer_count,
            "search_terms": list(self.config.search_spec.terms),
            "term_hits": hit_list,
            "links": links,
            "consensus": state.to_json(),
            "labels": [l.to_json() for l in store.labels_for(discussion_id)],
        }

    # -- report ----------------------------------------------------------------

    def _generated_at(self) -> str:
        store = self.review_store()
        stamps = [l.created_at for l in store.labels if l.created_at]
        return max(stamps) if stamps else self._state["created_at"]

    def build_report(self) -> metrics.MetricsReport:
        store = self.review_store()
        search_stats = None
        candidates: list[snowball.Candidate] = []
        top = []
        for record in self.iterations:
            if record["kind"] == ITER_KIND_SEARCH:
                ids = self._iteration_screened_ids(record["index"])
                search_stats = metrics.SourceStats(
                    candidates=len(ids), valid=len(review.valid_set(ids, store))
                )
            else:
                candidates = self.iteration_candidates(record["index"])
        valid_ids: set = set()
        if candidates:
            passed_ids = {c.discussion_id for c in candidates if c.passed_filters}
            valid_ids = review.valid_set(passed_ids, store)
            top = linkgraph.top_cited(
                self.graph(),
                passed_ids,
                self.config.top_cited_n,
                self.config.citation_mode,
            )
        return metrics.build_report(
            search_stats, candidates, valid_ids, top, self._generated_at()
        )

    def report_bytes(self, fmt: str = metrics.FORMAT_STRUCTURED) -> bytes:
        return metrics.emit_report(self.build_report(), fmt)
