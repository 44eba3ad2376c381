"""Dump-file ingestion and related-question fetching.

Parses the public Q&A data-dump XML layout (Posts.xml / Comments.xml /
PostLinks.xml row elements) into normalized records with a streaming,
constant-memory parser, fetches related-question edges from the platform's
public HTTP API with an on-disk response cache, and reads/writes the corpus
store directory.

Dump schema note: attribute names (Id, PostTypeId, ParentId, Score, Title,
Body, Tags, OwnerUserId, AcceptedAnswerId, CreationDate, PostId, Text,
UserId, RelatedPostId, LinkTypeId) and the LinkTypeId codes (1=linked,
3=duplicate) follow the published Stack Exchange data-dump schema as of the
2024 archive layout. Tags arrive as a single string of the form
``<a><b>`` after XML entity decoding.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Callable, Iterable
from xml.parsers import expat

from .records import (
    ANSWER,
    LINK_DUPLICATE,
    LINK_LINKED,
    ORIGIN_API,
    QUESTION,
    CommentRecord,
    ParseStats,
    PostLinkRecord,
    PostRecord,
    RelatedEdgeRecord,
    comment_from_json,
    dump_jsonl,
    load_jsonl,
    parse_timestamp,
    post_from_json,
    postlink_from_json,
    related_edge_from_json,
)

log = logging.getLogger(__name__)

_POST_TYPE_QUESTION = "1"
_POST_TYPE_ANSWER = "2"
_LINK_TYPE_CODES = {"1": LINK_LINKED, "3": LINK_DUPLICATE}

_CHUNK_SIZE = 1 << 16


class DumpParseError(Exception):
    """Fatal (document-level) XML parse failure."""

    def __init__(self, message: str, byte_offset: int) -> None:
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class FetchError(Exception):
    """Related-edge fetch gave up on one or more question ids."""

    def __init__(self, unfetched_ids: list[int]) -> None:
        super().__init__(f"could not fetch related questions for ids: {unfetched_ids}")
        self.unfetched_ids = unfetched_ids


@dataclass
class ParseResult:
    """Records plus the accounting needed for count invariants."""

    records: list
    stats: ParseStats


def _iter_rows(stream: IO[bytes], handle_row: Callable[[int, dict], None]) -> None:
    """Stream row elements out of a dump XML file.

    ``handle_row`` receives (row_index, attributes). Raises DumpParseError
    with the failing byte offset on malformed XML.
    """
    parser = expat.ParserCreate()
    row_index = 0

    def start_element(name: str, attrs: dict) -> None:
        nonlocal row_index
        if name == "row":
            handle_row(row_index, attrs)
            row_index += 1

    parser.StartElementHandler = start_element
    try:
        while True:
            chunk = stream.read(_CHUNK_SIZE)
            if not chunk:
                parser.Parse(b"", True)
                break
            parser.Parse(chunk, False)
    except expat.ExpatError as exc:
        raise DumpParseError(
            expat.errors.messages[exc.code], parser.ErrorByteIndex
        ) from exc


def _opt_int(attrs: dict, key: str) -> int | None:
    raw = attrs.get(key)
    return int(raw) if raw is not None else None


def parse_tag_string(raw: str) -> tuple[str, ...]:
    """Decode a dump tag string '<a><b>' into ('a', 'b'), lowercased."""
    tags = []
    for part in raw.split(">"):
        part = part.strip().lstrip("<")
        if part:
            tags.append(part.lower())
    return tuple(tags)


def parse_posts(stream: IO[bytes]) -> ParseResult:
    """Parse a Posts dump into PostRecords.

    Rows with PostTypeId outside {question, answer} are skipped and counted.
    Rows missing required attributes are skipped, counted as row errors, and
    logged with their row index.
    """
    records: list[PostRecord] = []
    stats = ParseStats()

    def handle(row_index: int, attrs: dict) -> None:
        stats.total_rows += 1
        raw_id = attrs.get("Id")
        raw_type = attrs.get("PostTypeId")
        if raw_id is None or raw_type is None:
            msg = f"row {row_index}: missing Id or PostTypeId"
            stats.row_errors.append(msg)
            log.warning("posts: %s", msg)
            return
        if raw_type not in (_POST_TYPE_QUESTION, _POST_TYPE_ANSWER):
            stats.skipped_kinds += 1
            return
        try:
            if raw_type == _POST_TYPE_QUESTION:
                title = attrs.get("Title")
                if title is None:
                    raise ValueError("question without Title")
                record = PostRecord(
                    id=int(raw_id),
                    post_kind=QUESTION,
                    title=title,
                    body=attrs.get("Body", ""),
                    tags=parse_tag_string(attrs.get("Tags", "")),
                    score=int(attrs.get("Score", "0")),
                    owner_id=_opt_int(attrs, "OwnerUserId"),
                    accepted_answer_id=_opt_int(attrs, "AcceptedAnswerId"),
                    created_at=parse_timestamp(attrs["CreationDate"]),
                )
            else:
                parent_id = _opt_int(attrs, "ParentId")
                if parent_id is None:
                    raise ValueError("answer without ParentId")
                record = PostRecord(
                    id=int(raw_id),
                    post_kind=ANSWER,
                    parent_id=parent_id,
                    body=attrs.get("Body", ""),
                    score=int(attrs.get("Score", "0")),
                    owner_id=_opt_int(attrs, "OwnerUserId"),
                    created_at=parse_timestamp(attrs["CreationDate"]),
                )
        except (ValueError, KeyError) as exc:
            msg = f"row {row_index}: {exc}"
            stats.row_errors.append(msg)
            log.warning("posts: %s", msg)
            return
        records.append(record)
        stats.parsed += 1

    _iter_rows(stream, handle)
    return ParseResult(records, stats)


def parse_comments(stream: IO[bytes]) -> ParseResult:
    records: list[CommentRecord] = []
    stats = ParseStats()

    def handle(row_index: int, attrs: dict) -> None:
        stats.total_rows += 1
        if attrs.get("Id") is None or attrs.get("PostId") is None:
            msg = f"row {row_index}: missing Id or PostId"
            stats.row_errors.append(msg)
            log.warning("comments: %s", msg)
            return
        try:
            record = CommentRecord(
                id=int(attrs["Id"]),
                post_id=int(attrs["PostId"]),
                body=attrs.get("Text", ""),
                score=int(attrs.get("Score", "0")),
                author_id=_opt_int(attrs, "UserId"),
            )
        except ValueError as exc:
            msg = f"row {row_index}: {exc}"
            stats.row_errors.append(msg)
            log.warning("comments: %s", msg)
            return
        records.append(record)
        stats.parsed += 1

    _iter_rows(stream, handle)
    return ParseResult(records, stats)


def parse_postlinks(stream: IO[bytes]) -> ParseResult:
    """Parse a PostLinks dump; LinkTypeId 1=linked, 3=duplicate, rest skipped."""
    records: list[PostLinkRecord] = []
    stats = ParseStats()

    def handle(row_index: int, attrs: dict) -> None:
        stats.total_rows += 1
        required = ("Id", "PostId", "RelatedPostId", "LinkTypeId")
        if any(attrs.get(k) is None for k in required):
            msg = f"row {row_index}: missing one of {required}"
            stats.row_errors.append(msg)
            log.warning("postlinks: %s", msg)
            return
        kind = _LINK_TYPE_CODES.get(attrs["LinkTypeId"])
        if kind is None:
            stats.skipped_kinds += 1
            return
        try:
            source = int(attrs["PostId"])
            target = int(attrs["RelatedPostId"])
            if kind == LINK_LINKED and source == target:
                raise ValueError("linked row with identical endpoints")
            record = PostLinkRecord(
                id=int(attrs["Id"]),
                source_post_id=source,
                target_post_id=target,
                link_kind=kind,
                created_at=parse_timestamp(attrs["CreationDate"]),
            )
        except (ValueError, KeyError) as exc:
            msg = f"row {row_index}: {exc}"
            stats.row_errors.append(msg)
            log.warning("postlinks: %s", msg)
            return
        records.append(record)
        stats.parsed += 1

    _iter_rows(stream, handle)
    return ParseResult(records, stats)


# ---------------------------------------------------------------------------
# Related-question API fetch
# ---------------------------------------------------------------------------

API_BASE = "https://api.stackexchange.com"
RELATED_URL = API_BASE + "/2.3/questions/{qid}/related?site={site}&pagesize={n}"


@dataclass
class HttpResponse:
    status: int
    body: bytes


def _requests_transport(url: str) -> HttpResponse:
    import requests

    resp = requests.get(url, timeout=30)
    return HttpResponse(status=resp.status_code, body=resp.content)


class RelatedCache:
    """Raw API response bodies on disk, keyed by (site, question id, date).

    Lookups serve the newest snapshot for (site, id) so reruns stay offline;
    the capture date in the filename pins which snapshot an experiment used.
    """

    def __init__(self, cache_dir: Path) -> None:
        self.cache_dir = Path(cache_dir)

    def _site_dir(self, site: str) -> Path:
        return self.cache_dir / site

    def lookup(self, site: str, qid: int) -> bytes | None:
        site_dir = self._site_dir(site)
        if not site_dir.is_dir():
            return None
        snapshots = sorted(site_dir.glob(f"{qid}_*.json"))
        if not snapshots:
            return None
        return snapshots[-1].read_bytes()

    def store(self, site: str, qid: int, fetch_date: str, body: bytes) -> Path:
        site_dir = self._site_dir(site)
        site_dir.mkdir(parents=True, exist_ok=True)
        path = site_dir / f"{qid}_{fetch_date}.json"
        path.write_bytes(body)
        return path


def _edges_from_body(qid: int, body: bytes) -> list[RelatedEdgeRecord]:
    payload = json.loads(body)
    edges = []
    rank = 0
    for item in payload.get("items", ()):
        target = item.get("question_id")
        if target is None or target == qid:
            continue
        rank += 1
        edges.append(
            RelatedEdgeRecord(
                source_question_id=qid,
                target_question_id=target,
                rank=rank,
                origin=ORIGIN_API,
            )
        )
    return edges


def fetch_related(
    question_ids: Iterable[int],
    site: str,
    page_size: int = 10,
    *,
    cache_dir: Path,
    transport: Callable[[str], HttpResponse] = _requests_transport,
    sleep: Callable[[float], None] = time.sleep,
    max_retries: int = 3,
    fetch_date: str | None = None,
    on_progress: Callable[[int, int], None] | None = None,
) -> list[RelatedEdgeRecord]:
    """Fetch related-question edges for each question id.

    One request per id, sequential (at most one in-flight request per site).
    A backoff value advertised by the API is honored before the next request;
    throttle/HTTP failures retry up to ``max_retries``, after which the run
    finishes the remaining ids and raises FetchError listing every id that
    could not be fetched. Cached ids never touch the network.
    """
    ids = sorted(set(int(q) for q in question_ids))
    if not ids:
        raise ValueError("no ids supplied")
    if fetch_date is None:
        fetch_date = time.strftime("%Y-%m-%d", time.gmtime())

    cache = RelatedCache(cache_dir)
    edges: list[RelatedEdgeRecord] = []
    unfetched: list[int] = []
    pending_backoff = 0.0

    for done, qid in enumerate(ids):
        body = cache.lookup(site, qid)
        if body is None:
            body = _fetch_one(
                qid, site, page_size, transport, sleep, max_retries, pending_backoff
            )
            pending_backoff = 0.0
            if body is None:
                unfetched.append(qid)
                if on_progress:
                    on_progress(done + 1, len(ids))
                continue
            cache.store(site, qid, fetch_date, body)
            backoff = json.loads(body).get("backoff")
            if backoff:
                pending_backoff = float(backoff)
        edges.extend(_edges_from_body(qid, body))
        if on_progress:
            on_progress(done + 1, len(ids))

    if unfetched:
        raise FetchError(unfetched)
    return edges


def _fetch_one(
    qid: int,
    site: str,
    page_size: int,
    transport: Callable[[str], HttpResponse],
    sleep: Callable[[float], None],
    max_retries: int,
    pending_backoff: float,
) -> bytes | None:
    url = RELATED_URL.format(qid=qid, site=site, n=page_size)
    if pending_backoff > 0:
        sleep(pending_backoff)
    for _attempt in range(max_retries + 1):
        resp = transport(url)
        if resp.status == 200:
            return resp.body
        # Throttle responses advertise a backoff delay in the JSON body.
        delay = 0.0
        try:
            delay = float(json.loads(resp.body).get("backoff") or 0.0)
        except (ValueError, AttributeError):
            pass
        log.warning("fetch %s: HTTP %s, backing off %.1fs", url, resp.status, delay)
        if delay > 0:
            sleep(delay)
    return None


# ---------------------------------------------------------------------------
# Corpus store
# ---------------------------------------------------------------------------

MANIFEST_NAME = "manifest.json"

_STORE_FILES = {
    "posts": ("posts.jsonl", post_from_json),
    "comments": ("comments.jsonl", comment_from_json),
    "postlinks": ("postlinks.jsonl", postlink_from_json),
    "related_edges": ("related_edges.jsonl", related_edge_from_json),
}


@dataclass
class CorpusStore:
    posts: list[PostRecord] = field(default_factory=list)
    comments: list[CommentRecord] = field(default_factory=list)
    postlinks: list[PostLinkRecord] = field(default_factory=list)
    related_edges: list[RelatedEdgeRecord] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        return {name: len(getattr(self, name)) for name in _STORE_FILES}


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(_CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_store(
    store: CorpusStore,
    out_dir: Path,
    source_checksums: dict[str, str] | None = None,
) -> Path:
    """Write the corpus store directory; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name, (filename, _loader) in _STORE_FILES.items():
        with open(out_dir / filename, "w", encoding="utf-8") as fh:
            counts[name] = dump_jsonl(getattr(store, name), fh)
    manifest = {
        "counts": counts,
        "source_checksums": source_checksums or {},
        "store_version": 1,
    }
    manifest_path = out_dir / MANIFEST_NAME
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path


def read_store(store_dir: Path) -> CorpusStore:
    store_dir = Path(store_dir)
    if not (store_dir / MANIFEST_NAME).is_file():
        raise FileNotFoundError(f"not a corpus store (no manifest): {store_dir}")
    store = CorpusStore()
    for name, (filename, loader) in _STORE_FILES.items():
        path = store_dir / filename
        if path.is_file():
            with open(path, encoding="utf-8") as fh:
                setattr(store, name, list(load_jsonl(fh, loader)))
    return store
