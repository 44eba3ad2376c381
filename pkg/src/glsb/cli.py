"""glsb command line.

Subcommands cover the whole loop: ingest dumps into a corpus store, fetch
or generate related edges, create a project, build the search start set,
run a snowball iteration, and emit reports. `glsb serve` exposes the same
project directories over HTTP; `glsb fixture` materializes the bundled
synthetic demo project.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import fixture as fixture_mod
from . import metrics, review, search, similarity
from .corpus import assemble
from .ingest import (
    CorpusStore,
    fetch_related,
    parse_comments,
    parse_posts,
    parse_postlinks,
    read_store,
    sha256_file,
    write_store,
)
from .project import Project, ProjectError, default_config
from .records import dump_jsonl


def _load_toml(path: str) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


@click.group()
def main() -> None:
    """Snowballing-based gray-literature review over Q&A dumps."""


@main.command()
@click.option("--posts", type=click.Path(exists=True), required=True)
@click.option("--comments", type=click.Path(exists=True), required=True)
@click.option("--postlinks", type=click.Path(exists=True), required=True)
@click.option("--related", type=click.Path(exists=True), default=None,
              help="Optional related_edges.jsonl to bundle into the store.")
@click.option("--out", type=click.Path(), required=True)
def ingest(posts, comments, postlinks, related, out):
    """Parse dump XML files into a corpus store directory."""
    paths = {"posts": posts, "comments": comments, "postlinks": postlinks}
    parsers = {"posts": parse_posts, "comments": parse_comments,
               "postlinks": parse_postlinks}
    results = {}
    with ThreadPoolExecutor(max_workers=3) as pool:
        futures = {
            name: pool.submit(lambda p=path, f=parsers[name]: f(open(p, "rb")))
            for name, path in paths.items()
        }
        for name, fut in futures.items():
            results[name] = fut.result()

    store = CorpusStore(
        posts=results["posts"].records,
        comments=results["comments"].records,
        postlinks=results["postlinks"].records,
    )
    if related:
        from .records import load_jsonl, related_edge_from_json

        with open(related, encoding="utf-8") as fh:
            store.related_edges = list(load_jsonl(fh, related_edge_from_json))
    checksums = {name: sha256_file(Path(path)) for name, path in paths.items()}
    write_store(store, Path(out), source_checksums=checksums)
    for name, result in results.items():
        s = result.stats
        click.echo(
            f"{name}: {s.parsed} parsed, {s.skipped} skipped "
            f"({len(s.row_errors)} row errors) of {s.total_rows} rows"
        )
    click.echo(f"corpus store written to {out}")


@main.command("fetch-related")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--site", required=True, help="API site parameter, e.g. pm")
@click.option("--page-size", default=10, show_default=True)
@click.option("--cache-dir", type=click.Path(), default=".glsb-api-cache",
              show_default=True)
@click.option("--out", type=click.Path(), required=True)
def fetch_related_cmd(corpus_dir, site, page_size, cache_dir, out):
    """Fetch related-question edges for every corpus question via the API."""
    store = read_store(Path(corpus_dir))
    assembled = assemble(store.posts, store.comments)
    ids = sorted(d.id for d in assembled.discussions)
    if not ids:
        raise click.ClickException("corpus has no questions")
    with click.progressbar(length=len(ids), label="fetching") as bar:
        def progress(done, _total):
            bar.update(done - bar.pos)

        edges = fetch_related(
            ids, site, page_size, cache_dir=Path(cache_dir), on_progress=progress
        )
    with open(out, "w", encoding="utf-8") as fh:
        n = dump_jsonl(edges, fh)
    click.echo(f"{n} related edges -> {out}")


@main.command("search")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--terms", required=True, help="Comma-separated search terms.")
@click.option("--fields", default="all", show_default=True,
              help="Comma-separated field names, or 'all'.")
@click.option("--mode", type=click.Choice([search.MODE_SUBSTRING, search.MODE_TOKEN]),
              default=search.MODE_SUBSTRING, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def search_cmd(corpus_dir, terms, fields, mode, out):
    """String-match discussions and write the hit list."""
    store = read_store(Path(corpus_dir))
    assembled = assemble(store.posts, store.comments)
    field_tuple = (
        search.ALL_FIELDS if fields == "all" else tuple(fields.split(","))
    )
    spec = search.SearchSpec(
        terms=tuple(terms.split(",")), fields=field_tuple, match_mode=mode
    )
    matches = search.match(spec, assembled.discussions)
    with open(out, "w", encoding="utf-8") as fh:
        for qid, hits in matches:
            fh.write(json.dumps(
                {"discussion_id": qid, "hits": [h.to_json() for h in hits]},
                sort_keys=True,
            ) + "\n")
    click.echo(f"{len(matches)} matching discussions -> {out}")


@main.command("related")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="TOML file with a [similarity] table.")
@click.option("--out", type=click.Path(), required=True)
def related_cmd(corpus_dir, config_path, out):
    """Generate local related edges with the similarity engine."""
    store = read_store(Path(corpus_dir))
    assembled = assemble(store.posts, store.comments)
    if config_path:
        raw = _load_toml(config_path).get("similarity", {})
        config = similarity.SimilarityConfig.from_json(raw)
    else:
        config = similarity.SimilarityConfig()
    index = similarity.build_index(assembled.discussions, config)
    edges = similarity.generate_related_edges(index)
    with open(out, "w", encoding="utf-8") as fh:
        n = dump_jsonl(edges, fh)
    click.echo(f"{n} related edges -> {out}")


@main.command()
@click.option("--project", "project_dir", type=click.Path(), required=True)
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--terms", default="debt,shortcut", show_default=True)
def init(project_dir, corpus_dir, terms):
    """Create a project directory from a corpus store."""
    config = default_config(terms=tuple(terms.split(",")))
    project = Project.create(Path(project_dir), Path(corpus_dir), config)
    click.echo(f"project {project.id} created at {project_dir}")


@main.command()
@click.option("--project", "project_dir", type=click.Path(exists=True), required=True)
def startset(project_dir):
    """Run the search start set (iteration 0)."""
    project = Project(Path(project_dir))
    outcome = project.run_startset()
    click.echo(json.dumps(outcome["iteration"], indent=2, sort_keys=True))


@main.command()
@click.option("--project", "project_dir", type=click.Path(exists=True), required=True)
@click.option("--min-answers", type=int, default=None,
              help="Frontier threshold; defaults to floor of start-set average.")
@click.option("--min-score", type=int, default=None)
@click.option("--apply-to", default="related", show_default=True,
              help="Comma-separated edge kinds the thresholds apply to.")
@click.option("--out", type=click.Path(), default=None,
              help="Also write the candidate list to this path.")
def snowball(project_dir, min_answers, min_score, apply_to, out):
    """Run one snowballing iteration from the accumulated valid set."""
    from .snowball import FrontierFilter

    project = Project(Path(project_dir))
    if min_answers is not None or min_score is not None:
        project.config.frontier = FrontierFilter(
            min_answers=min_answers or 0,
            min_score=min_score or 0,
            apply_to=frozenset(apply_to.split(",")),
        )
    try:
        outcome = project.run_snowball_iteration()
    except ProjectError as exc:
        raise click.ClickException(str(exc))
    record = outcome["iteration"]
    click.echo(json.dumps(record, indent=2, sort_keys=True))
    if out:
        candidates = project.iteration_candidates(record["index"])
        with open(out, "w", encoding="utf-8") as fh:
            for c in candidates:
                fh.write(json.dumps(c.to_json(), sort_keys=True) + "\n")
        click.echo(f"candidates -> {out}")


@main.command()
@click.option("--project", "project_dir", type=click.Path(exists=True), required=True)
@click.option("--reviewer", required=True)
def queue(project_dir, reviewer):
    """Print the reviewer's screening queue."""
    project = Project(Path(project_dir))
    for qid in project.queue(reviewer):
        click.echo(qid)


@main.command()
@click.option("--project", "project_dir", type=click.Path(exists=True), required=True)
@click.option("--format", "fmt",
              type=click.Choice([metrics.FORMAT_STRUCTURED, metrics.FORMAT_TABLE]),
              default=metrics.FORMAT_TABLE, show_default=True)
def report(project_dir, fmt):
    """Emit the metrics report for a project."""
    project = Project(Path(project_dir))
    sys.stdout.buffer.write(project.report_bytes(fmt))


@main.command()
@click.option("--out", type=click.Path(), required=True)
def fixture(out):
    """Materialize the bundled synthetic demo project."""
    expectations = fixture_mod.build_fixture_project(Path(out))
    click.echo(json.dumps(expectations.to_json(), indent=2, sort_keys=True))


@main.command()
@click.option("--root", "project_root", type=click.Path(exists=True), required=True,
              envvar="GLSB_PROJECT_ROOT", help="Directory holding project dirs.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8037, show_default=True)
@click.option("--ui-dir", type=click.Path(), default=None, envvar="GLSB_UI_DIR",
              help="Built UI assets to serve under /.")
def serve(project_root, host, port, ui_dir):
    """Run the HTTP review service."""
    import uvicorn

    from .service import create_app

    app = create_app(Path(project_root), Path(ui_dir) if ui_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
