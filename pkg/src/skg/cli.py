"""Command line front end. Every command reads or writes one snapshot file."""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

from .analysis import Schema
from .errors import SKGError
from .index import IndexWriter
from .persist import load_snapshot, save_snapshot
from .scoring import ScorerKind
from .tools import (
    DEFAULT_TFIDF_K,
    blacklist_fraction,
    cleanse_pairs,
    ingest_file,
    predict,
    read_pairs,
    summarize_document,
)
from .traversal import DEFAULT_DEPTH_CAP, Traverser

index_option = click.option(
    "--index", "index_path", type=click.Path(dir_okay=False, path_type=Path),
    default=lambda: os.environ.get("SKG_INDEX", "skg.snap"), show_default="skg.snap or $SKG_INDEX",
    help="Snapshot file to read (or write, for ingest).",
)


def _emit(obj) -> None:
    click.echo(json.dumps(obj, indent=2))


def _value_json(v) -> dict:
    return v.to_json(with_children=False)


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Semantic knowledge graph tools."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--append", is_flag=True, help="Add to the existing snapshot instead of replacing it.")
@index_option
def ingest(schema_path, input_path, append, index_path):
    """Index a JSONL file of documents and write the snapshot."""
    schema = Schema.from_dict(json.loads(Path(schema_path).read_text()))
    if append and index_path.exists():
        writer = IndexWriter.from_snapshot(load_snapshot(index_path))
    else:
        writer = IndexWriter(schema)
    count = ingest_file(input_path, writer)
    save_snapshot(writer.snapshot, index_path)
    _emit({"indexed": count, "doc_count": writer.snapshot.doc_count, "index": str(index_path)})


@main.command()
@click.option("--request", "request_path", type=click.Path(exists=True, dir_okay=False, allow_dash=True),
              required=True, help="Traversal request JSON ('-' for stdin).")
@click.option("--depth-cap", default=DEFAULT_DEPTH_CAP, show_default=True)
@index_option
def query(request_path, depth_cap, index_path):
    """Run a traversal request."""
    with click.open_file(request_path) as fh:
        body = json.load(fh)
    snap = load_snapshot(index_path)
    _emit(Traverser(snap, depth_cap).traverse(body).to_json())


@main.command()
@click.option("--pairs", "pairs_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--field", required=True)
@click.option("--threshold", default=0.5, show_default=True, type=float)
@click.option("--blacklist", "blacklist_path", type=click.Path(dir_okay=False),
              help="Also write blacklisted pairs here.")
@index_option
def cleanse(pairs_path, field, threshold, blacklist_path, index_path):
    """Score co-term pairs; print term_a, term_b, relatedness, verdict as TSV."""
    snap = load_snapshot(index_path)
    results = cleanse_pairs(snap, read_pairs(pairs_path), field, threshold)
    for p in results:
        click.echo(p.tsv())
    if blacklist_path:
        with open(blacklist_path, "w", encoding="utf-8") as fh:
            for p in results:
                if p.verdict == "blacklisted":
                    fh.write(p.tsv() + "\n")
    n_black = sum(p.verdict == "blacklisted" for p in results)
    click.echo(f"blacklisted {n_black}/{len(results)} pairs "
               f"({blacklist_fraction(results):.1%} of scored)", err=True)


@main.command()
@click.option("--phrases", "phrases_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="One phrase per line.")
@click.option("--field", required=True, help="Field the phrases are looked up in.")
@click.option("--foreground", default=None, help="Topic query; defaults to a tf-idf fallback.")
@click.option("--tfidf-k", default=DEFAULT_TFIDF_K, show_default=True)
@index_option
def summarize(phrases_path, field, foreground, tfidf_k, index_path):
    """Rank a document's phrases by relatedness to its topic."""
    phrases = [ln.strip() for ln in Path(phrases_path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    snap = load_snapshot(index_path)
    entries = summarize_document(snap, phrases, field, foreground, tfidf_k)
    _emit([{"phrase": e.phrase, "relatedness": e.relatedness} for e in entries])


@main.command(name="predict")
@click.option("--start", required=True, help="Starting-node query.")
@click.option("--target", required=True, help="Field whose values are predicted.")
@click.option("--scorer", type=click.Choice(["consequent", "antecedent"]), default="consequent",
              show_default=True)
@click.option("--min-count", default=1, show_default=True)
@click.option("--limit", default=10, show_default=True)
@index_option
def predict_cmd(start, target, scorer, min_count, limit, index_path):
    """Association-rule prediction over recency-tagged fields."""
    snap = load_snapshot(index_path)
    values = predict(snap, start, target, ScorerKind(scorer), min_count, limit)
    _emit([_value_json(v) for v in values])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8983, show_default=True)
@click.option("--data-dir", default="skg-data", show_default=True, type=click.Path(file_okay=False))
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--depth-cap", default=DEFAULT_DEPTH_CAP, show_default=True)
@click.option("--scorer", type=click.Choice([k.value for k in ScorerKind]), default="relatedness",
              show_default=True)
def serve(host, port, data_dir, schema_path, depth_cap, scorer):
    """Run the HTTP service."""
    from .service import ServiceConfig, serve as run

    run(ServiceConfig(host, port, Path(data_dir), schema_path and Path(schema_path), depth_cap,
                      ScorerKind(scorer)))


def run():
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except (SKGError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
