"""Command-line entry points: index, run, eval, converse, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import PipelineConfig
from .metrics import build_references, evaluate_run, load_qrels, load_run
from .pipeline import Pipeline, load_topics, run_topics, write_run_file
from .textindex import build_index, load_index, read_corpus, save_index


@click.group()
def main():
    """Conversational search with entity-graph passage scoring."""


@main.command("index")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
def cmd_index(corpus, out_dir):
    """Build the inverted index from a newline-delimited JSON corpus."""
    index = build_index(read_corpus(corpus))
    manifest = save_index(index, out_dir)
    click.echo(json.dumps(manifest, indent=2, sort_keys=True))


@main.command("run")
@click.argument("topics", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_run(topics, config_path, out_path):
    """Run the full pipeline over a topics file and write a run file."""
    config = PipelineConfig.load(config_path)
    pipeline = Pipeline(config)
    records = run_topics(pipeline, load_topics(topics))
    write_run_file(records, out_path)
    click.echo(f"wrote {len(records)} turn records to {out_path}")


@main.command("eval")
@click.argument("run_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("qrels_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--index", "index_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Index directory providing reference passage texts.")
@click.option("--csv-out", type=click.Path(dir_okay=False))
@click.option("--json-out", type=click.Path(dir_okay=False))
def cmd_eval(run_file, qrels_file, index_dir, csv_out, json_out):
    """Score a run file against qrels-derived references."""
    qrels = load_qrels(qrels_file)
    index = load_index(index_dir)
    refs = build_references(qrels, index.text_of)
    report = evaluate_run(load_run(run_file), qrels, refs)
    if csv_out:
        Path(csv_out).write_text(report.to_csv())
    summary = json.dumps(report.to_json(), indent=2, sort_keys=True)
    if json_out:
        Path(json_out).write_text(summary)
    click.echo(summary)


@main.command("converse")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def cmd_converse(config_path):
    """Interactive loop: one query per line; 'exit' quits."""
    from .conversation import Conversation, advance_turn

    config = PipelineConfig.load(config_path)
    pipeline = Pipeline(config)
    conversation = Conversation(topic_id="interactive")
    for line in sys.stdin:
        query = line.strip()
        if not query:
            click.echo("> ", nl=False)
            continue
        if query == "exit":
            break
        result = pipeline.run_turn(conversation, query)
        advance_turn(conversation, result.turn)
        click.echo(f"[turn {result.turn.index}] rewritten: "
                   f"{result.turn.rewritten_query}")
        for pid in result.turn.selected_passages:
            click.echo(f"  passage {pid}: {pipeline.index.text_of(pid)}")
        click.echo(f"  answer: {result.turn.answer}")
        salient = sorted(result.graph_doc["nodes"],
                         key=lambda n: (-n["rank"], n["id"]))[:5]
        for node in salient:
            click.echo(f"  entity {node['id']} rank={node['rank']:.4f}")


@main.command("serve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def cmd_serve(config_path, host, port):
    """Serve the session HTTP API."""
    import uvicorn

    from .api import create_app

    config = PipelineConfig.load(config_path)
    app = create_app(Pipeline(config))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
