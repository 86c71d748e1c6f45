"""Command-line interface for the workbench.

Pipeline commands (ingest, extract, annotate, split, tune, simulate, report,
kb) operate on files; the ``serve`` command runs the HTTP service; the
``project`` group mirrors every service endpoint for driving a running
instance from the shell.
"""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click
import requests

from foodkb.active.runner import RunConfig, multi_run
from foodkb.annotations.splits import read_labeled, split_dataset, write_splits
from foodkb.annotations.store import AnnotationStore
from foodkb.classifier.baseline import HyperParams
from foodkb.classifier.contract import BASELINE_GRID, TRANSFORMER_GRID, BaselineBackend
from foodkb.classifier.remote import RemoteBackend
from foodkb.classifier.search import grid_search
from foodkb.config import Config
from foodkb.extract.pairs import build_sr_pairs, read_pairs, write_pairs
from foodkb.extract.parts import load_part_lexicon
from foodkb.ingest.client import LiteratureSearchClient
from foodkb.ingest.sentences import filter_species, read_sentences, write_sentences
from foodkb.ingest.vocab import load_food_vocabulary
from foodkb.kb.store import KBStore
from foodkb.metrics.report import write_reports


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file; environment variables override it.")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx: click.Context, config_path: str | None, verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = Config.load(config_path)


# -- pipeline ---------------------------------------------------------------

@main.command()
@click.option("--vocab", "vocab_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--limit-per-food", type=int, default=None)
@click.option("--rate", type=float, default=None, help="requests per second")
@click.pass_obj
def ingest(cfg: Config, vocab_path: str, out_path: str,
           limit_per_food: int | None, rate: float | None) -> None:
    """Fetch tagged sentences for every food name and persist them."""
    if not cfg.search_url:
        raise click.UsageError("no search endpoint configured "
                               "(FOODKB_SEARCH_URL or config file)")
    vocab = load_food_vocabulary(vocab_path)
    client = LiteratureSearchClient(
        cfg.search_url,
        rate_per_sec=rate if rate is not None else cfg.search_rate_per_sec,
        timeout_sec=cfg.search_timeout_sec)
    sentences = client.fetch_for_foods(vocab.sorted_names(), limit_per_food)
    filtered = [filter_species(s, vocab) for s in sentences]
    count = write_sentences(filtered, out_path)
    click.echo(f"wrote {count} sentences to {out_path}")


@main.command()
@click.option("--sentences", "sentences_path", required=True, type=click.Path(exists=True))
@click.option("--parts", "parts_path", required=True, type=click.Path(exists=True))
@click.option("--vocab", "vocab_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def extract(sentences_path: str, parts_path: str, vocab_path: str, out_path: str) -> None:
    """Generate SR pairs from tagged sentences."""
    lexicon = load_part_lexicon(parts_path)
    vocab = load_food_vocabulary(vocab_path)
    pairs = build_sr_pairs(read_sentences(sentences_path), lexicon, vocab)
    count = write_pairs(pairs, out_path)
    click.echo(f"wrote {count} SR pairs to {out_path}")


@main.group()
def annotate() -> None:
    """Annotation store import/export."""


@annotate.command("init")
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--annotators", required=True, help="comma-separated annotator ids")
def annotate_init(db_path: str, pairs_path: str, annotators: str) -> None:
    store = AnnotationStore(db_path)
    count = store.register_pairs(read_pairs(pairs_path))
    for annotator_id in annotators.split(","):
        store.register_annotator(annotator_id.strip())
    click.echo(f"registered {count} pairs in {db_path}")


@annotate.command("import")
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
def annotate_import(db_path: str, file_path: str) -> None:
    store = AnnotationStore(db_path)
    count = store.import_annotations(file_path)
    click.echo(f"imported {count} annotation records")


@annotate.command("export")
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def annotate_export(db_path: str, out_path: str) -> None:
    store = AnnotationStore(db_path)
    count = store.export_annotations(out_path)
    click.echo(f"exported {count} annotation records to {out_path}")


@annotate.command("consensus")
@click.option("--db", "db_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def annotate_consensus(db_path: str, out_path: str) -> None:
    """Write consensus-labeled pairs as labeled JSONL."""
    store = AnnotationStore(db_path)
    labeled, report = store.consensus()
    with Path(out_path).open("w", encoding="utf-8") as fh:
        for item in labeled:
            fh.write(json.dumps(item.to_record(), sort_keys=True,
                                ensure_ascii=False) + "\n")
    click.echo(f"consensus={report.consensus} conflicts={report.conflicts} "
               f"skipped={report.skipped} incomplete={report.incomplete}")


@main.command()
@click.option("--labeled", "labeled_path", required=True, type=click.Path(exists=True))
@click.option("--sizes", required=True, help="train,val,test e.g. 1000,300,300")
@click.option("--seed", type=int, required=True)
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
def split(labeled_path: str, sizes: str, seed: int, out_dir: str) -> None:
    """Split labeled pairs into train/val/test with disjointness guarantees."""
    size_tuple = tuple(int(s) for s in sizes.split(","))
    if len(size_tuple) != 3:
        raise click.UsageError("--sizes needs three comma-separated integers")
    splits = split_dataset(list(read_labeled(labeled_path)), size_tuple, seed)
    splits.validate()
    manifest = write_splits(splits, out_dir)
    click.echo(json.dumps(manifest["counts"], indent=2, sort_keys=True))
    if manifest["shortfall"]:
        click.echo("warning: split sizes differ from requested", err=True)


@main.command()
@click.option("--train", "train_path", required=True, type=click.Path(exists=True))
@click.option("--val", "val_path", required=True, type=click.Path(exists=True))
@click.option("--grid", "grid_name", type=click.Choice(["baseline", "transformer"]),
              default="baseline")
@click.option("--backend", type=click.Choice(["baseline", "external"]), default="baseline")
@click.pass_obj
def tune(cfg: Config, train_path: str, val_path: str, grid_name: str,
         backend: str) -> None:
    """Grid search selected by validation precision; prints the winner."""
    train = list(read_labeled(train_path))
    val = list(read_labeled(val_path))
    grid = BASELINE_GRID if grid_name == "baseline" else TRANSFORMER_GRID
    backend_obj = (RemoteBackend(cfg.backend_url) if backend == "external"
                   else BaselineBackend())
    best, report = grid_search(grid, train, val, backend=backend_obj)
    for result in report.results:
        marker = "*" if result.hyperparams == best else " "
        click.echo(f"{marker} {result.hyperparams.to_record()} "
                   f"precision={result.metrics.precision:.4f} "
                   f"f1={result.metrics.f1:.4f}")
    click.echo(json.dumps(best.to_record(), sort_keys=True))


@main.command()
@click.option("--pool", "pool_path", required=True, type=click.Path(exists=True))
@click.option("--val", "val_path", required=True, type=click.Path(exists=True))
@click.option("--test", "test_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", type=click.Choice(["uncertainty", "random"]), required=True)
@click.option("--rounds", type=int, default=10, show_default=True)
@click.option("--batch", "batch_size", type=int, default=100, show_default=True)
@click.option("--runs", "n_runs", type=int, default=1, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--backend", type=click.Choice(["baseline", "external"]), default="baseline")
@click.option("--hyperparams", "hp_json", default=None,
              help='JSON like {"learning_rate":0.1,"batch_size":32,"epochs":4}; '
                   "defaults to the first baseline grid point")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--workers", type=int, default=1, show_default=True)
@click.pass_obj
def simulate(cfg: Config, pool_path: str, val_path: str, test_path: str,
             strategy: str, rounds: int, batch_size: int, n_runs: int, seed: int,
             backend: str, hp_json: str | None, out_dir: str, workers: int) -> None:
    """Run seeded active-learning simulations over a pre-labeled pool."""
    hp = (HyperParams.from_record(json.loads(hp_json)) if hp_json
          else BASELINE_GRID[0])
    run_cfg = RunConfig(
        rounds=rounds, batch_size=batch_size, strategy=strategy, seed=seed,
        pool=tuple(read_labeled(pool_path)), val=tuple(read_labeled(val_path)),
        test=tuple(read_labeled(test_path)), hyperparams=hp, backend_kind=backend)
    if backend == "external":
        if not cfg.backend_url:
            raise click.UsageError("external backend needs FOODKB_BACKEND_URL")
        backend_factory = lambda: RemoteBackend(cfg.backend_url)  # noqa: E731
    else:
        backend_factory = BaselineBackend
    started = time.time()
    results = multi_run(run_cfg, n_runs, out_dir=out_dir, workers=workers,
                        backend_factory=backend_factory)
    complete = sum(1 for r in results if r.complete)
    click.echo(f"{complete}/{n_runs} runs complete in {time.time() - started:.1f}s; "
               f"results in {out_dir}")


@main.command()
@click.option("--runs", "runs_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def report(runs_dir: str, out_dir: str) -> None:
    """Aggregate run results into summary, t-test, and discovery reports."""
    from foodkb.active.runner import RunResult

    runs_by_strategy: dict[str, list[RunResult]] = {}
    for path in sorted(Path(runs_dir).glob("run_*.json")):
        result = RunResult.load(path)
        if result.complete:
            runs_by_strategy.setdefault(result.strategy, []).append(result)
    if not runs_by_strategy:
        raise click.UsageError(f"no complete run files in {runs_dir}")
    written = write_reports(runs_by_strategy, out_dir)
    click.echo(f"wrote {', '.join(written)} to {out_dir}")


@main.group()
def kb() -> None:
    """Knowledge-base construction and queries."""


@kb.command("build")
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--from", "source", type=click.Choice(["annotations", "predictions"]),
              required=True)
@click.option("--db", "db_path", type=click.Path(exists=True),
              help="annotation store (for --from annotations)")
@click.option("--predictions", "pred_path", type=click.Path(exists=True),
              help="JSONL of {pair, probability} (for --from predictions)")
@click.option("--min-prob", type=float, default=0.5, show_default=True)
def kb_build(kb_path: str, source: str, db_path: str | None,
             pred_path: str | None, min_prob: float) -> None:
    store = KBStore(kb_path)
    if source == "annotations":
        if not db_path:
            raise click.UsageError("--from annotations requires --db")
        annotation_store = AnnotationStore(db_path)
        labeled, _ = annotation_store.consensus()
        count = store.add_labeled_positives(labeled)
    else:
        if not pred_path:
            raise click.UsageError("--from predictions requires --predictions")
        from foodkb.extract.pairs import SRPair

        def rows():
            with Path(pred_path).open("r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        yield SRPair.from_record(rec["pair"]), float(rec["probability"])
        count = store.add_predictions(rows(), min_prob)
    click.echo(f"added {count} evidence records to {kb_path}")


@kb.command("export")
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["delimited", "records"]),
              default="delimited", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def kb_export(kb_path: str, fmt: str, out_path: str) -> None:
    store = KBStore(kb_path)
    if fmt == "delimited":
        count = store.export_delimited(out_path)
    else:
        count = store.export_records(out_path)
    click.echo(f"exported {count} triples to {out_path}")


@kb.command("query")
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--food", default=None)
@click.option("--chemical", default=None)
@click.option("--min-confidence", type=float, default=0.0, show_default=True)
def kb_query(kb_path: str, food: str | None, chemical: str | None,
             min_confidence: float) -> None:
    store = KBStore(kb_path)
    for triple in store.query(food=food, chemical=chemical,
                              min_confidence=min_confidence):
        click.echo(json.dumps({
            "food": triple.food, "part": triple.part, "chemical": triple.chemical,
            "confidence": round(triple.confidence, 6),
            "evidence_count": len(triple.evidence),
        }, sort_keys=True))


# -- service ----------------------------------------------------------------

@main.command()
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="serve a UI bundle at /ui")
@click.pass_obj
def serve(cfg: Config, port: int | None, host: str, static_dir: str | None) -> None:
    """Run the workbench HTTP service."""
    import uvicorn

    from foodkb.service.app import create_app

    app = create_app(cfg.projects_root, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port or cfg.service_port, log_level="info")


@main.group()
@click.option("--url", default="http://127.0.0.1:8800", show_default=True)
@click.pass_context
def project(ctx: click.Context, url: str) -> None:
    """Drive a running service instance."""
    ctx.obj = url.rstrip("/")


def _echo_response(resp: requests.Response) -> None:
    try:
        click.echo(json.dumps(resp.json(), indent=2, sort_keys=True))
    except ValueError:
        click.echo(resp.text)
    if resp.status_code >= 400:
        sys.exit(1)


@project.command("create")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True),
              help="JSON body for project creation")
@click.pass_obj
def project_create(url: str, spec_path: str) -> None:
    body = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    _echo_response(requests.post(f"{url}/projects", json=body, timeout=60))


@project.command("show")
@click.argument("project_id")
@click.pass_obj
def project_show(url: str, project_id: str) -> None:
    _echo_response(requests.get(f"{url}/projects/{project_id}", timeout=60))


@project.command("batch")
@click.argument("project_id")
@click.argument("round_index", type=int)
@click.pass_obj
def project_batch(url: str, project_id: str, round_index: int) -> None:
    _echo_response(requests.get(
        f"{url}/projects/{project_id}/rounds/{round_index}/batch", timeout=60))


@project.command("submit")
@click.argument("project_id")
@click.argument("batch_id")
@click.option("--annotator", required=True)
@click.option("--token", required=True)
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True),
              help="JSON mapping pair_id -> label")
@click.pass_obj
def project_submit(url: str, project_id: str, batch_id: str, annotator: str,
                   token: str, labels_path: str) -> None:
    labels = json.loads(Path(labels_path).read_text(encoding="utf-8"))
    _echo_response(requests.post(
        f"{url}/projects/{project_id}/batches/{batch_id}/labels",
        json={"annotator_id": annotator, "labels": labels},
        headers={"X-Annotator-Token": token}, timeout=60))


@project.command("advance")
@click.argument("project_id")
@click.argument("round_index", type=int)
@click.option("--wait/--no-wait", default=True, show_default=True)
@click.pass_obj
def project_advance(url: str, project_id: str, round_index: int, wait: bool) -> None:
    resp = requests.post(
        f"{url}/projects/{project_id}/rounds/{round_index}/advance", timeout=60)
    if resp.status_code >= 400 or not wait:
        _echo_response(resp)
        return
    while True:
        status = requests.get(
            f"{url}/projects/{project_id}/rounds/{round_index}", timeout=60).json()
        if status["trained"] or status["job"]["status"] == "failed":
            click.echo(json.dumps(status, indent=2, sort_keys=True))
            return
        time.sleep(0.2)


@project.command("metrics")
@click.argument("project_id")
@click.pass_obj
def project_metrics(url: str, project_id: str) -> None:
    _echo_response(requests.get(f"{url}/projects/{project_id}/metrics", timeout=60))


@project.command("discovery")
@click.argument("project_id")
@click.pass_obj
def project_discovery(url: str, project_id: str) -> None:
    _echo_response(requests.get(f"{url}/projects/{project_id}/discovery", timeout=60))


@project.command("curves")
@click.argument("project_id")
@click.option("--round", "round_index", type=int, default=None)
@click.pass_obj
def project_curves(url: str, project_id: str, round_index: int | None) -> None:
    params = {} if round_index is None else {"round_index": round_index}
    _echo_response(requests.get(f"{url}/projects/{project_id}/curves",
                                params=params, timeout=60))


@project.command("result")
@click.argument("project_id")
@click.pass_obj
def project_result(url: str, project_id: str) -> None:
    _echo_response(requests.get(f"{url}/projects/{project_id}/result", timeout=60))


@project.command("kb")
@click.argument("project_id")
@click.option("--min-confidence", type=float, default=0.0)
@click.pass_obj
def project_kb(url: str, project_id: str, min_confidence: float) -> None:
    _echo_response(requests.get(f"{url}/projects/{project_id}/kb",
                                params={"min_confidence": min_confidence}, timeout=60))


if __name__ == "__main__":
    main()
