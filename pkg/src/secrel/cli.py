"""Command-line entry points: tag, bootstrap, eval, serve.

Exit codes: 0 success, 2 usage or input error, 3 environment error
(e.g. the service port is already bound).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bootstrap import (
    BootstrapConfig,
    ConfigError,
    PipelineResult,
    export_state,
    run_pipeline,
)
from .corpus import CorpusError, Document, load_corpus
from .entity import GazetteerError, default_gazetteer_dir, load_gazetteer_dir, tag_document
from .evalgen import evaluate
from .oracle import Oracle, OracleError, OracleQueue, load_answers_file
from .patterns import default_seed_dir, load_relations, load_seeds, write_relations
from .relevance import load_model
from .service import ServiceError, StateSnapshot, create_app, serve_in_thread

logger = logging.getLogger("secrel.cli")


def _load_corpus_auto(path: str, fmt: str) -> list[Document]:
    if fmt != "auto":
        return load_corpus(path, fmt)
    root = Path(path)
    if root.is_file():
        detected = "annotated-json" if root.suffix == ".json" else "plain-text"
        return load_corpus(root, detected)
    docs: list[Document] = []
    seen: dict[str, str] = {}
    files = sorted(p for p in root.iterdir() if p.is_file() and p.suffix in (".json", ".txt"))
    for f in files:
        detected = "annotated-json" if f.suffix == ".json" else "plain-text"
        for doc in load_corpus(f, detected):
            if doc.id in seen:
                raise CorpusError(
                    f"duplicate document id {doc.id!r} ({seen[doc.id]} and {f})"
                )
            seen[doc.id] = str(f)
            docs.append(doc)
    return docs


def cmd_tag(args: argparse.Namespace) -> int:
    docs = _load_corpus_auto(args.corpus, args.format)
    gazetteers = load_gazetteer_dir(args.gazetteers)
    payload = {}
    for doc in docs:
        payload[doc.id] = [
            {
                "sentence": m.sentence_index,
                "span": list(m.token_span),
                "type": m.entity_type,
                "canonical": m.canonical,
                "provenance": m.provenance,
            }
            for m in tag_document(doc, gazetteers)
        ]
    Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
    logger.info("tagged %d documents -> %s", len(docs), args.out)
    return 0


def _parse_oracle_flag(value: str) -> tuple[str, dict[str, str] | None]:
    if value == "auto":
        return "auto_dont_know", None
    if value == "interactive":
        return "interactive", None
    if value == "serve":
        return "service", None
    if value.startswith("scripted:"):
        path = value.split(":", 1)[1]
        if not path:
            raise ConfigError("oracle: scripted mode needs a path, e.g. scripted:answers.json")
        return "scripted", load_answers_file(path)
    raise ConfigError(f"oracle: unknown mode {value!r}")


def _write_outputs(result: PipelineResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, state in result.states.items():
        export_state(state, out_dir / f"state_{name}.json")
    write_relations(out_dir / "extracted.json", result.extracted)
    run_info = {
        "kept_documents": result.kept_ids,
        "dropped_documents": result.dropped_ids,
        "conflicts": result.conflicts,
        "iterations": {name: state.iteration for name, state in sorted(result.states.items())},
    }
    (out_dir / "run.json").write_text(
        json.dumps(run_info, indent=2, sort_keys=True) + "\n", "utf-8"
    )


def cmd_bootstrap(args: argparse.Namespace) -> int:
    config_data = {}
    if args.config:
        config_data = json.loads(Path(args.config).read_text("utf-8"))
    config = BootstrapConfig.from_dict(config_data)
    mode, answers = _parse_oracle_flag(args.oracle)
    config.oracle_mode = mode
    config.validate()

    docs = _load_corpus_auto(args.corpus, args.format)
    gazetteers = load_gazetteer_dir(args.gazetteers)
    seeds = load_seeds(args.seeds)
    model = load_model(args.relevance_model) if args.relevance_model else None

    out_dir = Path(args.out)
    if mode == "service":
        host, _, port_text = args.bind.partition(":")
        queue = OracleQueue()
        snapshot = StateSnapshot()
        oracle = Oracle(mode="service", queue=queue, timeout=args.oracle_timeout)
        app = create_app(queue, snapshot, ui_dir=args.ui_dir)
        server, _thread = serve_in_thread(app, host or "127.0.0.1", int(port_text or "8750"))
        logger.info("review service on http://%s/ui", args.bind)
        try:
            result = run_pipeline(docs, gazetteers, seeds, config, model, oracle, snapshot)
        finally:
            server.should_exit = True
    else:
        oracle = Oracle(mode=mode, answers=answers)
        result = run_pipeline(docs, gazetteers, seeds, config, model, oracle)

    _write_outputs(result, out_dir)
    logger.info(
        "extracted %d relation instances across %d relation types -> %s",
        len(result.extracted),
        len(result.states),
        out_dir,
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    extracted = load_relations(args.extracted)
    gold = load_relations(args.gold)
    labeled = load_relations(args.labeled_docs) if args.labeled_docs else None
    report = evaluate(extracted, gold, labeled)
    print(report.render())
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", "utf-8"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secrel", description="bootstrapped relation extraction for security text"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    tag = sub.add_parser("tag", help="tag entity mentions over a corpus")
    tag.add_argument("--corpus", required=True)
    tag.add_argument("--gazetteers", default=str(default_gazetteer_dir()))
    tag.add_argument("--format", choices=["auto", "annotated-json", "plain-text"], default="auto")
    tag.add_argument("--out", required=True)
    tag.set_defaults(func=cmd_tag)

    def add_bootstrap_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--corpus", required=True)
        p.add_argument("--seeds", default=str(default_seed_dir()))
        p.add_argument("--gazetteers", default=str(default_gazetteer_dir()))
        p.add_argument("--format", choices=["auto", "annotated-json", "plain-text"], default="auto")
        p.add_argument("--config", help="JSON file mirroring the bootstrap config fields")
        p.add_argument("--relevance-model", help="JSON model file for the relevance gate")
        p.add_argument("--out", required=True, help="output directory for states and extraction")
        p.add_argument("--bind", default="127.0.0.1:8750", help="host:port for serve mode")
        p.add_argument("--ui-dir", default="frontend/dist", help="static assets served at /ui")
        p.add_argument(
            "--oracle-timeout",
            type=float,
            default=None,
            help="seconds to wait for answers in serve mode (default: forever)",
        )

    boot = sub.add_parser("bootstrap", help="run the bootstrapping pipeline")
    add_bootstrap_args(boot)
    boot.add_argument(
        "--oracle",
        default="auto",
        help="auto | interactive | scripted:ANSWERS.json | serve",
    )
    boot.set_defaults(func=cmd_bootstrap)

    serve = sub.add_parser("serve", help="run the pipeline with the review service attached")
    add_bootstrap_args(serve)
    serve.set_defaults(func=cmd_bootstrap, oracle="serve")

    ev = sub.add_parser("eval", help="precision/recall report for an extraction")
    ev.add_argument("--extracted", required=True)
    ev.add_argument("--gold", required=True)
    ev.add_argument("--labeled-docs", help="complete gold relations for a fully-labeled subset")
    ev.add_argument("--json", help="also write the report as JSON to this path")
    ev.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CorpusError, GazetteerError, ConfigError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
