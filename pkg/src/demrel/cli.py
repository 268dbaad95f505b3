"""Command-line pipeline: ingest -> aggregate -> relate -> report, plus the
conformance suite and the annotation service.

Exit codes: 0 success, 1 validation error, 2 conformance failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import conformance, report
from .fuse import fuse_corpus, load_fused, save_fused
from .ingest import (
    ValidationError,
    load_ballots,
    load_corpus,
    parse_dailydialog,
    save_corpus,
)
from .relations import RelateConfig, build_views, load_table, relation_table, save_table
from .vocab import Discourse

log = logging.getLogger("demrel")


def _cmd_ingest(args: argparse.Namespace) -> int:
    path = Path(args.dialogues)
    if args.format == "dailydialog":
        ids = None
        if args.ids:
            ids = [line.strip() for line in
                   Path(args.ids).read_text("utf-8").splitlines() if line.strip()]
        with path.open("r", encoding="utf-8") as handle:
            corpus = parse_dailydialog(handle, dialogue_ids=ids, source=str(path))
    else:
        corpus = load_corpus(path)
    save_corpus(corpus, args.out)
    print(f"ingested {len(corpus.dialogues)} dialogues, "
          f"{corpus.sentence_count()} sentences -> {args.out}")
    return 0


def _cmd_aggregate(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    ballots = load_ballots(args.ballots)
    records = fuse_corpus(corpus, ballots)
    save_fused(records, args.out)
    annotated = {b.sentence for b in ballots}
    discarded = sum(1 for r in records if r.discarded)
    skipped = len(annotated) - len(records)
    print(f"fused {len(records)} sentences "
          f"({discarded} discarded as 'none', {skipped} skipped with <3 ballots) "
          f"-> {args.out}")
    return 0


def _cmd_relate(args: argparse.Namespace) -> int:
    records = load_fused(args.fused)
    config = RelateConfig(
        tau=args.tau,
        max_emotions=args.max_emotions,
        max_discourses=args.max_discourses,
        weight_mode=args.weight_mode,
        normalize=args.normalize,
    )
    views = build_views(records, config)
    table = relation_table(views, config)
    save_table(table, args.out)
    print(f"{len(table.entries)} relation entries over "
          f"{len(views)} sentence views -> {args.out}")
    return 0


def _parse_discourse_set(text: str) -> List[Discourse]:
    return [Discourse.from_code(code.strip()) for code in text.split(",")]


def _cmd_report(args: argparse.Namespace) -> int:
    table = load_table(args.relations)
    if args.prob_table:
        report.export_probability_table(table, args.prob_table)
        print(f"probability table -> {args.prob_table}")
    if args.heatmap:
        json_sink = Path(args.heatmap)
        csv_sink = json_sink.with_suffix(".csv")
        report.export_heatmap(table, csv_sink=csv_sink, json_sink=json_sink,
                              top_k=args.top)
        print(f"intensity matrix -> {json_sink} and {csv_sink}"
              + (f" (top {args.top} per emotion set)" if args.top else ""))
    if args.discourse:
        discourses = _parse_discourse_set(args.discourse)
        ranking = report.top_for_discourse(table, discourses, args.top or 5)
        key = ",".join(sorted(d.code for d in discourses))
        print(f"top emotion sets for {{{key}}}:")
        for emotions, ri in ranking:
            print(f"  {{{', '.join(sorted(emotions))}}}: {ri:.2f}")
    if not (args.prob_table or args.heatmap or args.discourse):
        sys.stdout.write(report.diagnostics_text(table))
    return 0


def _cmd_conformance(args: argparse.Namespace) -> int:
    results = conformance.run_all()
    rules = results["rules"]
    dialogue = results["dialogue"]
    numeric = results["numeric_example"]
    print(f"fusion rules: {rules['passed']}/{rules['total']}"
          + (f" FAILED {rules['failures']}" if rules["failures"] else ""))
    print(f"reference dialogue sentences: {dialogue['passed']}/{dialogue['total']}"
          + (f" FAILED {dialogue['failures']}" if dialogue["failures"] else ""))
    print("numeric example: " + ("OK" if numeric["ok"] else
                                 f"FAILED {numeric['checks']}"))
    if not results["ok"]:
        return 2
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import (
        AnnotationStore,
        create_app,
        parse_token_map,
        token_map_from_env,
    )

    corpus = load_corpus(args.corpus)
    tokens = parse_token_map(args.tokens) if args.tokens else token_map_from_env()
    store = AnnotationStore(args.store)
    app = create_app(corpus, store, tokens, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demrel",
        description="Discourse-emotion annotation, vote fusion, and "
                    "relation-intensity statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a dialogue corpus")
    p.add_argument("--dialogues", required=True, help="input corpus file")
    p.add_argument("--format", choices=["dailydialog", "json"],
                   default="dailydialog")
    p.add_argument("--ids", help="optional sidecar with one dialogue id per line")
    p.add_argument("--out", required=True, help="corpus JSON output")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("aggregate", help="fuse ballots into common-user records")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ballots", required=True, help="ballot JSONL file")
    p.add_argument("--out", required=True, help="fused records output")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("relate", help="compute the relation table")
    p.add_argument("--fused", required=True)
    p.add_argument("--tau", type=float, default=0.33,
                   help="emotion presence threshold")
    p.add_argument("--max-emotions", type=int, default=3)
    p.add_argument("--max-discourses", type=int, default=5)
    p.add_argument("--weight-mode", choices=["product", "sum"], default="product")
    p.add_argument("--normalize", choices=["per-class", "global"],
                   default="per-class")
    p.add_argument("--out", required=True, help="relation table output")
    p.set_defaults(func=_cmd_relate)

    p = sub.add_parser("report", help="export tables and rankings")
    p.add_argument("--relations", required=True)
    p.add_argument("--prob-table", help="probability matrix CSV output")
    p.add_argument("--heatmap", help="intensity matrix JSON output "
                                     "(a CSV twin is written alongside)")
    p.add_argument("--top", type=int, help="keep top-k intensities per emotion set")
    p.add_argument("--discourse",
                   help="comma-separated discourse codes to rank, e.g. 'H' or 'H,M'")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("conformance",
                       help="run the reference vectors; exit 2 on mismatch")
    p.set_defaults(func=_cmd_conformance)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--corpus", required=True)
    p.add_argument("--store", required=True, help="append-only ballot log path")
    p.add_argument("--ui-dir", help="directory with the built UI bundle")
    p.add_argument("--tokens",
                   help="voter=token pairs, comma-separated "
                        "(default: DEMREL_TOKENS env var)")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
