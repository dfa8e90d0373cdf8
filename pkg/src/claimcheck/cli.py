"""Operator command line: ingestion, training, evaluation, queries, serving.

Exit codes are uniform: 0 success, 1 usage error, 2 runtime or data error.
Every command prints line-delimited JSON under --json and a human-readable
report otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import checkworthy, classifier, corpus as corpus_mod, headline, similarity
from .config import ConfigError, load_settings


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; this tool reserves 2 for
    # runtime failures, so usage errors must exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(args, payload: dict, human: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


def _load_aliases(path: str | None) -> dict[str, str] | None:
    if path is None:
        return None
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise corpus_mod.CorpusError("alias file must hold a JSON object")
    return {str(k): str(v) for k, v in data.items()}


def _write_reject_report(path: str, rejects) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for reject in rejects:
            fh.write(
                json.dumps(
                    {
                        "line_no": reject.line_no,
                        "record": reject.record,
                        "reason": reject.reason,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def _merge_into_output(new_corpus, output: str):
    out_path = Path(output)
    if out_path.exists():
        existing = corpus_mod.load_corpus(out_path)
        merged = existing.merge(new_corpus)
    else:
        merged = new_corpus
    corpus_mod.write_corpus(merged, out_path)
    return merged


def _print_stats(args, merged, ingested: int, rejected: int) -> None:
    stats = corpus_mod.corpus_stats(merged)
    payload = {
        "ingested": ingested,
        "rejected": rejected,
        "corpus": stats.to_dict(),
    }
    human = (
        f"ingested {ingested} claims ({rejected} rejected); "
        f"corpus now {stats.total} claims "
        f"({stats.by_verdict.get('true', 0)} true / {stats.by_verdict.get('false', 0)} false)"
    )
    _emit(args, payload, human)


def cmd_ingest_feed(args) -> int:
    result = corpus_mod.ingest_factcheck_feed(args.input, aliases=_load_aliases(args.aliases))
    if args.reject_report:
        _write_reject_report(args.reject_report, result.rejects)
    new_corpus = corpus_mod.Corpus.from_claims(
        result.claims,
        provenance=[corpus_mod.provenance_for(args.input, len(result.claims))],
    )
    merged = _merge_into_output(new_corpus, args.output)
    _print_stats(args, merged, len(result.claims), len(result.rejects))
    return 0


def cmd_ingest_articles(args) -> int:
    if args.scorer == "remote":
        url = args.scorer_url or os.environ.get("SCORER_URL")
        if not url:
            print(
                "ingest-articles: remote scorer needs --scorer-url or SCORER_URL",
                file=sys.stderr,
            )
            return 1
        scorer = checkworthy.remote_scorer(checkworthy.ScorerEndpoint(url=url))
    else:
        scorer = checkworthy.heuristic_score
    result = corpus_mod.ingest_articles(args.input, scorer, threshold=args.threshold)
    if args.reject_report:
        _write_reject_report(args.reject_report, result.rejects)
    new_corpus = corpus_mod.Corpus.from_claims(
        result.claims,
        provenance=[corpus_mod.provenance_for(args.input, len(result.claims))],
    )
    merged = _merge_into_output(new_corpus, args.output)
    _print_stats(args, merged, len(result.claims), len(result.rejects))
    return 0


def cmd_train(args) -> int:
    loaded = corpus_mod.load_corpus(args.corpus)
    config = classifier.TrainConfig(
        epochs=args.epochs, learning_rate=args.lr, l2=args.l2, seed=args.seed
    )
    model = classifier.train(loaded.claims, config)
    classifier.save_model(model, args.model)
    n_true = sum(1 for c in loaded.claims if c.verdict is corpus_mod.Verdict.TRUE)
    payload = {
        "model": str(args.model),
        "claims": len(loaded),
        "true": n_true,
        "false": len(loaded) - n_true,
        "vocabulary": len(model.vocabulary),
        "seed": args.seed,
    }
    human = (
        f"trained on {len(loaded)} claims ({n_true} true / {len(loaded) - n_true} false), "
        f"vocabulary {len(model.vocabulary)}, wrote {args.model}"
    )
    _emit(args, payload, human)
    return 0


def cmd_crossval(args) -> int:
    loaded = corpus_mod.load_corpus(args.corpus)
    config = classifier.TrainConfig(seed=args.seed)
    trainer = classifier.train_majority if args.dummy_majority else classifier.train
    report = classifier.cross_validate(loaded.claims, k=args.k, config=config, trainer=trainer)
    if args.json:
        for fold, accuracy in enumerate(report.fold_accuracies):
            print(
                json.dumps(
                    {
                        "fold": fold,
                        "accuracy": accuracy,
                        "confusion": report.fold_confusions[fold].to_dict(),
                    },
                    sort_keys=True,
                )
            )
        print(
            json.dumps(
                {"k": report.k, "mean_accuracy": report.mean_accuracy, "seed": report.seed},
                sort_keys=True,
            )
        )
    else:
        for fold, accuracy in enumerate(report.fold_accuracies):
            print(f"fold {fold:2d}: accuracy {accuracy:.4f}")
        print(f"mean accuracy over {report.k} folds: {report.mean_accuracy:.4f}")
    return 0


def cmd_classify(args) -> int:
    model = classifier.load_model(args.model)
    score = checkworthy.heuristic_score(args.headline)
    if score < args.threshold:
        _emit(
            args,
            {"checkworthy": False, "score": score, "verdict": None, "probability": None},
            f"not check-worthy (score {score:.2f} < {args.threshold})",
        )
        return 0
    verdict, probability = model.predict(args.headline)
    _emit(
        args,
        {
            "checkworthy": True,
            "score": score,
            "verdict": int(verdict),
            "probability": probability,
        },
        f"verdict {int(verdict)} (probability {probability:.4f})",
    )
    return 0


def cmd_similar(args) -> int:
    loaded = corpus_mod.load_corpus(args.corpus)
    page = similarity.get_similar_claims(
        args.headline,
        loaded,
        threshold=args.threshold,
        page_index=args.page,
        page_size=args.page_size,
    )
    if args.json:
        for match in page.items:
            print(
                json.dumps(
                    {
                        "claim_text": match.claim.text,
                        "original_label": match.claim.original_label.value,
                        "verdict": int(match.claim.verdict),
                        "score": match.score,
                    },
                    sort_keys=True,
                )
            )
        print(
            json.dumps(
                {
                    "page": page.page_index,
                    "page_size": page.page_size,
                    "total_matches": page.total_matches,
                },
                sort_keys=True,
            )
        )
    else:
        for match in page.items:
            print(f"{match.score:3d}  [{match.claim.original_label.value}]  {match.claim.text}")
        print(
            f"page {page.page_index} of {page.total_matches} total matches "
            f"(page size {page.page_size})"
        )
    return 0


def cmd_extract_headline(args) -> int:
    page = headline.fetch_page(args.url)
    extracted = headline.extract_headline(page.body)
    payload = {"headline": extracted.text}
    human = f"headline: {extracted.text}"
    if extracted.author is not None:
        payload["author"] = extracted.author
        human += f"\nauthor: {extracted.author}"
    _emit(args, payload, human)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    settings = load_settings(args.config)
    app = create_app(settings)
    uvicorn.run(app, host=args.host, port=settings.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="claimcheck", description="Claim verification toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="line-delimited JSON output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest-feed", parents=[common], help="ingest a fact-check feed snapshot")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--reject-report")
    p.add_argument("--aliases", help="JSON object mapping feed rating phrases to labels")
    p.set_defaults(func=cmd_ingest_feed)

    p = sub.add_parser(
        "ingest-articles", parents=[common], help="ingest an authoritative-article dump"
    )
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--scorer", choices=("local", "remote"), default="local")
    p.add_argument("--scorer-url")
    p.add_argument("--reject-report")
    p.set_defaults(func=cmd_ingest_articles)

    p = sub.add_parser("train", parents=[common], help="train the claim classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=classifier.TrainConfig.epochs)
    p.add_argument("--lr", type=float, default=classifier.TrainConfig.learning_rate)
    p.add_argument("--l2", type=float, default=classifier.TrainConfig.l2)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("crossval", parents=[common], help="stratified k-fold accuracy")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--dummy-majority",
        action="store_true",
        help="evaluate the majority-class baseline instead of the trained model",
    )
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("classify", parents=[common], help="classify one headline")
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("headline")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("similar", parents=[common], help="find similar vetted claims")
    p.add_argument("--corpus", required=True)
    p.add_argument("--threshold", type=int, default=similarity.DEFAULT_THRESHOLD)
    p.add_argument("--page", type=int, default=0)
    p.add_argument("--page-size", type=int, default=similarity.DEFAULT_PAGE_SIZE)
    p.add_argument("headline")
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("extract-headline", parents=[common], help="fetch a page headline")
    p.add_argument("url")
    p.set_defaults(func=cmd_extract_headline)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (
        corpus_mod.CorpusError,
        classifier.ClassifierError,
        headline.FetchError,
        headline.NoHeadline,
        headline.MalformedUrl,
        checkworthy.ScorerUnavailable,
        checkworthy.ScorerMalformed,
        ConfigError,
        OSError,
        ValueError,
        json.JSONDecodeError,
    ) as exc:
        print(f"claimcheck {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
