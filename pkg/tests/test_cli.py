import json
import os
import socket
import subprocess
import sys
import time

import httpx
import pytest

import corpusgen
from webstub import StubSite
from claimcheck.cli import main


def run_cli(*argv):
    return main(list(argv))


def read_jsonl(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture
def corpus_file(tmp_path, feed_path, articles_path, capsys):
    """Corpus built through the CLI itself: feed then articles, merged."""
    out = tmp_path / "corpus.jsonl"
    assert run_cli("ingest-feed", "--input", str(feed_path), "--output", str(out)) == 0
    assert (
        run_cli("ingest-articles", "--input", str(articles_path), "--output", str(out))
        == 0
    )
    capsys.readouterr()
    return out


def test_ingest_feed_counts(tmp_path, feed_path, capsys):
    out = tmp_path / "corpus.jsonl"
    code = run_cli("ingest-feed", "--input", str(feed_path), "--output", str(out), "--json")
    assert code == 0
    payload = read_jsonl(capsys)[-1]
    assert payload["ingested"] == corpusgen.FEED_CLAIMS
    assert payload["corpus"]["total"] == corpusgen.FEED_CLAIMS
    assert payload["corpus"]["by_verdict"]["true"] == corpusgen.FEED_TRUE
    assert len(out.read_text().splitlines()) == corpusgen.FEED_CLAIMS


def test_ingest_feed_missing_input(tmp_path, capsys):
    code = run_cli(
        "ingest-feed",
        "--input",
        str(tmp_path / "nope.jsonl"),
        "--output",
        str(tmp_path / "out.jsonl"),
    )
    assert code == 2


def test_ingest_feed_reject_report(tmp_path, capsys):
    feed = corpusgen.write_feed_with_unknown_label(tmp_path / "feed.jsonl")
    out = tmp_path / "corpus.jsonl"
    report = tmp_path / "rejects.jsonl"
    code = run_cli(
        "ingest-feed",
        "--input",
        str(feed),
        "--output",
        str(out),
        "--reject-report",
        str(report),
        "--json",
    )
    assert code == 0
    payload = read_jsonl(capsys)[-1]
    assert payload["ingested"] == corpusgen.FEED_CLAIMS - 1
    assert payload["rejected"] == 1
    rejects = [json.loads(l) for l in report.read_text().splitlines()]
    assert len(rejects) == 1
    assert "pants on fire" in rejects[0]["reason"]


def test_ingest_articles_appends_to_corpus(tmp_path, feed_path, articles_path, capsys):
    out = tmp_path / "corpus.jsonl"
    run_cli("ingest-feed", "--input", str(feed_path), "--output", str(out), "--json")
    capsys.readouterr()
    code = run_cli(
        "ingest-articles", "--input", str(articles_path), "--output", str(out), "--json"
    )
    assert code == 0
    payload = read_jsonl(capsys)[-1]
    assert payload["ingested"] == corpusgen.ARTICLE_CLAIMS
    assert payload["corpus"]["total"] == corpusgen.TOTAL_CLAIMS
    assert payload["corpus"]["by_verdict"] == {
        "true": corpusgen.TRUE_CLAIMS,
        "false": corpusgen.FALSE_CLAIMS,
    }


def test_ingest_articles_threshold_one(tmp_path, articles_path, capsys):
    out = tmp_path / "corpus.jsonl"
    code = run_cli(
        "ingest-articles",
        "--input",
        str(articles_path),
        "--output",
        str(out),
        "--threshold",
        "1.0",
        "--json",
    )
    assert code == 0
    assert read_jsonl(capsys)[-1]["ingested"] == 0


def test_ingest_articles_remote_scorer(tmp_path, articles_path, capsys):
    with StubSite() as site:
        site.add_dynamic(
            "/score", lambda query: (200, "application/json", b'{"score": 0.95}')
        )
        out = tmp_path / "corpus.jsonl"
        code = run_cli(
            "ingest-articles",
            "--input",
            str(articles_path),
            "--output",
            str(out),
            "--scorer",
            "remote",
            "--scorer-url",
            site.base_url + "/score",
            "--json",
        )
        assert code == 0
        # the stub scores every sentence 0.95, so fillers pass too
        assert read_jsonl(capsys)[-1]["ingested"] > corpusgen.ARTICLE_CLAIMS


def test_ingest_articles_remote_scorer_unreachable(tmp_path, articles_path, capsys):
    code = run_cli(
        "ingest-articles",
        "--input",
        str(articles_path),
        "--output",
        str(tmp_path / "corpus.jsonl"),
        "--scorer",
        "remote",
        "--scorer-url",
        "http://127.0.0.1:9/score",
    )
    assert code == 2


def test_ingest_articles_remote_scorer_needs_url(tmp_path, articles_path, monkeypatch, capsys):
    monkeypatch.delenv("SCORER_URL", raising=False)
    code = run_cli(
        "ingest-articles",
        "--input",
        str(articles_path),
        "--output",
        str(tmp_path / "corpus.jsonl"),
        "--scorer",
        "remote",
    )
    assert code == 1


def test_train_writes_model(tmp_path, corpus_file, capsys):
    model = tmp_path / "model.json"
    code = run_cli(
        "train", "--corpus", str(corpus_file), "--model", str(model), "--seed", "3", "--json"
    )
    assert code == 0
    payload = read_jsonl(capsys)[-1]
    assert payload["claims"] == corpusgen.TOTAL_CLAIMS
    assert model.exists()


def test_train_single_class_fails(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    feed = tmp_path / "feed.jsonl"
    record = {"claim_text": "only claim here", "rating": "true", "language": "en"}
    feed.write_text(json.dumps(record) + "\n")
    run_cli("ingest-feed", "--input", str(feed), "--output", str(corpus))
    capsys.readouterr()
    code = run_cli("train", "--corpus", str(corpus), "--model", str(tmp_path / "m.json"))
    assert code == 2


def test_train_deterministic_across_runs(tmp_path, corpus_file, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run_cli("train", "--corpus", str(corpus_file), "--model", str(a), "--seed", "11")
    run_cli("train", "--corpus", str(corpus_file), "--model", str(b), "--seed", "11")
    assert a.read_bytes() == b.read_bytes()


def test_crossval_majority_dummy(corpus_file, capsys):
    code = run_cli(
        "crossval", "--corpus", str(corpus_file), "--k", "10", "--seed", "5",
        "--dummy-majority", "--json",
    )
    assert code == 0
    lines = read_jsonl(capsys)
    assert len(lines) == 11  # 10 folds + summary
    assert lines[-1]["mean_accuracy"] == pytest.approx(0.7559, abs=0.01)


def test_crossval_trained_model(corpus_file, capsys):
    code = run_cli(
        "crossval", "--corpus", str(corpus_file), "--k", "10", "--seed", "5", "--json"
    )
    assert code == 0
    assert read_jsonl(capsys)[-1]["mean_accuracy"] > 0.7556


def test_crossval_k_too_large(corpus_file, capsys):
    code = run_cli("crossval", "--corpus", str(corpus_file), "--k", "56", "--seed", "1")
    assert code == 2


def test_classify_checkworthy_headline(tmp_path, corpus_file, capsys):
    model = tmp_path / "model.json"
    run_cli("train", "--corpus", str(corpus_file), "--model", str(model))
    capsys.readouterr()
    code = run_cli(
        "classify",
        "--model",
        str(model),
        "officials confirmed 847 new infections in the arden district this week",
        "--json",
    )
    assert code == 0
    payload = read_jsonl(capsys)[-1]
    assert payload["checkworthy"] is True
    assert payload["verdict"] in (0, 1)


def test_classify_non_checkworthy_headline(tmp_path, corpus_file, capsys):
    model = tmp_path / "model.json"
    run_cli("train", "--corpus", str(corpus_file), "--model", str(model))
    capsys.readouterr()
    code = run_cli("classify", "--model", str(model), "Wow!", "--json")
    assert code == 0
    payload = read_jsonl(capsys)[-1]
    assert payload == {
        "checkworthy": False,
        "score": pytest.approx(0.30),
        "verdict": None,
        "probability": None,
    }


def test_classify_missing_model(tmp_path, capsys):
    code = run_cli("classify", "--model", str(tmp_path / "absent.json"), "anything")
    assert code == 2


def test_similar_finds_identical_claim(corpus_file, capsys):
    code = run_cli(
        "similar", "--corpus", str(corpus_file), corpusgen.TRUE_FEED_TEXT, "--json"
    )
    assert code == 0
    lines = read_jsonl(capsys)
    assert lines[0]["score"] == 100
    assert lines[0]["claim_text"] == corpusgen.TRUE_FEED_TEXT
    assert lines[-1]["total_matches"] >= 1


def test_extract_headline_command(capsys):
    with StubSite() as site:
        site.add("/a", body="<html><head><title>Stub headline</title></head></html>")
        code = run_cli("extract-headline", site.base_url + "/a", "--json")
        assert code == 0
        assert read_jsonl(capsys)[-1] == {"headline": "Stub headline"}


def test_extract_headline_fetch_error(capsys):
    code = run_cli("extract-headline", "http://127.0.0.1:9/x")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["no-such-command"],
        ["ingest-feed"],  # missing required flags
        ["crossval"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert run_cli(*argv) == 1


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_serve_answers_healthz(tmp_path, corpus_file):
    port = _free_port()
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "port": port,
                "data_dir": str(tmp_path / "data"),
                "corpus_path": str(corpus_file),
            }
        )
    )
    proc = subprocess.Popen(
        [
            sys.executable,
            "-c",
            "from claimcheck.cli import main; raise SystemExit(main())",
            "serve",
            "--config",
            str(config),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
        env={**os.environ, "PYTHONUNBUFFERED": "1"},
    )
    try:
        deadline = time.monotonic() + 15
        body = None
        while time.monotonic() < deadline:
            try:
                response = httpx.get(f"http://127.0.0.1:{port}/healthz", timeout=1.0)
                body = response.json()
                break
            except httpx.HTTPError:
                time.sleep(0.2)
        assert body is not None, "server never came up"
        assert body["status"] == "ok"
        assert body["corpus_size"] == corpusgen.TOTAL_CLAIMS
        assert body["model_loaded"] is False
    finally:
        proc.terminate()
        proc.wait(timeout=10)
