from __future__ import annotations

import pytest

import corpusgen
from claimcheck import checkworthy, classifier
from claimcheck.corpus import Corpus, ingest_articles, ingest_factcheck_feed


@pytest.fixture(scope="session")
def feed_path(tmp_path_factory):
    return corpusgen.write_feed(tmp_path_factory.mktemp("feed") / "feed.jsonl")


@pytest.fixture(scope="session")
def articles_path(tmp_path_factory):
    return corpusgen.write_articles(tmp_path_factory.mktemp("articles") / "articles.jsonl")


@pytest.fixture(scope="session")
def mixed_corpus(feed_path, articles_path) -> Corpus:
    """225-claim corpus: 56 feed claims (1 true) + 169 article claims."""
    feed = ingest_factcheck_feed(feed_path)
    articles = ingest_articles(articles_path, checkworthy.heuristic_score, threshold=0.8)
    return Corpus.from_claims(feed.claims + articles.claims)


@pytest.fixture(scope="session")
def separable_claims():
    return corpusgen.separable_claims()


@pytest.fixture(scope="session")
def trained_model(mixed_corpus) -> classifier.ModelArtifact:
    return classifier.train(mixed_corpus.claims, classifier.TrainConfig(seed=0))
