"""Check-worthiness scoring: does a sentence carry a verifiable factual claim?

The local heuristic is a deterministic stand-in for an external claim-detection
service so the corpus pipeline runs hermetically. A thin HTTP client is
provided for deployments that point at a real scorer endpoint.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Callable, Iterable

import httpx

# Verbs that commonly anchor a factual assertion. Fixed so scores are
# reproducible across runs and machines.
CLAIM_VERBS = frozenset({
    "is", "are", "was", "were", "has", "have",
    "causes", "caused", "spreads", "spread", "infected",
    "confirmed", "reported", "declared", "found",
    "kills", "prevents", "transmits",
})

BASE_SCORE = 0.30
_DIGIT_WEIGHT = 0.25
_VERB_WEIGHT = 0.20
_LENGTH_WEIGHT = 0.15
_CAPITAL_WEIGHT = 0.10
_LENGTH_RANGE = (8, 40)


def heuristic_score(sentence: str) -> float:
    """Deterministic check-worthiness score in [0, 1].

    Additive features over a 0.30 base: an ASCII digit anywhere (+0.25), a
    claim verb among the case-folded, punctuation-stripped tokens (+0.20),
    a token count between 8 and 40 inclusive (+0.15), and any token after
    the first starting with an uppercase letter (+0.10).
    """
    tokens = sentence.split()
    score = BASE_SCORE
    if any(ch.isdigit() and ch.isascii() for ch in sentence):
        score += _DIGIT_WEIGHT
    if any(tok.strip(string.punctuation).casefold() in CLAIM_VERBS for tok in tokens):
        score += _VERB_WEIGHT
    if _LENGTH_RANGE[0] <= len(tokens) <= _LENGTH_RANGE[1]:
        score += _LENGTH_WEIGHT
    if any(tok[:1].isupper() for tok in tokens[1:]):
        score += _CAPITAL_WEIGHT
    return min(1.0, max(0.0, score))


class ScorerUnavailable(Exception):
    """Remote scorer could not be reached (network error or timeout)."""


class ScorerMalformed(Exception):
    """Remote scorer replied with something that is not a valid score."""


@dataclass(frozen=True)
class ScorerEndpoint:
    """Remote check-worthiness scorer configuration."""

    url: str
    timeout: float = 5.0


def remote_score(sentence: str, endpoint: ScorerEndpoint) -> float:
    """Score a sentence through a remote endpoint returning ``{"score": x}``."""
    try:
        response = httpx.get(
            endpoint.url,
            params={"text": sentence},
            timeout=endpoint.timeout,
        )
    except httpx.HTTPError as exc:
        raise ScorerUnavailable(f"scorer request failed: {exc}") from exc
    if response.status_code >= 400:
        raise ScorerUnavailable(f"scorer returned HTTP {response.status_code}")
    try:
        payload = response.json()
        value = float(payload["score"])
    except (ValueError, TypeError, KeyError) as exc:
        raise ScorerMalformed(f"scorer response not a score object: {exc}") from exc
    if not 0.0 <= value <= 1.0:
        raise ScorerMalformed(f"score {value} outside [0, 1]")
    return value


def remote_scorer(endpoint: ScorerEndpoint) -> Callable[[str], float]:
    """Bind an endpoint into a plain ``sentence -> score`` callable."""
    return lambda sentence: remote_score(sentence, endpoint)


def filter_checkworthy(
    sentences: Iterable[str],
    scorer: Callable[[str], float],
    threshold: float,
) -> list[tuple[str, float]]:
    """Keep sentences scoring strictly above the threshold, in input order."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    retained = []
    for sentence in sentences:
        score = scorer(sentence)
        if score > threshold:
            retained.append((sentence, score))
    return retained
