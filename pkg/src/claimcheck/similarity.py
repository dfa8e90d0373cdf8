"""Approximate word-overlap similarity between headlines and vetted claims.

The score is token-level: a maximum bipartite matching pairs up tokens that
are equal or within one edit of each other, and the matching size is
normalized dice-style to an integer in 0..100. Exact matching (augmenting
paths) rather than greedy pairing keeps the score symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .classifier import tokenize
from .corpus import Corpus, VettedClaim

DEFAULT_THRESHOLD = 50
DEFAULT_PAGE_SIZE = 5

# Tokens shorter than this must match exactly; fuzz on short words
# (cat/car, is/in) produces junk pairs.
MIN_FUZZY_LENGTH = 5


def levenshtein(a: str, b: str) -> int:
    """Plain two-row edit distance; tokens are short so O(len*len) is fine."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            cost = 0 if ch_a == ch_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def token_match(a: str, b: str) -> bool:
    """Equal tokens always match; length-5+ tokens also match within one edit."""
    if a == b:
        return True
    if len(a) < MIN_FUZZY_LENGTH or len(b) < MIN_FUZZY_LENGTH:
        return False
    if abs(len(a) - len(b)) > 1:
        return False
    return levenshtein(a, b) <= 1


def max_matching_size(left: Sequence[str], right: Sequence[str]) -> int:
    """Maximum bipartite matching between token occurrence lists.

    Token multiplicity matters: each occurrence can pair with at most one
    occurrence on the other side. Standard augmenting-path search; token
    counts per sentence are small enough that exactness is cheap.
    """
    adjacency = [
        [j for j, token_b in enumerate(right) if token_match(token_a, token_b)]
        for token_a in left
    ]
    match_of_right: list[int | None] = [None] * len(right)

    def try_augment(i: int, visited: set[int]) -> bool:
        for j in adjacency[i]:
            if j in visited:
                continue
            visited.add(j)
            if match_of_right[j] is None or try_augment(match_of_right[j], visited):
                match_of_right[j] = i
                return True
        return False

    size = 0
    for i in range(len(left)):
        if try_augment(i, set()):
            size += 1
    return size


def similarity_score(a: str, b: str) -> int:
    """Dice-style overlap score in 0..100, rounded half up."""
    tokens_a = tokenize(a)
    tokens_b = tokenize(b)
    total = len(tokens_a) + len(tokens_b)
    if total == 0:
        return 0
    m = max_matching_size(tokens_a, tokens_b)
    # round(100 * 2m / total) with ties away from zero, in exact integer
    # arithmetic so no float rounding can flip a threshold comparison.
    return (400 * m + total) // (2 * total)


@dataclass(frozen=True)
class SimilarMatch:
    claim: VettedClaim
    score: int


@dataclass(frozen=True)
class Page:
    items: tuple[SimilarMatch, ...]
    page_index: int
    page_size: int
    total_matches: int


def rank_matches(
    headline: str, claims: Sequence[VettedClaim], threshold: int = DEFAULT_THRESHOLD
) -> list[SimilarMatch]:
    """All claims scoring strictly above threshold, best first, id tie-break."""
    matches = []
    for claim in claims:
        score = similarity_score(headline, claim.text)
        if score > threshold:
            matches.append(SimilarMatch(claim=claim, score=score))
    matches.sort(key=lambda match: (-match.score, match.claim.id))
    return matches


def get_similar_claims(
    headline: str,
    corpus: Corpus,
    threshold: int = DEFAULT_THRESHOLD,
    page_index: int = 0,
    page_size: int = DEFAULT_PAGE_SIZE,
) -> Page:
    """Paginated matches above threshold.

    A page index past the end yields an empty page that still reports the
    true total, so clients can recover from a stale cursor.
    """
    if page_size < 1:
        raise ValueError("page_size must be at least 1")
    if page_index < 0:
        raise ValueError("page_index must be non-negative")
    matches = rank_matches(headline, corpus.claims, threshold)
    start = page_index * page_size
    return Page(
        items=tuple(matches[start : start + page_size]),
        page_index=page_index,
        page_size=page_size,
        total_matches=len(matches),
    )
