"""Vetted-claim corpus: rating labels, claim records, and file-based ingestion.

Two ingestion paths produce :class:`VettedClaim` records:

* a fact-check feed snapshot (JSON Lines, one record per line with
  ``claim_text`` / ``rating`` / ``language`` / ``source_url`` / ``review_url``),
  carrying the original accuracy rating of each claim, and
* an authoritative-article dump (JSON Lines with ``url`` / ``title`` /
  ``body``), whose sentences are filtered by a check-worthiness scorer and
  ingested as true claims.

Ratings collapse to a binary verdict; long textual ratings are first reduced
to a short phrase through a configurable alias table.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping


class CorpusError(Exception):
    """Base class for corpus ingestion errors."""


class UnknownLabel(CorpusError):
    """Rating string outside the recognized label table."""

    def __init__(self, label: str):
        super().__init__(f"unknown rating label: {label!r}")
        self.label = label


class MalformedFeed(CorpusError):
    """Feed document that cannot be parsed at all."""


class MalformedArticle(CorpusError):
    """Article document that cannot be parsed."""


class Verdict(enum.IntEnum):
    """Binary accuracy verdict, serialized as 1 (true) and 0 (false)."""

    FALSE = 0
    TRUE = 1


class RatingLabel(str, enum.Enum):
    """The eleven source rating labels accepted at ingestion."""

    NO_EVIDENCE = "no evidence"
    FALSE = "false"
    INACCURATE = "inaccurate"
    MOSTLY_FALSE = "mostly false"
    MISLEADING = "misleading"
    INCORRECT = "incorrect"
    HALF_TRUE = "half true"
    NOT_REQUIRED = "not required"
    UNSUPPORTED = "unsupported"
    NEEDS_CONTEXT = "needs context"
    TRUE = "true"


class ClaimSource(str, enum.Enum):
    FACT_CHECK_FEED = "fact-check-feed"
    AUTHORITATIVE_ARTICLE = "authoritative-article"


_SEPARATORS = re.compile(r"[-_\s]+")


def _canon(label: str) -> str:
    """Canonical lookup key: trimmed, case-folded, separators collapsed."""
    return _SEPARATORS.sub(" ", label.strip().casefold()).strip()


_LABEL_BY_KEY = {_canon(label.value): label for label in RatingLabel}

# Every label except "true" collapses to a false verdict.
_VERDICT_BY_LABEL = {
    label: (Verdict.TRUE if label is RatingLabel.TRUE else Verdict.FALSE)
    for label in RatingLabel
}

# Long textual ratings seen in feeds, reduced to a short phrase before label
# lookup. Deliberately minimal; callers extend it per feed.
DEFAULT_RATING_ALIASES: dict[str, str] = {
    "there is no evidence this is true.": "no evidence",
    "there is no evidence this is true": "no evidence",
}


def parse_rating_label(label: str) -> RatingLabel:
    """Match a rating string against the label table (case/whitespace lax)."""
    try:
        return _LABEL_BY_KEY[_canon(label)]
    except KeyError:
        raise UnknownLabel(label) from None


def normalize_label(label: str) -> Verdict:
    """Collapse a rating label to its binary verdict.

    Raises UnknownLabel for anything outside the eleven-label table.
    """
    return _VERDICT_BY_LABEL[parse_rating_label(label)]


_SENTENCE_BOUNDARY = re.compile(r"(?<=[.?!])")


def split_sentences(text: str) -> list[str]:
    """Split a document body at sentence-ending punctuation (. ? !).

    Deliberately naive: no abbreviation handling, terminal punctuation stays
    on each fragment, empty fragments are dropped.
    """
    return [frag.strip() for frag in _SENTENCE_BOUNDARY.split(text) if frag.strip()]


def normalized_text(text: str) -> str:
    """Deduplication key: whitespace-collapsed, case-folded claim text."""
    return " ".join(text.split()).casefold()


def claim_id(text: str) -> str:
    """Stable identifier derived from the claim's deduplication key."""
    return hashlib.sha256(normalized_text(text).encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class VettedClaim:
    """One accuracy-rated claim with its source and collapsed verdict."""

    id: str
    text: str
    source: ClaimSource
    source_url: str
    original_label: RatingLabel
    verdict: Verdict
    checkworthiness: float | None = None
    language: str = "en"

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("claim text must be non-empty")
        if self.verdict != _VERDICT_BY_LABEL[self.original_label]:
            raise ValueError(
                f"verdict {self.verdict!r} inconsistent with label {self.original_label!r}"
            )
        if self.source is ClaimSource.AUTHORITATIVE_ARTICLE:
            if self.verdict is not Verdict.TRUE:
                raise ValueError("authoritative-article claims must carry a true verdict")
            if self.checkworthiness is None or not self.checkworthiness > 0.8:
                raise ValueError(
                    "authoritative-article claims require checkworthiness > 0.8"
                )
        if self.checkworthiness is not None and not 0.0 <= self.checkworthiness <= 1.0:
            raise ValueError("checkworthiness outside [0, 1]")

    def to_record(self) -> dict:
        record = {
            "id": self.id,
            "text": self.text,
            "source": self.source.value,
            "source_url": self.source_url,
            "original_label": self.original_label.value,
            "verdict": int(self.verdict),
            "checkworthiness": self.checkworthiness,
            "language": self.language,
        }
        return record

    @classmethod
    def from_record(cls, record: Mapping) -> "VettedClaim":
        return cls(
            id=record["id"],
            text=record["text"],
            source=ClaimSource(record["source"]),
            source_url=record.get("source_url", ""),
            original_label=RatingLabel(record["original_label"]),
            verdict=Verdict(record["verdict"]),
            checkworthiness=record.get("checkworthiness"),
            language=record.get("language", "en"),
        )


def make_claim(
    text: str,
    *,
    source: ClaimSource,
    source_url: str,
    original_label: RatingLabel,
    checkworthiness: float | None = None,
    language: str = "en",
) -> VettedClaim:
    """Build a claim with trimmed text, derived id and derived verdict."""
    text = text.strip()
    return VettedClaim(
        id=claim_id(text),
        text=text,
        source=source,
        source_url=source_url,
        original_label=original_label,
        verdict=_VERDICT_BY_LABEL[original_label],
        checkworthiness=checkworthiness,
        language=language,
    )


@dataclass(frozen=True)
class ProvenanceEntry:
    path: str
    sha256: str
    ingested_at: float
    records: int


@dataclass
class Corpus:
    """Immutable-after-ingestion collection of deduplicated vetted claims."""

    claims: list[VettedClaim] = field(default_factory=list)
    provenance: list[ProvenanceEntry] = field(default_factory=list)

    @classmethod
    def from_claims(
        cls,
        claims: Iterable[VettedClaim],
        provenance: Iterable[ProvenanceEntry] = (),
    ) -> "Corpus":
        """Deduplicate by normalized text (first occurrence wins)."""
        seen: set[str] = set()
        unique: list[VettedClaim] = []
        for claim in claims:
            key = normalized_text(claim.text)
            if key in seen:
                continue
            seen.add(key)
            unique.append(claim)
        return cls(claims=unique, provenance=list(provenance))

    def merge(self, other: "Corpus") -> "Corpus":
        return Corpus.from_claims(
            list(self.claims) + list(other.claims),
            list(self.provenance) + list(other.provenance),
        )

    def __len__(self) -> int:
        return len(self.claims)


@dataclass(frozen=True)
class RejectedRecord:
    """A quarantined input record and the reason it was refused."""

    line_no: int
    record: dict | str
    reason: str


@dataclass
class IngestResult:
    claims: list[VettedClaim]
    rejects: list[RejectedRecord] = field(default_factory=list)


def _is_english(language: str) -> bool:
    tag = language.strip().lower()
    return tag == "en" or tag.startswith("en-") or tag.startswith("en_")


def _read_jsonl(path: Path) -> Iterable[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                yield line_no, line


def ingest_factcheck_feed(
    path: str | Path,
    aliases: Mapping[str, str] | None = None,
) -> IngestResult:
    """Ingest a fact-check feed snapshot into vetted claims.

    Non-English records are dropped; records with unrecognized ratings or
    empty claim text are quarantined into the reject list. A line that is not
    a JSON object with the required fields aborts the whole feed with
    MalformedFeed.
    """
    path = Path(path)
    alias_table = dict(DEFAULT_RATING_ALIASES)
    if aliases:
        alias_table.update({_canon(k): v for k, v in aliases.items()})

    claims: list[VettedClaim] = []
    rejects: list[RejectedRecord] = []
    seen: set[str] = set()
    for line_no, line in _read_jsonl(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedFeed(f"{path}:{line_no}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise MalformedFeed(f"{path}:{line_no}: record is not an object")
        missing = {"claim_text", "rating", "language"} - record.keys()
        if missing:
            raise MalformedFeed(
                f"{path}:{line_no}: missing fields: {', '.join(sorted(missing))}"
            )

        if not _is_english(str(record["language"])):
            continue

        text = str(record["claim_text"]).strip()
        if not text:
            rejects.append(RejectedRecord(line_no, record, "empty claim text"))
            continue

        rating = str(record["rating"])
        rating = alias_table.get(_canon(rating), rating)
        try:
            label = parse_rating_label(rating)
        except UnknownLabel as exc:
            rejects.append(RejectedRecord(line_no, record, str(exc)))
            continue

        key = normalized_text(text)
        if key in seen:
            continue
        seen.add(key)
        claims.append(
            make_claim(
                text,
                source=ClaimSource.FACT_CHECK_FEED,
                source_url=str(record.get("source_url") or record.get("review_url") or ""),
                original_label=label,
                language=str(record["language"]),
            )
        )
    return IngestResult(claims=claims, rejects=rejects)


def ingest_articles(
    path: str | Path,
    scorer: Callable[[str], float],
    threshold: float = 0.8,
) -> IngestResult:
    """Ingest an authoritative-article dump.

    Each article body is split into sentences; sentences whose
    check-worthiness score is strictly greater than ``threshold`` become true
    claims. Malformed article records are quarantined per document.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    path = Path(path)

    claims: list[VettedClaim] = []
    rejects: list[RejectedRecord] = []
    seen: set[str] = set()
    for line_no, line in _read_jsonl(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            rejects.append(RejectedRecord(line_no, line.strip(), f"invalid JSON: {exc}"))
            continue
        if not isinstance(record, dict) or "url" not in record or "body" not in record:
            rejects.append(
                RejectedRecord(line_no, record if isinstance(record, dict) else line.strip(),
                               "missing url/body fields")
            )
            continue
        body = record["body"]
        if not isinstance(body, str):
            rejects.append(RejectedRecord(line_no, record, "body is not text"))
            continue

        for sentence in split_sentences(body):
            score = scorer(sentence)
            if not score > threshold:
                continue
            key = normalized_text(sentence)
            if key in seen:
                continue
            seen.add(key)
            claims.append(
                make_claim(
                    sentence,
                    source=ClaimSource.AUTHORITATIVE_ARTICLE,
                    source_url=str(record["url"]),
                    original_label=RatingLabel.TRUE,
                    checkworthiness=score,
                )
            )
    return IngestResult(claims=claims, rejects=rejects)


@dataclass
class CorpusStats:
    total: int
    by_verdict: dict[str, int]
    by_source: dict[str, int]
    by_label: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "by_verdict": self.by_verdict,
            "by_source": self.by_source,
            "by_label": self.by_label,
        }


def corpus_stats(corpus: Corpus) -> CorpusStats:
    # by_verdict always carries both keys; the other breakdowns only list
    # values actually present
    by_verdict: Counter[str] = Counter({"false": 0, "true": 0})
    by_source: Counter[str] = Counter()
    by_label: Counter[str] = Counter()
    for claim in corpus.claims:
        by_verdict[claim.verdict.name.lower()] += 1
        by_source[claim.source.value] += 1
        by_label[claim.original_label.value] += 1
    return CorpusStats(
        total=len(corpus.claims),
        by_verdict=dict(by_verdict),
        by_source=dict(by_source),
        by_label=dict(by_label),
    )


def corpus_digest(corpus: Corpus) -> str:
    """Order-sensitive digest of claim ids and verdicts."""
    hasher = hashlib.sha256()
    for claim in corpus.claims:
        hasher.update(f"{claim.id}:{int(claim.verdict)}\n".encode("utf-8"))
    return hasher.hexdigest()


def provenance_for(path: str | Path, records: int) -> ProvenanceEntry:
    data = Path(path).read_bytes()
    return ProvenanceEntry(
        path=str(path),
        sha256=hashlib.sha256(data).hexdigest(),
        ingested_at=time.time(),
        records=records,
    )


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for claim in corpus.claims:
            fh.write(json.dumps(claim.to_record(), ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> Corpus:
    claims = []
    for line_no, line in _read_jsonl(Path(path)):
        try:
            claims.append(VettedClaim.from_record(json.loads(line)))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CorpusError(f"{path}:{line_no}: bad claim record: {exc}") from exc
    return Corpus.from_claims(claims)
