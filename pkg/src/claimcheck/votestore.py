"""Durable per-URL vote tallies with one-vote-per-installation enforcement.

Storage is an append-only JSON Lines operation log plus a periodic snapshot.
Every mutation is fsynced to the log before it is acknowledged; startup
replays the log on top of the last snapshot. Votes are keyed by canonical
URL, and a tally can only be read by an installation with an active vote on
that URL (vote-before-view).
"""

from __future__ import annotations

import enum
import json
import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

SNAPSHOT_FORMAT_VERSION = 1

LOG_FILENAME = "votes.log"
SNAPSHOT_FILENAME = "votes.snapshot.json"

_INSTALLATION_RE = re.compile(r"[0-9a-f]{32}")


class VoteStoreError(Exception):
    pass


class AlreadyVoted(VoteStoreError):
    pass


class NotVoted(VoteStoreError):
    pass


class NotVotedYet(VoteStoreError):
    """Tally requested before the requester cast their own vote."""


class InvalidInstallation(VoteStoreError):
    pass


class InvalidVoteValue(VoteStoreError):
    pass


class CorruptLog(VoteStoreError):
    pass


class VoteValue(str, enum.Enum):
    FAKE = "fake"
    MIXED = "mixed"
    TRUE = "true"


def normalize_installation(installation: str) -> str:
    """Installation ids are 128-bit tokens as 32 hex chars, any case."""
    if not isinstance(installation, str):
        raise InvalidInstallation("installation id must be a string")
    lowered = installation.lower()
    if not _INSTALLATION_RE.fullmatch(lowered):
        raise InvalidInstallation(
            "installation id must be exactly 32 hexadecimal characters"
        )
    return lowered


def _coerce_value(value: "VoteValue | str") -> VoteValue:
    if isinstance(value, VoteValue):
        return value
    try:
        return VoteValue(value)
    except ValueError:
        raise InvalidVoteValue(
            f"vote value must be one of fake/mixed/true, got {value!r}"
        ) from None


@dataclass(frozen=True)
class VoteTally:
    fake_count: int = 0
    mixed_count: int = 0
    true_count: int = 0

    def to_dict(self) -> dict:
        return {
            "fake": self.fake_count,
            "mixed": self.mixed_count,
            "true": self.true_count,
        }


def _tally_of(votes: dict[str, VoteValue]) -> VoteTally:
    counts = {VoteValue.FAKE: 0, VoteValue.MIXED: 0, VoteValue.TRUE: 0}
    for value in votes.values():
        counts[value] += 1
    return VoteTally(
        fake_count=counts[VoteValue.FAKE],
        mixed_count=counts[VoteValue.MIXED],
        true_count=counts[VoteValue.TRUE],
    )


def _fsync_dir(path: Path) -> None:
    # Makes the snapshot rename itself durable; best-effort on filesystems
    # that do not support fsync on directories.
    try:
        fd = os.open(path, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(fd)
    except OSError:
        pass
    finally:
        os.close(fd)


class VoteStore:
    """Thread-safe vote store over a data directory.

    Lock order is per-URL lock, then the log lock; cross-URL casts only
    contend on the short append+fsync critical section. State mutations
    happen inside the log lock, after the record is on disk, so a snapshot
    can never capture state the log has not yet acknowledged.
    """

    def __init__(self, data_dir: str | Path, compact_every: int | None = 1000):
        if compact_every is not None and compact_every < 1:
            raise ValueError("compact_every must be positive or None")
        self._dir = Path(data_dir)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._log_path = self._dir / LOG_FILENAME
        self._snapshot_path = self._dir / SNAPSHOT_FILENAME
        self._compact_every = compact_every
        self._meta_lock = threading.Lock()
        self._log_lock = threading.Lock()
        self._url_locks: dict[str, threading.Lock] = {}
        self._active: dict[str, dict[str, VoteValue]] = {}
        self._tallies: dict[str, VoteTally] = {}
        self._ops_since_compact = 0
        self._closed = False
        self._load()
        self._log_file = open(self._log_path, "a", encoding="utf-8")

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        if self._closed:
            return
        with self._log_lock:
            self._compact_locked()
            self._log_file.close()
            self._closed = True

    def __enter__(self) -> "VoteStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- recovery ----------------------------------------------------------

    def _load(self) -> None:
        active: dict[str, dict[str, VoteValue]] = {}
        if self._snapshot_path.exists():
            try:
                snapshot = json.loads(self._snapshot_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise CorruptLog(f"unreadable snapshot: {exc}") from exc
            if not isinstance(snapshot, dict):
                raise CorruptLog("snapshot is not an object")
            version = snapshot.get("format_version")
            if version != SNAPSHOT_FORMAT_VERSION:
                raise CorruptLog(f"unsupported snapshot format_version {version!r}")
            try:
                for url, votes in snapshot["active"].items():
                    active[url] = {
                        inst: VoteValue(value) for inst, value in votes.items()
                    }
            except (KeyError, TypeError, ValueError, AttributeError) as exc:
                raise CorruptLog(f"snapshot fields invalid: {exc}") from exc
        if self._log_path.exists():
            self._replay(active)
        self._active = {url: votes for url, votes in active.items() if votes}
        self._tallies = {
            url: _tally_of(votes) for url, votes in self._active.items()
        }

    def _replay(self, active: dict[str, dict[str, VoteValue]]) -> None:
        # Replay is tolerant of exactly one torn tail line (a crash mid
        # append); anything else undecodable means external corruption.
        lines = self._log_path.read_text(encoding="utf-8").splitlines()
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                if line_no == len(lines):
                    break
                raise CorruptLog(f"undecodable log line {line_no}")
            try:
                op = record["op"]
                url = record["url"]
                installation = record["installation"]
            except (TypeError, KeyError) as exc:
                raise CorruptLog(f"log line {line_no} missing fields") from exc
            if op == "cast":
                try:
                    value = VoteValue(record["value"])
                except (KeyError, ValueError) as exc:
                    raise CorruptLog(f"log line {line_no} has a bad value") from exc
                active.setdefault(url, {})[installation] = value
            elif op == "revoke":
                active.get(url, {}).pop(installation, None)
            else:
                raise CorruptLog(f"log line {line_no} has unknown op {op!r}")

    # -- internals ---------------------------------------------------------

    def _lock_for(self, url: str) -> threading.Lock:
        with self._meta_lock:
            lock = self._url_locks.get(url)
            if lock is None:
                lock = threading.Lock()
                self._url_locks[url] = lock
            return lock

    def _require_open(self) -> None:
        if self._closed:
            raise VoteStoreError("store is closed")

    def _append_and_apply(self, record: dict, url: str, mutate) -> None:
        # The record hits disk before in-memory state changes; an ack
        # therefore implies the operation survives a crash.
        with self._log_lock:
            self._require_open()
            self._log_file.write(json.dumps(record, sort_keys=True) + "\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
            mutate()
            self._tallies[url] = _tally_of(self._active.get(url, {}))
            self._ops_since_compact += 1
            if (
                self._compact_every is not None
                and self._ops_since_compact >= self._compact_every
            ):
                self._compact_locked()

    def _compact_locked(self) -> None:
        snapshot = {
            "format_version": SNAPSHOT_FORMAT_VERSION,
            "active": {
                url: {inst: value.value for inst, value in votes.items()}
                for url, votes in self._active.items()
                if votes
            },
            "tallies": {
                url: tally.to_dict()
                for url, tally in self._tallies.items()
                if self._active.get(url)
            },
        }
        tmp_path = self._snapshot_path.with_name(SNAPSHOT_FILENAME + ".tmp")
        with open(tmp_path, "w", encoding="utf-8") as fh:
            json.dump(snapshot, fh, sort_keys=True, indent=2)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_path, self._snapshot_path)
        _fsync_dir(self._dir)
        if not self._log_file.closed:
            self._log_file.close()
        self._log_file = open(self._log_path, "w", encoding="utf-8")
        self._ops_since_compact = 0

    @staticmethod
    def _now() -> str:
        return datetime.now(timezone.utc).isoformat()

    # -- operations --------------------------------------------------------

    def cast_vote(self, installation: str, url: str, value: "VoteValue | str") -> None:
        self._require_open()
        installation = normalize_installation(installation)
        value = _coerce_value(value)
        if not url:
            raise ValueError("url must be non-empty")
        with self._lock_for(url):
            if installation in self._active.get(url, {}):
                raise AlreadyVoted(f"installation already voted on {url}")
            record = {
                "op": "cast",
                "url": url,
                "installation": installation,
                "value": value.value,
                "timestamp": self._now(),
            }
            self._append_and_apply(
                record,
                url,
                lambda: self._active.setdefault(url, {}).__setitem__(
                    installation, value
                ),
            )

    def revoke_vote(self, installation: str, url: str) -> None:
        self._require_open()
        installation = normalize_installation(installation)
        with self._lock_for(url):
            if installation not in self._active.get(url, {}):
                raise NotVoted(f"installation has no active vote on {url}")
            record = {
                "op": "revoke",
                "url": url,
                "installation": installation,
                "value": None,
                "timestamp": self._now(),
            }

            def mutate() -> None:
                votes = self._active[url]
                del votes[installation]
                if not votes:
                    del self._active[url]

            self._append_and_apply(record, url, mutate)

    def has_voted(self, installation: str, url: str) -> tuple[bool, VoteValue | None]:
        installation = normalize_installation(installation)
        with self._log_lock:
            value = self._active.get(url, {}).get(installation)
        return (value is not None), value

    def get_tally(self, installation: str, url: str) -> VoteTally:
        """Vote-before-view: only voters on a URL may see its tally."""
        installation = normalize_installation(installation)
        with self._log_lock:
            if installation not in self._active.get(url, {}):
                raise NotVotedYet(f"no active vote on {url}; tally is gated")
            return self._tallies.get(url, VoteTally())

    def compact(self) -> None:
        with self._log_lock:
            self._require_open()
            self._compact_locked()

    # -- verification ------------------------------------------------------

    def recount(self) -> dict[str, VoteTally]:
        """Recompute every tally from active vote records."""
        with self._log_lock:
            return {url: _tally_of(votes) for url, votes in self._active.items()}

    def verify_conservation(self) -> bool:
        """True iff incremental tallies agree with a full recount."""
        with self._log_lock:
            recounted = {url: _tally_of(votes) for url, votes in self._active.items()}
            tracked = {
                url: tally
                for url, tally in self._tallies.items()
                if self._active.get(url)
            }
            return recounted == tracked
