"""Page fetching, headline/author extraction, and URL canonicalization.

Extraction runs on whatever markup the fetch returns. News pages are rarely
valid HTML, so parsing leans on the stdlib tag-soup parser instead of
anything strict; a missing closing tag must never cost us a headline.
"""

from __future__ import annotations

from dataclasses import dataclass
from html.parser import HTMLParser
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

import httpx

DEFAULT_TIMEOUT = 10.0
DEFAULT_BODY_CAP = 5 * 1024 * 1024
DEFAULT_REDIRECT_CAP = 5
DEFAULT_USER_AGENT = "claimcheck/0.1"

_HTML_TYPES = ("text/html", "application/xhtml+xml")
_TRACKING_PARAMS = frozenset({"fbclid", "gclid"})
_DEFAULT_PORTS = {"http": 80, "https": 443}


class FetchError(Exception):
    """Base for everything that can go wrong retrieving a page."""


class NetworkError(FetchError):
    pass


class NonHtmlContent(FetchError):
    pass


class BodyTooLarge(FetchError):
    pass


class TooManyRedirects(FetchError):
    pass


class NoHeadline(Exception):
    pass


class MalformedUrl(ValueError):
    pass


@dataclass(frozen=True)
class FetchLimits:
    timeout: float = DEFAULT_TIMEOUT
    body_cap: int = DEFAULT_BODY_CAP
    redirect_cap: int = DEFAULT_REDIRECT_CAP
    user_agent: str = DEFAULT_USER_AGENT

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.body_cap < 1:
            raise ValueError("body_cap must be positive")
        if self.redirect_cap < 0:
            raise ValueError("redirect_cap must be non-negative")


@dataclass(frozen=True)
class PageContent:
    final_url: str
    body: str
    content_type: str


@dataclass(frozen=True)
class Headline:
    text: str
    author: str | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("headline text must be non-empty")


def _require_absolute_http(url: str) -> None:
    parts = urlsplit(url)
    if parts.scheme.lower() not in ("http", "https") or not parts.netloc:
        raise MalformedUrl(f"not an absolute http(s) url: {url!r}")


def fetch_page(url: str, limits: FetchLimits | None = None) -> PageContent:
    """GET an HTML page with redirect, size, and time limits enforced."""
    limits = limits or FetchLimits()
    _require_absolute_http(url)
    try:
        with httpx.Client(
            follow_redirects=True,
            max_redirects=limits.redirect_cap,
            timeout=limits.timeout,
            headers={"User-Agent": limits.user_agent},
        ) as client:
            with client.stream("GET", url) as response:
                if response.status_code >= 400:
                    raise NetworkError(f"HTTP {response.status_code} from {url}")
                content_type = response.headers.get("content-type", "")
                if not content_type.strip().lower().startswith(_HTML_TYPES):
                    raise NonHtmlContent(f"content-type {content_type!r} is not HTML")
                chunks: list[bytes] = []
                received = 0
                for chunk in response.iter_bytes():
                    received += len(chunk)
                    if received > limits.body_cap:
                        raise BodyTooLarge(
                            f"body exceeds cap of {limits.body_cap} bytes"
                        )
                    chunks.append(chunk)
                encoding = response.encoding or "utf-8"
                final_url = str(response.url)
    except httpx.TooManyRedirects as exc:
        raise TooManyRedirects(str(exc)) from exc
    except httpx.HTTPError as exc:
        raise NetworkError(str(exc)) from exc
    body = b"".join(chunks).decode(encoding, errors="replace")
    return PageContent(final_url=final_url, body=body, content_type=content_type)


# Elements with no closing tag; capturing "text until end tag" from one of
# these would swallow the rest of the document.
_VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta source track wbr".split()
)


class _HeadlineParser(HTMLParser):
    """Collects every candidate headline/author source in document order."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.og_title: str | None = None
        self.twitter_title: str | None = None
        self.title: str | None = None
        self.h1: str | None = None
        self.meta_author: str | None = None
        self.article_author: str | None = None
        self.rel_author: str | None = None
        self._text_target: str | None = None
        self._text_parts: list[str] = []
        self._depth = 0
        self._pending_rel = False

    def _begin_text(self, target: str) -> None:
        self._text_target = target
        self._text_parts = []
        self._depth = 1

    def _meta_value(self, attrs: dict[str, str | None], key: str, name: str) -> str | None:
        if attrs.get(key, "").strip().lower() == name:
            return (attrs.get("content") or "").strip() or None
        return None

    def handle_starttag(self, tag, attrs):
        if self._text_target is not None:
            if tag == self._text_target:
                self._depth += 1
            return
        attrmap = {k: v or "" for k, v in attrs}
        if tag == "meta":
            if self.og_title is None:
                self.og_title = self._meta_value(attrmap, "property", "og:title")
            if self.twitter_title is None:
                self.twitter_title = self._meta_value(attrmap, "name", "twitter:title")
            if self.meta_author is None:
                self.meta_author = self._meta_value(attrmap, "name", "author")
            if self.article_author is None:
                self.article_author = self._meta_value(attrmap, "property", "article:author")
            return
        if tag == "title" and self.title is None:
            self._begin_text("title")
            return
        if tag == "h1" and self.h1 is None:
            self._begin_text("h1")
            return
        rel = attrmap.get("rel", "")
        if (
            self.rel_author is None
            and tag not in _VOID_ELEMENTS
            and "author" in rel.lower().split()
        ):
            self._begin_text(tag)
            self._pending_rel = True

    def handle_endtag(self, tag):
        if self._text_target is None or tag != self._text_target:
            return
        self._depth -= 1
        if self._depth > 0:
            return
        text = " ".join("".join(self._text_parts).split())
        target = self._text_target
        self._text_target = None
        if self._pending_rel:
            self._pending_rel = False
            if self.rel_author is None and text:
                self.rel_author = text
        elif target == "title":
            if self.title is None and text:
                self.title = text
        elif target == "h1":
            if self.h1 is None and text:
                self.h1 = text

    def handle_data(self, data):
        if self._text_target is not None:
            self._text_parts.append(data)


def extract_headline(html: str) -> Headline:
    """First non-empty of og:title, twitter:title, <title>, first <h1>.

    Author comes from meta name="author", then property="article:author",
    then the text of the first rel="author" element; absent is fine.
    """
    parser = _HeadlineParser()
    parser.feed(html)
    parser.close()
    text = parser.og_title or parser.twitter_title or parser.title or parser.h1
    if not text:
        raise NoHeadline("no og:title, twitter:title, <title>, or <h1> content")
    author = parser.meta_author or parser.article_author or parser.rel_author
    return Headline(text=text, author=author)


def _is_tracking_param(name: str) -> bool:
    return name.startswith("utm_") or name in _TRACKING_PARAMS


def canonicalize_url(url: str) -> str:
    """Normalize a URL for use as a vote key.

    Same article through a tracking link or a fragment anchor must map to
    the same key, so: lowercase scheme/host, strip fragment, strip tracking
    parameters, drop default ports, drop the trailing slash off non-root
    paths. Everything else (remaining query order included) is preserved.
    """
    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise MalformedUrl(f"cannot parse url: {url!r}") from exc
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https") or not parts.hostname:
        raise MalformedUrl(f"not an absolute http(s) url: {url!r}")

    host = parts.hostname.lower()
    try:
        port = parts.port
    except ValueError as exc:
        raise MalformedUrl(f"invalid port in url: {url!r}") from exc
    netloc = host
    if port is not None and port != _DEFAULT_PORTS[scheme]:
        netloc = f"{host}:{port}"
    if parts.username:
        userinfo = parts.username
        if parts.password is not None:
            userinfo += f":{parts.password}"
        netloc = f"{userinfo}@{netloc}"

    path = parts.path or "/"
    if path != "/":
        path = path.rstrip("/") or "/"

    kept = [
        (name, value)
        for name, value in parse_qsl(parts.query, keep_blank_values=True)
        if not _is_tracking_param(name)
    ]
    query = urlencode(kept)
    return urlunsplit((scheme, netloc, path, query, ""))
