"""Tag-preserving span-splicing augmentation.

The cause and effect texts of a relation are paraphrased ``n`` times each and
every cause/effect combination is spliced back in, giving ``n * n`` new
relations. Signal spans are never rewritten.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import httpx

from .annotation import AnnotatedRelation, AnnotationError, contains_tag_literal, tokenize
from .types import Span

logger = logging.getLogger(__name__)

DEFAULT_CONCURRENCY = 4
DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRIES = 2
RETRYABLE_STATUS = {408, 425, 429, 500, 502, 503, 504}


class ProviderError(RuntimeError):
    """A paraphrase request failed or returned an unusable response."""

    def __init__(self, message: str, request: Optional["ParaphraseRequest"] = None):
        self.request = request
        if request is not None:
            message = f"{message} (request: text={request.span_text!r}, count={request.count})"
        super().__init__(message)


@dataclass(frozen=True)
class ParaphraseRequest:
    span_text: str
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("paraphrase count must be at least 1")


class ParaphraseProvider(Protocol):
    def paraphrase(self, request: ParaphraseRequest) -> list[str]: ...


class IdentityProvider:
    """Returns the input text ``count`` times; for tests and dry runs."""

    def paraphrase(self, request: ParaphraseRequest) -> list[str]:
        return [request.span_text] * request.count


class StaticProvider:
    """Serves fixed paraphrase lists keyed by span text."""

    def __init__(self, table: dict[str, Sequence[str]]):
        self.table = {k: list(v) for k, v in table.items()}

    def paraphrase(self, request: ParaphraseRequest) -> list[str]:
        try:
            options = self.table[request.span_text]
        except KeyError:
            raise ProviderError("no paraphrases registered", request) from None
        return options[: request.count]


class HttpParaphraseProvider:
    """Client for a paraphrase service exposing ``POST /paraphrase``.

    Request body ``{"text": ..., "num_return_sequences": n}``; the response
    must be ``{"paraphrases": [...]}`` with exactly ``n`` strings. Timeouts,
    connection errors and retryable status codes are retried up to
    ``retries`` more times with exponential backoff.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        timeout: float = DEFAULT_TIMEOUT,
        retries: int = DEFAULT_RETRIES,
        concurrency: int = DEFAULT_CONCURRENCY,
        backoff: float = 0.2,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.url = endpoint.rstrip("/") + "/paraphrase"
        self.retries = retries
        self.concurrency = concurrency
        self.backoff = backoff
        self._client = httpx.Client(
            timeout=timeout,
            transport=transport,
            limits=httpx.Limits(max_connections=concurrency),
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def paraphrase(self, request: ParaphraseRequest) -> list[str]:
        body = {"text": request.span_text, "num_return_sequences": request.count}
        attempt = 0
        while True:
            try:
                resp = self._client.post(self.url, json=body)
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                if attempt >= self.retries:
                    raise ProviderError(f"request to {self.url} failed: {exc}", request) from exc
            else:
                if resp.status_code == 200:
                    return _parse_paraphrases(resp, request)
                if resp.status_code not in RETRYABLE_STATUS or attempt >= self.retries:
                    raise ProviderError(f"{self.url} returned HTTP {resp.status_code}", request)
            attempt += 1
            logger.debug("retrying paraphrase request (attempt %d)", attempt + 1)
            time.sleep(self.backoff * 2 ** (attempt - 1))


def _parse_paraphrases(resp: httpx.Response, request: ParaphraseRequest) -> list[str]:
    try:
        payload = resp.json()
    except ValueError as exc:
        raise ProviderError("response body is not JSON", request) from exc
    out = payload.get("paraphrases") if isinstance(payload, dict) else None
    if not isinstance(out, list) or not all(isinstance(p, str) for p in out):
        raise ProviderError("response lacks a 'paraphrases' string list", request)
    return out


def _checked(provider: ParaphraseProvider, request: ParaphraseRequest) -> list[str]:
    out = provider.paraphrase(request)
    if len(out) != request.count:
        raise ProviderError(f"expected {request.count} paraphrases, got {len(out)}", request)
    if any(not p.strip() for p in out):
        raise ProviderError("provider returned an empty paraphrase", request)
    return list(out)


def splice_span(relation: AnnotatedRelation, which: str, replacement: str) -> AnnotatedRelation:
    """Swap the cause or effect tokens for ``replacement``, shifting later spans."""
    if which not in ("cause", "effect"):
        raise ValueError(f"can only splice 'cause' or 'effect', not {which!r}")
    new = tokenize(replacement)
    if not new:
        raise AnnotationError("empty_replacement", f"replacement for {which} is empty")
    if contains_tag_literal(replacement):
        raise AnnotationError("tag_in_replacement", f"replacement {replacement!r} contains a tag")

    target: Span = getattr(relation, which)
    delta = len(new) - len(target)
    tokens = relation.tokens[: target.start] + tuple(new) + relation.tokens[target.end + 1 :]

    def moved(span: Optional[Span]) -> Optional[Span]:
        if span is None:
            return None
        if span == target:
            return Span(target.start, target.start + len(new) - 1)
        if span.start > target.end:
            return Span(span.start + delta, span.end + delta)
        return span

    return AnnotatedRelation(
        tokens=tokens,
        cause=moved(relation.cause),
        effect=moved(relation.effect),
        signal=moved(relation.signal),
    )


def augment(relation: AnnotatedRelation, provider: ParaphraseProvider, n: int) -> list[AnnotatedRelation]:
    """All ``n * n`` cause/effect paraphrase combinations.

    Output index ``i * n + j`` pairs the i-th cause paraphrase with the j-th
    effect paraphrase. The original relation is not included.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    causes = _checked(provider, ParaphraseRequest(relation.span_text("cause"), n))
    effects = _checked(provider, ParaphraseRequest(relation.span_text("effect"), n))
    return _combine(relation, causes, effects)


def _combine(relation, causes, effects) -> list[AnnotatedRelation]:
    out = []
    for c in causes:
        with_cause = splice_span(relation, "cause", c)
        for e in effects:
            out.append(splice_span(with_cause, "effect", e))
    return out


def augment_many(
    relations: Sequence[AnnotatedRelation],
    provider: ParaphraseProvider,
    n: int,
    concurrency: int = DEFAULT_CONCURRENCY,
    return_exceptions: bool = False,
) -> list:
    """Augment each relation, issuing at most ``concurrency`` provider calls at once.

    Results keep input order. With ``return_exceptions`` a failed relation's
    slot holds its exception instead of aborting the batch.
    """

    def one(r):
        try:
            return augment(r, provider, n)
        except (ProviderError, AnnotationError) as exc:
            if return_exceptions:
                return exc
            raise

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        return list(pool.map(one, relations))
