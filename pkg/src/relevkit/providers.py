"""Completion providers: a deterministic offline mock and a minimal HTTP client."""

from __future__ import annotations

import hashlib
import logging
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

import requests

from .textseg import tokenize

logger = logging.getLogger(__name__)

URL_ENV_VAR = "RELEVKIT_LLM_URL"
KEY_ENV_VAR = "RELEVKIT_LLM_KEY"

_SYSTEM_MESSAGE = "Follow the instructions exactly and return only the requested text."


class ProviderError(RuntimeError):
    """Transport or service failure while requesting a completion."""

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


class CompletionParseError(ValueError):
    """A completion that does not match the expected wire format."""

    def __init__(self, message: str, completion: str):
        super().__init__(f"{message}: {completion!r}")
        self.completion = completion


@runtime_checkable
class LlmProvider(Protocol):
    """Anything that turns a prompt into a completion string."""

    name: str
    model: str

    def complete(self, prompt: str) -> str:
        ...


@dataclass(frozen=True)
class RetryPolicy:
    """Retry retryable provider failures with exponential backoff.

    Parse failures are never retried; they indicate a malformed
    completion, not a transient fault.
    """

    max_attempts: int = 3
    backoff_base_s: float = 1.0
    backoff_factor: float = 2.0
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def run(self, call: Callable[[], str]) -> str:
        attempt = 1
        while True:
            try:
                return call()
            except ProviderError as exc:
                if not exc.retryable or attempt >= self.max_attempts:
                    raise
                delay = self.backoff_base_s * self.backoff_factor ** (attempt - 1)
                logger.warning(
                    "provider call failed (attempt %d/%d), retrying in %.1fs: %s",
                    attempt, self.max_attempts, delay, exc,
                )
                self.sleep(delay)
                attempt += 1


class TokenBucket:
    """Thread-safe rate limiter; acquire() blocks until a token is available."""

    def __init__(
        self,
        rate_per_s: float,
        capacity: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate_per_s <= 0:
            raise ValueError("rate_per_s must be positive")
        self._rate = rate_per_s
        self._capacity = capacity if capacity is not None else max(1.0, rate_per_s)
        if self._capacity < 1:
            raise ValueError("capacity must allow at least one token")
        self._tokens = self._capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self._capacity, self._tokens + (now - self._last) * self._rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self._rate
            self._sleep(wait)


_QUERY_BLOCK = re.compile(r"Query:\n<<<(.*?)>>>", re.DOTALL)
_DOCUMENT_BLOCK = re.compile(r"Document:\n<<<(.*?)>>>", re.DOTALL)

# Function words the mock keyword extractor skips; keywords should be
# content tokens, not glue.
_STOPWORDS = frozenset(
    "a an the is are was were be been and or of in on at to for with by "
    "it its this that these those as from into over under".split()
)

# Tiny fixed thesaurus for pseudo-synonyms. Queries with no entry fall
# back to token rotation, then to an "ish" variant, so the rewrite never
# equals the source query.
_PSEUDO_SYNONYMS = {
    "beef": "ox",
    "hot": "warm",
    "pot": "kettle",
    "cat": "kitten",
    "dog": "hound",
    "park": "garden",
    "garden": "park",
    "cheap": "budget",
    "big": "large",
    "fast": "quick",
    "food": "cuisine",
    "rain": "drizzle",
    "walk": "stroll",
    "photo": "picture",
    "repair": "fixing",
    "market": "bazaar",
    "temple": "shrine",
    "小": "微",
    "大": "巨",
}


def _stable_hash(seed: int, prompt: str) -> int:
    digest = hashlib.sha256(f"{seed}\x1f{prompt}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _extract(pattern: re.Pattern[str], prompt: str) -> str | None:
    match = pattern.search(prompt)
    return match.group(1) if match else None


class MockProvider:
    """Offline provider whose output is a pure function of (seed, prompt).

    It reads the fenced query/document blocks out of the prompt and
    answers according to which task the prompt asks for: a single
    synonym or antonym rewrite, or three document keywords ranked by
    frequency (ties broken by first occurrence).
    """

    name = "mock"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.model = f"mock-{seed}"

    def complete(self, prompt: str) -> str:
        rng = random.Random(_stable_hash(self.seed, prompt))
        query = _extract(_QUERY_BLOCK, prompt)
        if query is None:
            raise ProviderError("mock provider found no query block in the prompt")
        lowered = prompt.casefold()
        if "keyword" in lowered:
            document = _extract(_DOCUMENT_BLOCK, prompt)
            if document is None:
                raise ProviderError("mock provider found no document block in the prompt")
            return self._keywords(query, document)
        if "antonym" in lowered:
            return self._antonym(query, rng)
        return self._synonym(query, rng)

    def _synonym(self, query: str, rng: random.Random) -> str:
        tokens = [t.surface for t in tokenize(query)]
        if not tokens:
            return query + " alt"
        hits = [i for i, t in enumerate(tokens) if t.casefold() in _PSEUDO_SYNONYMS]
        if hits:
            i = hits[rng.randrange(len(hits))]
            rewritten = list(tokens)
            rewritten[i] = _PSEUDO_SYNONYMS[rewritten[i].casefold()]
            candidate = " ".join(rewritten)
        elif len(tokens) > 1:
            k = rng.randrange(1, len(tokens))
            candidate = " ".join(tokens[k:] + tokens[:k])
        else:
            candidate = tokens[0] + "ish"
        if candidate.casefold() == query.casefold():
            candidate = " ".join(tokens) + "ish"
        return candidate

    def _antonym(self, query: str, rng: random.Random) -> str:
        tokens = [t.surface for t in tokenize(query)]
        if not tokens:
            return "non " + query
        i = rng.randrange(len(tokens))
        rewritten = list(tokens)
        rewritten[i] = "non-" + rewritten[i]
        return " ".join(rewritten)

    def _keywords(self, query: str, document: str) -> str:
        query_tokens = {t.normalized for t in tokenize(query)}
        counts: dict[str, int] = {}
        first_seen: dict[str, int] = {}
        for position, token in enumerate(tokenize(document)):
            word = token.normalized
            if word in query_tokens or word in _STOPWORDS:
                continue
            counts[word] = counts.get(word, 0) + 1
            first_seen.setdefault(word, position)
        ranked = sorted(counts, key=lambda word: (-counts[word], first_seen[word]))
        return ">".join(ranked[:3])


def mock_provider(seed: int = 0) -> MockProvider:
    """Deterministic offline provider for tests and dry runs."""
    return MockProvider(seed)


class HttpProvider:
    """Chat-completion client for an OpenAI-style JSON endpoint.

    The endpoint URL and API key default to the RELEVKIT_LLM_URL and
    RELEVKIT_LLM_KEY environment variables. Each completion POSTs a
    model name plus system and user messages, and reads back the first
    choice's message content.
    """

    name = "http"

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str = "gpt-3.5-turbo",
        timeout_s: float = 30.0,
        session: requests.Session | None = None,
    ):
        self.url = url or os.environ.get(URL_ENV_VAR)
        if not self.url:
            raise ProviderError(f"no endpoint configured: set {URL_ENV_VAR} or pass url")
        self._api_key = api_key or os.environ.get(KEY_ENV_VAR)
        if not self._api_key:
            raise ProviderError(f"no API key configured: set {KEY_ENV_VAR} or pass api_key")
        self.model = model
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": _SYSTEM_MESSAGE},
                {"role": "user", "content": prompt},
            ],
        }
        headers = {"Authorization": f"Bearer {self._api_key}"}
        try:
            response = self._session.post(
                self.url, json=payload, headers=headers, timeout=self.timeout_s
            )
        except requests.RequestException as exc:
            raise ProviderError(f"request failed: {exc}", retryable=True) from exc
        if response.status_code >= 400:
            retryable = response.status_code == 429 or response.status_code >= 500
            raise ProviderError(f"endpoint returned HTTP {response.status_code}", retryable=retryable)
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed response body: {exc}") from exc
        if not isinstance(content, str):
            raise ProviderError("completion content is not text")
        return content
