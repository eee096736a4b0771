"""Machine-translation client plumbing: batching, retries, caching.

The provider is reached through a narrow protocol so tests and dry
runs can swap in offline fakes. Failures are split into three kinds:
transient (retry with backoff), permanent (bisect the batch to isolate
and reject the offending examples), and authentication (fatal, no
retry will ever help).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence

import requests

AUTH_KEY_ENV_VAR = "LUSOKIT_MT_AUTH_KEY"


class TranslationError(Exception):
    """Base for translation failures."""


class TransientTranslationError(TranslationError):
    """Retryable failure: rate limit, server hiccup, network timeout."""


class PermanentTranslationError(TranslationError):
    """Non-retryable failure tied to the request content."""


class AuthenticationError(TranslationError):
    """Credentials rejected; retrying cannot succeed."""


class MTClient(Protocol):
    def translate_batch(self, texts: Sequence[str], target: str) -> list[str]:
        """Translate texts into the target variant code, order-preserving."""
        ...


class FakeReversingClient:
    """Offline stand-in that reverses word order and tags the target.

    Deterministic and dependency-free, so pipelines can be exercised
    end to end without a provider account.
    """

    def __init__(self) -> None:
        self.calls: list[tuple[tuple[str, ...], str]] = []

    def translate_batch(self, texts: Sequence[str], target: str) -> list[str]:
        self.calls.append((tuple(texts), target))
        return [" ".join(reversed(text.split())) for text in texts]


class HttpMTClient:
    """JSON-over-HTTP provider client.

    Auth key comes from the constructor or the LUSOKIT_MT_AUTH_KEY
    environment variable. Status mapping: 401/403 authentication,
    429/5xx transient, other 4xx permanent; connection-level errors
    are transient.
    """

    def __init__(
        self,
        endpoint: str,
        auth_key: Optional[str] = None,
        timeout: float = 30.0,
        session: Optional[requests.Session] = None,
    ) -> None:
        self.endpoint = endpoint
        self.auth_key = auth_key if auth_key is not None else os.environ.get(AUTH_KEY_ENV_VAR)
        if not self.auth_key:
            raise AuthenticationError(
                f"no auth key: pass one or set {AUTH_KEY_ENV_VAR}"
            )
        self.timeout = timeout
        self.session = session if session is not None else requests.Session()

    def translate_batch(self, texts: Sequence[str], target: str) -> list[str]:
        payload = {"texts": list(texts), "target": target}
        headers = {"Authorization": f"Bearer {self.auth_key}"}
        try:
            response = self.session.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransientTranslationError(f"request failed: {exc}") from exc
        if response.status_code in (401, 403):
            raise AuthenticationError(f"auth rejected with status {response.status_code}")
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientTranslationError(f"status {response.status_code}")
        if response.status_code != 200:
            raise PermanentTranslationError(
                f"status {response.status_code}: {response.text[:200]}"
            )
        try:
            body = response.json()
            translations = body["translations"]
        except (ValueError, KeyError, TypeError) as exc:
            raise PermanentTranslationError(f"malformed response body: {exc}") from exc
        if not isinstance(translations, list) or len(translations) != len(texts):
            raise PermanentTranslationError(
                f"expected {len(texts)} translations, got "
                f"{len(translations) if isinstance(translations, list) else 'non-list'}"
            )
        return [str(t) for t in translations]


class TranslationCache:
    """Directory-backed (text, target) -> translation cache.

    Entries are JSON files keyed by a digest of target and text,
    written atomically so concurrent workers never see torn files.
    """

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path_for(self, text: str, target: str) -> Path:
        digest = hashlib.sha256(f"{target}\x00{text}".encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.json"

    def get(self, text: str, target: str) -> Optional[str]:
        path = self._path_for(text, target)
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None
        except (OSError, ValueError):
            return None
        value = obj.get("translation")
        return value if isinstance(value, str) else None

    def put(self, text: str, target: str, translation: str) -> None:
        path = self._path_for(text, target)
        obj = {"target": target, "text": text, "translation": translation}
        data = json.dumps(obj, ensure_ascii=False)
        with self._lock:
            tmp = path.with_suffix(".tmp")
            tmp.write_text(data, encoding="utf-8")
            os.replace(tmp, path)


@dataclass(frozen=True)
class TranslationOutcome:
    """Aligned translations plus per-example rejects and request count.

    translations[i] is None exactly when input i was rejected.
    """

    translations: tuple[Optional[str], ...]
    rejects: tuple[tuple[int, str], ...]
    requests_issued: int


def _translate_batch_isolating(
    client: MTClient,
    batch: list[tuple[int, str]],
    target: str,
    max_retries: int,
    backoff_base: float,
    sleep: Callable[[float], None],
    counter: list[int],
    counter_lock: threading.Lock,
) -> tuple[dict[int, str], list[tuple[int, str]]]:
    """Translate one indexed batch, bisecting on permanent failures."""
    attempt = 0
    while True:
        with counter_lock:
            counter[0] += 1
        try:
            results = client.translate_batch([text for _, text in batch], target)
            if len(results) != len(batch):
                raise PermanentTranslationError(
                    f"expected {len(batch)} translations, got {len(results)}"
                )
            return {idx: out for (idx, _), out in zip(batch, results)}, []
        except TransientTranslationError as exc:
            if attempt >= max_retries:
                return {}, [
                    (idx, f"transient failure persisted after {attempt + 1} attempts: {exc}")
                    for idx, _ in batch
                ]
            sleep(backoff_base * (2**attempt))
            attempt += 1
        except PermanentTranslationError as exc:
            if len(batch) == 1:
                return {}, [(batch[0][0], str(exc))]
            mid = len(batch) // 2
            left_ok, left_bad = _translate_batch_isolating(
                client, batch[:mid], target, max_retries, backoff_base, sleep,
                counter, counter_lock,
            )
            right_ok, right_bad = _translate_batch_isolating(
                client, batch[mid:], target, max_retries, backoff_base, sleep,
                counter, counter_lock,
            )
            left_ok.update(right_ok)
            return left_ok, left_bad + right_bad


def translate_dataset(
    texts: Sequence[str],
    target: str,
    client: MTClient,
    cache: Optional[TranslationCache] = None,
    batch_size: int = 50,
    max_retries: int = 4,
    backoff_base: float = 0.5,
    max_workers: int = 1,
    sleep: Callable[[float], None] = time.sleep,
) -> TranslationOutcome:
    """Translate texts into target, returning aligned results.

    Cache hits and empty strings never reach the client. Batches fan
    out across max_workers threads; a single authentication failure
    aborts the whole run since no other batch could succeed either.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")
    if max_workers < 1:
        raise ValueError(f"max_workers must be positive, got {max_workers}")
    results: list[Optional[str]] = [None] * len(texts)
    pending: list[tuple[int, str]] = []
    for i, text in enumerate(texts):
        if text == "":
            results[i] = ""
            continue
        if cache is not None:
            hit = cache.get(text, target)
            if hit is not None:
                results[i] = hit
                continue
        pending.append((i, text))

    batches = [pending[i : i + batch_size] for i in range(0, len(pending), batch_size)]
    rejects: list[tuple[int, str]] = []
    counter = [0]
    counter_lock = threading.Lock()

    def run(batch: list[tuple[int, str]]):
        return _translate_batch_isolating(
            client, batch, target, max_retries, backoff_base, sleep,
            counter, counter_lock,
        )

    if max_workers == 1 or len(batches) <= 1:
        outcomes = [run(batch) for batch in batches]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(run, batches))

    for ok, bad in outcomes:
        for idx, translation in ok.items():
            results[idx] = translation
            if cache is not None:
                cache.put(texts[idx], target, translation)
        rejects.extend(bad)

    rejects.sort(key=lambda item: item[0])
    return TranslationOutcome(
        translations=tuple(results),
        rejects=tuple(rejects),
        requests_issued=counter[0],
    )
