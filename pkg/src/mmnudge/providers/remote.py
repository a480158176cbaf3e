"""HTTP+JSON embedding client.

Wire format (OpenAI-compatible)::

    POST {endpoint}
    {"model": "<name>", "input": ["text", ...]}

    200 OK
    {"data": [{"index": 0, "embedding": [...]}, ...]}

Responses are re-sorted by ``index`` and every vector is renormalized.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor

import httpx

from mmnudge.errors import ProviderError
from mmnudge.providers.base import Embedder, EmbeddingVector, ProviderConfig, unit

log = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


def with_retries(send, max_attempts, backoff, sleep=time.sleep, what="request"):
    """Call ``send()`` until it returns a 2xx ``httpx.Response``.

    Transport errors and retryable status codes are retried with exponential
    backoff; anything else fails immediately.
    """
    status = None
    for attempt in range(max_attempts):
        try:
            response = send()
        except httpx.TransportError as exc:
            status = None
            reason = f"{type(exc).__name__}: {exc}"
        else:
            status = response.status_code
            if 200 <= status < 300:
                return response
            reason = f"HTTP {status}: {response.text[:200]}"
            if status not in RETRYABLE_STATUS:
                raise ProviderError(f"{what} failed with {reason}", status=status)
        log.warning("%s attempt %d/%d failed (%s)", what, attempt + 1, max_attempts, reason)
        if attempt + 1 < max_attempts:
            sleep(backoff * 2**attempt)
    raise ProviderError(f"{what} failed after {max_attempts} attempts ({reason})", status=status)


class RemoteEmbedder(Embedder):
    backend = "remote"

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None, sleep=time.sleep):
        super().__init__(config.model, config.dim)
        self.config = config
        self._sleep = sleep
        headers = {"Content-Type": "application/json", **config.extra_headers}
        key = config.api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._client = client or httpx.Client(timeout=config.timeout)
        self._headers = headers
        self.requests = 0

    def close(self):
        self._client.close()

    def _post(self, chunk: list[str]) -> list[EmbeddingVector]:
        def send():
            self.requests += 1
            return self._client.post(
                self.config.endpoint,
                json={"model": self.config.model, "input": chunk},
                headers=self._headers,
                timeout=self.config.timeout,
            )

        response = with_retries(send, self.config.max_attempts, self.config.backoff,
                                self._sleep, what="embedding request")
        try:
            data = sorted(response.json()["data"], key=lambda item: item["index"])
            rows = [item["embedding"] for item in data]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}", status=response.status_code) from exc
        if len(rows) != len(chunk):
            raise ProviderError(f"expected {len(chunk)} embeddings, got {len(rows)}",
                                status=response.status_code)
        return [EmbeddingVector(unit(row), backend=self.backend, model=self.config.model) for row in rows]

    def _embed_many(self, texts):
        size = self.config.batch_size
        chunks = [texts[i:i + size] for i in range(0, len(texts), size)]
        if len(chunks) == 1 or self.config.max_in_flight == 1:
            results = [self._post(c) for c in chunks]
        else:
            with ThreadPoolExecutor(max_workers=min(self.config.max_in_flight, len(chunks))) as pool:
                results = list(pool.map(self._post, chunks))
        return [vec for chunk in results for vec in chunk]
