"""Persistent embedding cache stored as append-only JSON lines.

One record per line::

    {"model": ..., "text_hash": sha256(text), "text": ..., "vector": [...]}

Floats are written with ``repr`` precision, so a round trip is bit-exact.
A corrupt line only loses that one entry: it is dropped (with a warning) and
the text is re-embedded on the next request.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import threading
from pathlib import Path

import numpy as np

from mmnudge.providers.base import NORM_TOL, Embedder, EmbeddingVector, check_text

log = logging.getLogger(__name__)


def text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EmbeddingCache:
    def __init__(self, path):
        self.path = Path(path)
        self._entries: dict[tuple[str, str], np.ndarray] = {}
        self._lock = threading.Lock()
        self.evicted = 0
        self._load()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def _parse(self, line: str):
        record = json.loads(line)
        model, text, vector = record["model"], record["text"], record["vector"]
        if not isinstance(model, str) or not isinstance(text, str):
            raise ValueError("model and text must be strings")
        if record.get("text_hash") != text_hash(text):
            raise ValueError("text_hash mismatch")
        values = np.array(vector, dtype=np.float64)
        if values.ndim != 1 or values.size == 0 or not np.all(np.isfinite(values)):
            raise ValueError("vector must be a finite 1-D list")
        if abs(math.sqrt(float(values @ values)) - 1.0) > NORM_TOL:
            raise ValueError("vector is not unit norm")
        return (model, text), values

    def _load(self):
        if not self.path.exists():
            return
        bad = 0
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    key, values = self._parse(line)
                except (ValueError, KeyError, TypeError) as exc:
                    bad += 1
                    log.warning("evicting corrupt cache entry %s:%d (%s)", self.path, lineno, exc)
                    continue
                self._entries[key] = values
        if bad:
            self.evicted = bad
            self._rewrite()

    def _rewrite(self):
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for (model, text), values in self._entries.items():
                fh.write(_record(model, text, values) + "\n")
        os.replace(tmp, self.path)

    def get(self, model: str, text: str) -> np.ndarray | None:
        return self._entries.get((model, text))

    def put(self, model: str, text: str, values: np.ndarray):
        with self._lock:
            if (model, text) in self._entries:
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(_record(model, text, values) + "\n")
            self._entries[(model, text)] = np.array(values, dtype=np.float64)


def _record(model, text, values) -> str:
    return json.dumps({
        "model": model,
        "text_hash": text_hash(text),
        "text": text,
        "vector": [float(x) for x in values],
    }, ensure_ascii=False)


class CachedEmbedder(Embedder):
    """Wraps another embedder; misses are computed in one batch and persisted."""

    backend = "cached"

    def __init__(self, inner: Embedder, path):
        super().__init__(inner.model, inner.dim)
        self.inner = inner
        self.cache = EmbeddingCache(path)
        self.hits = 0
        self.misses = 0

    def _embed_many(self, texts):
        out: list[EmbeddingVector | None] = [None] * len(texts)
        missing: dict[str, list[int]] = {}
        for j, text in enumerate(texts):
            values = self.cache.get(self.model, text)
            if values is None:
                missing.setdefault(text, []).append(j)
            else:
                self.hits += 1
                out[j] = EmbeddingVector(values, backend=self.inner.backend, model=self.model)
        if missing:
            fresh = list(missing)
            self.misses += len(fresh)
            for text, vec in zip(fresh, self.inner.embed_batch(fresh)):
                self.cache.put(self.model, text, vec.values)
                for j in missing[text]:
                    out[j] = vec
        return out


def cache_get_or_compute(text: str, embedder: Embedder, cache_path) -> EmbeddingVector:
    """One-shot cached lookup for ``text`` under ``embedder.model``."""
    check_text(text)
    return CachedEmbedder(embedder, cache_path).embed(text)
