from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from mmnudge.errors import ConfigurationError, ValidationError

DEFAULT_DIM = 1536
NORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """Unit-norm embedding of one text, tagged with where it came from."""

    values: np.ndarray
    backend: str
    model: str

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ConfigurationError(f"embedding must be a non-empty 1-D vector, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("embedding contains non-finite entries")
        norm = float(np.sqrt(np.sum(values * values)))
        if abs(norm - 1.0) > NORM_TOL:
            raise ConfigurationError(f"embedding norm {norm!r} is not 1 within {NORM_TOL}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return (
            self.backend == other.backend
            and self.model == other.model
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.backend, self.model, self.values.tobytes()))


@dataclass
class ProviderConfig:
    """Backend selection and transport settings for an embedder.

    The API key itself never lives here, only the name of the environment
    variable that holds it.
    """

    kind: str = "mock"  # remote | mock | cached
    endpoint: str = "https://api.openai.com/v1/embeddings"
    model: str = "text-embedding-ada-002"
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 30.0
    batch_size: int = 64
    max_attempts: int = 3
    backoff: float = 0.5
    max_in_flight: int = 4
    dim: int = DEFAULT_DIM
    seed: int = 42
    mock_mode: str = "tag_aware"
    cache_path: str | None = None
    inner: str = "mock"  # backend wrapped by kind="cached"
    extra_headers: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("remote", "mock", "cached"):
            raise ConfigurationError(f"unknown provider kind {self.kind!r}")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.timeout <= 0:
            raise ConfigurationError("timeout must be > 0")
        if self.max_attempts < 1:
            raise ConfigurationError("max_attempts must be >= 1")
        if self.max_in_flight < 1:
            raise ConfigurationError("max_in_flight must be >= 1")
        if self.dim < 1:
            raise ConfigurationError("dim must be >= 1")
        if self.mock_mode not in ("hash", "tag_aware"):
            raise ConfigurationError(f"unknown mock mode {self.mock_mode!r}")
        if self.kind == "cached" and not self.cache_path:
            raise ConfigurationError("cached provider needs cache_path")

    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env) if self.api_key_env else None


def check_text(text, index=None) -> str:
    if not isinstance(text, str) or not text.strip():
        where = "" if index is None else f" at index {index}"
        raise ValidationError(f"text{where} must be a non-empty string, got {text!r}")
    return text


def unit(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    norm = np.linalg.norm(values)
    if not np.isfinite(norm) or norm == 0.0:
        raise ConfigurationError("cannot normalize a zero or non-finite vector")
    return values / norm


class Embedder:
    """Interface shared by all embedding backends.

    Subclasses implement :meth:`_embed_many`; validation, ordering and the
    dimension check live here.
    """

    backend = "abstract"

    def __init__(self, model: str, dim: int):
        self.model = model
        self.dim = dim

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts) -> list[EmbeddingVector]:
        texts = list(texts)
        for j, text in enumerate(texts):
            check_text(text, j)
        if not texts:
            return []
        vectors = self._embed_many(texts)
        for j, vec in enumerate(vectors):
            if vec.dim != self.dim:
                raise ConfigurationError(
                    f"{self.backend} returned dimension {vec.dim} for index {j}, configured {self.dim}"
                )
        return vectors

    def _embed_many(self, texts: list[str]) -> list[EmbeddingVector]:
        raise NotImplementedError
