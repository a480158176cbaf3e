"""Embedding backends: remote HTTP, persistent cache, deterministic mock."""

from mmnudge.providers.base import DEFAULT_DIM, Embedder, EmbeddingVector, ProviderConfig
from mmnudge.providers.cache import CachedEmbedder, EmbeddingCache, cache_get_or_compute
from mmnudge.providers.captions import (
    Caption,
    FixtureCaptioner,
    RemoteCaptioner,
    caption_image,
    load_prompt,
)
from mmnudge.providers.mock import MockEmbedder, extract_tags, infer_modality, mock_embed
from mmnudge.providers.remote import RemoteEmbedder

__all__ = [
    "DEFAULT_DIM", "Embedder", "EmbeddingVector", "ProviderConfig",
    "CachedEmbedder", "EmbeddingCache", "cache_get_or_compute",
    "Caption", "FixtureCaptioner", "RemoteCaptioner", "caption_image", "load_prompt",
    "MockEmbedder", "RemoteEmbedder", "extract_tags", "infer_modality", "mock_embed",
    "embed_text", "embed_batch", "make_embedder",
]


def embed_text(text, embedder):
    return embedder.embed(text)


def embed_batch(texts, embedder):
    return embedder.embed_batch(texts)


def make_embedder(config: ProviderConfig, client=None) -> Embedder:
    """Build the backend described by ``config``.

    ``kind="cached"`` wraps the backend named by ``config.inner``; any other
    kind is additionally cached when ``cache_path`` is set.
    """
    kind = config.inner if config.kind == "cached" else config.kind
    if kind == "remote":
        base = RemoteEmbedder(config, client=client)
    elif kind == "mock":
        base = MockEmbedder(seed=config.seed, mode=config.mock_mode, dim=config.dim)
    else:
        raise ValueError(f"cannot wrap provider kind {kind!r}")
    if config.cache_path:
        return CachedEmbedder(base, config.cache_path)
    return base
