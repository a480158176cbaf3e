"""Map catalog items into the shared embedding space.

    message:  emb(text)
    image:    emb(caption)
    user:     emb("<age> year old <race> <gender>")
              + w_like * sum(emb(a) for a in likes)
              - w_dislike * sum(emb(a) for a in dislikes)

User vectors are left off the unit sphere on purpose; scoring works with
inner products of centered vectors, not cosines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mmnudge._io import write_atomic
from mmnudge.errors import ConfigurationError, ValidationError

MODALITIES = ("user", "message", "image")


@dataclass(frozen=True)
class UserWeights:
    like: float = 0.2
    dislike: float = 0.2

    def __post_init__(self):
        if not (self.like >= 0 and self.dislike >= 0):
            raise ValidationError(f"user weights must be non-negative, got {self.like}, {self.dislike}")


@dataclass(frozen=True, eq=False)
class Representation:
    id: str
    modality: str
    vector: np.ndarray

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise ValidationError(f"unknown modality {self.modality!r}")
        vec = np.array(self.vector, dtype=np.float64)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise ValidationError(f"{self.id}: representation must be a finite 1-D vector")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)


def represent_message(m, embedder) -> Representation:
    return Representation(m.id, "message", embedder.embed(m.text).values)


def represent_image(i, embedder) -> Representation:
    return Representation(i.id, "image", embedder.embed(i.caption).values)


def demographics_sentence(u) -> str:
    return f"{u.age} year old {u.race.strip().lower()} {u.gender.strip().lower()}"


def represent_user(u, embedder, weights: UserWeights = UserWeights()) -> Representation:
    vec = np.array(embedder.embed(demographics_sentence(u)).values, dtype=np.float64)
    # fixed accumulation order keeps the floating-point sum reproducible
    for a in sorted(u.likes):
        vec += weights.like * embedder.embed(a).values
    for a in sorted(u.dislikes):
        vec -= weights.dislike * embedder.embed(a).values
    return Representation(u.id, "user", vec)


def corpus_texts(corpus) -> list[str]:
    """Every distinct text the corpus needs embedded, in first-seen order."""
    texts = [demographics_sentence(u) for u in corpus.users]
    texts += sorted({a for u in corpus.users for a in u.likes | u.dislikes})
    texts += [m.text for m in corpus.messages]
    texts += [i.caption for i in corpus.images]
    return list(dict.fromkeys(texts))


class _Lookup:
    def __init__(self, table):
        self.table = table

    def embed(self, text):
        return self.table[text]


def represent_corpus(corpus, embedder, weights: UserWeights = UserWeights()) -> dict[str, list[Representation]]:
    """Representations for all three catalogs, embedding each distinct text once."""
    texts = corpus_texts(corpus)
    lookup = _Lookup(dict(zip(texts, embedder.embed_batch(texts))))
    return {
        "user": [represent_user(u, lookup, weights) for u in corpus.users],
        "message": [represent_message(m, lookup) for m in corpus.messages],
        "image": [represent_image(i, lookup) for i in corpus.images],
    }


def export_representations(reps: dict, path):
    records = [
        {"id": r.id, "modality": r.modality, "vector": [float(x) for x in r.vector]}
        for modality in MODALITIES for r in reps.get(modality, [])
    ]
    dims = {len(rec["vector"]) for rec in records}
    if len(dims) > 1:
        raise ConfigurationError(f"mixed representation dimensions {sorted(dims)}")
    write_atomic(path, json.dumps(records) + "\n")


def load_representations(path) -> dict[str, list[Representation]]:
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    reps: dict[str, list[Representation]] = {m: [] for m in MODALITIES}
    for rec in records:
        reps[rec["modality"]].append(Representation(rec["id"], rec["modality"], rec["vector"]))
    return reps

