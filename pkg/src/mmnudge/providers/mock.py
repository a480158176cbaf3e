"""Deterministic offline embedding backends.

Two modes:

``hash``
    text and seed pick a pseudorandom Gaussian direction. No semantics at
    all; distinct texts are nearly orthogonal in high dimension.

``tag_aware``
    text is mapped onto a small fixed vocabulary (activity types,
    demographic words, and a modality marker) and embedded as the normalized
    sum of one random basis direction per tag plus a little seeded noise.
    Texts that share tags end up closer than texts that do not, which is
    enough structure to exercise the recommender end to end without a
    network.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from mmnudge.providers.base import DEFAULT_DIM, Embedder, EmbeddingVector, check_text, unit
from mmnudge.vocab import ACTIVITIES, age_band

NOISE_SCALE = 0.05

DEMOGRAPHIC_TOKENS = (
    "male", "female", "young", "adult", "senior",
    "white", "black", "afro-american", "asian", "hispanic",
)
MODALITY_TOKENS = ("USER", "MESSAGE", "IMAGE")
TAG_VOCABULARY = ACTIVITIES + DEMOGRAPHIC_TOKENS + MODALITY_TOKENS

# surface word -> tags; activity and demographic tokens map to themselves
_LEXICON: dict[str, tuple[str, ...]] = {a: (a,) for a in ACTIVITIES + DEMOGRAPHIC_TOKENS}
_LEXICON.update({
    # demographics
    "woman": ("female",), "women": ("female",), "girl": ("female",), "lady": ("female",),
    "man": ("male",), "men": ("male",), "boy": ("male",), "guy": ("male",),
    "teen": ("young",), "teenager": ("young",), "youth": ("young",),
    "elderly": ("senior",), "older": ("senior",),
    "caucasian": ("white",),
    "black": ("black", "afro-american"),
    "afro-american": ("afro-american", "black"),
    "african-american": ("afro-american", "black"),
    "latino": ("hispanic",), "latina": ("hispanic",),
    # activity synonyms
    "outdoor": ("outdoors",), "outside": ("outdoors",), "park": ("outdoors",),
    "nature": ("outdoors",), "sky": ("outdoors",), "field": ("outdoors",),
    "beach": ("outdoors",), "lake": ("outdoors",), "mountain": ("outdoors",),
    "indoor": ("indoors",), "inside": ("indoors",), "home": ("indoors",),
    "house": ("indoors",), "desk": ("indoors",), "couch": ("indoors",), "kitchen": ("indoors", "homemaking"),
    "hike": ("outdoors", "active", "physical", "exploration"),
    "hiking": ("outdoors", "active", "physical", "exploration"),
    "trail": ("outdoors", "exploration"),
    "walk": ("active", "outdoors"), "walking": ("active", "outdoors"),
    "run": ("active", "physical"), "running": ("active", "physical"),
    "jog": ("active", "physical"), "jogging": ("active", "physical"),
    "bike": ("active", "outdoors", "physical"), "bicycle": ("active", "outdoors", "physical"),
    "cycling": ("active", "outdoors", "physical"),
    "swim": ("active", "physical"), "swimming": ("active", "physical"),
    "dance": ("active", "arts", "physical"), "dancing": ("active", "arts", "physical"),
    "basketball": ("active", "physical"), "climbing": ("active", "physical"),
    "workout": ("active", "physical"), "exercise": ("active", "physical"),
    "exercising": ("active", "physical"), "weights": ("physical",),
    "yoga": ("physical", "relaxation"), "stretch": ("physical", "relaxation"),
    "stretching": ("physical", "relaxation"), "tai": ("physical", "relaxation"),
    "meditate": ("relaxation", "mental"), "meditating": ("relaxation", "mental"),
    "meditation": ("relaxation", "mental"),
    "relax": ("relaxation",), "relaxing": ("relaxation",), "unwind": ("relaxation",),
    "calm": ("relaxation",), "tea": ("relaxation",), "peaceful": ("relaxation",),
    "read": ("passive", "learning", "mental"), "reading": ("passive", "learning", "mental"),
    "book": ("passive", "learning"), "newspaper": ("passive", "learning"),
    "puzzle": ("mental",), "crossword": ("mental",), "chess": ("mental",), "game": ("mental",),
    "brain": ("mental",), "mind": ("mental",),
    "learn": ("learning",), "learning": ("learning",), "class": ("learning",),
    "language": ("learning",), "museum": ("learning", "exploration"),
    "library": ("learning",), "studying": ("learning", "mental"), "study": ("learning", "mental"),
    "garden": ("outdoors", "homemaking"), "gardening": ("outdoors", "homemaking"),
    "plants": ("homemaking",), "watering": ("homemaking",),
    "cook": ("homemaking",), "cooking": ("homemaking",), "recipe": ("homemaking",),
    "bake": ("homemaking",), "baking": ("homemaking",), "bread": ("homemaking",),
    "clean": ("homemaking",), "cleaning": ("homemaking",), "tidy": ("homemaking",),
    "organize": ("homemaking",), "closet": ("homemaking",),
    "sew": ("crafts",), "sewing": ("crafts",), "mend": ("crafts",),
    "knit": ("crafts",), "knitting": ("crafts",), "pottery": ("crafts",), "clay": ("crafts",),
    "woodworking": ("crafts",), "scrapbook": ("crafts",),
    "paint": ("arts",), "paints": ("arts",), "painting": ("arts",), "paintings": ("arts",),
    "sketch": ("arts",), "drawing": ("arts",), "draw": ("arts",), "art": ("arts",),
    "guitar": ("arts",), "piano": ("arts",), "music": ("arts",), "song": ("arts",),
    "instrument": ("arts",), "photo": ("arts",), "photography": ("arts",), "camera": ("arts",),
    "writing": ("mental", "arts"), "journaling": ("mental", "arts"), "journal": ("mental", "arts"),
    "explore": ("exploration",), "explored": ("exploration",), "exploring": ("exploration",),
    "discover": ("exploration",), "neighborhood": ("exploration",),
    "fishing": ("outdoors", "passive"), "birdwatching": ("outdoors", "passive"),
    "stargazing": ("outdoors", "passive"), "stars": ("outdoors",),
    "sitting": ("passive",),
})

_WORD = re.compile(r"[a-z]+(?:-[a-z]+)*|\d+")
_DEMOGRAPHIC_SENTENCE = re.compile(r"^\s*(\d+) year old\b")
_SENTENCE_END = re.compile(r"[.!?]\s*$")


def infer_modality(text: str) -> str:
    """Guess which catalog a text came from, from its surface form alone.

    Demographic sentences and bare activity words belong to users,
    comma-joined phrase lists without sentence punctuation are captions,
    everything else is a message.
    """
    stripped = text.strip()
    if _DEMOGRAPHIC_SENTENCE.match(stripped.lower()) or stripped.lower() in ACTIVITIES:
        return "USER"
    if "," in stripped and not _SENTENCE_END.search(stripped):
        return "IMAGE"
    return "MESSAGE"


def extract_tags(text: str) -> set[str]:
    """Tags of ``text`` from the fixed vocabulary, modality marker included."""
    lowered = text.lower()
    tags = {infer_modality(text)}
    match = _DEMOGRAPHIC_SENTENCE.match(lowered)
    if match:
        band = age_band(int(match.group(1)))
        if band is not None:
            tags.add(band)
    for word in _WORD.findall(lowered):
        hit = _LEXICON.get(word)
        if hit is None and word.endswith("s"):
            hit = _LEXICON.get(word[:-1])
        if hit:
            tags.update(hit)
    return tags


def _rng(*parts) -> np.random.Generator:
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def _hash_vector(text: str, seed: int, dim: int) -> np.ndarray:
    return unit(_rng("hash", seed, dim, text).standard_normal(dim))


def _tag_vector(text: str, seed: int, dim: int) -> np.ndarray:
    acc = np.zeros(dim)
    for tag in sorted(extract_tags(text)):
        acc += _hash_vector(f"<tag:{tag}>", seed, dim)
    acc += NOISE_SCALE * _hash_vector(text, seed, dim)
    return unit(acc)


def mock_embed(text: str, seed: int = 42, mode: str = "hash", dim: int = DEFAULT_DIM) -> EmbeddingVector:
    """Embed ``text`` deterministically; a pure function of its arguments."""
    check_text(text)
    if mode == "hash":
        values = _hash_vector(text, seed, dim)
    elif mode == "tag_aware":
        values = _tag_vector(text, seed, dim)
    else:
        raise ValueError(f"unknown mock mode {mode!r}")
    return EmbeddingVector(values, backend="mock", model=mock_model_name(mode, seed, dim))


def mock_model_name(mode: str, seed: int, dim: int) -> str:
    return f"mock-{mode}-s{seed}-d{dim}"


class MockEmbedder(Embedder):
    backend = "mock"

    def __init__(self, seed: int = 42, mode: str = "tag_aware", dim: int = DEFAULT_DIM):
        if mode not in ("hash", "tag_aware"):
            raise ValueError(f"unknown mock mode {mode!r}")
        super().__init__(mock_model_name(mode, seed, dim), dim)
        self.seed = seed
        self.mode = mode
        self.calls = 0

    def _embed_many(self, texts):
        self.calls += len(texts)
        return [mock_embed(t, self.seed, self.mode, self.dim) for t in texts]
