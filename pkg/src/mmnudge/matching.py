"""Centering, tuple scoring, ranking and sampling.

For a user u, message m and image i with centered representations
ū, m̄, ī the score is

    p(u, m, i) = w_mi <m̄, ī> + w_um <ū, m̄> + w_ui <ū, ī>

and a user's table holds p over every (message, image) pair.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from mmnudge.errors import ConfigurationError, ValidationError


@dataclass(frozen=True, eq=False)
class CenteredSet:
    """Centered vectors of one modality plus the mean that was removed."""

    modality: str
    ids: tuple
    vectors: np.ndarray  # (n, d), rows follow ``ids``
    centroid: np.ndarray

    def __len__(self):
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def vector(self, item_id) -> np.ndarray:
        try:
            return self.vectors[self.ids.index(item_id)]
        except ValueError:
            raise KeyError(item_id) from None

    def items(self):
        return list(zip(self.ids, self.vectors))


def center(representations, modality=None) -> CenteredSet:
    """Subtract the modality mean from every representation.

    All items must share one modality (checked against ``modality`` when
    given) and one dimension.
    """
    reps = list(representations)
    if not reps:
        raise ValidationError("cannot center an empty set: the centroid is undefined")
    kinds = {r.modality for r in reps}
    if len(kinds) > 1:
        raise ValidationError(f"mixed modalities {sorted(kinds)} in one centering set")
    kind = kinds.pop()
    if modality is not None and modality != kind:
        raise ValidationError(f"expected modality {modality!r}, got {kind!r}")
    dims = {r.vector.shape[0] for r in reps}
    if len(dims) > 1:
        raise ConfigurationError(f"mixed dimensions {sorted(dims)} in one centering set")
    raw = np.stack([r.vector for r in reps])
    centroid = raw.mean(axis=0)
    return CenteredSet(kind, tuple(r.id for r in reps), raw - centroid, centroid)


@dataclass(frozen=True)
class PreferenceWeights:
    mi: float = 1.0
    um: float = 1.0
    ui: float = 1.0

    def __post_init__(self):
        if not all(np.isfinite([self.mi, self.um, self.ui])):
            raise ValidationError("preference weights must be finite")


def preference(u_bar, m_bar, i_bar, w: PreferenceWeights = PreferenceWeights()) -> float:
    u, m, i = (np.asarray(v, dtype=np.float64) for v in (u_bar, m_bar, i_bar))
    if not (u.shape == m.shape == i.shape) or u.ndim != 1:
        raise ConfigurationError(f"dimension mismatch: {u.shape}, {m.shape}, {i.shape}")
    return float(w.mi * np.dot(m, i) + w.um * np.dot(u, m) + w.ui * np.dot(u, i))


@dataclass(frozen=True, eq=False)
class PreferenceTable:
    user_id: str
    message_ids: tuple
    image_ids: tuple
    scores: np.ndarray  # (|M|, |I|)
    weights: PreferenceWeights

    @property
    def shape(self):
        return self.scores.shape

    def score(self, message_id, image_id) -> float:
        return float(self.scores[self.message_ids.index(message_id), self.image_ids.index(image_id)])

    def with_scores(self, scores) -> "PreferenceTable":
        return PreferenceTable(self.user_id, self.message_ids, self.image_ids,
                               np.asarray(scores, dtype=np.float64), self.weights)


def preference_table(user, messages: CenteredSet, images: CenteredSet,
                     w: PreferenceWeights = PreferenceWeights()) -> PreferenceTable:
    """Score every (message, image) pair for one user.

    ``user`` is an ``(id, centered_vector)`` pair.
    """
    user_id, u = user
    u = np.asarray(u, dtype=np.float64)
    if len(messages) == 0 or len(images) == 0:
        raise ValidationError("preference table needs non-empty message and image catalogs")
    if not (u.shape[0] == messages.dim == images.dim):
        raise ConfigurationError(f"dimension mismatch: user {u.shape[0]}, "
                                 f"messages {messages.dim}, images {images.dim}")
    M, I = messages.vectors, images.vectors
    scores = w.mi * (M @ I.T) + w.um * (M @ u)[:, None] + w.ui * (I @ u)[None, :]
    if not np.all(np.isfinite(scores)):
        raise ValidationError(f"non-finite preference scores for {user_id}")
    return PreferenceTable(user_id, messages.ids, images.ids, scores, w)


@dataclass(frozen=True)
class Recommendation:
    rank: int
    message_id: str
    image_id: str
    score: float
    user_id: str = ""


def _id_ranks(ids) -> np.ndarray:
    order = sorted(range(len(ids)), key=lambda k: ids[k])
    ranks = np.empty(len(ids), dtype=np.int64)
    ranks[order] = np.arange(len(ids))
    return ranks


def top_k(table: PreferenceTable, k: int) -> list[Recommendation]:
    """The ``k`` best pairs; ties go to the smaller (message id, image id)."""
    n_m, n_i = table.scores.shape
    if not 1 <= k <= n_m * n_i:
        raise ValidationError(f"k must be in [1, {n_m * n_i}], got {k}")
    m_rank = np.repeat(_id_ranks(table.message_ids), n_i)
    i_rank = np.tile(_id_ranks(table.image_ids), n_m)
    flat = table.scores.ravel()
    order = np.lexsort((i_rank, m_rank, -flat))[:k]
    return [
        Recommendation(r + 1, table.message_ids[j // n_i], table.image_ids[j % n_i],
                       float(flat[j]), table.user_id)
        for r, j in enumerate(order)
    ]


def softmax_distribution(table: PreferenceTable, temperature: float = 1.0) -> PreferenceTable:
    """Softmax over all pairs; returned as a table of probabilities."""
    if not temperature > 0:
        raise ValidationError(f"temperature must be positive, got {temperature}")
    z = table.scores / temperature
    e = np.exp(z - z.max())
    return table.with_scores(e / e.sum())


def sample_recommendation(distribution: PreferenceTable, seed, size=None):
    """Inverse-CDF draw of a (message id, image id) pair.

    Pairs are laid out in (message id, image id) order before accumulating,
    so the draw depends only on the probabilities and the seed. With
    ``size`` a list of that many draws from one generator is returned.
    """
    m_order = sorted(range(len(distribution.message_ids)), key=lambda k: distribution.message_ids[k])
    i_order = sorted(range(len(distribution.image_ids)), key=lambda k: distribution.image_ids[k])
    probs = distribution.scores[np.ix_(m_order, i_order)].ravel()
    cdf = np.cumsum(probs)
    u = np.random.default_rng(seed).random(size) * cdf[-1]
    js = np.minimum(np.searchsorted(cdf, u, side="right"), probs.size - 1)
    n_i = len(i_order)

    def pair(j):
        return distribution.message_ids[m_order[j // n_i]], distribution.image_ids[i_order[j % n_i]]

    if size is None:
        return pair(int(js))
    return [pair(int(j)) for j in js]


def center_all(reps: dict) -> dict[str, CenteredSet]:
    return {modality: center(items, modality) for modality, items in reps.items() if items}


def recommend(centered: dict, k: int = 5, w: PreferenceWeights = PreferenceWeights(),
              user_ids=None) -> dict[str, list[Recommendation]]:
    users = centered["user"]
    ids = users.ids if user_ids is None else user_ids
    return {
        uid: top_k(preference_table((uid, users.vector(uid)), centered["message"], centered["image"], w), k)
        for uid in ids
    }


CSV_FIELDS = ["user_id", "message_id", "image_id", "score", "rank"]


def recommendations_to_csv(recs) -> str:
    """CSV text for a flat list of recommendations; scores at full precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in recs:
        w.writerow([r.user_id, r.message_id, r.image_id, repr(r.score), r.rank])
    return buf.getvalue()


def recommendations_from_csv(text: str) -> list[Recommendation]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [Recommendation(int(r["rank"]), r["message_id"], r["image_id"], float(r["score"]), r["user_id"])
            for r in rows]


def recommendations_to_json(recs) -> str:
    return json.dumps([
        {"user_id": r.user_id, "message_id": r.message_id, "image_id": r.image_id,
         "score": r.score, "rank": r.rank}
        for r in recs
    ], indent=2) + "\n"
