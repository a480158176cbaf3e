"""Appropriateness rubric for (user, message, image) recommendations.

Conditions, decided from fixture annotations only:

1. aligned       the message and image share an activity tag, or the image
                 is a generic scene (no tags, flagged ambiguous)
2. likes         the message shares a tag with the user's likes
3. demographics  the image subject matches at least two of the user's
                 gender, age band and race

Appropriate when 1 holds together with 2 or 3. Inappropriate when 1 fails
or the message hits a dislike. A dislike hit wins over an otherwise
appropriate verdict. Anything else is Neutral.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from mmnudge.errors import ValidationError
from mmnudge.vocab import UNKNOWN, in_band

APPROPRIATE = "Appropriate"
INAPPROPRIATE = "Inappropriate"
NEUTRAL = "Neutral"
CLASSES = (APPROPRIATE, INAPPROPRIATE, NEUTRAL)
GLYPHS = {APPROPRIATE: "✓", INAPPROPRIATE: "✗", NEUTRAL: "~"}


def check_alignment(m, i) -> bool:
    if m.activity_tags & i.activity_tags:
        return True
    return not i.activity_tags and i.ambiguous


def check_likes(m, u) -> bool:
    return bool(m.activity_tags & u.likes)


def check_dislike_hit(m, u) -> bool:
    return bool(m.activity_tags & u.dislikes)


def demographic_matches(i, u) -> int:
    gender = i.gender != UNKNOWN and i.gender.lower() == u.gender.strip().lower()
    age = i.age_band != UNKNOWN and in_band(u.age, i.age_band)
    race = i.race != UNKNOWN and i.race.lower() == u.race.strip().lower()
    return int(gender) + int(age) + int(race)


def check_demographics(i, u) -> bool:
    return demographic_matches(i, u) >= 2


@dataclass(frozen=True)
class RecommendationVerdict:
    user_id: str
    message_id: str
    image_id: str
    cond1_aligned: bool
    cond2_likes: bool
    cond3_demographics: bool
    dislike_hit: bool
    verdict: str

    @property
    def glyph(self) -> str:
        return GLYPHS[self.verdict]


def classify(u, m, i) -> RecommendationVerdict:
    c1 = check_alignment(m, i)
    c2 = check_likes(m, u)
    c3 = check_demographics(i, u)
    hit = check_dislike_hit(m, u)
    if not c1 or hit:
        verdict = INAPPROPRIATE
    elif c2 or c3:
        verdict = APPROPRIATE
    else:
        verdict = NEUTRAL
    return RecommendationVerdict(u.id, m.id, i.id, c1, c2, c3, hit, verdict)


@dataclass
class EvaluationReport:
    k: int
    verdicts: dict  # user id -> list of verdicts in rank order
    appropriate_rate: float
    inappropriate_rate: float
    neutral_rate: float

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.verdicts.values())

    def to_dict(self) -> dict:
        per_user = {}
        for uid, vs in self.verdicts.items():
            per_user[uid] = {
                "counts": {c: sum(v.verdict == c for v in vs) for c in CLASSES},
                "verdicts": [asdict(v) for v in vs],
            }
        return {
            "k": self.k,
            "total": self.total,
            "appropriate_rate": self.appropriate_rate,
            "inappropriate_rate": self.inappropriate_rate,
            "neutral_rate": self.neutral_rate,
            "per_user": per_user,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_markdown(self, messages=None, images=None) -> str:
        """Per-user table of ranked picks with verdict glyphs."""
        text = {m.id: m.text for m in messages or []}
        caption = {i.id: i.caption for i in images or []}
        lines = [
            f"# Evaluation (top {self.k})",
            "",
            f"appropriate {self.appropriate_rate:.1%} | inappropriate {self.inappropriate_rate:.1%} "
            f"| neutral {self.neutral_rate:.1%} | n = {self.total}",
            "",
            "| user | rank | message | image | aligned | likes | demographics | dislike | verdict |",
            "|---|---|---|---|---|---|---|---|---|",
        ]
        yn = {True: "yes", False: "no"}
        for uid, vs in self.verdicts.items():
            for rank, v in enumerate(vs, 1):
                msg = text.get(v.message_id, v.message_id).replace("|", "/")
                img = caption.get(v.image_id, v.image_id).replace("|", "/")
                lines.append(
                    f"| {uid} | {rank} | {msg} | {img} | {yn[v.cond1_aligned]} | {yn[v.cond2_likes]} "
                    f"| {yn[v.cond3_demographics]} | {yn[v.dislike_hit]} | {v.glyph} {v.verdict} |"
                )
        return "\n".join(lines) + "\n"


def evaluate_run(users, recommendations: dict, messages, images, k=None) -> EvaluationReport:
    """Classify every recommendation and aggregate the class rates.

    ``recommendations`` maps user id to that user's ranked list (objects
    with ``message_id`` and ``image_id``).
    """
    users_by_id = {u.id: u for u in users}
    msgs = {m.id: m for m in messages}
    imgs = {i.id: i for i in images}
    verdicts = {}
    for uid, recs in recommendations.items():
        if uid not in users_by_id:
            raise ValidationError(f"recommendations for unknown user {uid!r}")
        try:
            verdicts[uid] = [classify(users_by_id[uid], msgs[r.message_id], imgs[r.image_id]) for r in recs]
        except KeyError as exc:
            raise ValidationError(f"recommendation for {uid} references unknown item {exc}") from None
    n = sum(len(v) for v in verdicts.values())
    if n == 0:
        raise ValidationError("no recommendations to evaluate")
    counts = {c: sum(v.verdict == c for vs in verdicts.values() for v in vs) for c in CLASSES}
    if k is None:
        k = max(len(v) for v in verdicts.values())
    return EvaluationReport(k, verdicts, counts[APPROPRIATE] / n, counts[INAPPROPRIATE] / n, counts[NEUTRAL] / n)
