"""Users, messages and images: CSV ingestion, serialization, validation.

Multi-valued cells (likes, dislikes, activity tags) are ``;``-separated.
Ids are not stored in the files; they come from row order (``user_01``,
``msg_01``, ``img_01``) so they sort the same way the rows do.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from mmnudge.errors import ValidationError
from mmnudge.vocab import ACTIVITIES, ACTIVITY_SET, AGE_BANDS, UNKNOWN

USER_GENDERS = ("male", "female", "non-binary")
IMAGE_GENDERS = ("male", "female", UNKNOWN)
USER_HEADER = ["Gender", "Age", "Race", "Likes", "Dislikes"]
MESSAGE_HEADER = ["text", "activity_tags"]
IMAGE_HEADER = ["caption", "gender", "age_band", "race", "activity_tags", "ambiguous"]


@dataclass(frozen=True)
class User:
    id: str
    gender: str
    age: int
    race: str
    likes: frozenset = frozenset()
    dislikes: frozenset = frozenset()


@dataclass(frozen=True)
class Message:
    id: str
    text: str
    activity_tags: frozenset = frozenset()


@dataclass(frozen=True)
class ImageItem:
    id: str
    caption: str
    gender: str = UNKNOWN
    age_band: str = UNKNOWN
    race: str = UNKNOWN
    activity_tags: frozenset = frozenset()
    ambiguous: bool = False


@dataclass
class Corpus:
    users: list[User]
    messages: list[Message]
    images: list[ImageItem]


def make_ids(prefix: str, n: int) -> list[str]:
    width = max(2, len(str(n)))
    return [f"{prefix}_{k:0{width}d}" for k in range(1, n + 1)]


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture file (``users.csv``, ``messages.csv``, ``images.csv``)."""
    return Path(str(resources.files("mmnudge.data").joinpath(name)))


def _split(cell: str | None) -> list[str]:
    if cell is None:
        return []
    return [tok.strip().lower() for tok in cell.split(";") if tok.strip()]


def _activities(cell, line, column) -> frozenset:
    tokens = _split(cell)
    for tok in tokens:
        if tok not in ACTIVITY_SET:
            raise ValidationError(f"row {line}: unknown activity {tok!r} in column {column}")
    return frozenset(tokens)


def _rows(path, header):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in header if c not in (reader.fieldnames or [])]
        if missing:
            raise ValidationError(f"{path.name}: missing column(s) {', '.join(missing)}")
        # line 1 is the header
        return [(k + 2, row) for k, row in enumerate(reader)]


def load_users(path) -> list[User]:
    rows = _rows(path, USER_HEADER)
    users = []
    for uid, (line, row) in zip(make_ids("user", len(rows)), rows):
        gender = (row["Gender"] or "").strip()
        if gender.lower() not in USER_GENDERS:
            raise ValidationError(f"row {line}: unknown gender {gender!r}")
        try:
            age = int((row["Age"] or "").strip())
        except ValueError:
            raise ValidationError(f"row {line}: age {row['Age']!r} is not an integer") from None
        if age <= 0:
            raise ValidationError(f"row {line}: age must be positive, got {age}")
        race = (row["Race"] or "").strip()
        if not race:
            raise ValidationError(f"row {line}: empty race")
        likes = _activities(row["Likes"], line, "Likes")
        dislikes = _activities(row["Dislikes"], line, "Dislikes")
        overlap = likes & dislikes
        if overlap:
            raise ValidationError(f"row {line}: {', '.join(sorted(overlap))} both liked and disliked")
        users.append(User(uid, gender, age, race, likes, dislikes))
    return users


def load_messages(path) -> list[Message]:
    rows = _rows(path, MESSAGE_HEADER)
    messages = []
    for mid, (line, row) in zip(make_ids("msg", len(rows)), rows):
        text = (row["text"] or "").strip()
        if not text:
            raise ValidationError(f"row {line}: empty message text")
        tags = _activities(row["activity_tags"], line, "activity_tags")
        if not tags:
            raise ValidationError(f"row {line}: message needs at least one activity tag")
        messages.append(Message(mid, text, tags))
    return messages


def load_images(path) -> list[ImageItem]:
    rows = _rows(path, IMAGE_HEADER[:-1])
    images = []
    for iid, (line, row) in zip(make_ids("img", len(rows)), rows):
        caption = (row["caption"] or "").strip()
        if not caption:
            raise ValidationError(f"row {line}: empty caption")
        gender = (row["gender"] or UNKNOWN).strip().lower()
        if gender not in IMAGE_GENDERS:
            raise ValidationError(f"row {line}: unknown gender {gender!r}")
        band = (row["age_band"] or UNKNOWN).strip().lower()
        if band not in AGE_BANDS + (UNKNOWN,):
            raise ValidationError(f"row {line}: unknown age band {band!r}")
        race = (row["race"] or UNKNOWN).strip().lower()
        tags = _activities(row["activity_tags"], line, "activity_tags")
        flag = (row.get("ambiguous") or "false").strip().lower()
        if flag not in ("true", "false", "1", "0", "yes", "no"):
            raise ValidationError(f"row {line}: ambiguous must be true/false, got {flag!r}")
        images.append(ImageItem(iid, caption, gender, band, race, tags, flag in ("true", "1", "yes")))
    return images


def load_corpus(users=None, messages=None, images=None) -> Corpus:
    """Load the three catalogs, defaulting to the shipped fixtures."""
    return Corpus(
        load_users(users or fixture_path("users.csv")),
        load_messages(messages or fixture_path("messages.csv")),
        load_images(images or fixture_path("images.csv")),
    )


def _join(tags) -> str:
    # canonical order keeps serialized files stable
    return ";".join(a for a in ACTIVITIES if a in tags)


def write_users(users, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(USER_HEADER)
        for u in users:
            w.writerow([u.gender, u.age, u.race, _join(u.likes), _join(u.dislikes)])


def write_messages(messages, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(MESSAGE_HEADER)
        for m in messages:
            w.writerow([m.text, _join(m.activity_tags)])


def write_images(images, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(IMAGE_HEADER)
        for i in images:
            w.writerow([i.caption, i.gender, i.age_band, i.race, _join(i.activity_tags),
                        "true" if i.ambiguous else "false"])


@dataclass
class ValidationReport:
    counts: dict
    coverage: dict
    duplicate_ids: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "counts": self.counts,
            "coverage": self.coverage,
            "duplicate_ids": self.duplicate_ids,
            "failures": self.failures,
            "warnings": self.warnings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def validate_corpus(users, messages, images) -> ValidationReport:
    """Check catalogs assembled by any means; never raises."""
    failures, warnings = [], []

    seen: dict[str, int] = {}
    for item in [*users, *messages, *images]:
        seen[item.id] = seen.get(item.id, 0) + 1
    duplicates = sorted(k for k, n in seen.items() if n > 1)
    failures += [f"duplicate id {k!r}" for k in duplicates]

    for u in users:
        if u.likes & u.dislikes:
            failures.append(f"{u.id}: likes and dislikes overlap on {sorted(u.likes & u.dislikes)}")
        for tok in sorted((u.likes | u.dislikes) - ACTIVITY_SET):
            failures.append(f"{u.id}: unknown activity {tok!r}")
        if u.age <= 0:
            failures.append(f"{u.id}: non-positive age {u.age}")
    for m in messages:
        if not m.text.strip():
            failures.append(f"{m.id}: empty text")
        if not m.activity_tags:
            failures.append(f"{m.id}: no activity tags")
        for tok in sorted(m.activity_tags - ACTIVITY_SET):
            failures.append(f"{m.id}: unknown activity {tok!r}")
    for i in images:
        if not i.caption.strip():
            failures.append(f"{i.id}: empty caption")
        for tok in sorted(i.activity_tags - ACTIVITY_SET):
            failures.append(f"{i.id}: unknown activity {tok!r}")
        if i.ambiguous and i.activity_tags:
            warnings.append(f"{i.id}: flagged ambiguous but carries activity tags")
        if not i.ambiguous and not i.activity_tags:
            warnings.append(f"{i.id}: no activity tags and not flagged ambiguous")

    coverage = {a: sorted(m.id for m in messages if a in m.activity_tags) for a in ACTIVITIES}
    warnings += [f"no message covers activity {a!r}" for a, ids in coverage.items() if not ids]

    counts = {
        "users": len(users),
        "messages": len(messages),
        "images": len(images),
        "pairs_per_user": len(messages) * len(images),
    }
    return ValidationReport(counts, coverage, duplicates, failures, warnings)
