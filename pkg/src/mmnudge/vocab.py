"""Fixed vocabularies shared by the corpus, the mock embedder and the rubric."""

from __future__ import annotations

ACTIVITIES = (
    "active", "passive", "indoors", "outdoors", "mental", "physical",
    "arts", "crafts", "exploration", "relaxation", "learning", "homemaking",
)
ACTIVITY_SET = frozenset(ACTIVITIES)

GENDERS = ("male", "female")
AGE_BANDS = ("young", "adult", "senior")
UNKNOWN = "unknown"

# inclusive lower bound, exclusive upper bound
_BAND_LIMITS = {"young": (18, 35), "adult": (35, 55), "senior": (55, None)}


def age_band(age: int) -> str | None:
    """Coarse band for an integer age; ``None`` below 18."""
    for band, (lo, hi) in _BAND_LIMITS.items():
        if age >= lo and (hi is None or age < hi):
            return band
    return None


def in_band(age: int, band: str) -> bool:
    return band in _BAND_LIMITS and age_band(age) == band
