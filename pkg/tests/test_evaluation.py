import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mmnudge.corpus import ImageItem, Message, User
from mmnudge.errors import ValidationError
from mmnudge.evaluation import (
    APPROPRIATE,
    INAPPROPRIATE,
    NEUTRAL,
    check_alignment,
    check_demographics,
    check_dislike_hit,
    check_likes,
    classify,
    demographic_matches,
    evaluate_run,
)
from mmnudge.matching import Recommendation, center_all, recommend
from mmnudge.providers import MockEmbedder
from mmnudge.representation import represent_corpus
from mmnudge.vocab import ACTIVITIES

# First full run: tag_aware mock embedder, seed 42, shipped fixtures, k = 5.
GOLDEN_COUNTS = {APPROPRIATE: 86, INAPPROPRIATE: 14, NEUTRAL: 0}
GOLDEN_RATES = (0.86, 0.14, 0.0)


def msg(*tags, id="msg_01"):
    return Message(id, "text", frozenset(tags))


def img(*tags, gender="unknown", band="unknown", race="unknown", ambiguous=False, id="img_01"):
    return ImageItem(id, "caption", gender, band, race, frozenset(tags), ambiguous)


def user(likes=(), dislikes=(), gender="female", age=23, race="white"):
    return User("user_01", gender, age, race, frozenset(likes), frozenset(dislikes))


def pinned_run(corpus, seed=42, mode="tag_aware", k=5):
    reps = represent_corpus(corpus, MockEmbedder(seed=seed, mode=mode))
    recs = recommend(center_all(reps), k=k)
    return evaluate_run(corpus.users, recs, corpus.messages, corpus.images, k=k)


# --- the four checks ------------------------------------------------------------

def test_alignment_examples():
    assert check_alignment(msg("active", "outdoors"), img("outdoors"))
    assert not check_alignment(msg("crafts"), img("physical"))
    assert check_alignment(msg("mental"), img(ambiguous=True))


def test_untagged_but_unflagged_image_is_not_aligned():
    assert not check_alignment(msg("mental"), img())


def test_likes_examples():
    assert check_likes(msg("active"), user(likes={"active", "outdoors"}))
    assert not check_likes(msg("crafts"), user(likes={"active"}))
    for a in ACTIVITIES:
        assert not check_likes(msg(a), user())


def test_dislike_examples():
    assert check_dislike_hit(msg("active"), user(dislikes={"active", "outdoors"}))
    assert not check_dislike_hit(msg("crafts"), user(dislikes={"active"}))
    assert not check_dislike_hit(msg("crafts"), user())


def test_demographics_examples():
    assert demographic_matches(img(gender="female", band="young", race="white"), user()) == 3
    assert check_demographics(img(gender="female", band="young", race="white"), user())
    senior = user(gender="male", age=60, race="asian")
    assert demographic_matches(img(gender="female", band="senior"), senior) == 1
    assert not check_demographics(img(gender="female", band="senior"), senior)
    assert check_demographics(img(gender="female", band="adult", race="white"),
                              user(gender="female", age=40, race="black"))


def test_demographics_case_insensitive_and_unknown_never_matches():
    assert check_demographics(img(gender="female", race="white"), user(gender="Female", race="WHITE"))
    assert demographic_matches(img(), user()) == 0


# --- classify ---------------------------------------------------------------------

def test_classify_examples():
    u = user(likes={"active"}, dislikes={"crafts"}, gender="male", age=70, race="asian")
    assert classify(u, msg("active"), img("active")).verdict == APPROPRIATE
    assert classify(u, msg("active"), img("arts", gender="male", band="senior")).verdict == INAPPROPRIATE
    assert classify(u, msg("learning"), img("learning")).verdict == NEUTRAL


def test_dislike_beats_appropriate():
    u = user(likes={"active"}, dislikes={"outdoors"})
    v = classify(u, msg("active", "outdoors"), img("active"))
    assert v.cond1_aligned and v.cond2_likes and v.dislike_hit
    assert v.verdict == INAPPROPRIATE
    assert v.glyph == "✗"


tags = st.frozensets(st.sampled_from(ACTIVITIES), max_size=4)


@given(tags, tags, tags, tags, st.sampled_from(["male", "female", "unknown"]),
       st.sampled_from(["young", "adult", "senior", "unknown"]), st.booleans())
def test_classify_truth_table(m_tags, i_tags, likes, dislikes, gender, band, ambiguous):
    u = User("user_01", "female", 30, "white", likes, dislikes - likes)
    v = classify(u, msg(*m_tags), img(*i_tags, gender=gender, band=band, ambiguous=ambiguous))
    appropriate = v.cond1_aligned and (v.cond2_likes or v.cond3_demographics) and not v.dislike_hit
    inappropriate = not v.cond1_aligned or v.dislike_hit
    expected = APPROPRIATE if appropriate else INAPPROPRIATE if inappropriate else NEUTRAL
    assert v.verdict == expected
    assert classify(u, msg(*m_tags), img(*i_tags, gender=gender, band=band, ambiguous=ambiguous)) == v


# --- evaluate_run -------------------------------------------------------------------

def test_all_appropriate():
    u = user(likes={"arts"})
    report = evaluate_run([u], {"user_01": [Recommendation(1, "msg_01", "img_01", 0.0)]},
                          [msg("arts")], [img("arts")])
    assert report.appropriate_rate == 1.0
    assert report.inappropriate_rate == report.neutral_rate == 0.0


def test_empty_and_unknown_inputs():
    with pytest.raises(ValidationError):
        evaluate_run([user()], {}, [msg()], [img()])
    with pytest.raises(ValidationError, match="unknown user"):
        evaluate_run([user()], {"user_99": [Recommendation(1, "msg_01", "img_01", 0.0)]}, [msg()], [img()])
    with pytest.raises(ValidationError, match="unknown item"):
        evaluate_run([user()], {"user_01": [Recommendation(1, "msg_07", "img_01", 0.0)]}, [msg()], [img()])


def test_pinned_golden_run(corpus):
    report = pinned_run(corpus)
    assert report.total == 100
    assert report.k == 5
    assert all(len(v) == 5 for v in report.verdicts.values())
    counts = {c: sum(v.verdict == c for vs in report.verdicts.values() for v in vs) for c in GOLDEN_COUNTS}
    assert counts == GOLDEN_COUNTS
    assert (report.appropriate_rate, report.inappropriate_rate, report.neutral_rate) == GOLDEN_RATES


@pytest.mark.parametrize("mode, seed", [("tag_aware", 3), ("hash", 3), ("hash", 8)])
def test_rates_sum_to_one(corpus, mode, seed):
    r = pinned_run(corpus, seed=seed, mode=mode, k=3)
    assert abs(r.appropriate_rate + r.inappropriate_rate + r.neutral_rate - 1) < 1e-12
    assert all(0 <= x <= 1 for x in (r.appropriate_rate, r.inappropriate_rate, r.neutral_rate))


def test_verdicts_ignore_embeddings(corpus):
    """Same pairs under a different embedder yield the same verdicts."""
    recs = {u.id: [Recommendation(1, "msg_03", "img_05", 0.0, u.id)] for u in corpus.users}
    a = evaluate_run(corpus.users, recs, corpus.messages, corpus.images)
    recs2 = {uid: [Recommendation(1, r[0].message_id, r[0].image_id, 123.0, uid)] for uid, r in recs.items()}
    b = evaluate_run(corpus.users, recs2, corpus.messages, corpus.images)
    assert a.verdicts == b.verdicts


def test_report_serialisation(corpus):
    report = pinned_run(corpus)
    d = json.loads(report.to_json())
    assert d["total"] == 100 and d["appropriate_rate"] == 0.86
    assert sum(d["per_user"]["user_01"]["counts"].values()) == 5
    md = report.to_markdown(corpus.messages, corpus.images)
    rows = [line for line in md.splitlines() if line.startswith("| user_")]
    assert len(rows) == 100
    assert "appropriate 86.0%" in md
