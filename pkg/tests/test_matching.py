import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mmnudge.errors import ConfigurationError, ValidationError
from mmnudge.matching import (
    PreferenceTable,
    PreferenceWeights,
    center,
    center_all,
    preference,
    preference_table,
    recommend,
    recommendations_from_csv,
    recommendations_to_csv,
    sample_recommendation,
    softmax_distribution,
    top_k,
)
from mmnudge.representation import Representation, represent_corpus


def reps(vectors, modality="message", prefix="msg"):
    return [Representation(f"{prefix}_{k:02d}", modality, v) for k, v in enumerate(vectors, 1)]


def table(scores, message_ids=None, image_ids=None, user="user_01"):
    scores = np.asarray(scores, dtype=float)
    n_m, n_i = scores.shape
    return PreferenceTable(user,
                           tuple(message_ids or [f"msg_{k:02d}" for k in range(1, n_m + 1)]),
                           tuple(image_ids or [f"img_{k:02d}" for k in range(1, n_i + 1)]),
                           scores, PreferenceWeights())


def dot(a, b):
    return math.fsum(float(x) * float(y) for x, y in zip(a, b))


def brute_top_k(t, k):
    entries = [(-float(t.scores[a, b]), t.message_ids[a], t.image_ids[b])
               for a in range(len(t.message_ids)) for b in range(len(t.image_ids))]
    return [(m, i, -s) for s, m, i in sorted(entries)[:k]]


# --- centering ------------------------------------------------------------------

def test_center_single_item():
    c = center(reps([np.array([0.3, -0.2, 0.9])]))
    assert np.array_equal(c.vectors[0], np.zeros(3))


def test_center_symmetric_pair():
    v = np.array([0.6, 0.8, 0.0])
    c = center(reps([v, -v]))
    assert np.array_equal(c.vectors, np.stack([v, -v]))
    assert np.array_equal(c.centroid, np.zeros(3))


def test_center_errors():
    with pytest.raises(ValidationError):
        center([])
    mixed = reps([np.ones(2)]) + reps([np.ones(2)], "image", "img")
    with pytest.raises(ValidationError):
        center(mixed)
    with pytest.raises(ValidationError):
        center(reps([np.ones(2)]), modality="image")
    with pytest.raises(ConfigurationError):
        center(reps([np.ones(2), np.ones(3)]))


def test_center_fixture_messages(corpus, tag_embedder):
    r = represent_corpus(corpus, tag_embedder)
    c = center(r["message"], "message")
    assert np.max(np.abs(c.vectors.mean(axis=0))) < 1e-9


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 16)), elements=st.floats(-10, 10)))
def test_center_invariants(X):
    c = center(reps(list(X)))
    assert np.max(np.abs(c.vectors.mean(axis=0))) < 1e-9
    assert np.max(np.abs(c.vectors + c.centroid - X)) < 1e-12
    for a in range(len(X)):
        for b in range(len(X)):
            assert np.max(np.abs((c.vectors[a] - c.vectors[b]) - (X[a] - X[b]))) < 1e-12


# --- scoring ---------------------------------------------------------------------

def test_preference_hand_example():
    u, m, i = np.array([1.0, 0, 0]), np.array([0.6, 0.8, 0]), np.array([0.6, 0, 0.8])
    oracle = dot(m, i) + dot(u, m) + dot(u, i)
    assert abs(oracle - 1.56) < 1e-12
    assert abs(preference(u, m, i) - 1.56) < 1e-12


def test_preference_orthogonal_is_zero():
    assert preference(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0])) == 0.0


def test_preference_zero_weights():
    rng = np.random.default_rng(1)
    assert preference(*rng.normal(size=(3, 5)), PreferenceWeights(0, 0, 0)) == 0.0


def test_preference_dimension_mismatch():
    with pytest.raises(ConfigurationError):
        preference(np.ones(3), np.ones(3), np.ones(4))


def test_preference_linear_in_weights():
    rng = np.random.default_rng(2)
    for _ in range(100):
        u, m, i = rng.normal(size=(3, 16))
        a, b, c = rng.normal(size=3) * 3
        parts = [preference(u, m, i, PreferenceWeights(*w)) for w in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        assert abs(preference(u, m, i, PreferenceWeights(a, b, c)) - (a * parts[0] + b * parts[1] + c * parts[2])) < 1e-12


def _centered_sets(rng, n_u=3, n_m=4, n_i=5, d=8):
    return center_all({
        "user": reps(rng.normal(size=(n_u, d)), "user", "user"),
        "message": reps(rng.normal(size=(n_m, d)), "message", "msg"),
        "image": reps(rng.normal(size=(n_i, d)), "image", "img"),
    })


def test_table_matches_scalar():
    rng = np.random.default_rng(3)
    c = _centered_sets(rng)
    w = PreferenceWeights(0.5, 1.5, -0.7)
    t = preference_table(("user_01", c["user"].vector("user_01")), c["message"], c["image"], w)
    assert t.shape == (4, 5)
    for a, mid in enumerate(t.message_ids):
        for b, iid in enumerate(t.image_ids):
            expected = preference(c["user"].vector("user_01"), c["message"].vectors[a], c["image"].vectors[b], w)
            assert abs(t.scores[a, b] - expected) < 1e-12
            assert t.score(mid, iid) == t.scores[a, b]


def test_table_without_user_term_is_constant_across_users():
    c = _centered_sets(np.random.default_rng(4))
    w = PreferenceWeights(1, 0, 0)
    t1 = preference_table(("user_01", c["user"].vector("user_01")), c["message"], c["image"], w)
    t2 = preference_table(("user_02", c["user"].vector("user_02")), c["message"], c["image"], w)
    assert np.array_equal(t1.scores, t2.scores)


def test_fixture_table_size(corpus, tag_embedder):
    c = center_all(represent_corpus(corpus, tag_embedder))
    t = preference_table(("user_01", c["user"].vector("user_01")), c["message"], c["image"])
    assert t.scores.size == 2000


def test_table_dimension_mismatch():
    c = _centered_sets(np.random.default_rng(5))
    with pytest.raises(ConfigurationError):
        preference_table(("u", np.ones(3)), c["message"], c["image"])


# --- ranking ---------------------------------------------------------------------

def test_top_k_all_pairs_sorted():
    t = table(np.random.default_rng(6).normal(size=(3, 4)))
    out = top_k(t, 12)
    assert [r.rank for r in out] == list(range(1, 13))
    assert all(a.score >= b.score for a, b in zip(out, out[1:]))


def test_top_k_ties():
    out = top_k(table(np.zeros((4, 4))), 3)
    assert [(r.message_id, r.image_id) for r in out] == [("msg_01", "img_01"), ("msg_01", "img_02"),
                                                         ("msg_01", "img_03")]


def test_top_k_tie_break_uses_ids_not_positions():
    t = table(np.zeros((2, 2)), message_ids=["msg_b", "msg_a"], image_ids=["img_z", "img_y"])
    assert [(r.message_id, r.image_id) for r in top_k(t, 4)] == [
        ("msg_a", "img_y"), ("msg_a", "img_z"), ("msg_b", "img_y"), ("msg_b", "img_z")]


def test_top_k_random_matches_sort():
    t = table(np.random.default_rng(7).normal(size=(5, 6)))
    got = [(r.message_id, r.image_id, r.score) for r in top_k(t, 7)]
    assert got == brute_top_k(t, 7)


def test_top_k_matches_sort_on_200_tables():
    rng = np.random.default_rng(11)
    for n in range(200):
        n_m, n_i = rng.integers(1, 11, size=2)
        # integer scores on even tables force many ties
        scores = rng.integers(-3, 4, size=(n_m, n_i)).astype(float) if n % 2 == 0 else rng.normal(size=(n_m, n_i))
        m_ids = [f"msg_{k:02d}" for k in rng.permutation(n_m) + 1]
        i_ids = [f"img_{k:02d}" for k in rng.permutation(n_i) + 1]
        t = table(scores, m_ids, i_ids)
        for k in (1, int(rng.integers(1, n_m * n_i + 1)), int(n_m * n_i)):
            first = [(r.message_id, r.image_id, r.score) for r in top_k(t, k)]
            assert first == brute_top_k(t, k)
            assert first == [(r.message_id, r.image_id, r.score) for r in top_k(t, k)]


@pytest.mark.parametrize("k", [0, 13])
def test_top_k_range(k):
    with pytest.raises(ValidationError):
        top_k(table(np.zeros((3, 4))), k)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_top_k_invariant_under_affine(data):
    n_m, n_i = data.draw(st.integers(1, 6)), data.draw(st.integers(1, 6))
    scores = data.draw(arrays(np.float64, (n_m, n_i), elements=st.integers(-5, 5).map(float)))
    k = data.draw(st.integers(1, n_m * n_i))
    shift = data.draw(st.integers(-100, 100).map(float))
    scale = data.draw(st.sampled_from([0.5, 2.0, 4.0, 8.0]))
    ids = lambda out: [(r.message_id, r.image_id) for r in out]  # noqa: E731
    base = ids(top_k(table(scores), k))
    assert ids(top_k(table(scores + shift), k)) == base
    assert ids(top_k(table(scores * scale), k)) == base


# --- softmax / sampling -------------------------------------------------------------

def test_softmax_uniform():
    q = softmax_distribution(table(np.full((40, 50), 3.7)))
    assert np.max(np.abs(q.scores - 1 / 2000)) < 1e-12


def test_softmax_two_pairs():
    q = softmax_distribution(table([[0.0, math.log(3)]]))
    assert np.allclose(q.scores, [[0.25, 0.75]], atol=1e-15, rtol=0)


def test_softmax_temperature():
    s = np.array([[0.0, 1.0]])
    q = softmax_distribution(table(s), temperature=0.5).scores
    assert abs(q[0, 1] / q[0, 0] - math.exp(2)) < 1e-12
    with pytest.raises(ValidationError):
        softmax_distribution(table(s), temperature=0)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)), elements=st.floats(-1e3, 1e3)),
       st.floats(-1e3, 1e3))
def test_softmax_sum_and_shift(scores, c):
    q = softmax_distribution(table(scores)).scores
    assert abs(q.sum() - 1) < 1e-9
    assert np.all(q >= 0)
    shifted = softmax_distribution(table(scores + c)).scores
    assert np.max(np.abs(shifted - q)) < 1e-12


def test_sample_point_mass():
    p = np.zeros((3, 3))
    p[1, 2] = 1.0
    for seed in range(50):
        assert sample_recommendation(table(p), seed) == ("msg_02", "img_03")


def test_sample_deterministic():
    q = softmax_distribution(table(np.random.default_rng(8).normal(size=(5, 5))))
    assert sample_recommendation(q, 123) == sample_recommendation(q, 123)
    assert sample_recommendation(q, 123, size=10) == sample_recommendation(q, 123, size=10)


def test_sample_uniform_frequencies():
    q = softmax_distribution(table(np.zeros((40, 50))))
    draws = sample_recommendation(q, 2024, size=100_000)
    counts = {}
    for pair in draws:
        counts[pair] = counts.get(pair, 0) + 1
    p = 1 / 2000
    sigma = math.sqrt(100_000 * p * (1 - p))
    assert len(counts) == 2000
    assert max(abs(n - 100_000 * p) for n in counts.values()) < 5 * sigma
    chi2 = sum((n - 50) ** 2 / 50 for n in counts.values())
    # chi-square with 1999 dof: mean 1999, sd ~63
    assert abs(chi2 - 1999) < 5 * math.sqrt(2 * 1999)


def test_sample_respects_probabilities():
    q = softmax_distribution(table([[0.0, math.log(3)]]))
    draws = sample_recommendation(q, 9, size=40_000)
    frac = sum(1 for d in draws if d == ("msg_01", "img_02")) / 40_000
    assert abs(frac - 0.75) < 5 * math.sqrt(0.75 * 0.25 / 40_000)


# --- whole-catalog helpers ------------------------------------------------------------

def test_recommend_and_csv_round_trip():
    c = _centered_sets(np.random.default_rng(9))
    recs = recommend(c, k=3)
    assert set(recs) == {"user_01", "user_02", "user_03"}
    flat = [r for uid in sorted(recs) for r in recs[uid]]
    assert recommendations_from_csv(recommendations_to_csv(flat)) == flat
