# %% [markdown]
# # Scoring every message/image pair for one user
#
# 40 messages and 50 images make 2000 candidate pairs per user. Each pair is
# scored by the sum of the three pairwise inner products between centered
# user, message and image vectors.

# %%
import numpy as np

from mmnudge.corpus import load_corpus
from mmnudge.matching import (
    PreferenceWeights,
    center_all,
    preference_table,
    sample_recommendation,
    softmax_distribution,
    top_k,
)
from mmnudge.providers import MockEmbedder
from mmnudge.representation import represent_corpus

corpus = load_corpus()
centered = center_all(represent_corpus(corpus, MockEmbedder(seed=42)))
text = {m.id: m.text for m in corpus.messages}
caption = {i.id: i.caption for i in corpus.images}

user = ("user_01", centered["user"].vector("user_01"))
table = preference_table(user, centered["message"], centered["image"])
print("table shape:", table.shape, "score range:", np.round([table.scores.min(), table.scores.max()], 3))

# %%
for r in top_k(table, 5):
    print(f"{r.rank}. {r.score:+.3f}  {text[r.message_id]!r}  /  {caption[r.image_id]!r}")

# %% [markdown]
# Dropping the user terms leaves a ranking that is the same for everyone.

# %%
generic = preference_table(user, centered["message"], centered["image"], PreferenceWeights(1, 0, 0))
print([(r.message_id, r.image_id) for r in top_k(generic, 3)])

# %% [markdown]
# For variety, a pair can be drawn from a softmax over the table instead of
# always taking the best one. Lower temperatures concentrate the draw.

# %%
for temperature in (1.0, 0.1, 0.02):
    dist = softmax_distribution(table, temperature)
    draws = sample_recommendation(dist, seed=7, size=1000)
    best = top_k(table, 1)[0]
    share = sum(d == (best.message_id, best.image_id) for d in draws) / len(draws)
    print(f"T={temperature:<5} max p={dist.scores.max():.4f}  share of top pair in 1000 draws: {share:.3f}")
