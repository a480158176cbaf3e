# %% [markdown]
# # Embedding the catalog and centering each modality
#
# Users, messages and image captions all become vectors in one space. The
# offline mock embedder stands in for a hosted model here; swap in
# `ProviderConfig(kind="remote")` with an API key in the environment to use
# a real one.

# %%
import numpy as np

from mmnudge.corpus import load_corpus
from mmnudge.matching import center_all
from mmnudge.providers import MockEmbedder
from mmnudge.representation import MODALITIES, demographics_sentence, represent_corpus

corpus = load_corpus()
embedder = MockEmbedder(seed=42, mode="tag_aware")
reps = represent_corpus(corpus, embedder)
print({m: len(reps[m]) for m in MODALITIES}, "embedder calls:", embedder.calls)

# %% [markdown]
# A user vector starts from a short demographics sentence and is nudged
# toward liked activities and away from disliked ones.

# %%
u = corpus.users[0]
print(demographics_sentence(u), "| likes", sorted(u.likes), "| dislikes", sorted(u.dislikes))
print("norm of user_01:", round(float(np.linalg.norm(reps["user"][0].vector)), 4))

# %% [markdown]
# Vectors of the same modality sit close together: the average cosine
# inside a modality is high before centering. Subtracting each modality's
# mean removes that shared offset.

# %%
centered = center_all(reps)
for m in MODALITIES:
    raw = np.stack([r.vector for r in reps[m]])
    print(f"{m:8s} centroid norm {np.linalg.norm(raw.mean(axis=0)):.3f} -> "
          f"{np.linalg.norm(centered[m].vectors.mean(axis=0)):.1e}")
