# %% [markdown]
# # Geometry of the joint space before and after centering
#
# Project all 110 catalog vectors onto their top two principal components
# and compare how tightly each modality clusters.

# %%
import numpy as np

from mmnudge.corpus import load_corpus
from mmnudge.diagnostics import cluster_stats, fit_pca, project
from mmnudge.matching import center_all
from mmnudge.providers import MockEmbedder
from mmnudge.representation import MODALITIES, represent_corpus

corpus = load_corpus()
reps = represent_corpus(corpus, MockEmbedder(seed=42))
centered = center_all(reps)
labels = np.array([m for m in MODALITIES for _ in reps[m]])
raw = np.stack([r.vector for m in MODALITIES for r in reps[m]])
cen = np.vstack([centered[m].vectors for m in MODALITIES])

# %%
for name, X in (("uncentered", raw), ("centered", cen)):
    model = fit_pca(X)
    P = project(model, X)
    print(f"{name}: explained variance {np.round(model.explained_variance, 4)}, "
          f"iterations {model.iterations}")
    for m in MODALITIES:
        print(f"   {m:8s} mean position {np.round(P[labels == m].mean(axis=0), 3)}")

# %% [markdown]
# Before centering the modalities form separate islands along the first
# components. After centering their means all sit at the origin, and the
# average within-modality cosine drops to about zero.

# %%
for name, X in (("uncentered", raw), ("centered", cen)):
    s = cluster_stats({m: X[labels == m] for m in MODALITIES})
    print(f"{name:10s} intra {s.mean_intra_cosine:+.4f}  inter {s.mean_inter_cosine:+.4f}")
