"""End-to-end stages with file handoffs under one output directory.

    validate   -> validation.json
    embed      -> representations.json (+ embedding_cache.jsonl)
    recommend  -> recommendations.csv, recommendations.json
    evaluate   -> evaluation.json, evaluation.md
    diagnose   -> pca_points.csv, cluster_stats.json

Each stage reads what the previous one wrote, so a changed catalog only
re-embeds the texts missing from the cache.
"""

from __future__ import annotations

import json
import logging
from dataclasses import replace
from pathlib import Path

import numpy as np

from mmnudge._io import write_atomic
from mmnudge.config import RunConfig
from mmnudge.corpus import load_corpus, validate_corpus
from mmnudge.diagnostics import cluster_stats, emit_plot_data, fit_pca, plot_rows, project
from mmnudge.errors import ValidationError
from mmnudge.evaluation import evaluate_run
from mmnudge.matching import (
    Recommendation,
    center_all,
    preference_table,
    recommend,
    recommendations_from_csv,
    recommendations_to_csv,
    recommendations_to_json,
    sample_recommendation,
    softmax_distribution,
)
from mmnudge.providers import make_embedder
from mmnudge.representation import MODALITIES, export_representations, load_representations, represent_corpus

log = logging.getLogger(__name__)

VALIDATION = "validation.json"
REPRESENTATIONS = "representations.json"
RECOMMENDATIONS = "recommendations.csv"
RECOMMENDATIONS_JSON = "recommendations.json"
EVALUATION = "evaluation.json"
EVALUATION_MD = "evaluation.md"
PCA_POINTS = "pca_points.csv"
CLUSTER_STATS = "cluster_stats.json"


class MissingStageOutput(FileNotFoundError):
    pass


def _require(path: Path, stage: str) -> Path:
    if not path.is_file():
        raise MissingStageOutput(f"{path} not found; run `mmnudge {stage}` first")
    return path


def _corpus(cfg: RunConfig):
    cfg.check_files()
    return load_corpus(cfg.users, cfg.messages, cfg.images)


def run_validate(cfg: RunConfig):
    corpus = _corpus(cfg)
    report = validate_corpus(corpus.users, corpus.messages, corpus.images)
    write_atomic(cfg.out / VALIDATION, report.to_json() + "\n")
    return report


def build_embedder(cfg: RunConfig):
    provider = cfg.provider
    if not provider.cache_path:
        provider = replace(provider, cache_path=str(cfg.cache_path))
    return make_embedder(provider)


def run_embed(cfg: RunConfig, embedder=None):
    corpus = _corpus(cfg)
    embedder = embedder or build_embedder(cfg)
    reps = represent_corpus(corpus, embedder, cfg.user_weights)
    export_representations(reps, cfg.out / REPRESENTATIONS)
    return reps, embedder


def _load_reps(cfg: RunConfig):
    return load_representations(_require(cfg.out / REPRESENTATIONS, "embed"))


def run_recommend(cfg: RunConfig, user="all", sample=False):
    centered = center_all(_load_reps(cfg))
    users = centered["user"]
    if user in (None, "all"):
        user_ids = list(users.ids)
    elif user in users.ids:
        user_ids = [user]
    else:
        raise ValidationError(f"unknown user {user!r}")

    if sample:
        recs = {}
        for uid in user_ids:
            table = preference_table((uid, users.vector(uid)), centered["message"], centered["image"],
                                     cfg.preference_weights)
            dist = softmax_distribution(table, cfg.temperature)
            mid, iid = sample_recommendation(dist, [cfg.seed, users.ids.index(uid)])
            recs[uid] = [Recommendation(1, mid, iid, table.score(mid, iid), uid)]
    else:
        recs = recommend(centered, cfg.k, cfg.preference_weights, user_ids)

    flat = [r for uid in user_ids for r in recs[uid]]
    write_atomic(cfg.out / RECOMMENDATIONS, recommendations_to_csv(flat))
    write_atomic(cfg.out / RECOMMENDATIONS_JSON, recommendations_to_json(flat))
    return recs


def run_evaluate(cfg: RunConfig):
    corpus = _corpus(cfg)
    path = _require(cfg.out / RECOMMENDATIONS, "recommend")
    flat = recommendations_from_csv(path.read_text(encoding="utf-8"))
    if not flat:
        raise ValidationError(f"{path} holds no recommendations")
    recs: dict = {}
    for r in flat:
        recs.setdefault(r.user_id, []).append(r)
    for uid in recs:
        recs[uid].sort(key=lambda r: r.rank)
    report = evaluate_run(corpus.users, recs, corpus.messages, corpus.images)
    write_atomic(cfg.out / EVALUATION, report.to_json())
    write_atomic(cfg.out / EVALUATION_MD, report.to_markdown(corpus.messages, corpus.images))
    return report


def run_diagnose(cfg: RunConfig):
    reps = _load_reps(cfg)
    centered = center_all(reps)
    ids = [r.id for m in MODALITIES for r in reps[m]]
    modalities = [m for m in MODALITIES for _ in reps[m]]
    raw = np.stack([r.vector for m in MODALITIES for r in reps[m]])
    cen = np.vstack([centered[m].vectors for m in MODALITIES if m in centered])

    rows, summary = [], {}
    for flag, X in ((False, raw), (True, cen)):
        model = fit_pca(X, n_components=2)
        rows += plot_rows(ids, modalities, project(model, X), flag)
        groups = {m: X[[k for k, mm in enumerate(modalities) if mm == m]] for m in MODALITIES if m in reps}
        key = "centered" if flag else "uncentered"
        summary[key] = {
            **cluster_stats(groups).to_dict(),
            "pca_explained_variance": [float(v) for v in model.explained_variance],
        }
    emit_plot_data(rows, cfg.out / PCA_POINTS)
    write_atomic(cfg.out / CLUSTER_STATS, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def run_all(cfg: RunConfig, embedder=None):
    report = run_validate(cfg)
    if not report.ok:
        raise ValidationError("; ".join(report.failures))
    run_embed(cfg, embedder)
    run_recommend(cfg)
    evaluation = run_evaluate(cfg)
    run_diagnose(cfg)
    return evaluation
