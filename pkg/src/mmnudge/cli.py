"""Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 provider failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from mmnudge import pipeline
from mmnudge.config import load_config
from mmnudge.errors import ConfigurationError, ProviderError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_PROVIDER = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--users")
    common.add_argument("--messages")
    common.add_argument("--images")
    common.add_argument("--k", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--temperature", type=float)
    common.add_argument("--provider", choices=["remote", "mock"], dest="provider_kind")
    common.add_argument("--mock-mode", choices=["hash", "tag_aware"])
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="mmnudge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the corpus files")
    sub.add_parser("embed", parents=[common], help="embed every catalog item")
    rec = sub.add_parser("recommend", parents=[common], help="rank or sample message/image pairs")
    rec.add_argument("--user", default="all", help="user id or 'all'")
    rec.add_argument("--sample", action="store_true", help="draw one pair per user from the softmax")
    sub.add_parser("evaluate", parents=[common], help="score recommendations against the rubric")
    sub.add_parser("diagnose", parents=[common], help="PCA projections and cluster statistics")
    sub.add_parser("run", parents=[common], help="all stages in order")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(
            args.config,
            users=args.users, messages=args.messages, images=args.images, out=args.out,
            k=args.k, seed=args.seed, temperature=args.temperature,
            provider_kind=args.provider_kind, mock_mode=args.mock_mode,
        )
        return _dispatch(args, cfg)
    except (ValidationError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ProviderError as exc:
        status = f" (HTTP {exc.status})" if exc.status is not None else ""
        print(f"provider error{status}: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _dispatch(args, cfg) -> int:
    if args.command == "validate":
        report = pipeline.run_validate(cfg)
        print(report.to_json())
        return EXIT_OK if report.ok else EXIT_INVALID
    if args.command == "embed":
        reps, embedder = pipeline.run_embed(cfg)
        n = sum(len(v) for v in reps.values())
        hits = getattr(embedder, "hits", 0)
        misses = getattr(embedder, "misses", 0)
        print(f"wrote {n} representations to {cfg.out / pipeline.REPRESENTATIONS} "
              f"(cache hits {hits}, misses {misses})")
        return EXIT_OK
    if args.command == "recommend":
        recs = pipeline.run_recommend(cfg, user=args.user, sample=args.sample)
        n = sum(len(v) for v in recs.values())
        print(f"wrote {n} recommendations to {cfg.out / pipeline.RECOMMENDATIONS}")
        return EXIT_OK
    if args.command == "evaluate":
        report = pipeline.run_evaluate(cfg)
        print(f"appropriate {report.appropriate_rate:.3f}  inappropriate {report.inappropriate_rate:.3f}  "
              f"neutral {report.neutral_rate:.3f}  (n = {report.total})")
        return EXIT_OK
    if args.command == "diagnose":
        summary = pipeline.run_diagnose(cfg)
        print(json.dumps({k: {"mean_intra_cosine": v["mean_intra_cosine"],
                              "mean_inter_cosine": v["mean_inter_cosine"]} for k, v in summary.items()},
                         indent=2))
        return EXIT_OK
    report = pipeline.run_all(cfg)
    print(f"appropriate {report.appropriate_rate:.3f}  inappropriate {report.inappropriate_rate:.3f}  "
          f"neutral {report.neutral_rate:.3f}  (n = {report.total}); outputs in {cfg.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
