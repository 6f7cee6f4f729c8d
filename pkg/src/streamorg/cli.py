"""Command-line interface.

`streamorg run` streams a corpus through one pipeline and writes checkpoint
artifacts; `streamorg compare` runs the paired rank test between two finished
runs. Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, DataError
from .harness import (
    PIPELINES,
    ExperimentConfig,
    compare_runs,
    read_checkpoints_csv,
    run_experiment,
    write_means_csv,
    write_verdicts_csv,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamorg",
        description="Incremental similarity pipelines over text document streams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="stream a corpus and evaluate at checkpoints")
    run.add_argument("--input", required=True, help="corpus file")
    run.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    run.add_argument("--pipeline", choices=PIPELINES, default="istfidf")
    run.add_argument("--embeddings", help="word vector file (required for *-w2v pipelines)")
    run.add_argument("--checkpoint-interval", type=int, default=25)
    run.add_argument("--checkpoints", type=int, default=30)
    run.add_argument("--keywords", type=int, default=8, help="keywords extracted per document")
    run.add_argument("--sim-threshold", type=float, default=0.12)
    run.add_argument("--embed-threshold", type=float, default=0.6)
    run.add_argument("--compound-mode", choices=("mean", "pairwise"), default="mean")
    run.add_argument("--window", type=int, default=2, help="co-occurrence window")
    run.add_argument(
        "--class-counts",
        help="comma-separated ground-truth cluster count per checkpoint "
        "(default: distinct labels seen so far)",
    )
    run.add_argument("--stopwords", help="replacement stopword file")
    run.add_argument("--tag-lexicon", help="word<TAB>tag lexicon file")
    run.add_argument("--keep-tags", help="comma-separated tag allowlist")
    run.add_argument("--no-stemming", action="store_true")
    run.add_argument(
        "--no-full-refresh",
        action="store_true",
        help="skip recomputing stored similarities at checkpoints",
    )
    run.add_argument(
        "--multiword",
        action="store_true",
        help="collapse adjacent extracted keywords into phrases",
    )
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="output directory")

    cmp_parser = sub.add_parser("compare", help="compare two finished runs")
    cmp_parser.add_argument("--a", required=True, help="first run directory")
    cmp_parser.add_argument("--b", required=True, help="second run directory")
    cmp_parser.add_argument("--alpha", type=float, default=0.05)
    cmp_parser.add_argument(
        "--unpaired",
        action="store_true",
        help="use the unpaired Mann-Whitney U test instead of the signed-rank test",
    )
    cmp_parser.add_argument("--out", help="directory for verdicts.csv and means.csv")
    return parser


def _parse_class_counts(raw: str | None) -> list[int] | None:
    if raw is None:
        return None
    try:
        counts = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--class-counts must be comma-separated integers, got {raw!r}") from None
    if not counts:
        raise ConfigError("--class-counts is empty")
    return counts


def _cmd_run(args: argparse.Namespace) -> None:
    config = ExperimentConfig(
        input_path=args.input,
        out_dir=args.out,
        pipeline=args.pipeline,
        corpus_format=args.format,
        embeddings_path=args.embeddings,
        sim_threshold=args.sim_threshold,
        embed_threshold=args.embed_threshold,
        keywords_per_doc=args.keywords,
        checkpoint_interval=args.checkpoint_interval,
        checkpoint_count=args.checkpoints,
        class_counts=_parse_class_counts(args.class_counts),
        compound_mode=args.compound_mode,
        window=args.window,
        full_refresh_at_checkpoint=not args.no_full_refresh,
        collapse_adjacent=args.multiword,
        stemming=not args.no_stemming,
        stopwords_path=args.stopwords,
        tag_lexicon_path=args.tag_lexicon,
        keep_tags=args.keep_tags.split(",") if args.keep_tags else None,
        seed=args.seed,
    )
    records = run_experiment(config)
    for rec in records:
        print(
            f"checkpoint {rec.index}: {rec.documents_seen} docs, k={rec.k}, "
            f"PUR={rec.metrics.PUR:.4f}, ARI={rec.metrics.ARI:.4f}"
        )
    print(f"wrote {len(records)} checkpoints to {config.out_dir}")


def _cmd_compare(args: argparse.Namespace) -> None:
    records_a = read_checkpoints_csv(Path(args.a) / "checkpoints.csv")
    records_b = read_checkpoints_csv(Path(args.b) / "checkpoints.csv")
    rows = compare_runs(records_a, records_b, args.alpha, paired=not args.unpaired)
    print("metric,verdict,p_value,mean_a,mean_b,higher")
    for row in rows:
        print(
            f"{row.metric},{row.verdict},{row.p_value:.6g},"
            f"{row.mean_a:.6g},{row.mean_b:.6g},{row.higher}"
        )
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_verdicts_csv(out_dir / "verdicts.csv", rows)
        write_means_csv(out_dir / "means.csv", rows)
        print(f"wrote {out_dir / 'verdicts.csv'}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            _cmd_run(args)
        else:
            _cmd_compare(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
