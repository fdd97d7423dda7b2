"""Command-line interface for the stereoscopic quality toolkit.

Subcommands: fit (build a pristine model from a corpus of YUV pairs), score
(score one stereo pair against a model), dmos (process subjective ratings),
eval (correlate objective scores with DMOS), selfcheck (fog-ladder sanity
check of a model).

Exit codes: 0 ok, 1 selfcheck failure, 2 decode error, 3 empty corpus,
4 model/config mismatch, 5 malformed input rows.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np
from scipy import stats

from .evaluation import EvaluationError, evaluate_scores, parse_scores
from .pipeline import (PipelineConfig, build_pristine_model, score_video)
from .quality import (ConfigMismatchError, ModelFormatError, load_model,
                      save_model)
from .subjective import (RatingsFormatError, compute_dmos, parse_ratings,
                         reject_outlier_subjects, write_dmos)
from .video_io import (StereoSequence, VideoIOError, apply_synthetic_fog,
                       read_yuv420)

FOG_LADDER = (0.1, 0.2, 0.3, 0.4, 0.5)
SELFCHECK_RHO = 0.9

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DECODE = 2
EXIT_EMPTY_CORPUS = 3
EXIT_CONFIG_MISMATCH = 4
EXIT_MALFORMED = 5


def _add_geometry(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--width", type=int, required=True,
                        help="frame width in pixels (raw YUV has no header)")
    parser.add_argument("--height", type=int, required=True,
                        help="frame height in pixels")


def _add_runtime(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=1,
                        help="parallel worker cap")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file overriding pipeline parameters")


def _build_config(args) -> PipelineConfig:
    if args.config is not None:
        return PipelineConfig.from_json(args.config, threads=args.threads)
    return PipelineConfig(threads=args.threads)


def _load_stereo(left, right, width, height) -> StereoSequence:
    return StereoSequence(left=read_yuv420(left, width, height),
                          right=read_yuv420(right, width, height))


def _corpus_pairs(corpus_dir: Path) -> list[tuple[Path, Path]]:
    pairs = []
    for left in sorted(corpus_dir.glob("*_left.yuv")):
        right = left.with_name(left.name[:-len("_left.yuv")] + "_right.yuv")
        if right.exists():
            pairs.append((left, right))
    return pairs


def cmd_fit(args) -> int:
    config = _build_config(args)
    pairs = _corpus_pairs(args.corpus)
    if not pairs:
        print(f"error: no *_left.yuv/*_right.yuv pairs in {args.corpus}",
              file=sys.stderr)
        return EXIT_EMPTY_CORPUS
    start = time.monotonic()
    try:
        corpus = [_load_stereo(l, r, args.width, args.height)
                  for l, r in pairs]
    except (VideoIOError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DECODE
    model = build_pristine_model(corpus, config)
    save_model(model, args.out)
    elapsed = time.monotonic() - start
    print(f"rows={model.sample_count} videos={len(pairs)} "
          f"seconds={elapsed:.1f} model={args.out}")
    return EXIT_OK


def cmd_score(args) -> int:
    config = _build_config(args)
    try:
        model = load_model(args.model)
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_MISMATCH
    try:
        stereo = _load_stereo(args.left, args.right, args.width, args.height)
    except (VideoIOError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DECODE
    try:
        score = score_video(stereo, model, config)
    except ConfigMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_MISMATCH
    print(f"S_mu={score.s_mu:.12g} S_sigma={score.s_sigma:.12g} "
          f"CBSE={score.cbse:.12g}")
    return EXIT_OK


def cmd_dmos(args) -> int:
    try:
        table = parse_ratings(args.ratings)
        screened, screened_out = reject_outlier_subjects(table)
        result = compute_dmos(screened)
    except RatingsFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    for subject, reason in list(screened_out) + list(result.rejected):
        print(f"rejected subject {subject}: {reason}")
    write_dmos(result, args.out)
    print(f"videos={len(result.dmos)} subjects={result.n_subjects} "
          f"out={args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        scores = parse_scores(args.scores)
        from .subjective import read_dmos
        dmos = read_dmos(args.dmos)
    except (EvaluationError, RatingsFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    common = sorted(set(scores) & set(dmos))
    if len(common) < 5:
        print("error: fewer than 5 videos shared between score and DMOS "
              "files", file=sys.stderr)
        return EXIT_MALFORMED
    raw = np.array([scores[v] for v in common])
    subj = np.array([dmos[v] for v in common])
    try:
        report = evaluate_scores(raw, subj)
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    print(f"n={len(common)} LCC={report.lcc:.3f} SROCC={report.srocc:.3f} "
          f"RMSE={report.rmse:.3f}")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    config = _build_config(args)
    try:
        model = load_model(args.model)
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_MISMATCH
    try:
        stereo = _load_stereo(args.left, args.right, args.width, args.height)
    except (VideoIOError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DECODE
    cbse_values = []
    try:
        for t in FOG_LADDER:
            fogged = StereoSequence(
                left=apply_synthetic_fog(stereo.left, t),
                right=apply_synthetic_fog(stereo.right, t))
            score = score_video(fogged, model, config)
            cbse_values.append(score.cbse)
            print(f"t={t:.1f} CBSE={score.cbse:.12g}")
    except ConfigMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_MISMATCH
    rho = float(stats.spearmanr(FOG_LADDER, cbse_values).statistic)
    verdict = "PASS" if abs(rho) >= SELFCHECK_RHO else "FAIL"
    print(f"rho={rho:.3f} {verdict}")
    return EXIT_OK if verdict == "PASS" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbse",
        description="Completely blind stereoscopic video quality toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="build a pristine model from a corpus")
    p.add_argument("--corpus", type=Path, required=True,
                   help="directory of <name>_left.yuv / <name>_right.yuv pairs")
    _add_geometry(p)
    p.add_argument("--out", type=Path, required=True)
    _add_runtime(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score a stereo pair against a model")
    p.add_argument("--left", type=Path, required=True)
    p.add_argument("--right", type=Path, required=True)
    _add_geometry(p)
    p.add_argument("--model", type=Path, required=True)
    _add_runtime(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("dmos", help="compute DMOS from a ratings file")
    p.add_argument("--ratings", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_dmos)

    p = sub.add_parser("eval", help="correlate objective scores with DMOS")
    p.add_argument("--scores", type=Path, required=True)
    p.add_argument("--dmos", type=Path, required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("selfcheck",
                       help="fog-ladder monotonicity check of a model")
    p.add_argument("--left", type=Path, required=True)
    p.add_argument("--right", type=Path, required=True)
    _add_geometry(p)
    p.add_argument("--model", type=Path, required=True)
    _add_runtime(p)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
