"""Command-line entry point: ``lra index|pipeline|sim|sat-eval|nm-eval``.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import artifacts
from .corpus_index import build_index, load_index
from .evaluation import (SatReport, answer_question, choice_scores, nm_classify_loocv,
                         read_nm_examples, read_sat_questions, score_sat)
from .pairs import WordPair, read_pairs
from .pipeline import LraConfig, run_pipeline
from .similarity import compare
from .thesaurus import load_thesaurus

logger = logging.getLogger("lra")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="flat 'key = value' parameter file")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="cap on worker threads")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed for the SVD")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="lra", description="Latent relational analysis of word pairs.",
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="index a directory of .txt files")
    p.add_argument("corpus_dir", type=Path)
    p.add_argument("-o", "--out", type=Path, default=Path("corpus.idx"))

    p = sub.add_parser("pipeline", parents=[common], help="build the pair-pattern space")
    p.add_argument("--pairs", type=Path, required=True, help="TSV of input pairs")
    p.add_argument("--index", type=Path, required=True, help="corpus.idx from 'lra index'")
    p.add_argument("--thesaurus", type=Path, help="thesaurus file (omit with --no-synonyms)")
    p.add_argument("--out", type=Path, required=True, help="artifact directory")
    p.add_argument("--k", type=int, help="projection dimensions")
    p.add_argument("--num-patterns", type=int)
    p.add_argument("--no-svd", action="store_true")
    p.add_argument("--no-synonyms", action="store_true")

    p = sub.add_parser("sim", parents=[common], help="score pairs of pairs")
    p.add_argument("artifact_dir", type=Path)
    p.add_argument("input", type=Path, help="TSV: leftA rightA leftB rightB")
    p.add_argument("-o", "--out", type=Path)

    p = sub.add_parser("sat-eval", parents=[common], help="answer multiple-choice analogy questions")
    p.add_argument("artifact_dir", type=Path)
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--out", type=Path, help="directory for report.txt and results.tsv")

    p = sub.add_parser("nm-eval", parents=[common], help="leave-one-out noun-modifier classification")
    p.add_argument("artifact_dir", type=Path)
    p.add_argument("input", type=Path)
    p.add_argument("--scheme", choices=("30", "5"), default="30")
    p.add_argument("--shortlist", type=int, default=30)
    p.add_argument("-o", "--out", type=Path, help="directory for report.txt and results.tsv")
    return parser


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def cmd_index(args) -> int:
    if not args.corpus_dir.is_dir():
        raise UsageError(f"corpus directory not found: {args.corpus_dir}")
    try:
        index = build_index(args.corpus_dir)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    index.save(args.out)
    print(f"indexed {index.n_documents} documents, {index.token_count} tokens -> {args.out}")
    return EXIT_OK


def _load_config(args) -> LraConfig:
    config = LraConfig.from_file(args.config) if getattr(args, "config", None) else LraConfig()
    return config.with_overrides(
        seed=getattr(args, "seed", None),
        k=getattr(args, "k", None),
        num_patterns=getattr(args, "num_patterns", None),
        ablate_svd=True if getattr(args, "no_svd", False) else None,
        ablate_synonyms=True if getattr(args, "no_synonyms", False) else None,
    )


def cmd_pipeline(args) -> int:
    config = _load_config(args)
    for label, path in (("pairs", args.pairs), ("index", args.index)):
        if not path.is_file():
            raise UsageError(f"{label} file not found: {path}")
    if not config.ablate_synonyms and args.thesaurus is None:
        raise UsageError("--thesaurus is required unless --no-synonyms is given")
    pairs = read_pairs(args.pairs)
    index = load_index(args.index)
    thesaurus = load_thesaurus(args.thesaurus) if args.thesaurus else None
    built = run_pipeline(config, pairs, index, thesaurus, n_jobs=getattr(args, "threads", 1))
    inputs = {"pairs": args.pairs, "index": args.index}
    if args.thesaurus:
        inputs["thesaurus"] = args.thesaurus
    if getattr(args, "config", None):
        inputs["config"] = args.config
    artifacts.save_built(built, args.out, inputs)
    sys.stdout.write(built.report.to_text())
    return EXIT_OK


def _fmt(x) -> str:
    return "SKIP" if x is None else f"{x:.6f}"


def cmd_sim(args) -> int:
    engine = artifacts.load_built(args.artifact_dir)
    lines = []
    with open(args.input, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            words = [w.strip().lower() for w in line.rstrip("\n").split("\t")]
            if len(words) != 4:
                raise UsageError(f"{args.input}:{lineno}: expected 'leftA rightA leftB rightB'")
            a, b = WordPair(words[0], words[1]), WordPair(words[2], words[3])
            res = compare(engine.space, engine.alternate_set(a), engine.alternate_set(b))
            lines.append("\t".join([*words, _fmt(res.score), str(len(res.selected)), _fmt(res.original_cosine)]))
    _emit("".join(line + "\n" for line in lines), args.out, "sim.tsv")
    return EXIT_OK


def cmd_sat_eval(args) -> int:
    engine = artifacts.load_built(args.artifact_dir)
    questions = read_sat_questions(args.input)
    predictions, rows = [], ["question\tpredicted\tanswer\toutcome\t" + "\t".join(f"score{i}" for i in range(5))]
    for i, q in enumerate(questions):
        pred = answer_question(engine, q)
        scores = choice_scores(engine, q) if pred is not None else [None] * 5
        outcome = "skipped" if pred is None else ("correct" if pred == q.answer_index else "incorrect")
        predictions.append(pred)
        rows.append("\t".join([str(i), "SKIP" if pred is None else str(pred), str(q.answer_index), outcome,
                               *(_fmt(s) for s in scores)]))
    report: SatReport = score_sat(predictions, [q.answer_index for q in questions])
    _emit(report.to_text(), args.out, "report.txt")
    if args.out is not None:
        (args.out / "results.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
        (args.out / "report.tsv").write_text(
            "correct\tincorrect\tskipped\ttotal\tscore\tprecision\trecall\n"
            f"{report.correct}\t{report.incorrect}\t{report.skipped}\t{report.total}\t"
            f"{report.score:.6f}\t{report.precision:.6f}\t{report.recall:.6f}\n", encoding="utf-8")
    return EXIT_OK


def cmd_nm_eval(args) -> int:
    engine = artifacts.load_built(args.artifact_dir)
    examples = read_nm_examples(args.input)
    report = nm_classify_loocv(engine, examples, args.scheme, args.shortlist)
    _emit(report.to_text(title=f"{args.scheme}-class"), args.out, "report.txt")
    if args.out is not None:
        rows = ["modifier\thead\tgold\tpredicted"]
        for ex, (gold, pred) in zip(examples, report.predictions):
            rows.append(f"{ex.modifier}\t{ex.head}\t{gold}\t{pred or 'NONE'}")
        (args.out / "results.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
        per_class = ["class\tprecision\trecall\tf"] + [f"{c}\t{p:.6f}\t{r:.6f}\t{f:.6f}"
                                                      for c, (p, r, f) in report.per_class.items()]
        per_class.append(f"MACRO\t{report.macro_precision:.6f}\t{report.macro_recall:.6f}\t{report.macro_f:.6f}")
        (args.out / "report.tsv").write_text("\n".join(per_class) + "\n", encoding="utf-8")
    return EXIT_OK


COMMANDS = {"index": cmd_index, "pipeline": cmd_pipeline, "sim": cmd_sim,
            "sat-eval": cmd_sat_eval, "nm-eval": cmd_nm_eval}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    verbosity = getattr(args, "verbose", 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(verbosity, 2), format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("lra: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, artifacts.ArtifactError, FileNotFoundError, ValueError) as exc:
        print(f"lra {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"lra {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
