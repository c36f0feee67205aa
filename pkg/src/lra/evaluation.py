"""Analogy-question answering and nearest-neighbour relation classification."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .factorization import row_cosine
from .pairs import WordPair
from .pipeline import BuiltSpace
from .similarity import compare

logger = logging.getLogger(__name__)

SKIP_CREDIT = 0.2
CLASS5_GROUPS = ("causal", "temporal", "spatial", "participatory", "qualitative")


@dataclass(frozen=True)
class SatQuestion:
    stem: WordPair
    choices: tuple[WordPair, ...]
    answer_index: int

    def __post_init__(self):
        if len(self.choices) != 5:
            raise ValueError("an analogy question needs exactly 5 choices")
        if not 0 <= self.answer_index < 5:
            raise ValueError(f"answer index out of range: {self.answer_index}")

    @property
    def pairs(self) -> list[WordPair]:
        return [self.stem, *self.choices]


@dataclass(frozen=True)
class NmExample:
    modifier: str
    head: str
    class30: str
    class5: str

    def __post_init__(self):
        if self.class5 not in CLASS5_GROUPS:
            raise ValueError(f"unknown relation group {self.class5!r}")

    @property
    def pair(self) -> WordPair:
        return WordPair(self.modifier, self.head)

    def label(self, scheme: str) -> str:
        return self.class5 if str(scheme) == "5" else self.class30


@dataclass
class SatReport:
    correct: int
    incorrect: int
    skipped: int

    @property
    def total(self) -> int:
        return self.correct + self.incorrect + self.skipped

    @property
    def score(self) -> float:
        return (self.correct + SKIP_CREDIT * self.skipped) / self.total

    @property
    def precision(self) -> float:
        answered = self.correct + self.incorrect
        return self.correct / answered if answered else 0.0

    @property
    def recall(self) -> float:
        return self.correct / self.total

    def to_text(self, title: str = "LRA") -> str:
        rows = [("Correct", self.correct), ("Incorrect", self.incorrect), ("Skipped", self.skipped),
                ("Total", self.total)]
        lines = [f"{'':<10}{title:>10}"]
        lines += [f"{name:<10}{val:>10}" for name, val in rows]
        lines += [f"{name:<10}{val:>10.1%}" for name, val in
                  (("Score", self.score), ("Precision", self.precision), ("Recall", self.recall))]
        return "\n".join(lines) + "\n"


def score_sat(predictions: Sequence[int | None], answers: Sequence[int]) -> SatReport:
    """Tally predictions against answers; a None prediction is a skip."""
    if len(predictions) != len(answers):
        raise ValueError("predictions and answers differ in length")
    if not answers:
        raise ValueError("no questions to score")
    skipped = sum(p is None for p in predictions)
    correct = sum(p is not None and p == a for p, a in zip(predictions, answers))
    return SatReport(correct, len(answers) - correct - skipped, skipped)


def choice_scores(engine: BuiltSpace, q: SatQuestion) -> list[float | None]:
    stem = engine.alternate_set(q.stem)
    return [compare(engine.space, stem, engine.alternate_set(c)).score for c in q.choices]


def answer_question(engine: BuiltSpace, q: SatQuestion) -> int | None:
    """Index of the choice most relationally similar to the stem, or None to skip."""
    if not engine.has_any_row(q.stem):
        return None
    scores = choice_scores(engine, q)
    best = None
    for i, s in enumerate(scores):
        if s is not None and (best is None or s > scores[best]):
            best = i
    return best


def _phase2_key(item):
    idx, pair, score = item
    return (score is None, -(score or 0.0), pair, idx)


def two_phase_neighbours(engine: BuiltSpace, probe: WordPair, pool: Sequence[WordPair],
                         shortlist: int = 30) -> list[tuple[int, float | None]]:
    """Rank ``pool`` against ``probe``: shortlist by original-pair cosine, then
    rerank the shortlist by full relational similarity.

    Returns (pool index, score) for the shortlisted entries, best first.
    """
    if not pool:
        raise ValueError("empty neighbour pool")
    shortlist = min(shortlist, len(pool))
    cos = [row_cosine(engine.space, probe, cand) for cand in pool]
    phase1 = sorted(range(len(pool)), key=lambda i: (cos[i] is None, -(cos[i] or 0.0), pool[i], i))
    probe_set = engine.alternate_set(probe)
    rescored = [(i, pool[i], compare(engine.space, probe_set, engine.alternate_set(pool[i])).score)
                for i in phase1[:shortlist]]
    return [(i, s) for i, _, s in sorted(rescored, key=_phase2_key)]


def exhaustive_neighbours(engine: BuiltSpace, probe: WordPair, pool: Sequence[WordPair]
                          ) -> list[tuple[int, float | None]]:
    probe_set = engine.alternate_set(probe)
    scored = [(i, cand, compare(engine.space, probe_set, engine.alternate_set(cand)).score)
              for i, cand in enumerate(pool)]
    return [(i, s) for i, _, s in sorted(scored, key=_phase2_key)]


@dataclass
class ClassReport:
    accuracy: float
    per_class: dict[str, tuple[float, float, float]]
    macro_precision: float
    macro_recall: float
    macro_f: float
    correct: int = 0
    total: int = 0
    predictions: list[tuple[str, str | None]] = field(default_factory=list)

    def to_text(self, title: str = "LRA") -> str:
        lines = [f"{'':<10}{title:>10}",
                 f"{'Correct':<10}{self.correct:>10}",
                 f"{'Incorrect':<10}{self.total - self.correct:>10}",
                 f"{'Total':<10}{self.total:>10}"]
        for name, val in (("Accuracy", self.accuracy), ("Precision", self.macro_precision),
                          ("Recall", self.macro_recall), ("F", self.macro_f)):
            lines.append(f"{name:<10}{val:>10.1%}")
        lines.append("")
        lines.append(f"{'class':<20}{'P':>8}{'R':>8}{'F':>8}")
        for label, (p, r, f) in self.per_class.items():
            lines.append(f"{label:<20}{p:>8.3f}{r:>8.3f}{f:>8.3f}")
        return "\n".join(lines) + "\n"


def macro_f(predictions: Sequence[tuple[str, str | None]]) -> ClassReport:
    """Per-class and macroaveraged precision, recall and F over the gold classes.

    A None prediction (abstention) is wrong for its gold class. Zero
    denominators give zero.
    """
    if not predictions:
        raise ValueError("no predictions")
    tp, fp, fn = Counter(), Counter(), Counter()
    for gold, pred in predictions:
        if pred == gold:
            tp[gold] += 1
        else:
            fn[gold] += 1
            if pred is not None:
                fp[pred] += 1
    per_class = {}
    for label in sorted({g for g, _ in predictions}):
        p = tp[label] / (tp[label] + fp[label]) if tp[label] + fp[label] else 0.0
        r = tp[label] / (tp[label] + fn[label])
        f = 2 * p * r / (p + r) if p + r else 0.0
        per_class[label] = (p, r, f)
    n = len(per_class)
    correct = sum(tp.values())
    return ClassReport(
        accuracy=correct / len(predictions),
        per_class=per_class,
        macro_precision=sum(v[0] for v in per_class.values()) / n,
        macro_recall=sum(v[1] for v in per_class.values()) / n,
        macro_f=sum(v[2] for v in per_class.values()) / n,
        correct=correct,
        total=len(predictions),
        predictions=list(predictions),
    )


def nm_classify_loocv(engine: BuiltSpace, examples: Sequence[NmExample], scheme: str = "30",
                      shortlist: int | None = 30) -> ClassReport:
    """Leave-one-out single-nearest-neighbour classification of noun-modifier pairs.

    ``shortlist=None`` skips the cosine prefilter and ranks every candidate.
    """
    if len(examples) < 2:
        raise ValueError("LOOCV needs at least two examples")
    pairs = [ex.pair for ex in examples]
    out = []
    for i, ex in enumerate(examples):
        pool_idx = [j for j in range(len(examples)) if j != i]
        pool = [pairs[j] for j in pool_idx]
        if shortlist is None:
            ranked = exhaustive_neighbours(engine, pairs[i], pool)
        else:
            ranked = two_phase_neighbours(engine, pairs[i], pool, shortlist)
        top, score = ranked[0]
        pred = examples[pool_idx[top]].label(scheme) if score is not None else None
        out.append((ex.label(scheme), pred))
    return macro_f(out)


def read_sat_questions(path: str | Path) -> list[SatQuestion]:
    questions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 13:
                raise ValueError(f"{path}:{lineno}: expected 13 tab-separated fields, got {len(fields)}")
            try:
                words = [w.strip().lower() for w in fields[:12]]
                pairs = [WordPair(words[i], words[i + 1]) for i in range(0, 12, 2)]
                questions.append(SatQuestion(pairs[0], tuple(pairs[1:]), int(fields[12])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return questions


def read_nm_examples(path: str | Path) -> list[NmExample]:
    examples, group_of = [], {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.rstrip("\n").split("\t")]
            if len(fields) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'modifier head class30 class5'")
            try:
                examples.append(NmExample(fields[0].lower(), fields[1].lower(), fields[2], fields[3]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            # a fine class belongs to exactly one coarse group
            if group_of.setdefault(fields[2], fields[3]) != fields[3]:
                raise ValueError(f"{path}:{lineno}: class {fields[2]!r} is already in group {group_of[fields[2]]!r}")
    return examples
