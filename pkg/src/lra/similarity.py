"""Relational similarity between two word pairs, averaged over their alternates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .factorization import ProjectedSpace, row_cosine
from .pairs import WordPair
from .thesaurus import AlternateSet


@dataclass
class SimilarityResult:
    original_cosine: float | None
    combination_cosines: list[tuple[WordPair, WordPair, float | None]]
    selected: list[float] = field(default_factory=list)
    score: float | None = None


def combination_cosines(space: ProjectedSpace, a: AlternateSet, b: AlternateSet
                        ) -> list[tuple[WordPair, WordPair, float | None]]:
    """Cosines for every version of ``a`` against every version of ``b``.

    Originals come first on each side, so entry 0 is the original-pair cosine.
    """
    return [(va, vb, row_cosine(space, va, vb)) for va in a.versions for vb in b.versions]


def select_cosines(cosines: Sequence[float | None]) -> list[float]:
    """Cosines that enter the average; ``cosines[0]`` is the original pair's."""
    present = [c for c in cosines if c is not None]
    if not cosines or cosines[0] is None:
        return present
    original = cosines[0]
    return [c for c in present if c >= original]


def relational_similarity(cosines: Sequence[float | None]) -> float | None:
    """Mean of the cosines at or above the original-pair cosine (``cosines[0]``).

    Without an original cosine, every present cosine is averaged. None when
    nothing is present.
    """
    selected = select_cosines(cosines)
    if not selected:
        return None
    return sum(selected) / len(selected)


def compare(space: ProjectedSpace, a: AlternateSet, b: AlternateSet) -> SimilarityResult:
    combos = combination_cosines(space, a, b)
    cosines = [c for _, _, c in combos]
    selected = select_cosines(cosines)
    score = sum(selected) / len(selected) if selected else None
    return SimilarityResult(cosines[0], combos, selected, score)


def analogy_gap(scores: Sequence[float | None]) -> tuple[int, int, float]:
    """Best choice, runner-up, and the gap between their scores.

    Ties go to the lower index; None scores are ignored.
    """
    usable = sorted((i for i, s in enumerate(scores) if s is not None), key=lambda i: (-scores[i], i))
    if len(usable) < 2:
        raise ValueError("need at least two scored choices")
    best, second = usable[0], usable[1]
    return best, second, scores[best] - scores[second]
