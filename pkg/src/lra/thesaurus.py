"""Similarity thesaurus loading and alternate-pair generation.

File format: blocks separated by blank lines. Each block opens with a
``word<TAB>pos`` header (pos one of n, v, a) followed by
``neighbour<TAB>score`` lines in decreasing score order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus_index import CorpusIndex, window_cooccurrence_count
from .pairs import WordPair

POS_TAGS = ("n", "v", "a")
MIN_ALTERNATE_LENGTH = 4


@dataclass
class Thesaurus:
    # word -> pos -> [(raw neighbour, score)], each list by decreasing score
    entries: dict[str, dict[str, list[tuple[str, float]]]] = field(default_factory=dict)

    def lookup(self, word: str, pos: str | None = None) -> list[tuple[str, float]]:
        by_pos = self.entries.get(word, {})
        if pos is not None:
            return list(by_pos.get(pos, []))
        return [item for p in sorted(by_pos) for item in by_pos[p]]

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class AlternateSet:
    original: WordPair
    # (pair, thesaurus score, corpus frequency), by decreasing frequency
    alternates: list[tuple[WordPair, float, int]] = field(default_factory=list)
    original_freq: int | None = None

    @property
    def versions(self) -> list[WordPair]:
        return [self.original] + [alt for alt, _, _ in self.alternates]


def load_thesaurus(path: str | Path) -> Thesaurus:
    entries: dict[str, dict[str, list[tuple[str, float]]]] = {}
    current = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                current = None
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected two tab-separated fields")
            if current is None:
                word, pos = fields[0].strip().lower(), fields[1].strip()
                if pos not in POS_TAGS or not word:
                    raise ValueError(f"{path}:{lineno}: bad block header {line!r}")
                current = entries.setdefault(word, {}).setdefault(pos, [])
                continue
            try:
                score = float(fields[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: score is not a number: {fields[1]!r}") from None
            if not math.isfinite(score) or not 0.0 <= score <= 1.0:
                raise ValueError(f"{path}:{lineno}: score out of [0, 1]: {score}")
            if current and score > current[-1][1]:
                raise ValueError(f"{path}:{lineno}: scores must be non-increasing within a block")
            current.append((fields[0], score))
    return Thesaurus(entries)


def is_acceptable_alternate(word: str) -> bool:
    """Reject hyphenated, short, non-alphabetic, multi-word and capitalized words."""
    if len(word) < MIN_ALTERNATE_LENGTH:
        return False
    if word[0].isupper():
        return False
    return word.isalpha()


def similar_words(th: Thesaurus, word: str, num_sim: int = 10) -> list[tuple[str, float]]:
    if num_sim < 1:
        raise ValueError("num_sim must be >= 1")
    merged: dict[str, float] = {}
    for raw, score in th.lookup(word):
        if not is_acceptable_alternate(raw):
            continue
        neighbour = raw.lower()
        if neighbour == word:
            continue
        merged[neighbour] = max(score, merged.get(neighbour, -1.0))
    ranked = sorted(merged.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:num_sim]


def generate_candidates(th: Thesaurus, pair: WordPair, num_sim: int = 10) -> list[tuple[WordPair, float]]:
    """Substitute neighbours for one member at a time: left first, then right."""
    candidates = []
    for neighbour, score in similar_words(th, pair.left, num_sim):
        if neighbour != pair.right:
            candidates.append((WordPair(neighbour, pair.right), score))
    for neighbour, score in similar_words(th, pair.right, num_sim):
        if neighbour != pair.left:
            candidates.append((WordPair(pair.left, neighbour), score))
    return candidates


def filter_alternates(index: CorpusIndex, original: WordPair,
                      candidates: Sequence[tuple[WordPair, float]], num_filter: int = 3,
                      window: int = 5) -> AlternateSet:
    """Keep the ``num_filter`` candidates that co-occur most often in the corpus."""
    scored = []
    seen = {original}
    for pair, score in candidates:
        if pair in seen:
            continue
        seen.add(pair)
        freq = window_cooccurrence_count(index, pair, window)
        if freq > 0:
            scored.append((pair, score, freq))
    scored.sort(key=lambda item: (-item[2], -item[1], item[0]))
    return AlternateSet(original, scored[:num_filter],
                        window_cooccurrence_count(index, original, window))
