"""Pattern mining, the pair-by-pattern matrix, and the end-to-end build."""

from __future__ import annotations

import itertools
import logging
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus_index import DEFAULT_SUFFIXES, CorpusIndex, Phrase, find_phrases
from .factorization import ProjectedSpace, TruncatedFactorization, project, truncated_svd
from .pairs import WordPair
from .thesaurus import AlternateSet, Thesaurus, filter_alternates, generate_candidates

logger = logging.getLogger(__name__)

WILDCARD = "*"

Pattern = tuple[str, ...]


class Orientation(str, Enum):
    LEFT_FIRST = "L"   # word1 P word2
    RIGHT_FIRST = "R"  # word2 P word1


class ColumnKey(NamedTuple):
    pattern: Pattern
    orientation: Orientation


def pattern_text(pattern: Pattern) -> str:
    return " ".join(pattern)


def parse_pattern(text: str) -> Pattern:
    return tuple(text.split(" "))


def patterns_from_phrase(phrase: Phrase) -> list[Pattern]:
    """Every way of replacing a subset of the intervening words with a wildcard."""
    options = [(tok, WILDCARD) for tok in phrase.intervening]
    return sorted(set(itertools.product(*options)))


def count_pattern_support(phrases: Mapping[WordPair, Sequence[Phrase]]) -> Counter:
    """Number of distinct pairs with at least one phrase yielding each pattern."""
    support: Counter = Counter()
    for pair_phrases in phrases.values():
        seen = set()
        for phrase in pair_phrases:
            seen.update(patterns_from_phrase(phrase))
        support.update(seen)
    return support


def select_top_patterns(support: Mapping[Pattern, int], num_patterns: int) -> list[Pattern]:
    ranked = sorted(support.items(), key=lambda item: (-item[1], pattern_text(item[0])))
    return [pattern for pattern, _ in ranked[:num_patterns]]


@dataclass
class SparseRelationMatrix:
    rows: list[WordPair]
    columns: list[ColumnKey]
    cells: sp.csr_matrix
    weighted: bool = False

    def __post_init__(self):
        self.row_map = {pair: i for i, pair in enumerate(self.rows)}
        self.col_map = {key: j for j, key in enumerate(self.columns)}

    @property
    def m(self) -> int:
        return self.cells.shape[0]

    @property
    def n(self) -> int:
        return self.cells.shape[1]

    @property
    def density(self) -> float:
        """Percentage of nonzero cells."""
        return 100.0 * self.cells.nnz / (self.m * self.n)

    def row(self, pair: WordPair) -> np.ndarray:
        return self.cells[self.row_map[pair]].toarray().ravel()


@dataclass
class ColumnWeights:
    entropy: np.ndarray
    weight: np.ndarray


def column_keys(patterns: Sequence[Pattern]) -> list[ColumnKey]:
    return [ColumnKey(p, o) for p in patterns for o in (Orientation.LEFT_FIRST, Orientation.RIGHT_FIRST)]


def build_matrix(pairs: Sequence[WordPair], phrases: Mapping[WordPair, Sequence[Phrase]],
                 patterns: Sequence[Pattern]) -> SparseRelationMatrix:
    """Raw frequency matrix: a row for A:B and for B:A per pair, two columns per pattern.

    ``phrases`` may be keyed by either orientation of a pair. Rows that match
    no selected pattern are dropped.
    """
    if not patterns:
        raise ValueError("no patterns selected")
    columns = column_keys(patterns)
    col_of = {key: j for j, key in enumerate(columns)}
    rows: list[WordPair] = []
    seen: set[WordPair] = set()
    data, indices, indptr = [], [], [0]

    def emit(pair: WordPair, pair_phrases: Iterable[Phrase]):
        counts: Counter = Counter()
        for phrase in pair_phrases:
            orient = Orientation.LEFT_FIRST if phrase.left_first else Orientation.RIGHT_FIRST
            for pattern in patterns_from_phrase(phrase):
                j = col_of.get(ColumnKey(pattern, orient))
                if j is not None:
                    counts[j] += 1
        if not counts:
            return
        rows.append(pair)
        for j in sorted(counts):
            indices.append(j)
            data.append(counts[j])
        indptr.append(len(indices))

    for pair in pairs:
        if pair in seen:
            continue
        if pair in phrases:
            forward = list(phrases[pair])
        elif pair.reversed() in phrases:
            forward = [ph.flipped() for ph in phrases[pair.reversed()]]
        else:
            forward = []
        seen.update((pair, pair.reversed()))
        if not forward:
            continue
        emit(pair, forward)
        emit(pair.reversed(), [ph.flipped() for ph in forward])

    if not rows:
        raise ValueError("empty matrix: no pair has a phrase matching a selected pattern")
    cells = sp.csr_matrix((np.asarray(data, dtype=float), indices, indptr), shape=(len(rows), len(columns)))
    return SparseRelationMatrix(rows, columns, cells, weighted=False)


def log_entropy_transform(matrix: SparseRelationMatrix) -> tuple[SparseRelationMatrix, ColumnWeights]:
    """Replace each cell x by w_j * log(x + 1), with w_j = 1 - H_j / log(m)."""
    if matrix.weighted:
        raise ValueError("matrix is already weighted")
    m = matrix.m
    if m < 2:
        raise ValueError("log-entropy weighting needs at least two rows")
    X = matrix.cells.tocsc()
    col_sums = np.asarray(X.sum(axis=0)).ravel()
    entropy = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        col = X.data[X.indptr[j]:X.indptr[j + 1]]
        col = col[col > 0]
        if col_sums[j] > 0:
            p = col / col_sums[j]
            entropy[j] = -float(np.sum(p * np.log(p)))
    weight = np.where(col_sums > 0, 1.0 - entropy / math.log(m), 0.0)
    weight = np.clip(weight, 0.0, 1.0)
    W = X.copy()
    W.data = np.log1p(W.data) * np.repeat(weight, np.diff(W.indptr))
    W = W.tocsr()
    W.eliminate_zeros()
    return replace(matrix, cells=W, weighted=True), ColumnWeights(entropy, weight)


@dataclass(frozen=True)
class LraConfig:
    num_sim: int = 10
    max_phrase: int = 5
    num_filter: int = 3
    min_inter: int = 1
    max_inter: int = 3
    num_patterns: int = 4000
    k: int = 300
    seed: int = 0
    suffixes: tuple[str, ...] = DEFAULT_SUFFIXES
    ablate_svd: bool = False
    ablate_synonyms: bool = False

    def __post_init__(self):
        if self.max_phrase != self.max_inter + 2:
            raise ValueError(f"max_phrase ({self.max_phrase}) must equal max_inter + 2 ({self.max_inter + 2})")
        if not 1 <= self.min_inter <= self.max_inter:
            raise ValueError("need 1 <= min_inter <= max_inter")
        for name in ("num_sim", "num_patterns", "k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.num_filter < 0:
            raise ValueError("num_filter must be >= 0")

    @property
    def effective_num_filter(self) -> int:
        return 0 if self.ablate_synonyms else self.num_filter

    @property
    def num_combinations(self) -> int:
        return (self.effective_num_filter + 1) ** 2

    def with_overrides(self, **overrides) -> "LraConfig":
        overrides = {key: val for key, val in overrides.items() if val is not None}
        if "max_inter" in overrides and "max_phrase" not in overrides:
            overrides["max_phrase"] = overrides["max_inter"] + 2
        return replace(self, **overrides)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["suffixes"] = list(self.suffixes)
        out["num_combinations"] = self.num_combinations
        return out

    def to_text(self) -> str:
        lines = []
        for key, val in self.as_dict().items():
            if isinstance(val, list):
                val = ",".join(val)
            elif isinstance(val, bool):
                val = "true" if val else "false"
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "LraConfig":
        """Parse flat ``key = value`` lines; ``#`` starts a comment."""
        kinds = {f.name: f.type for f in fields(cls)}
        values: dict = {}
        num_combinations = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep:
                raise ValueError(f"{source}:{lineno}: expected 'key = value'")
            if key == "num_combinations":
                num_combinations = int(val)
                continue
            if key not in kinds:
                raise ValueError(f"{source}:{lineno}: unknown parameter {key!r}")
            if key == "suffixes":
                values[key] = tuple(s.strip() for s in val.split(",") if s.strip())
            elif key.startswith("ablate_"):
                if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"{source}:{lineno}: {key} must be a boolean")
                values[key] = val.lower() in ("true", "1", "yes")
            else:
                try:
                    values[key] = int(val)
                except ValueError:
                    raise ValueError(f"{source}:{lineno}: {key} must be an integer") from None
        if "max_inter" in values and "max_phrase" not in values:
            values["max_phrase"] = values["max_inter"] + 2
        config = cls(**values)
        if num_combinations is not None and num_combinations != config.num_combinations:
            raise ValueError(f"{source}: num_combinations must be (num_filter + 1)^2 = {config.num_combinations}")
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> "LraConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"), str(path))


STEP_NAMES = {
    1: "Find alternates",
    2: "Filter alternates",
    3: "Find phrases",
    4: "Find patterns",
    5: "Map pairs to rows",
    6: "Map patterns to columns",
    7: "Map rows/columns, generate sparse matrix",
    8: "Calculate entropy",
    9: "Apply SVD",
    10: "Projection",
}


@dataclass
class BuildReport:
    n_input_pairs: int = 0
    n_expanded_pairs: int = 0
    n_candidate_rows: int = 0
    n_rows: int = 0
    n_columns: int = 0
    density: float = 0.0
    n_patterns_seen: int = 0
    dropped_pairs: list[WordPair] = field(default_factory=list)
    timings: dict[int, float] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"input pairs          {self.n_input_pairs}",
            f"pairs with alternates {self.n_expanded_pairs}",
            f"candidate rows       {self.n_candidate_rows}",
            f"matrix rows          {self.n_rows}",
            f"matrix columns       {self.n_columns}",
            f"density              {self.density:.2f}%",
            f"distinct patterns    {self.n_patterns_seen}",
            f"dropped pairs        {len(self.dropped_pairs)}",
            "",
            f"{'Step':<5} {'Description':<40} {'Time H:M:S':>12}",
        ]
        for step in sorted(self.timings):
            lines.append(f"{step:<5} {STEP_NAMES.get(step, ''):<40} {_hms(self.timings[step]):>12}")
        lines.append(f"{'Total':<46} {_hms(sum(self.timings.values())):>12}")
        return "\n".join(lines) + "\n"


def _hms(seconds: float) -> str:
    whole = int(seconds)
    return f"{whole // 3600}:{whole // 60 % 60:02d}:{whole % 60:02d}.{int((seconds - whole) * 100):02d}"


@dataclass
class BuiltSpace:
    """Everything needed to answer relational-similarity queries."""

    space: ProjectedSpace
    alternates: dict[WordPair, AlternateSet] = field(default_factory=dict)
    config: LraConfig | None = None
    raw: SparseRelationMatrix | None = None
    weighted: SparseRelationMatrix | None = None
    weights: ColumnWeights | None = None
    patterns: list[Pattern] = field(default_factory=list)
    factorization: TruncatedFactorization | None = None
    report: BuildReport | None = None

    def alternate_set(self, pair: WordPair) -> AlternateSet:
        found = self.alternates.get(pair)
        if found is not None:
            return found
        rev = self.alternates.get(pair.reversed())
        if rev is not None:
            return AlternateSet(pair, [(p.reversed(), s, f) for p, s, f in rev.alternates], rev.original_freq)
        return AlternateSet(pair)

    def has_any_row(self, pair: WordPair) -> bool:
        return any(v in self.space for v in self.alternate_set(pair).versions)


class _Timer:
    def __init__(self, timings: dict[int, float], step: int):
        self.timings, self.step = timings, step

    def __enter__(self):
        self.start = time.perf_counter()
        logger.info("step %d: %s", self.step, STEP_NAMES[self.step])

    def __exit__(self, *exc):
        self.timings[self.step] = self.timings.get(self.step, 0.0) + time.perf_counter() - self.start


def run_pipeline(config: LraConfig, input_pairs: Sequence[WordPair], index: CorpusIndex,
                 thesaurus: Thesaurus | None, n_jobs: int = 1) -> BuiltSpace:
    if not input_pairs:
        raise ValueError("no input pairs")
    report = BuildReport(n_input_pairs=len(input_pairs))
    timings = report.timings
    originals = list(dict.fromkeys(input_pairs))
    workers = max(1, n_jobs)

    def pmap(fn, items):
        if workers == 1:
            return list(map(fn, items))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))

    num_filter = config.effective_num_filter
    with _Timer(timings, 1):
        if num_filter and thesaurus is not None:
            candidates = pmap(lambda p: generate_candidates(thesaurus, p, config.num_sim), originals)
        else:
            candidates = [[] for _ in originals]
    with _Timer(timings, 2):
        alt_sets = pmap(lambda item: filter_alternates(index, item[0], item[1], num_filter, config.max_phrase),
                        list(zip(originals, candidates)))
        alternates = {s.original: s for s in alt_sets}
    expanded = list(dict.fromkeys(v for s in alt_sets for v in s.versions))
    report.n_expanded_pairs = len(expanded)
    report.n_candidate_rows = 2 * len(expanded)

    with _Timer(timings, 3):
        # one phrase list per unordered pair; the reversed row reuses it flipped
        canonical = _unordered_unique(expanded)
        found = pmap(lambda p: find_phrases(index, p, config.min_inter, config.max_inter, config.suffixes), canonical)
        phrases = {pair: ph for pair, ph in zip(canonical, found) if ph}
    with _Timer(timings, 4):
        support = count_pattern_support(phrases)
        patterns = select_top_patterns(support, config.num_patterns)
        report.n_patterns_seen = len(support)
    if not patterns:
        raise ValueError("empty matrix: no phrases found for any pair")
    # rows and columns are mapped while the matrix is generated (steps 5-7)
    with _Timer(timings, 7):
        raw = build_matrix(expanded, phrases, patterns)
    report.dropped_pairs = [p for p in expanded if p not in raw.row_map]
    report.n_rows, report.n_columns, report.density = raw.m, raw.n, raw.density
    with _Timer(timings, 8):
        weighted, weights = log_entropy_transform(raw)

    factorization = None
    if config.ablate_svd:
        space = ProjectedSpace(weighted.cells, dict(weighted.row_map))
    else:
        with _Timer(timings, 9):
            factorization = truncated_svd(weighted.cells, config.k, config.seed)
            factorization.Vt = None
        with _Timer(timings, 10):
            space = project(factorization, weighted.row_map)
    logger.info("built %d x %d matrix (%.2f%% dense), space dim %d", raw.m, raw.n, raw.density, space.dim)
    return BuiltSpace(space, alternates, config, raw, weighted, weights, patterns, factorization, report)


def _unordered_unique(pairs: Iterable[WordPair]) -> list[WordPair]:
    out, seen = [], set()
    for pair in pairs:
        key = frozenset((pair.left, pair.right))
        if key not in seen:
            seen.add(key)
            out.append(pair)
    return out
