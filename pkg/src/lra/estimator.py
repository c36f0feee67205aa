"""scikit-learn style wrappers around the relational pipeline.

``LatentRelationalAnalysis`` is fitted on word pairs and transforms pairs to
their projected row vectors. ``AnalogySolver`` and ``NearestPairClassifier``
compose with it for the two evaluation tasks.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus_index import DEFAULT_SUFFIXES, CorpusIndex
from .evaluation import (SatQuestion, answer_question, exhaustive_neighbours, score_sat,
                         two_phase_neighbours)
from .factorization import row_cosine
from .pairs import WordPair
from .pipeline import BuiltSpace, LraConfig, run_pipeline
from .similarity import compare
from .thesaurus import Thesaurus


def check_pair(pair) -> WordPair:
    if isinstance(pair, WordPair):
        return pair
    if isinstance(pair, str):
        return WordPair.parse(pair)
    try:
        left, right = pair
    except (TypeError, ValueError):
        raise ValueError(f"cannot interpret {pair!r} as a word pair") from None
    return WordPair(str(left).lower(), str(right).lower())


def check_pairs(X: Iterable) -> list[WordPair]:
    """Coerce ``"a:b"`` strings, 2-tuples or WordPairs into a nonempty list of WordPairs."""
    if isinstance(X, (str, WordPair)):
        raise ValueError("expected a sequence of pairs, got a single pair")
    pairs = [check_pair(p) for p in X]
    if not pairs:
        raise ValueError("empty pair list")
    return pairs


class LatentRelationalAnalysis(TransformerMixin, BaseEstimator):
    """Relational similarity model over a fixed corpus and thesaurus.

    Parameters mirror :class:`~lra.pipeline.LraConfig`; ``corpus`` and
    ``thesaurus`` are the prebuilt resources the pairs are looked up in.
    """

    def __init__(self, corpus: CorpusIndex | None = None, thesaurus: Thesaurus | None = None, *,
                 num_sim=10, num_filter=3, min_inter=1, max_inter=3, num_patterns=4000, k=300,
                 suffixes=DEFAULT_SUFFIXES, ablate_svd=False, ablate_synonyms=False,
                 random_state=0, n_jobs=1):
        self.corpus = corpus
        self.thesaurus = thesaurus
        self.num_sim = num_sim
        self.num_filter = num_filter
        self.min_inter = min_inter
        self.max_inter = max_inter
        self.num_patterns = num_patterns
        self.k = k
        self.suffixes = suffixes
        self.ablate_svd = ablate_svd
        self.ablate_synonyms = ablate_synonyms
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self) -> LraConfig:
        return LraConfig(num_sim=self.num_sim, max_phrase=self.max_inter + 2, num_filter=self.num_filter,
                         min_inter=self.min_inter, max_inter=self.max_inter, num_patterns=self.num_patterns,
                         k=self.k, seed=int(self.random_state or 0), suffixes=tuple(self.suffixes),
                         ablate_svd=self.ablate_svd, ablate_synonyms=self.ablate_synonyms)

    def fit(self, X, y=None):
        if self.corpus is None:
            raise ValueError("a CorpusIndex is required")
        pairs = check_pairs(X)
        self.config_ = self._config()
        self.engine_ = run_pipeline(self.config_, pairs, self.corpus, self.thesaurus, self.n_jobs)
        self.n_features_out_ = self.engine_.space.dim
        return self

    @classmethod
    def from_engine(cls, engine: BuiltSpace) -> "LatentRelationalAnalysis":
        """Wrap an already built (or reloaded) space without refitting."""
        est = cls()
        est.engine_ = engine
        est.config_ = engine.config
        est.n_features_out_ = engine.space.dim
        return est

    def transform(self, X) -> np.ndarray:
        """Projected row vector per pair; rows of NaN for pairs without a row."""
        check_is_fitted(self, "engine_")
        space = self.engine_.space
        out = np.full((0, space.dim), np.nan)
        rows = []
        for pair in check_pairs(X):
            vec = space.vector(pair)
            rows.append(np.full(space.dim, np.nan) if vec is None else vec)
        return np.vstack(rows) if rows else out

    def alternate_set(self, pair):
        check_is_fitted(self, "engine_")
        return self.engine_.alternate_set(check_pair(pair))

    def cosine(self, a, b) -> float:
        """Plain cosine between two pairs' rows (no alternates); NaN if absent."""
        check_is_fitted(self, "engine_")
        c = row_cosine(self.engine_.space, check_pair(a), check_pair(b))
        return np.nan if c is None else c

    def similarity(self, a, b) -> float:
        """Relational similarity averaged over alternates; NaN when unscorable."""
        check_is_fitted(self, "engine_")
        score = compare(self.engine_.space, self.alternate_set(a), self.alternate_set(b)).score
        return np.nan if score is None else score

    def pairwise_similarity(self, X, Y=None) -> np.ndarray:
        xs = check_pairs(X)
        ys = xs if Y is None else check_pairs(Y)
        return np.array([[self.similarity(a, b) for b in ys] for a in xs])


class AnalogySolver(BaseEstimator):
    """Answers five-choice analogy questions with a fitted relational model.

    ``predict`` returns the chosen index per question, -1 for a skip.
    """

    def __init__(self, lra: LatentRelationalAnalysis | None = None):
        self.lra = lra

    def fit(self, questions: Sequence[SatQuestion], y=None):
        if self.lra is None:
            raise ValueError("a LatentRelationalAnalysis estimator is required")
        pairs = [p for q in questions for p in q.pairs]
        self.lra_ = self.lra if hasattr(self.lra, "engine_") else self.lra.fit(pairs)
        return self

    def predict(self, questions: Sequence[SatQuestion]) -> np.ndarray:
        check_is_fitted(self, "lra_")
        answers = [answer_question(self.lra_.engine_, q) for q in questions]
        return np.array([-1 if a is None else a for a in answers], dtype=int)

    def score(self, questions: Sequence[SatQuestion], y=None) -> float:
        """Analogy score: one point per correct answer, 0.2 per skip."""
        pred = self.predict(questions)
        gold = [q.answer_index for q in questions] if y is None else list(y)
        return score_sat([None if p < 0 else int(p) for p in pred], gold).score


class NearestPairClassifier(ClassifierMixin, BaseEstimator):
    """Single-nearest-neighbour relation classifier using relational similarity.

    Candidates are first shortlisted by plain cosine (``shortlist`` of them),
    then reranked with alternates. ``shortlist=None`` ranks exhaustively.
    """

    def __init__(self, lra: LatentRelationalAnalysis | None = None, shortlist: int | None = 30):
        self.lra = lra
        self.shortlist = shortlist

    def fit(self, X, y):
        pairs = check_pairs(X)
        if len(pairs) != len(y):
            raise ValueError("X and y differ in length")
        if self.lra is None:
            raise ValueError("a LatentRelationalAnalysis estimator is required")
        self.lra_ = self.lra if hasattr(self.lra, "engine_") else self.lra.fit(pairs)
        self.train_pairs_ = pairs
        self.train_labels_ = np.asarray(y, dtype=object)
        self.classes_ = np.unique(self.train_labels_.astype(str))
        return self

    def _rank(self, probe: WordPair, pool: list[WordPair]):
        engine = self.lra_.engine_
        if self.shortlist is None:
            return exhaustive_neighbours(engine, probe, pool)
        return two_phase_neighbours(engine, probe, pool, self.shortlist)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "train_pairs_")
        out = []
        for probe in check_pairs(X):
            idx, score = self._rank(probe, self.train_pairs_)[0]
            out.append(None if score is None else self.train_labels_[idx])
        return np.array(out, dtype=object)
