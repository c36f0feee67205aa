"""Inverted index over a plain-text corpus.

Answers the two query shapes the relational pipeline needs: how many short
windows contain both members of a word pair, and which short phrases start
with one member and end with the other.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .pairs import WordPair

logger = logging.getLogger(__name__)

INDEX_MAGIC = "LRAIDX1"
DEFAULT_SUFFIXES = ("s", "es", "ing", "ed", "d")
MIN_STRIP_STEM = 3

# maximal runs of letters; digits, underscore and punctuation separate tokens
_TOKEN_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return [tok.lower() for tok in _TOKEN_RE.findall(text)]


@dataclass(frozen=True)
class Phrase:
    """A 3-5 token span whose ends are (suffix variants of) a pair's members."""

    pair: WordPair
    left_first: bool
    intervening: tuple[str, ...]
    source: tuple[int, int]
    first: str = ""
    last: str = ""

    @property
    def length(self) -> int:
        return len(self.intervening) + 2

    @property
    def tokens(self) -> tuple[str, ...]:
        return (self.first, *self.intervening, self.last)

    def flipped(self) -> "Phrase":
        """The same span viewed from the reversed pair."""
        return Phrase(self.pair.reversed(), not self.left_first, self.intervening,
                      self.source, self.first, self.last)


@dataclass
class CorpusIndex:
    documents: list[np.ndarray]
    vocabulary: dict[str, int]
    doc_names: list[str] = field(default_factory=list)
    # token id -> (doc ids, positions), sorted by (doc, position)
    postings: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.postings:
            self.postings = _build_postings(self.documents, len(self.vocabulary))
        self._id_to_token = [None] * len(self.vocabulary)
        for tok, tid in self.vocabulary.items():
            self._id_to_token[tid] = tok

    @property
    def token_count(self) -> int:
        return int(sum(len(d) for d in self.documents))

    @property
    def n_documents(self) -> int:
        return len(self.documents)

    def token_id(self, token: str) -> int | None:
        return self.vocabulary.get(token)

    def token(self, tid: int) -> str:
        return self._id_to_token[tid]

    def document_tokens(self, doc: int) -> list[str]:
        return [self._id_to_token[t] for t in self.documents[doc]]

    def occurrences(self, token: str) -> tuple[np.ndarray, np.ndarray]:
        tid = self.vocabulary.get(token)
        if tid is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        return self.postings[tid]

    def frequency(self, token: str) -> int:
        return len(self.occurrences(token)[0])

    def save(self, path: str | Path) -> None:
        save_index(self, path)


def _build_postings(documents: Sequence[np.ndarray], vocab_size: int):
    if not documents or vocab_size == 0:
        return {}
    ids = np.concatenate(documents) if documents else np.empty(0, dtype=np.int64)
    docs = np.concatenate([np.full(len(d), i, dtype=np.int64) for i, d in enumerate(documents)])
    pos = np.concatenate([np.arange(len(d), dtype=np.int64) for d in documents])
    # stable sort keeps (doc, position) order inside each token's list
    order = np.argsort(ids, kind="stable")
    ids, docs, pos = ids[order], docs[order], pos[order]
    bounds = np.searchsorted(ids, np.arange(vocab_size + 1))
    return {
        tid: (docs[bounds[tid]:bounds[tid + 1]], pos[bounds[tid]:bounds[tid + 1]])
        for tid in range(vocab_size)
    }


def index_from_texts(texts: Iterable[str], names: Sequence[str] | None = None) -> CorpusIndex:
    vocabulary: dict[str, int] = {}
    documents = []
    for text in texts:
        ids = [vocabulary.setdefault(tok, len(vocabulary)) for tok in tokenize(text)]
        documents.append(np.asarray(ids, dtype=np.int64))
    if names is None:
        names = [f"doc{i}" for i in range(len(documents))]
    return CorpusIndex(documents, vocabulary, list(names))


def build_index(corpus_dir: str | Path) -> CorpusIndex:
    """Index every ``.txt`` file under ``corpus_dir`` in file-name order."""
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus_dir}")
    files = sorted(p for p in corpus_dir.iterdir() if p.is_file() and p.suffix == ".txt")
    if not files:
        raise ValueError(f"empty corpus: no .txt files in {corpus_dir}")
    texts = []
    for path in files:
        try:
            texts.append(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError) as exc:
            raise OSError(f"cannot read corpus file {path.name}: {exc}") from exc
    index = index_from_texts(texts, [p.name for p in files])
    logger.info("indexed %d documents, %d tokens, %d types",
                index.n_documents, index.token_count, len(index.vocabulary))
    return index


def save_index(index: CorpusIndex, path: str | Path) -> None:
    """Write ``index`` as: magic line, JSON header line, one postings line per token id."""
    header = {
        "token_count": index.token_count,
        "doc_names": index.doc_names,
        "doc_lengths": [len(d) for d in index.documents],
        "vocab": index._id_to_token,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(INDEX_MAGIC + "\n")
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for tid in range(len(index.vocabulary)):
            docs, pos = index.postings[tid]
            fh.write(" ".join(f"{d}:{p}" for d, p in zip(docs.tolist(), pos.tolist())) + "\n")


def load_index(path: str | Path) -> CorpusIndex:
    with open(path, encoding="utf-8") as fh:
        magic = fh.readline().rstrip("\n")
        if magic != INDEX_MAGIC:
            raise ValueError(f"{path}: not a corpus index (expected magic {INDEX_MAGIC!r}, got {magic!r})")
        header = json.loads(fh.readline())
        vocab = header["vocab"]
        documents = [np.full(n, -1, dtype=np.int64) for n in header["doc_lengths"]]
        for tid in range(len(vocab)):
            line = fh.readline().split()
            for item in line:
                d, p = item.split(":")
                documents[int(d)][int(p)] = tid
    if any((d < 0).any() for d in documents):
        raise ValueError(f"{path}: corrupt index, postings do not cover every position")
    index = CorpusIndex(documents, {tok: i for i, tok in enumerate(vocab)}, header["doc_names"])
    if index.token_count != header["token_count"]:
        raise ValueError(f"{path}: token_count mismatch")
    return index


def _by_document(docs: np.ndarray, pos: np.ndarray) -> dict[int, np.ndarray]:
    if len(docs) == 0:
        return {}
    cuts = np.flatnonzero(np.diff(docs)) + 1
    return {int(d[0]): p for d, p in zip(np.split(docs, cuts), np.split(pos, cuts))}


def _window_cover(positions: np.ndarray, n_windows: int, window: int) -> np.ndarray:
    """Boolean mask over window starts: True where the window holds some position."""
    diff = np.zeros(n_windows + 1, dtype=np.int64)
    lo = np.maximum(positions - window + 1, 0)
    hi = np.minimum(positions, n_windows - 1) + 1
    np.add.at(diff, lo, 1)
    np.add.at(diff, hi, -1)
    return np.cumsum(diff[:-1]) > 0


def window_cooccurrence_count(index: CorpusIndex, pair: WordPair, window: int = 5) -> int:
    """Count sliding windows of ``window`` tokens holding both pair members.

    Windows never cross documents. A document shorter than ``window`` is one
    (short) window of its own.
    """
    if window < 2:
        raise ValueError("window must be >= 2")
    a = _by_document(*index.occurrences(pair.left))
    b = _by_document(*index.occurrences(pair.right))
    total = 0
    for doc in a.keys() & b.keys():
        length = len(index.documents[doc])
        if length <= window:
            total += 1
            continue
        n_windows = length - window + 1
        both = _window_cover(a[doc], n_windows, window) & _window_cover(b[doc], n_windows, window)
        total += int(both.sum())
    return total


def expand_suffix_variants(word: str, suffixes: Sequence[str] = DEFAULT_SUFFIXES) -> set[str]:
    variants = {word}
    for suf in suffixes:
        variants.add(word + suf)
        if word.endswith(suf) and len(word) - len(suf) >= MIN_STRIP_STEM:
            variants.add(word[: -len(suf)])
    return variants


def find_phrases(index: CorpusIndex, pair: WordPair, min_inter: int = 1, max_inter: int = 3,
                 suffixes: Sequence[str] = DEFAULT_SUFFIXES) -> list[Phrase]:
    """All spans ``x w1..wn y`` with ``min_inter <= n <= max_inter`` where x, y are
    suffix variants of the two members, in either order."""
    if pair.left == pair.right:
        raise ValueError(f"pair members must differ: {pair}")
    if min_inter < 1 or max_inter < min_inter:
        raise ValueError("need 1 <= min_inter <= max_inter")

    def variant_ids(word):
        ids = (index.token_id(v) for v in expand_suffix_variants(word, suffixes))
        return {i for i in ids if i is not None}

    left_ids, right_ids = variant_ids(pair.left), variant_ids(pair.right)
    found: dict[tuple[int, int, int], Phrase] = {}
    for left_first, start_ids, end_ids in ((True, left_ids, right_ids), (False, right_ids, left_ids)):
        if not end_ids:
            continue
        for tid in sorted(start_ids):
            docs, positions = index.postings[tid]
            for doc, start in zip(docs.tolist(), positions.tolist()):
                tokens = index.documents[doc]
                for gap in range(min_inter, max_inter + 1):
                    end = start + gap + 1
                    if end >= len(tokens):
                        break
                    key = (doc, start, gap + 2)
                    if key in found or int(tokens[end]) not in end_ids:
                        continue
                    found[key] = Phrase(
                        pair, left_first,
                        tuple(index.token(int(t)) for t in tokens[start + 1:end]),
                        (doc, start), index.token(tid), index.token(int(tokens[end])),
                    )
    return [found[key] for key in sorted(found)]
