import math

import mpmath
import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from lra.corpus_index import Phrase, find_phrases, index_from_texts
from lra.pairs import WordPair
from lra.pipeline import (ColumnKey, LraConfig, Orientation, SparseRelationMatrix, build_matrix,
                          count_pattern_support, log_entropy_transform, patterns_from_phrase,
                          run_pipeline, select_top_patterns)
from lra.thesaurus import Thesaurus

QV = WordPair("quart", "volume")
L, R = Orientation.LEFT_FIRST, Orientation.RIGHT_FIRST


def phrase(pair, *between, left_first=True, at=0):
    return Phrase(pair, left_first, tuple(between), (0, at))


def entropy_weight_oracle(column):
    """Log-entropy weight of one column, evaluated in 40-digit arithmetic."""
    mpmath.mp.dps = 40
    m = len(column)
    total = mpmath.mpf(sum(column))
    if total == 0:
        return 0.0
    h = -sum((mpmath.mpf(x) / total) * mpmath.log(mpmath.mpf(x) / total) for x in column if x > 0)
    return float(1 - h / mpmath.log(m))


def raw_matrix(columns):
    dense = np.array(columns, dtype=float).T
    m, n = dense.shape
    rows = [WordPair(f"a{i}x", f"b{i}x") for i in range(m)]
    cols = [ColumnKey((f"p{j}",), L) for j in range(n)]
    return SparseRelationMatrix(rows, cols, sp.csr_matrix(dense))


def test_patterns_of_spray():
    pats = patterns_from_phrase(phrase(QV, "of", "spray"))
    assert {" ".join(p) for p in pats} == {"of spray", "* spray", "of *", "* *"}


@pytest.mark.parametrize("between, count", [(("in",), 2), (("a", "b"), 4), (("a", "b", "c"), 8),
                                            (("the", "the"), 4)])
def test_pattern_counts(between, count):
    assert len(patterns_from_phrase(phrase(QV, *between))) == count


def test_pattern_support_counts_distinct_pairs():
    other = WordPair("mile", "distance")
    support = count_pattern_support({
        QV: [phrase(QV, "of", "x", at=i) for i in range(5)],
        other: [phrase(other, "big", "of")],
    })
    assert support[("*", "*")] == 2
    assert support[("of", "*")] == 1
    assert ("unseen",) not in support


def test_select_top_patterns():
    assert select_top_patterns({("p1",): 5, ("p3",): 3, ("p2",): 3}, 2) == [("p1",), ("p2",)]
    ten = {(f"w{i}",): 1 for i in range(10)}
    assert len(select_top_patterns(ten, 4000)) == 10
    assert select_top_patterns({("b",): 1, ("a", "*"): 1, ("a",): 1}, 10) == [("a",), ("a", "*"), ("b",)]


def quart_volume_corpus():
    """Sentences with known quart:volume counts for four patterns in both orders."""
    docs = (["quart in volume"] * 4 + ["volume in quarts"] * 10
            + ["quart of spray volume"] * 5 + ["quarts total of volume"] + ["quart big red volume"] * 13
            + ["volume of milk quarts"] * 2 + ["volume being two quarts"] * 14)
    return index_from_texts(docs)


def test_build_matrix_counts_per_orientation():
    index = quart_volume_corpus()
    phrases = {QV: find_phrases(index, QV)}
    patterns = [("in",), ("*", "of"), ("of", "*"), ("*", "*")]
    X = build_matrix([QV], phrases, patterns)
    row = X.row(QV)
    cell = lambda text, o: row[X.col_map[ColumnKey(tuple(text.split()), o)]]
    assert (cell("in", L), cell("in", R)) == (4, 10)
    assert (cell("* of", L), cell("* of", R)) == (1, 0)
    assert (cell("of *", L), cell("of *", R)) == (5, 2)
    assert (cell("* *", L), cell("* *", R)) == (19, 16)
    assert X.n == 2 * len(patterns)


def test_build_matrix_reversed_row_is_orientation_swap():
    index = quart_volume_corpus()
    phrases = {QV: find_phrases(index, QV)}
    patterns = [("in",), ("of", "*"), ("*", "*")]
    X = build_matrix([QV], phrases, patterns)
    fwd, rev = X.row(QV), X.row(QV.reversed())
    for j, key in enumerate(X.columns):
        swapped = ColumnKey(key.pattern, R if key.orientation is L else L)
        assert fwd[j] == rev[X.col_map[swapped]]


def test_build_matrix_length_mismatch_never_matches():
    X = build_matrix([QV], {QV: [phrase(QV, "of")]}, [("of", "*"), ("of",)])
    assert X.row(QV)[X.col_map[ColumnKey(("of", "*"), L)]] == 0
    assert X.row(QV)[X.col_map[ColumnKey(("of",), L)]] == 1


def test_build_matrix_drops_rows_without_selected_patterns():
    other = WordPair("mile", "distance")
    X = build_matrix([QV, other], {QV: [phrase(QV, "in")], other: [phrase(other, "per")]}, [("in",)])
    assert QV in X.row_map and other not in X.row_map and X.m == 2


def test_build_matrix_shares_rows_for_reversed_inputs():
    X = build_matrix([QV, QV.reversed()], {QV: [phrase(QV, "in")]}, [("in",)])
    assert X.m == 2


def test_build_matrix_empty_is_error():
    with pytest.raises(ValueError, match="empty matrix"):
        build_matrix([QV], {}, [("in",)])


def test_log_entropy_uniform_column_zeroed():
    W, weights = log_entropy_transform(raw_matrix([[2, 2, 2, 2], [1, 0, 0, 3]]))
    assert weights.weight[0] == pytest.approx(0.0, abs=1e-15)
    assert W.cells[:, 0].count_nonzero() == 0


def test_log_entropy_single_support_column():
    W, weights = log_entropy_transform(raw_matrix([[9, 0, 0]]))
    assert weights.weight[0] == 1.0
    assert W.cells[0, 0] == pytest.approx(2.302585, abs=1e-6)


def test_log_entropy_two_row_hand_case():
    # independent high-precision evaluation of the weight formula
    w = entropy_weight_oracle([3, 1])
    assert w == pytest.approx(0.18872187554086714, abs=1e-15)
    W, weights = log_entropy_transform(raw_matrix([[3, 1]]))
    assert weights.weight[0] == pytest.approx(w, abs=1e-12)
    assert W.cells[0, 0] == pytest.approx(w * math.log(4), abs=1e-12)
    assert W.cells[0, 0] == pytest.approx(0.261624071882274, abs=1e-12)


def test_log_entropy_requires_two_rows():
    with pytest.raises(ValueError):
        log_entropy_transform(raw_matrix([[3]]))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 50), min_size=2, max_size=30))
def test_log_entropy_matches_oracle_and_is_monotone(column):
    W, weights = log_entropy_transform(raw_matrix([column, [1] + [0] * (len(column) - 1)]))
    w = weights.weight[0]
    assert 0.0 <= w <= 1.0
    assert w == pytest.approx(entropy_weight_oracle(column), abs=1e-9)
    vals = W.cells[:, 0].toarray().ravel()
    assert np.all(np.isfinite(vals))
    order = np.argsort(column, kind="stable")
    assert np.all(np.diff(vals[order]) >= -1e-15)


def test_config_defaults_match_parameter_table():
    c = LraConfig()
    assert (c.num_sim, c.max_phrase, c.num_filter, c.min_inter, c.max_inter, c.num_patterns, c.k) == \
        (10, 5, 3, 1, 3, 4000, 300)
    assert c.num_combinations == 16
    assert LraConfig(ablate_synonyms=True).num_combinations == 1


def test_config_text_round_trip():
    c = LraConfig(k=8, num_patterns=100, seed=3, ablate_svd=True)
    assert LraConfig.from_text(c.to_text()) == c


@pytest.mark.parametrize("text, msg", [
    ("max_phrase = 6\n", "max_phrase"),
    ("bogus = 1\n", "unknown"),
    ("k = many\n", "integer"),
    ("num_filter = 2\nnum_combinations = 16\n", "num_combinations"),
    ("ablate_svd = maybe\n", "boolean"),
])
def test_config_rejects_bad_text(text, msg):
    with pytest.raises(ValueError, match=msg):
        LraConfig.from_text(text)


def test_config_max_inter_implies_max_phrase():
    assert LraConfig.from_text("max_inter = 2\n# comment\n").max_phrase == 4


def expansion_fixture(n_pairs):
    """n_pairs input pairs, each with three co-occurring thesaurus alternates."""
    docs, entries, pairs = [], {}, []
    for i in range(n_pairs):
        left, right = f"left{chr(97 + i % 26)}{chr(97 + i // 26)}", f"right{chr(97 + i % 26)}{chr(97 + i // 26)}"
        pair = WordPair(left, right)
        pairs.append(pair)
        syns = [f"{left}syn{c}" for c in "abc"]
        entries[left] = {"n": [(s, 0.3 - 0.1 * j) for j, s in enumerate(syns)]}
        for a in [left] + syns:
            docs.append(f"{a} of the {right}. {right} with {a}")
    return pairs, index_from_texts(docs), Thesaurus(entries)


@pytest.mark.parametrize("n_pairs", [6, 30])
def test_run_pipeline_expands_four_fold_then_doubles(n_pairs):
    pairs, index, th = expansion_fixture(n_pairs)
    built = run_pipeline(LraConfig(k=4, num_patterns=50), pairs, index, th)
    assert built.report.n_expanded_pairs == 4 * n_pairs
    assert built.report.n_candidate_rows == 8 * n_pairs
    assert built.raw.n == 2 * len(built.patterns)
    no_syn = run_pipeline(LraConfig(k=4, num_patterns=50, ablate_synonyms=True), pairs, index, th)
    assert no_syn.report.n_candidate_rows == 2 * n_pairs
    assert all(not s.alternates for s in no_syn.alternates.values())


def test_run_pipeline_no_svd_uses_weighted_rows():
    pairs, index, th = expansion_fixture(6)
    built = run_pipeline(LraConfig(k=4, num_patterns=50, ablate_svd=True), pairs, index, th)
    assert built.factorization is None
    assert built.space.dim == built.raw.n


def test_run_pipeline_deterministic_and_thread_independent():
    pairs, index, th = expansion_fixture(8)
    config = LraConfig(k=4, num_patterns=50)
    a = run_pipeline(config, pairs, index, th)
    b = run_pipeline(config, pairs, index, th, n_jobs=4)
    assert a.raw.rows == b.raw.rows and a.patterns == b.patterns
    assert np.array_equal(a.space.vectors, b.space.vectors)


def test_run_pipeline_errors():
    with pytest.raises(ValueError):
        run_pipeline(LraConfig(), [], index_from_texts(["a"]), Thesaurus())
    with pytest.raises(ValueError, match="empty matrix"):
        run_pipeline(LraConfig(), [QV], index_from_texts(["nothing here"]), Thesaurus())
