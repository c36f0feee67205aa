import itertools

import numpy as np
import pytest

from lra.evaluation import (NmExample, SatQuestion, SatReport, answer_question, exhaustive_neighbours,
                            macro_f, nm_classify_loocv, read_nm_examples, read_sat_questions, score_sat,
                            two_phase_neighbours)
from lra.factorization import ProjectedSpace
from lra.pairs import WordPair
from lra.pipeline import BuiltSpace
from lra.thesaurus import AlternateSet


def brute_force_macro(gold, pred):
    """Confusion matrix enumeration, one class at a time."""
    labels = sorted(set(gold))
    scores = []
    for c in labels:
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        fp = sum(1 for g, p in zip(gold, pred) if g != c and p == c)
        fn = sum(1 for g, p in zip(gold, pred) if g == c and p != c)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        scores.append((prec, rec, f))
    return tuple(float(np.mean([s[i] for s in scores])) for i in range(3))


def engine_from(vectors: dict, alternates=None) -> BuiltSpace:
    pairs = list(vectors)
    space = ProjectedSpace(np.array([vectors[p] for p in pairs], dtype=float), {p: i for i, p in enumerate(pairs)})
    return BuiltSpace(space, alternates or {})


def wp(text):
    return WordPair.parse(text)


@pytest.mark.parametrize("counts, score", [((210, 160, 4), 0.564), ((144, 196, 34), 0.403),
                                           ((0, 0, 374), 0.200)])
def test_sat_scores(counts, score):
    assert SatReport(*counts).score == pytest.approx(score, abs=5e-4)


def test_sat_precision_recall():
    r = SatReport(144, 196, 34)
    assert r.precision == pytest.approx(0.424, abs=5e-4)
    assert r.recall == pytest.approx(0.385, abs=5e-4)
    assert SatReport(0, 0, 5).precision == 0.0


def test_score_sat_from_predictions_and_affine():
    r = score_sat([1, 2, None, 0], [1, 0, 3, 0])
    assert (r.correct, r.incorrect, r.skipped, r.total) == (2, 1, 1, 4)
    more = score_sat([1, 2, None, 0, 4], [1, 0, 3, 0, 4])
    base = SatReport(2, 1, 1)
    assert SatReport(3, 1, 1).score * 5 - base.score * 4 == pytest.approx(1.0)
    assert SatReport(2, 1, 2).score * 5 - base.score * 4 == pytest.approx(0.2)
    assert more.correct == 3
    with pytest.raises(ValueError):
        score_sat([], [])


def test_sat_question_validation():
    with pytest.raises(ValueError):
        SatQuestion(wp("aa:bb"), (wp("cc:dd"),) * 4, 0)
    with pytest.raises(ValueError):
        SatQuestion(wp("aa:bb"), (wp("cc:dd"),) * 5, 5)


def analogy_engine():
    stem = wp("quart:volume")
    vec = {stem: [1, 0.1, 0], wp("day:night"): [0, 1, 0], wp("mile:distance"): [1, 0, 0.1],
           wp("decade:century"): [0.2, 1, 0], wp("friction:heat"): [0.5, 0.5, 0.5],
           wp("part:whole"): [0, 0, 1]}
    q = SatQuestion(stem, (wp("day:night"), wp("mile:distance"), wp("decade:century"),
                           wp("friction:heat"), wp("part:whole")), 1)
    return engine_from(vec), q


def test_answer_question_picks_best():
    engine, q = analogy_engine()
    assert answer_question(engine, q) == 1


def test_answer_question_skips_when_stem_has_no_rows():
    engine, q = analogy_engine()
    q2 = SatQuestion(wp("heckler:disconcert"), q.choices, 1)
    assert answer_question(engine, q2) is None


def test_answer_question_uses_alternates_when_stem_row_missing():
    engine, q = analogy_engine()
    stem = wp("heckler:disconcert")
    engine.alternates[stem] = AlternateSet(stem, [(wp("quart:volume"), 0.2, 3)])
    assert answer_question(engine, SatQuestion(stem, q.choices, 1)) == 1


def test_answer_question_tie_goes_to_lower_index():
    vec = {wp("aa:bb"): [1, 0], wp("cc:dd"): [1, 0], wp("ee:ff"): [1, 0], wp("gg:hh"): [0, 1]}
    q = SatQuestion(wp("aa:bb"), (wp("gg:hh"), wp("ee:ff"), wp("cc:dd"), wp("gg:hh"), wp("gg:hh")), 1)
    assert answer_question(engine_from(vec), q) == 1


def test_answer_question_all_choices_unscorable():
    vec = {wp("aa:bb"): [1, 0]}
    q = SatQuestion(wp("aa:bb"), tuple(wp(f"c{i}x:d{i}x") for i in range(5)), 0)
    assert answer_question(engine_from(vec), q) is None


def test_macro_f_hand_case():
    rep = macro_f([("A", "A"), ("A", "B"), ("B", "B")])
    assert rep.per_class["A"] == pytest.approx((1.0, 0.5, 2 / 3))
    assert rep.per_class["B"] == pytest.approx((0.5, 1.0, 2 / 3))
    assert rep.macro_f == pytest.approx(2 / 3)
    assert rep.accuracy == pytest.approx(2 / 3)


def test_macro_f_all_correct_and_never_predicted():
    assert macro_f([("x", "x"), ("y", "y")]).macro_f == 1.0
    rep = macro_f([("x", "y"), ("y", "y")])
    assert rep.per_class["x"] == (0.0, 0.0, 0.0)


def test_macro_f_matches_brute_force_randomized():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n_classes = int(rng.integers(1, 11))
        labels = [f"c{i}" for i in range(n_classes)]
        n = int(rng.integers(1, 40))
        gold = list(rng.choice(labels, size=n))
        pred = [None if rng.random() < 0.05 else str(p) for p in rng.choice(labels, size=n)]
        rep = macro_f(list(zip(gold, pred)))
        want = brute_force_macro(gold, pred)
        assert (rep.macro_precision, rep.macro_recall, rep.macro_f) == pytest.approx(want, abs=1e-12)


def four_example_fixture():
    # hand-built vectors: the last B example sits nearest to the A cluster
    ex = [NmExample("aaa", "xxx", "A", "causal"), NmExample("bbb", "xxx", "A", "causal"),
          NmExample("ccc", "yyy", "B", "spatial"), NmExample("ddd", "yyy", "B", "spatial")]
    vec = {ex[0].pair: [1.0, 0.0], ex[1].pair: [0.9, 0.1], ex[2].pair: [0.0, 1.0], ex[3].pair: [0.8, 0.3]}
    return engine_from(vec), ex


def test_loocv_four_examples():
    engine, ex = four_example_fixture()
    rep = nm_classify_loocv(engine, ex)
    assert [p for _, p in rep.predictions] == ["A", "A", "B", "A"]
    assert rep.accuracy == 0.75
    want = brute_force_macro([g for g, _ in rep.predictions], [p for _, p in rep.predictions])
    assert rep.macro_f == pytest.approx(want[2])
    # A: P=2/3 R=1 F=0.8 ; B: P=1 R=0.5 F=2/3
    assert rep.macro_f == pytest.approx((0.8 + 2 / 3) / 2)


def test_loocv_single_label():
    engine, ex = four_example_fixture()
    same = [NmExample(e.modifier, e.head, "A", "causal") for e in ex]
    assert nm_classify_loocv(engine, same).accuracy == 1.0


def test_loocv_unclassifiable_probe_counts_incorrect():
    engine, ex = four_example_fixture()
    ex = ex + [NmExample("zzz", "www", "B", "spatial")]
    rep = nm_classify_loocv(engine, ex)
    assert rep.predictions[-1] == ("B", None)
    assert rep.total == 5


def test_loocv_scheme5_uses_groups():
    engine, ex = four_example_fixture()
    rep = nm_classify_loocv(engine, ex, scheme="5")
    assert set(rep.per_class) == {"causal", "spatial"}


def test_two_phase_full_shortlist_equals_exhaustive():
    rng = np.random.default_rng(3)
    words = [f"w{i}q" for i in range(7)]
    pairs = [WordPair(a, b) for a, b in itertools.permutations(words, 2)]
    vec = {p: rng.standard_normal(5) for p in pairs}
    alternates = {p: AlternateSet(p, [(pairs[int(j)], 0.1, 1) for j in rng.choice(len(pairs), 3, replace=False)
                                      if pairs[int(j)] != p]) for p in pairs[:20]}
    engine = engine_from(vec, alternates)
    for probe in pairs[:10]:
        pool = [p for p in pairs[:20] if p != probe]
        assert two_phase_neighbours(engine, probe, pool, len(pool)) == exhaustive_neighbours(engine, probe, pool)
        short = two_phase_neighbours(engine, probe, pool, 5)
        assert len(short) == 5


def test_two_phase_cosine_budget():
    n, shortlist, combos = 600, 30, 16
    assert n * (n - 1) + n * shortlist * combos == 647_400


def test_two_phase_empty_pool():
    engine, _ = four_example_fixture()
    with pytest.raises(ValueError):
        two_phase_neighbours(engine, wp("aaa:xxx"), [])


def test_read_files(tmp_path):
    sat = tmp_path / "sat.tsv"
    sat.write_text("\t".join(["Quart", "volume", "day", "night", "mile", "distance", "decade", "century",
                              "friction", "heat", "part", "whole", "1"]) + "\n")
    (q,) = read_sat_questions(sat)
    assert q.stem == wp("quart:volume") and q.answer_index == 1
    nm = tmp_path / "nm.tsv"
    nm.write_text("flu\tvirus\tcause\tcausal\nhome\ttown\tlocation\tspatial\n")
    ex = read_nm_examples(nm)
    assert ex[1].pair == wp("home:town") and ex[1].label("5") == "spatial"
    nm.write_text("flu\tvirus\tcause\tcausal\nsmog\tfog\tcause\tspatial\n")
    with pytest.raises(ValueError, match=":2: class 'cause'"):
        read_nm_examples(nm)
    nm.write_text("flu\tvirus\tcause\tweird\n")
    with pytest.raises(ValueError, match=":1:"):
        read_nm_examples(nm)
    sat.write_text("a\tb\n")
    with pytest.raises(ValueError, match=":1:"):
        read_sat_questions(sat)
