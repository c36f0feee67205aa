"""Synthetic corpora with planted relations, for smoke tests and demos.

Four relation families are planted, each with its own stock of short
connecting phrases (``{b} measured in {a}s``, ``{b} made from {a}``, ...).
Every pair also turns up in generic filler phrases shared by all families,
and a set of unrelated "noise" pairs appears only in those. Thesaurus
neighbours are invented tokens that the corpus pairs with the partner word
in the same family phrases, so alternates carry the relation too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluation import NmExample, SatQuestion
from .pairs import WordPair

FAMILIES: dict[str, dict] = {
    "unit": {
        "class5": "qualitative",
        "pairs": [("quart", "volume"), ("mile", "distance"), ("gram", "mass"), ("hour", "duration"),
                  ("degree", "temperature"), ("volt", "voltage"), ("acre", "area"), ("byte", "memory"),
                  ("calorie", "energy"), ("knot", "speed"), ("decibel", "loudness"), ("carat", "purity")],
        "templates": ["{b} measured in {a}s", "{b} in {a}s", "{a}s of {b}", "{a} total {b}",
                      "{b} of several {a}s", "{b} expressed in {a}s", "{a}s worth of {b}"],
    },
    "tool": {
        "class5": "participatory",
        "pairs": [("hammer", "carpenter"), ("scalpel", "surgeon"), ("brush", "painter"), ("needle", "tailor"),
                  ("wrench", "plumber"), ("chisel", "sculptor"), ("camera", "photographer"), ("plow", "farmer"),
                  ("baton", "conductor"), ("shears", "barber"), ("trowel", "mason"), ("quill", "scribe")],
        "templates": ["{b} uses a {a}", "{a} used by the {b}", "{b} with a {a}", "{b} holding the {a}",
                      "{b} sharpened his {a}", "{a} belongs to every {b}", "{b} swings a {a}"],
    },
    "part": {
        "class5": "spatial",
        "pairs": [("wheel", "bicycle"), ("petal", "flower"), ("page", "book"), ("branch", "tree"),
                  ("finger", "hand"), ("brick", "wall"), ("leaf", "plant"), ("string", "guitar"),
                  ("keyboard", "computer"), ("room", "house"), ("chapter", "novel"), ("wing", "bird")],
        "templates": ["{a} of the {b}", "{b} has a {a}", "{b} missing one {a}", "{a} attached to {b}",
                      "{a} is part of {b}", "{b} lost its {a}", "{a} on each {b}"],
    },
    "material": {
        "class5": "causal",
        "pairs": [("wool", "sweater"), ("flour", "bread"), ("clay", "pottery"), ("glass", "window"),
                  ("leather", "saddle"), ("grape", "wine"), ("timber", "cabin"), ("silk", "scarf"),
                  ("cotton", "shirt"), ("steel", "sword"), ("marble", "statue"), ("wax", "candle")],
        "templates": ["{b} made from {a}", "{b} made of {a}", "{a} turned into {b}", "{a} woven into a {b}",
                      "{b} of fine {a}", "{b} crafted from pure {a}", "{a} becomes the {b}"],
    },
}

GENERIC_TEMPLATES = ["{a} and {b}", "{b} or {a}", "{a} near the {b}", "{b} beside some {a}", "{a} then {b}"]

NOISE_PAIRS = [("apple", "river"), ("lamp", "ocean"), ("pencil", "mountain"), ("shadow", "kettle"),
               ("walrus", "tiger"), ("garden", "violin"), ("ladder", "cloud"), ("mirror", "forest")]

_SYLLABLES = ["ba", "ko", "ri", "tu", "ne", "lo", "mi", "sa", "ve", "du", "pa", "zi", "go", "fe", "ha", "ju"]


@dataclass
class RelationalFixture:
    documents: list[str]
    thesaurus_text: str
    questions: list[SatQuestion]
    nm_examples: list[NmExample]
    skip_stems: list[WordPair] = field(default_factory=list)

    @property
    def pairs(self) -> list[WordPair]:
        """Every pair used by the questions and the noun-modifier examples."""
        seen = [p for q in self.questions for p in q.pairs] + [ex.pair for ex in self.nm_examples]
        return list(dict.fromkeys(seen))

    @property
    def n_tokens(self) -> int:
        return sum(len(doc.split()) for doc in self.documents)

    def write(self, root: str | Path) -> dict[str, Path]:
        """Write corpus/, thesaurus.txt, pairs.tsv, sat.tsv and nm.tsv under ``root``."""
        root = Path(root)
        corpus = root / "corpus"
        corpus.mkdir(parents=True, exist_ok=True)
        for i, doc in enumerate(self.documents):
            (corpus / f"doc{i:03d}.txt").write_text(doc, encoding="utf-8")
        paths = {"corpus": corpus, "thesaurus": root / "thesaurus.txt", "pairs": root / "pairs.tsv",
                 "sat": root / "sat.tsv", "nm": root / "nm.tsv"}
        paths["thesaurus"].write_text(self.thesaurus_text, encoding="utf-8")
        paths["pairs"].write_text("".join(f"{p.left}\t{p.right}\n" for p in self.pairs), encoding="utf-8")
        with open(paths["sat"], "w", encoding="utf-8") as fh:
            for q in self.questions:
                words = [w for p in q.pairs for w in (p.left, p.right)]
                fh.write("\t".join(words + [str(q.answer_index)]) + "\n")
        with open(paths["nm"], "w", encoding="utf-8") as fh:
            for ex in self.nm_examples:
                fh.write(f"{ex.modifier}\t{ex.head}\t{ex.class30}\t{ex.class5}\n")
        return paths


class _WordMaker:
    def __init__(self, rng: np.random.Generator, taken: set[str]):
        self.rng, self.taken = rng, taken

    def __call__(self, n_syllables: int = 3) -> str:
        while True:
            word = "".join(self.rng.choice(_SYLLABLES, size=n_syllables))
            # keep clear of suffix-variant collisions with real words
            if word not in self.taken and not word.endswith(("s", "d")):
                self.taken.add(word)
                return word


def make_relational_fixture(n_questions: int = 10, n_skip_stems: int = 2, target_tokens: int = 50_000,
                            n_documents: int = 20, seed: int = 0) -> RelationalFixture:
    """Build a planted-relation corpus, thesaurus, analogy questions and
    noun-modifier examples.

    The first ``n_skip_stems`` question stems never co-occur in the corpus;
    only their thesaurus alternates do, so without alternates those questions
    are skipped.
    """
    rng = np.random.default_rng(seed)
    taken = {w for fam in FAMILIES.values() for pr in fam["pairs"] for w in pr}
    taken |= {w for pr in NOISE_PAIRS for w in pr}
    make_word = _WordMaker(rng, taken)
    fillers = [make_word(int(rng.integers(2, 4))) for _ in range(400)]

    names = list(FAMILIES)
    # questions cycle through families; stems and answers are drawn without reuse
    pools = {name: list(rng.permutation(len(FAMILIES[name]["pairs"]))) for name in names}
    questions, stems_plan = [], []
    for qi in range(n_questions):
        fam = names[qi % len(names)]
        stem = WordPair(*FAMILIES[fam]["pairs"][pools[fam].pop()])
        answer = WordPair(*FAMILIES[fam]["pairs"][pools[fam].pop()])
        distractors = [WordPair(*FAMILIES[other]["pairs"][int(rng.integers(len(FAMILIES[other]["pairs"])))])
                       for other in names if other != fam]
        distractors.append(WordPair(*NOISE_PAIRS[int(rng.integers(len(NOISE_PAIRS)))]))
        answer_index = int(rng.integers(5))
        choices = distractors[:answer_index] + [answer] + distractors[answer_index:]
        questions.append(SatQuestion(stem, tuple(choices), answer_index))
        stems_plan.append(stem)
    skip_stems = stems_plan[:n_skip_stems]

    family_of = {WordPair(*pr): name for name in names for pr in FAMILIES[name]["pairs"]}

    # thesaurus: acceptable neighbours that co-occur, one that never does, and rejects
    thesaurus_blocks = []
    alternates_plan: list[tuple[WordPair, str, int]] = []
    for pair, fam in family_of.items():
        for side in ("left", "right"):
            word = getattr(pair, side)
            good = [make_word() for _ in range(3)]
            silent = make_word()
            scores = sorted(rng.uniform(0.05, 0.3, size=4), reverse=True)
            neighbours = list(zip(good + [silent], scores))
            junk = [(f"{word}-like", 0.04), (word[:3], 0.035), (word.capitalize() + "ia", 0.03), ("two words", 0.02)]
            noun = sorted(neighbours + junk[:2], key=lambda it: -it[1])
            verb = sorted([(good[0], scores[0] * 0.5)] + junk[2:], key=lambda it: -it[1])
            thesaurus_blocks.append(_block(word, "n", noun))
            thesaurus_blocks.append(_block(word, "v", verb))
            weight = 10 if side == "left" else 3
            for rank, syn in enumerate(good):
                alt = WordPair(syn, pair.right) if side == "left" else WordPair(pair.left, syn)
                alternates_plan.append((alt, fam, weight - 2 * rank if side == "left" else weight - rank))

    sentences: list[str] = []

    def plant(pair: WordPair, templates: list[str], count: int):
        for _ in range(count):
            tpl = templates[int(rng.integers(len(templates)))]
            core = tpl.format(a=pair.left, b=pair.right)
            pre = rng.choice(fillers, size=int(rng.integers(2, 5)))
            post = rng.choice(fillers, size=int(rng.integers(2, 5)))
            sentences.append(" ".join([*pre, core, *post]) + ".")

    skip_set = set(skip_stems)
    for pair, fam in family_of.items():
        if pair in skip_set:
            continue
        plant(pair, FAMILIES[fam]["templates"], 14)
        plant(pair, GENERIC_TEMPLATES, 5)
    for alt, fam, count in alternates_plan:
        plant(alt, FAMILIES[fam]["templates"], max(count, 1))
        plant(alt, GENERIC_TEMPLATES, 2)
    for pr in NOISE_PAIRS:
        plant(WordPair(*pr), GENERIC_TEMPLATES, 12)

    planted = sum(len(s.split()) for s in sentences)
    filler_tokens = max(0, target_tokens - planted)
    while filler_tokens > 0:
        length = int(rng.integers(6, 14))
        sentences.append(" ".join(rng.choice(fillers, size=length)) + ".")
        filler_tokens -= length

    order = rng.permutation(len(sentences))
    documents = ["\n".join(sentences[i] for i in chunk) + "\n"
                 for chunk in np.array_split(order, n_documents)]

    nm_examples = []
    for name in names:
        for left, right in FAMILIES[name]["pairs"][:10]:
            nm_examples.append(NmExample(left, right, name, FAMILIES[name]["class5"]))

    return RelationalFixture(documents, "\n".join(thesaurus_blocks), questions, nm_examples, skip_stems)


def _block(word: str, pos: str, neighbours: list[tuple[str, float]]) -> str:
    lines = [f"{word}\t{pos}"] + [f"{n}\t{s:.6f}" for n, s in neighbours]
    return "\n".join(lines) + "\n"
