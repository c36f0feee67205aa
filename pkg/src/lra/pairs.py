from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True, order=True)
class WordPair:
    left: str
    right: str

    def __post_init__(self):
        for word in (self.left, self.right):
            if not word or word != word.lower() or any(c.isspace() for c in word):
                raise ValueError(f"invalid pair member {word!r}: must be a nonempty lowercase token")
        if self.left == self.right:
            raise ValueError(f"pair members must differ: {self.left}:{self.right}")

    def reversed(self) -> "WordPair":
        return WordPair(self.right, self.left)

    @classmethod
    def parse(cls, text: str) -> "WordPair":
        """Parse ``"a:b"`` (or ``"a<TAB>b"``), lowercasing both members."""
        sep = ":" if ":" in text else "\t"
        left, _, right = text.strip().partition(sep)
        return cls(left.strip().lower(), right.strip().lower())

    def __str__(self) -> str:
        return f"{self.left}:{self.right}"


def read_pairs(path: str | Path) -> list[WordPair]:
    """Read one ``left<TAB>right`` pair per line; blank lines and ``#`` comments skipped."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'left<TAB>right'")
            pairs.append(WordPair(fields[0].strip().lower(), fields[1].strip().lower()))
    return pairs
