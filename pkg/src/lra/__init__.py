"""Latent relational analysis: relational similarity between word pairs."""

from .corpus_index import CorpusIndex, Phrase, build_index, load_index
from .estimator import AnalogySolver, LatentRelationalAnalysis, NearestPairClassifier
from .pairs import WordPair
from .pipeline import BuiltSpace, LraConfig, run_pipeline
from .thesaurus import AlternateSet, Thesaurus, load_thesaurus

__all__ = [
    "AlternateSet", "AnalogySolver", "BuiltSpace", "CorpusIndex", "LatentRelationalAnalysis",
    "LraConfig", "NearestPairClassifier", "Phrase", "Thesaurus", "WordPair", "build_index",
    "load_index", "load_thesaurus", "run_pipeline",
]

__version__ = "0.1.0"
