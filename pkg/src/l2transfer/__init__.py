"""Delexicalized cross-linguistic transfer patterns and language phylogeny
reconstruction from parallel learner corpora."""

__version__ = "0.1.0"

from .aligner import Alignment, parse_pharaoh
from .corpus import CorpusReader, SentencePair
from .phylo import Dendrogram, LangPatternMatrix
from .t2s import T2SRule
from .t2t import T2TPattern
from .treebank import ConstTree, parse_bracketed

__all__ = [
    "Alignment", "ConstTree", "CorpusReader", "Dendrogram",
    "LangPatternMatrix", "SentencePair", "T2SRule", "T2TPattern",
    "parse_bracketed", "parse_pharaoh", "__version__",
]
