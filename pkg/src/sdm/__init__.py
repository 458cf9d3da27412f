"""Streaming dictionary matching over suffix trees.

Index a set of patterns either in a pointer-based generalized suffix tree
(fast, memory-hungry) or in a compressed suffix tree built from succinct
components (suffix-array layer, LCP array, balanced-parentheses topology),
then stream a text through the index reporting, for every text position,
the longest pattern that ends there.

>>> import sdm
>>> ix = sdm.CstIndex.build(sdm.ingest([b"a", b"ate", b"bath", b"later"]))
>>> sdm.find_occurrences(ix, b"lately")
[Occurrence(end_pos=1, pattern_id=0, length=1), \
Occurrence(end_pos=3, pattern_id=1, length=3)]
"""

from ._dispatch import JIT_ENABLED, lane_name
from .bitseq import BalancedParens, BitVector
from .cst import CstIndex
from .gst import GstIndex
from .indexio import IndexFormatError, load_index, save_index
from .lma import MarkedAncestorIndex
from .matcher import Occurrence, ScanCounters, find_occurrences, search
from .oracle import longest_matches
from .textindex import ConcatDictionary, build_lcp, build_sa, ingest

__version__ = "0.1.0"

__all__ = [
    "BalancedParens",
    "BitVector",
    "ConcatDictionary",
    "CstIndex",
    "GstIndex",
    "IndexFormatError",
    "JIT_ENABLED",
    "MarkedAncestorIndex",
    "Occurrence",
    "ScanCounters",
    "build_lcp",
    "build_sa",
    "find_occurrences",
    "ingest",
    "lane_name",
    "load_index",
    "longest_matches",
    "save_index",
    "search",
]
