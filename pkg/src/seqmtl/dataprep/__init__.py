"""Corpus preparation: BPE, vocabularies, filtering, tree/AMR linearization."""

from .amr import AmrGraph, delinearize_amr, linearize_amr, parse_penman
from .bpe import BpeModel, learn_bpe, learn_bpe_vocab, undo_bpe, word_counts
from .corpus import encode_corpus, filter_corpus, read_parallel
from .trees import Tree, delinearize_tree, linearize_tree, parse_brackets
from .vocab import Vocabulary

__all__ = [
    "AmrGraph",
    "BpeModel",
    "Tree",
    "Vocabulary",
    "delinearize_amr",
    "delinearize_tree",
    "encode_corpus",
    "filter_corpus",
    "learn_bpe",
    "learn_bpe_vocab",
    "linearize_amr",
    "linearize_tree",
    "parse_brackets",
    "parse_penman",
    "read_parallel",
    "undo_bpe",
    "word_counts",
]
