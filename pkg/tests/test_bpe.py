import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqmtl.dataprep import BpeModel, learn_bpe, undo_bpe, word_counts
from seqmtl.dataprep import _bpe_fallback as fallback
from seqmtl.dataprep import kernels
from seqmtl.dataprep.bpe import join_units
from seqmtl.errors import DataError

words = st.text(alphabet="abcde", min_size=1, max_size=8)
corpora = st.dictionaries(words, st.integers(1, 20), min_size=1, max_size=25)


def test_reference_merge_order():
    # the classic low/lower/newest/widest toy corpus
    vocab = {"low": 5, "lower": 2, "newest": 6, "widest": 3}
    model = learn_bpe(vocab, 10)
    assert model.merges[:4] == [("e", "s"), ("es", "t"), ("est", "</w>"), ("l", "o")]


def test_ties_go_to_lexicographically_smallest_pair():
    assert learn_bpe({"aaab": 1}, 1).merges == [("a", "a")]
    assert learn_bpe({"ab": 1, "cd": 1}, 1).merges == [("a", "b")]


def test_overlapping_pairs_counted_per_merge():
    # "aaaa" holds two non-overlapping (a, a) occurrences; after that merge
    # (aa, </w>) ties with (aa, aa) and wins since "<" sorts before "a"
    m = learn_bpe({"aaaa": 1}, 3)
    assert m.merges == [("a", "a"), ("aa", "</w>"), ("aa", "aa</w>")]
    assert m.segment_word("aaaa") == ["aaaa</w>"]
    assert m.segment_tokens(["aaaa"]) == ["aaaa"]


def test_stops_when_no_pairs_remain():
    m = learn_bpe({"a": 3}, 50)
    assert m.merges == [("a", "</w>")]


def test_errors():
    with pytest.raises(DataError):
        learn_bpe({}, 3)
    with pytest.raises(ValueError):
        learn_bpe({"a": 1}, -1)


def test_segment_marks_continuations():
    m = learn_bpe({"lower": 5, "low": 5}, 3)
    units = m.segment_tokens(["lower"])
    assert len(units) > 1
    assert all(u.endswith("@@") for u in units[:-1])
    assert not units[-1].endswith("@@")
    assert undo_bpe(m.segment("lower low").split()) == ["lower", "low"]


def test_save_load(tmp_path):
    m = learn_bpe(word_counts(["the cat sat on the mat", "the dog"]), 12)
    p = tmp_path / "codes.bpe"
    m.save(p)
    m2 = BpeModel.load(p)
    assert m2.merges == m.merges
    assert m2.segment("the cats") == m.segment("the cats")


@given(corpora, st.integers(0, 30))
def test_compiled_and_python_kernels_agree(corpus, n):
    a = learn_bpe(corpus, n, kernel=fallback)
    b = learn_bpe(corpus, n)
    assert a.merges == b.merges


@given(corpora, st.integers(0, 30), st.lists(words, min_size=1, max_size=6))
def test_segment_then_join_round_trips(corpus, n, sentence):
    m = learn_bpe(corpus, n)
    units = m.segment_tokens(sentence)
    assert join_units(units) == sentence
    # idempotent on already segmented text
    assert m.segment_tokens(join_units(units)) == units


@given(corpora, st.integers(1, 30))
def test_learned_words_segment_into_merged_units(corpus, n):
    m = learn_bpe(corpus, n)
    for w in corpus:
        units = m.segment_word(w)
        assert "".join(units) == w + "</w>"
        assert all(u in m.unmerge(u) or len(m.unmerge(u)) > 1 for u in units)


def test_kernel_selection_flag():
    assert kernels.fallback is fallback
    assert isinstance(kernels.COMPILED, bool)


def test_count_pairs_kernels_match():
    sym = np.array([0, 1, 0, 1, 2, 0, 0], dtype=np.int32)
    starts = np.array([0, 3, 5], dtype=np.int64)
    lengths = np.array([3, 2, 2], dtype=np.int32)
    freqs = np.array([2, 5, 1], dtype=np.int64)
    a = fallback.count_pairs(sym, starts, lengths, freqs)
    b = kernels.count_pairs(sym, starts, lengths, freqs)
    assert dict(a) == dict(b) == {(0, 1): 2, (1, 0): 2, (1, 2): 5, (0, 0): 1}
