import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqmtl.dataprep import Vocabulary, encode_corpus, filter_corpus, learn_bpe, read_parallel
from seqmtl.dataprep.corpus import decode_target, read_conll, write_lines
from seqmtl.errors import DataError
from seqmtl.model import EOS, UNK


def test_vocab_reserved_ids_and_order():
    v = Vocabulary.build([["b", "a", "b"], ["c", "a", "b"]])
    assert v.itos[:3] == ["<s>", "</s>", "<unk>"]
    assert v.itos[3:] == ["b", "a", "c"]
    assert v.encode(["a", "zzz"]) == [4, UNK]


def test_vocab_save_load(tmp_path):
    v = Vocabulary.build([["x", "y", "y"]])
    v.save(tmp_path / "v.txt")
    assert Vocabulary.load(tmp_path / "v.txt").itos == v.itos
    with pytest.raises(DataError):
        Vocabulary(["has space"])


def test_read_parallel(tmp_path):
    write_lines(tmp_path / "a", ["a b", "c"])
    write_lines(tmp_path / "b", ["x", "y z"])
    assert read_parallel(tmp_path / "a", tmp_path / "b") == [(["a", "b"], ["x"]), (["c"], ["y", "z"])]
    write_lines(tmp_path / "c", ["1"])
    with pytest.raises(DataError):
        read_parallel(tmp_path / "a", tmp_path / "c")
    with pytest.raises(DataError):
        read_parallel(tmp_path / "missing", tmp_path / "c")


def test_filter_limits():
    pairs = [(["a"] * 3, ["b"] * 3), (["a"] * 6, ["b"]), (["a"], ["b"] * 2)]
    assert filter_corpus(pairs, max_len_pre_bpe=5) == [pairs[0], pairs[2]]
    seg = [(s * 2, t * 2) for s, t in pairs]
    kept, kseg = filter_corpus(pairs, None, 4, seg)
    assert kept == [pairs[2]] and kseg == [seg[2]]
    assert filter_corpus(pairs) == pairs


@given(st.lists(st.tuples(st.integers(1, 9), st.integers(1, 9)), max_size=20), st.integers(1, 9))
def test_filter_keeps_order_and_respects_limit(lens, limit):
    pairs = [(["a"] * s, ["b"] * t) for s, t in lens]
    out = filter_corpus(pairs, max_len_pre_bpe=limit)
    assert out == [p for p in pairs if len(p[0]) <= limit and len(p[1]) <= limit]


def test_encode_appends_eos_and_decodes():
    pairs = [(["low", "er"], ["lower"])]
    bpe = learn_bpe({"lower": 3, "low": 2}, 4)
    sv = Vocabulary.build([bpe.segment_tokens(s) for s, _ in pairs])
    tv = Vocabulary.build([bpe.segment_tokens(t) for _, t in pairs])
    (src, tgt), = encode_corpus(pairs, sv, tv, bpe, bpe)
    assert tgt[-1] == EOS
    assert decode_target(tgt, tv) == bpe.segment_tokens(["lower"])


def test_read_conll(tmp_path):
    write_lines(tmp_path / "c", ["-DOCSTART- O", "", "EU NNP B-ORG", "rejects VBZ O", "", "Peter NNP B-PER"])
    assert read_conll(tmp_path / "c") == [[("EU", "B-ORG"), ("rejects", "O")], [("Peter", "B-PER")]]
