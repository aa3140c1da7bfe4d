import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqmtl.errors import ContractError
from seqmtl.evaluation import (corpus_bleu, format_report, matched_ngrams, ngram_gain,
                               token_accuracy, write_csv)

sent = st.lists(st.sampled_from("abcdef"), min_size=0, max_size=12)


def test_exact_match_is_100():
    refs = [["a", "b", "c", "d", "e"], ["x", "y", "z", "w"]]
    assert corpus_bleu(refs, refs).bleu == pytest.approx(100.0)


def test_brevity_penalty_case():
    r = corpus_bleu([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e"]])
    assert r.brevity_penalty == pytest.approx(math.exp(-0.25))
    assert r.bleu == pytest.approx(77.88, abs=0.01)


def test_disjoint_is_zero():
    assert corpus_bleu([["a", "b", "c", "d"]], [["w", "x", "y", "z"]]).bleu == 0.0


def test_clipping():
    r = corpus_bleu([["the"] * 7], [["the", "cat", "the", "mat", "x", "y", "z"]])
    assert r.precisions[0] == pytest.approx(2 / 7)


def test_counts_are_corpus_level():
    # per-sentence BLEU of the second pair is 0; corpus BLEU is not
    cands = [list("abcdefg"), list("ab")]
    refs = [list("abcdefg"), list("ab")]
    assert corpus_bleu(cands, refs).bleu == pytest.approx(100.0)


def test_length_mismatch_raises():
    with pytest.raises(ContractError):
        corpus_bleu([["a"]], [])


@given(st.lists(st.tuples(sent, sent), min_size=1, max_size=5))
def test_bleu_range_and_identity(pairs):
    c, r = [p[0] for p in pairs], [p[1] for p in pairs]
    assert 0.0 <= corpus_bleu(c, r).bleu <= 100.0 + 1e-9
    if sum(len(x) >= 4 for x in r) and all(r):
        assert corpus_bleu(r, r).bleu == pytest.approx(100.0)


def test_token_accuracy():
    assert token_accuracy([[1, 2, 3]], [[1, 2, 4]]) == pytest.approx(2 / 3)
    assert token_accuracy([[1]], [[1, 2]]) == 0.5


def test_ngram_gain_and_noun_filter():
    gold = [["the", "big", "dog", "ran"]]
    tags = [["DT", "JJ", "NN", "VBD"]]
    a = [["the", "big", "dog", "ran"]]
    b = [["the", "big", "cat", "ran"]]
    rep = ngram_gain(a, b, gold, max_n=2)
    assert rep.matches_a == [4, 3] and rep.matches_b == [3, 1]
    assert rep.gain[0] == pytest.approx(100 / 3)
    # only n-grams touching a noun count
    assert matched_ngrams(a, gold, 1, gold_tags=tags) == 1
    assert matched_ngrams(b, gold, 1, gold_tags=tags) == 0
    assert ngram_gain(a, b, gold, max_n=1, gold_tags=tags).gain == [None]


def test_report_and_csv(tmp_path):
    text = format_report("BLEU", {"bleu": 12.5, "n": 3})
    assert text.splitlines() == ["# BLEU", "bleu=12.500000", "n=3"]
    write_csv(tmp_path / "x.csv", [{"a": 1, "b": 2}])
    assert (tmp_path / "x.csv").read_text().splitlines() == ["a,b", "1,2"]
