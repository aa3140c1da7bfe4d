"""Parallel corpus I/O, length filtering, and id encoding."""

from ..errors import DataError
from ..model import EOS


def read_lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return [line.rstrip("\n") for line in fh]
    except FileNotFoundError:
        raise DataError(f"missing file: {path}") from None


def read_parallel(src_path, tgt_path):
    """Whitespace-tokenized sentence pairs from two line-aligned files."""
    src, tgt = read_lines(src_path), read_lines(tgt_path)
    if len(src) != len(tgt):
        raise DataError(
            f"{src_path} has {len(src)} lines but {tgt_path} has {len(tgt)}")
    return [(s.split(), t.split()) for s, t in zip(src, tgt)]


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _passes(length, limit):
    return limit is None or length <= limit


def filter_corpus(pairs, max_len_pre_bpe=None, max_len_post_bpe=None, segmented=None):
    """Keep pairs whose sides are within every enabled length limit.

    ``pairs`` are (source tokens, target tokens) before BPE; ``segmented``
    optionally holds the same pairs after BPE for the post-BPE limit.
    ``None`` disables a limit. Survivors keep their order.
    """
    for limit in (max_len_pre_bpe, max_len_post_bpe):
        if limit is not None and limit < 1:
            raise ValueError("length limits must be >= 1 or None")
    if max_len_post_bpe is not None and segmented is None:
        raise ValueError("post-BPE filtering needs the segmented pairs")
    keep = []
    for i, (s, t) in enumerate(pairs):
        if not (_passes(len(s), max_len_pre_bpe) and _passes(len(t), max_len_pre_bpe)):
            continue
        if max_len_post_bpe is not None:
            ss, st = segmented[i]
            if not (_passes(len(ss), max_len_post_bpe) and _passes(len(st), max_len_post_bpe)):
                continue
        keep.append(i)
    if segmented is None:
        return [pairs[i] for i in keep]
    return [pairs[i] for i in keep], [segmented[i] for i in keep]


def encode_corpus(pairs, src_vocab, tgt_vocab, src_bpe=None, tgt_bpe=None):
    """Token pairs -> id pairs. BPE (if given) is applied first; unknown
    units map to ``<unk>`` and ``</s>`` is appended to every target."""
    out = []
    for s, t in pairs:
        if src_bpe is not None:
            s = src_bpe.segment_tokens(s)
        if tgt_bpe is not None:
            t = tgt_bpe.segment_tokens(t)
        out.append((src_vocab.encode(s), tgt_vocab.encode(t) + [EOS]))
    return out


def decode_target(ids, vocab):
    """Ids -> tokens, dropping a trailing ``</s>``."""
    if ids and ids[-1] == EOS:
        ids = ids[:-1]
    return vocab.decode(ids)


def ner_pairs(sentences):
    """CoNLL-style [(token, tag), ...] sentences -> (tokens, tags) pairs of
    equal length."""
    return [([w for w, _ in sent], [t for _, t in sent]) for sent in sentences]


def read_conll(path, token_col=0, tag_col=-1):
    """Blank-line separated CoNLL file -> list of [(token, tag)] sentences.
    ``-DOCSTART-`` lines are skipped."""
    sents, cur = [], []
    for line in read_lines(path):
        if not line.strip():
            if cur:
                sents.append(cur)
                cur = []
            continue
        cols = line.split()
        if cols[0] == "-DOCSTART-":
            continue
        cur.append((cols[token_col], cols[tag_col]))
    if cur:
        sents.append(cur)
    return sents
