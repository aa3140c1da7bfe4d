"""Byte-pair encoding: greedy merge learning and segmentation.

Words are split into characters plus the end-of-word symbol ``</w>``.
Segmented output marks every non-final unit with a trailing ``@@``, so
``" ".join(units).replace("@@ ", "")`` restores the text.

Model file format: UTF-8, one merge per line as ``left SP right LF``, in
learning order, no header.
"""

import heapq
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from . import kernels

EOW = "</w>"
CONT = "@@"


def word_counts(lines):
    """Whitespace-token frequencies over an iterable of lines."""
    counts = Counter()
    for line in lines:
        counts.update(line.split())
    return counts


def _pack(words, sym2id):
    starts, lengths, flat = [], [], []
    for w in words:
        syms = list(w) + [EOW]
        starts.append(len(flat))
        lengths.append(len(syms))
        flat.extend(sym2id[s] for s in syms)
    return (np.asarray(flat, dtype=np.int32), np.asarray(starts, dtype=np.int64),
            np.asarray(lengths, dtype=np.int32))


def learn_bpe(corpus, num_merges, kernel=None):
    """Learn up to ``num_merges`` merges from a word -> frequency map.

    Each round merges the most frequent adjacent symbol pair (weighted by
    word frequency); ties go to the lexicographically smallest pair.
    Stops early when no pair remains.
    """
    if num_merges < 0:
        raise ValueError("num_merges must be >= 0")
    corpus = {w: int(f) for w, f in dict(corpus).items() if f > 0}
    if not corpus:
        raise DataError("cannot learn BPE from an empty corpus")
    for w in corpus:
        if not w or any(c.isspace() for c in w):
            raise DataError(f"invalid word {w!r} in BPE corpus")
    kernel = kernel or kernels
    words = sorted(corpus)
    id2sym = sorted({c for w in words for c in w} | {EOW})
    sym2id = {s: i for i, s in enumerate(id2sym)}
    symbols, starts, lengths = _pack(words, sym2id)
    freqs = np.asarray([corpus[w] for w in words], dtype=np.int64)

    counts = kernel.count_pairs(symbols, starts, lengths, freqs)
    heap = [(-c, id2sym[a], id2sym[b], a, b) for (a, b), c in counts.items() if c > 0]
    heapq.heapify(heap)
    merges = []
    while len(merges) < num_merges and heap:
        negc, sa, sb, a, b = heapq.heappop(heap)
        if counts.get((a, b), 0) != -negc:
            continue  # stale entry
        merged = sa + sb
        new = sym2id.get(merged)
        if new is None:
            new = sym2id[merged] = len(id2sym)
            id2sym.append(merged)
        delta = kernel.merge_pair(symbols, starts, lengths, freqs, a, b, new)
        for key, d in delta.items():
            c = counts.get(key, 0) + d
            counts[key] = c
            if c > 0:
                heapq.heappush(heap, (-c, id2sym[key[0]], id2sym[key[1]], key[0], key[1]))
        merges.append((sa, sb))
    alphabet = {c for w in words for c in w}
    return BpeModel(merges, vocab_size=len(alphabet) + 1 + len(merges))


def learn_bpe_vocab(corpus, vocab_size, kernel=None):
    """Learn merges until the symbol inventory reaches ``vocab_size``."""
    alphabet = {c for w in corpus for c in w}
    return learn_bpe(corpus, max(0, vocab_size - len(alphabet) - 1), kernel=kernel)


@dataclass
class BpeModel:
    merges: list
    vocab_size: int = 0
    _ranks: dict = field(default=None, repr=False, compare=False)
    _parts: dict = field(default=None, repr=False, compare=False)
    _cache: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.merges = [tuple(m) for m in self.merges]
        self._ranks = {}
        self._parts = {}
        for i, (a, b) in enumerate(self.merges):
            self._ranks.setdefault((a, b), i)
            self._parts.setdefault(a + b, (a, b))
        self._cache = {}

    def segment_word(self, word):
        """Units of one word, the last one carrying ``</w>`` when merged."""
        hit = self._cache.get(word)
        if hit is not None:
            return list(hit)
        syms = list(word) + [EOW]
        ranks = self._ranks
        while len(syms) > 1:
            best, best_rank = None, None
            for pair in zip(syms, syms[1:]):
                r = ranks.get(pair)
                if r is not None and (best_rank is None or r < best_rank):
                    best, best_rank = pair, r
            if best is None:
                break
            a, b = best
            out, i = [], 0
            while i < len(syms):
                if i < len(syms) - 1 and syms[i] == a and syms[i + 1] == b:
                    out.append(a + b)
                    i += 2
                else:
                    out.append(syms[i])
                    i += 1
            syms = out
        self._cache[word] = tuple(syms)
        return syms

    def segment_tokens(self, tokens):
        """Apply BPE to word tokens; returns ``@@``-marked unit strings.

        Tokens already carrying ``@@`` are regrouped into words first, which
        makes segmentation idempotent.
        """
        out = []
        for word in join_units(tokens):
            units = self.segment_word(word)
            if units[-1] == EOW:
                units = units[:-1]
            else:
                units[-1] = units[-1][:-len(EOW)]
            out.extend(u + CONT for u in units[:-1])
            out.append(units[-1])
        return out

    def segment(self, line):
        return " ".join(self.segment_tokens(line.split()))

    def unmerge(self, unit):
        """Recursively undo merges: a unit back to its base symbols."""
        parts = self._parts.get(unit)
        if parts is None:
            return [unit]
        return self.unmerge(parts[0]) + self.unmerge(parts[1])

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for a, b in self.merges:
                fh.write(f"{a} {b}\n")

    @classmethod
    def load(cls, path):
        merges = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split(" ")
                if len(parts) != 2:
                    raise DataError(f"{path}:{lineno}: expected 'left right'")
                merges.append(tuple(parts))
        return cls(merges, vocab_size=0)


def join_units(tokens):
    """Merge ``@@``-continued units back into whole words."""
    words, cur = [], ""
    for t in tokens:
        if t.endswith(CONT):
            cur += t[:-len(CONT)]
        else:
            words.append(cur + t)
            cur = ""
    if cur:
        words.append(cur)
    return words


def undo_bpe(tokens):
    return join_units(tokens)
