"""Token <-> id mapping with three reserved slots.

File format: UTF-8, one token per line, ``\\n`` terminated. The token on line
``k`` (0-based) has id ``k + 3``; the reserved ``<s>``, ``</s>``, ``<unk>``
(ids 0, 1, 2) are implicit and never written.
"""

from collections import Counter

from ..errors import DataError
from ..model import SPECIALS, UNK


class Vocabulary:
    def __init__(self, tokens=()):
        self.itos = list(SPECIALS)
        self.stoi = {t: i for i, t in enumerate(self.itos)}
        for t in tokens:
            self.add(t)

    def add(self, token):
        if not token or any(c.isspace() for c in token):
            raise DataError(f"invalid vocabulary token {token!r}")
        if token not in self.stoi:
            self.stoi[token] = len(self.itos)
            self.itos.append(token)
        return self.stoi[token]

    def __len__(self):
        return len(self.itos)

    def __contains__(self, token):
        return token in self.stoi

    def id(self, token):
        return self.stoi.get(token, UNK)

    def token(self, idx):
        return self.itos[idx]

    def encode(self, tokens):
        return [self.stoi.get(t, UNK) for t in tokens]

    def decode(self, ids):
        return [self.itos[i] for i in ids]

    @classmethod
    def build(cls, sequences, min_count=1, max_size=None):
        """Tokens ordered by descending frequency, ties alphabetical."""
        counts = Counter(t for seq in sequences for t in seq)
        for s in SPECIALS:
            counts.pop(s, None)
        ranked = sorted((t for t, c in counts.items() if c >= min_count),
                        key=lambda t: (-counts[t], t))
        if max_size is not None:
            ranked = ranked[:max(0, max_size - len(SPECIALS))]
        return cls(ranked)

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for t in self.itos[len(SPECIALS):]:
                fh.write(t + "\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls(line.rstrip("\n") for line in fh if line.strip())
