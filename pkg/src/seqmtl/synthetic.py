"""Toy transduction tasks for smoke tests and the behavioral checks."""

import numpy as np

from .model import EOS, SPECIALS

FIRST = len(SPECIALS)

TRANSFORMS = {
    "copy": lambda s: list(s),
    "reverse": lambda s: list(s)[::-1],
    "sort": lambda s: sorted(s),
}


def random_sequences(rng, n, vocab=20, min_len=3, max_len=10):
    """``n`` sequences over content ids FIRST .. FIRST+vocab-1."""
    lens = rng.integers(min_len, max_len + 1, size=n)
    return [[int(t) for t in rng.integers(FIRST, FIRST + vocab, size=k)] for k in lens]


def make_pairs(kind, rng, n, vocab=20, min_len=3, max_len=10):
    fn = TRANSFORMS[kind]
    return [(s, fn(s) + [EOS]) for s in random_sequences(rng, n, vocab, min_len, max_len)]


def toy_task(task_id, kind, seed, n_train=2000, n_dev=200, n_test=0, vocab=20,
             min_len=3, max_len=10, gamma=1.0):
    """A :class:`TaskSpec` whose vocabulary is the content ids plus the specials."""
    from .mtl.engine import TaskSpec
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1000 + task_id]))
    split = [make_pairs(kind, rng, k, vocab, min_len, max_len) for k in (n_train, n_dev, n_test)]
    size = vocab + FIRST
    return TaskSpec(task_id, kind, split[0], size, size, dev=split[1], test=split[2], gamma=gamma)
