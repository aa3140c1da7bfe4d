"""Compiled vs pure-Python BPE kernels on a synthetic Zipf-like corpus.

    python benchmarks/bench_bpe.py [--words 20000] [--merges 2000] [--repeat 3]
"""

import argparse
import string
import time

import numpy as np

from seqmtl.dataprep import kernels
from seqmtl.dataprep.bpe import learn_bpe


def make_corpus(n_words, seed=0):
    rng = np.random.default_rng(seed)
    letters = np.array(list(string.ascii_lowercase))
    corpus = {}
    for rank in range(1, n_words + 1):
        w = "".join(rng.choice(letters, size=rng.integers(3, 12)))
        corpus[w] = corpus.get(w, 0) + max(1, int(100000 / rank))
    return corpus


def timed(kernel, corpus, merges, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        model = learn_bpe(corpus, merges, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best, model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--words", type=int, default=20000)
    ap.add_argument("--merges", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    corpus = make_corpus(args.words)
    print(f"corpus: {len(corpus)} word types, {args.merges} merges")
    t_py, m_py = timed(kernels.fallback, corpus, args.merges, args.repeat)
    print(f"pure python  {t_py:8.3f} s")
    if not kernels.COMPILED:
        print("compiled kernels unavailable; nothing to compare")
        return
    t_c, m_c = timed(kernels, corpus, args.merges, args.repeat)
    print(f"compiled     {t_c:8.3f} s   speedup x{t_py / t_c:.1f}")
    print("identical merges:", m_py.merges == m_c.merges)


if __name__ == "__main__":
    main()
