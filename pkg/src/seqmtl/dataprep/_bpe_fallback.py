"""Pure-Python twins of the compiled BPE kernels (same signatures/results)."""


def count_pairs(symbols, starts, lengths, freqs):
    counts = {}
    for w in range(len(starts)):
        s, n, f = int(starts[w]), int(lengths[w]), int(freqs[w])
        for i in range(s, s + n - 1):
            key = (int(symbols[i]), int(symbols[i + 1]))
            counts[key] = counts.get(key, 0) + f
    return counts


def merge_pair(symbols, starts, lengths, freqs, a, b, new):
    delta = {}
    for w in range(len(starts)):
        s, n = int(starts[w]), int(lengths[w])
        word = [int(x) for x in symbols[s:s + n]]
        if not any(word[i] == a and word[i + 1] == b for i in range(n - 1)):
            continue
        f = int(freqs[w])
        for i in range(n - 1):
            key = (word[i], word[i + 1])
            delta[key] = delta.get(key, 0) - f
        merged = []
        i = 0
        while i < n:
            if i < n - 1 and word[i] == a and word[i + 1] == b:
                merged.append(new)
                i += 2
            else:
                merged.append(word[i])
                i += 1
        symbols[s:s + len(merged)] = merged
        lengths[w] = len(merged)
        for i in range(len(merged) - 1):
            key = (merged[i], merged[i + 1])
            delta[key] = delta.get(key, 0) + f
    return {k: v for k, v in delta.items() if v != 0}
