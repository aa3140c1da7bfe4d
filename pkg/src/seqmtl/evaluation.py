"""Corpus BLEU (multi-bleu semantics), perplexity, and n-gram overlap analyses."""

import csv
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .model import inference_scope, make_batch

MAX_ORDER = 4


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


@dataclass
class BleuReport:
    bleu: float
    precisions: list
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    matches: list = field(default_factory=list)
    totals: list = field(default_factory=list)

    def __str__(self):
        p = "/".join(f"{100 * x:.1f}" for x in self.precisions)
        return (f"BLEU = {self.bleu:.2f}, {p} (BP={self.brevity_penalty:.3f}, "
                f"ratio={self.hyp_len / max(self.ref_len, 1):.3f}, "
                f"hyp_len={self.hyp_len}, ref_len={self.ref_len})")

    def as_dict(self):
        out = {"bleu": self.bleu, "bp": self.brevity_penalty,
               "hyp_len": self.hyp_len, "ref_len": self.ref_len}
        for n, p in enumerate(self.precisions, 1):
            out[f"p{n}"] = p
        return out


def corpus_bleu(candidates, references, max_order=MAX_ORDER):
    """Corpus-level BLEU over tokenized sentences, one reference each.

    Clipped n-gram counts and lengths are summed over the corpus before the
    geometric mean; BLEU is 0 when any order has no match.
    """
    if len(candidates) != len(references):
        raise ContractError(
            f"{len(candidates)} candidates but {len(references)} references")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = ref_len = 0
    for cand, ref in zip(candidates, references):
        cand, ref = list(cand), list(ref)
        hyp_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            c, r = ngrams(cand, n), ngrams(ref, n)
            matches[n - 1] += sum(min(k, r[g]) for g, k in c.items())
            totals[n - 1] += max(len(cand) - n + 1, 0)
    precisions = [m / t if t else 0.0 for m, t in zip(matches, totals)]
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len > ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)
    if min(precisions) <= 0.0:
        bleu = 0.0
    else:
        bleu = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / max_order)
    return BleuReport(bleu, precisions, bp, hyp_len, ref_len, matches, totals)


def corpus_perplexity(model, store, pairs, batch_size=64):
    """exp(-sum log P(y|x) / number of target tokens incl. ``</s>``)."""
    scope = inference_scope(store)
    total_ll, total_tokens = 0.0, 0
    for i in range(0, len(pairs), batch_size):
        batch = make_batch(pairs[i:i + batch_size], dtype=store.dtype)
        ll = model.log_likelihood(scope, batch)
        total_ll += float(ll.value.sum())
        total_tokens += batch.num_target_tokens
    if total_tokens == 0:
        raise ContractError("perplexity of an empty corpus")
    return math.exp(-total_ll / total_tokens)


def token_accuracy(predictions, golds):
    """Fraction of gold positions where the prediction has the same token
    (positions beyond a short prediction count as wrong)."""
    correct = total = 0
    for p, g in zip(predictions, golds):
        total += len(g)
        correct += sum(1 for a, b in zip(p, g) if a == b)
    return correct / total if total else 0.0


def default_noun_tag(tag):
    return tag.upper().startswith("N")


def matched_ngrams(candidates, golds, n, gold_tags=None, is_noun=default_noun_tag):
    """Gold n-grams also produced by the candidate, clipped by gold counts.

    With ``gold_tags`` (token-aligned with ``golds``) only gold n-grams that
    contain at least one noun-tagged token are counted.
    """
    total = 0
    for i, (cand, gold) in enumerate(zip(candidates, golds)):
        c = ngrams(list(cand), n)
        if gold_tags is None:
            g = ngrams(list(gold), n)
        else:
            tags = gold_tags[i]
            if len(tags) != len(gold):
                raise ContractError(f"sentence {i}: {len(tags)} tags for {len(gold)} tokens")
            g = Counter(tuple(gold[k:k + n]) for k in range(len(gold) - n + 1)
                        if any(is_noun(t) for t in tags[k:k + n]))
        total += sum(min(k, c[gram]) for gram, k in g.items())
    return total


@dataclass
class NgramOverlapReport:
    orders: list
    matches_a: list
    matches_b: list
    gain: list          # percent, None where system B has no matches

    def rows(self):
        for n, a, b, g in zip(self.orders, self.matches_a, self.matches_b, self.gain):
            yield {"n": n, "matches_a": a, "matches_b": b,
                   "gain_percent": "undefined" if g is None else f"{g:.4f}"}


def ngram_gain(system_a, system_b, golds, max_n=4, gold_tags=None, is_noun=default_noun_tag):
    """Per-order percentage of additional gold n-grams produced by A over B:
    ``100 * (matches_A - matches_B) / matches_B``; ``None`` if B matches none."""
    if not (len(system_a) == len(system_b) == len(golds)):
        raise ContractError("system outputs and gold must have equal sentence counts")
    orders = list(range(1, max_n + 1))
    ma = [matched_ngrams(system_a, golds, n, gold_tags, is_noun) for n in orders]
    mb = [matched_ngrams(system_b, golds, n, gold_tags, is_noun) for n in orders]
    gain = [None if b == 0 else 100.0 * (a - b) / b for a, b in zip(ma, mb)]
    return NgramOverlapReport(orders, ma, mb, gain)


def format_report(title, values):
    """Human-readable header followed by a ``key=value`` block."""
    lines = [f"# {title}"]
    lines.extend(f"{k}={_fmt(v)}" for k, v in values.items())
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def write_csv(path, rows, fieldnames=None):
    rows = list(rows)
    if fieldnames is None:
        fieldnames = list(rows[0]) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        w.writerows(rows)


def mean_log_likelihood(model, store, pairs):
    scope = inference_scope(store)
    lls = []
    for p in pairs:
        lls.append(float(model.log_likelihood(scope, make_batch([p], dtype=store.dtype)).value[0]))
    return np.asarray(lls)
