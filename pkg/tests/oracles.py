"""Independent first-principles scorers used as test oracles.

Everything here is written directly from the metric definitions with
collections.Counter and math, and deliberately shares no code with the
library implementations it verifies.
"""

import math
from collections import Counter
from itertools import permutations


def toks(s):
    return s.lower().split()


def ngrams(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def oracle_sentence_bleu(hyp, refs, smooth=True, max_order=4):
    """Clipped-precision BLEU with optional add-one smoothing on orders >= 2.

    Inputs are whitespace-tokenized lowercase strings (oracle fixtures avoid
    punctuation so tokenizers cannot disagree).
    """
    h = toks(hyp)
    c = len(h)
    if c == 0:
        return 0.0
    r = min((abs(len(toks(rf)) - c), len(toks(rf))) for rf in refs)[1]
    logs = []
    for n in range(1, max_order + 1):
        hg = ngrams(h, n)
        total = sum(hg.values())
        clip = Counter()
        for rf in refs:
            for g, cnt in ngrams(toks(rf), n).items():
                clip[g] = max(clip[g], cnt)
        matched = sum(min(cnt, clip[g]) for g, cnt in hg.items())
        if smooth and n >= 2:
            matched += 1
            total += 1
        if matched == 0 or total == 0:
            return 0.0
        logs.append(math.log(matched / total))
    bp = min(1.0, math.exp(1 - r / c))
    return bp * math.exp(sum(logs) / max_order) * 100.0


def oracle_corpus_bleu(pairs, max_order=4):
    """Micro-aggregated unsmoothed BLEU over (hypothesis, references) pairs."""
    matched = [0] * max_order
    total = [0] * max_order
    c_sum = 0
    r_sum = 0
    for hyp, refs in pairs:
        h = toks(hyp)
        c_sum += len(h)
        r_sum += min((abs(len(toks(rf)) - len(h)), len(toks(rf))) for rf in refs)[1]
        for n in range(1, max_order + 1):
            hg = ngrams(h, n)
            clip = Counter()
            for rf in refs:
                for g, cnt in ngrams(toks(rf), n).items():
                    clip[g] = max(clip[g], cnt)
            matched[n - 1] += sum(min(cnt, clip[g]) for g, cnt in hg.items())
            total[n - 1] += sum(hg.values())
    logs = []
    for n in range(max_order):
        if matched[n] == 0 or total[n] == 0:
            return 0.0
        logs.append(math.log(matched[n] / total[n]))
    bp = min(1.0, math.exp(1 - r_sum / c_sum))
    return bp * math.exp(sum(logs) / max_order) * 100.0


def oracle_chrfpp(hyp, ref, char_order=6, word_order=2, beta=2.0):
    """Order-by-order chrF++ over stripped characters plus word n-grams."""
    hs = "".join(hyp.lower().split())
    rs = "".join(ref.lower().split())
    ht, rt = toks(hyp), toks(ref)
    precs, recs = [], []
    for n in range(1, char_order + 1):
        hg = Counter(hs[i : i + n] for i in range(len(hs) - n + 1))
        rg = Counter(rs[i : i + n] for i in range(len(rs) - n + 1))
        th, tr = sum(hg.values()), sum(rg.values())
        if th == 0 and tr == 0:
            continue
        m = sum((hg & rg).values())
        precs.append(m / th if th else 0.0)
        recs.append(m / tr if tr else 0.0)
    for n in range(1, word_order + 1):
        hg, rg = ngrams(ht, n), ngrams(rt, n)
        th, tr = sum(hg.values()), sum(rg.values())
        if th == 0 and tr == 0:
            continue
        m = sum((hg & rg).values())
        precs.append(m / th if th else 0.0)
        recs.append(m / tr if tr else 0.0)
    if not precs:
        return 0.0
    p = sum(precs) / len(precs)
    r = sum(recs) / len(recs)
    if p + r == 0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r) * 100.0


def oracle_best_assignment(weights):
    """Exhaustive square-matrix assignment: (best total, row->col tuple)."""
    n = len(weights)
    best = max(
        permutations(range(n)),
        key=lambda p: sum(weights[i][p[i]] for i in range(n)),
    )
    return sum(weights[i][best[i]] for i in range(n)), best


def enumerate_sequences(model, max_len):
    """All nonzero-probability finished sequences as (tokens, logp) pairs,
    by brute-force tree expansion.

    Same boundary convention as the decoders: a prefix that reaches
    max_len tokens is truncated, so finished sequences carry at most
    max_len - 1 word tokens plus the EOS step.
    """
    from multiscore.decoding import EOS

    vocab = model.vocabulary
    eos = vocab.index(EOS)
    out = []

    def walk(tokens, logp, depth):
        if depth >= max_len:
            return  # truncated prefix, can no longer finish
        probs = model.next_distribution(tokens)
        for idx, p in enumerate(probs):
            if p <= 0.0:
                continue
            if idx == eos:
                out.append((tokens, logp + math.log(p)))
            else:
                walk(tokens + (vocab[idx],), logp + math.log(p), depth + 1)

    walk((), 0.0, 0)
    return out
