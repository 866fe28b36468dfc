"""Reference values for BLEU-4, ROUGE-L F1 and CIDEr on tests/data/text_pairs.tsv.

Written from the metric definitions; BLEU is cross-checked against nltk
(method1 smoothing, epsilon 0.1) wherever the candidate has at least 4 tokens.
"""
import math
import re
import sys
from collections import Counter

from nltk.translate.bleu_score import SmoothingFunction, sentence_bleu


def tok(s):
    return re.findall(r"[^\W_]+", s.lower())


def ngrams(t, n):
    return Counter(tuple(t[i:i + n]) for i in range(len(t) - n + 1))


def bleu(c, r):
    if not c:
        return 0.0
    orders = min(4, len(c))
    s = 0.0
    for n in range(1, orders + 1):
        cc, rc = ngrams(c, n), ngrams(r, n)
        m = sum(min(v, rc[g]) for g, v in cc.items())
        if n == 1 and m == 0:
            return 0.0
        total = len(c) - n + 1
        p = 0.1 / total if m == 0 else m / total
        s += math.log(p) / orders
    bp = 1.0 if len(c) > len(r) else math.exp(1 - len(r) / len(c))
    return bp * math.exp(s)


def lcs(a, b):
    dp = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a)):
        for j in range(len(b)):
            dp[i + 1][j + 1] = dp[i][j] + 1 if a[i] == b[j] else max(dp[i][j + 1], dp[i + 1][j])
    return dp[-1][-1]


def rouge(c, r):
    if not c:
        return 0.0
    l = lcs(c, r)
    if l == 0:
        return 0.0
    p, rr = l / len(c), l / len(r)
    return 2 * p * rr / (p + rr)


def cider(c, r, corpus):
    if not c:
        return 0.0
    df = Counter()
    for doc in corpus:
        for n in range(1, 5):
            df.update(set(ngrams(doc, n)))
    logn = math.log(len(corpus))
    total = 0.0
    for n in range(1, 5):
        cc, rc = ngrams(c, n), ngrams(r, n)
        if cc == rc:
            total += 1.0
            continue
        vc = {g: v * (logn - math.log(max(1, df[g]))) for g, v in cc.items()}
        vr = {g: v * (logn - math.log(max(1, df[g]))) for g, v in rc.items()}
        nc = math.sqrt(sum(x * x for x in vc.values()))
        nr = math.sqrt(sum(x * x for x in vr.values()))
        if nc == 0 or nr == 0:
            continue
        total += sum(x * vr.get(g, 0.0) for g, x in vc.items()) / (nc * nr)
    return min(10.0, max(0.0, 10 * total / 4))


def main(path):
    rows = [line.rstrip("\n").split("\t") for line in open(path, encoding="utf-8")]
    pairs = [(tok(r), tok(d if len(row) > 1 else "")) for row in rows for r, d in [(row[0], row[1] if len(row) > 1 else "")]]
    corpus = [r for r, _ in pairs]
    smooth = SmoothingFunction(epsilon=0.1).method1
    for r, c in pairs:
        b = bleu(c, r)
        if len(c) >= 4:
            ref = sentence_bleu([r], c, smoothing_function=smooth)
            assert abs(ref - b) < 1e-12, (r, c, ref, b)
        print(f"    [{b!r}, {rouge(c, r)!r}, {cider(c, r, corpus)!r}],")


if __name__ == "__main__":
    main(sys.argv[1])
