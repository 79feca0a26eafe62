#!/usr/bin/env python3
"""Brute-force reference for the interpolated Kneser-Ney estimator.

Every quantity is recomputed by scanning the padded training sentences for
each query, using exact rational arithmetic. Nothing here shares code with
the C++ implementation. Running the script rewrites kn_expected.inc, the
frozen table consumed by the oracle-equivalence tests.

Estimator, for order k with context h and outcome w:
  a_k(g)  = raw count of g                       if k == n
          = |{x : c(x g) > 0}| (continuation)    otherwise
  A_k(h)  = sum_w a_k(h w)      T_k(h) = |{w : a_k(h w) > 0}|
  p_k(w|h) = max(a_k(hw) - D_k, 0)/A_k(h) + D_k T_k(h)/A_k(h) p_{k-1}(w|h')
             (or p_{k-1}(w|h') when A_k(h) == 0)
  p_0(w)  = 1/|O|,  O = vocabulary (with <unk>) plus </s>
  D_k     = n1/(n1 + 2 n2) over a_k values, clamped to [0.05, 0.95];
            0.5 when n1 == 0 or n2 == 0
"""

from fractions import Fraction
from itertools import product
from pathlib import Path

BOS, EOS, UNK = "<s>", "</s>", "<unk>"

A = "door_lock|lock|LOCKED"
B = "light_bulb|switch|ON"
C = "motion_sensor|motion|DETECTED"
D = "|locationMode|AWAY"
E = "camera|switch|OFF&light_bulb|switch|ON"

CORPORA = [
    [[A, B, A, B]],
    [[C, B, C, B, D, A, C, B]],
    [[A, B, C], [C, B, A, D]],
    [[D, A, D, A, E, C, B, D, A, E], [B, B, B]],
    [[C, B, E, D, A, C, B, E, D, A, C, B], [A], [E, D]],
]
ORDERS = [2, 3]


def padded(sentence, n):
    return [BOS] * (n - 1) + list(sentence) + [EOS]


def raw_count(corpus, n, gram):
    """Occurrences of gram ending at a predicted position."""
    k = len(gram)
    total = 0
    for s in corpus:
        p = padded(s, n)
        for i in range(n - 1, len(p)):
            if tuple(p[i - k + 1:i + 1]) == gram:
                total += 1
    return total


def left_extensions(corpus, n, gram):
    k = len(gram)
    seen = set()
    for s in corpus:
        p = padded(s, n)
        for i in range(n - 1, len(p)):
            if tuple(p[i - k + 1:i + 1]) == gram:
                seen.add(p[i - k])
    return len(seen)


def adjusted(corpus, n, gram):
    if len(gram) == n:
        return raw_count(corpus, n, gram)
    return left_extensions(corpus, n, gram)


def observed_grams(corpus, n, k):
    grams = set()
    for s in corpus:
        p = padded(s, n)
        for i in range(n - 1, len(p)):
            grams.add(tuple(p[i - k + 1:i + 1]))
    return grams


def discount(corpus, n, k):
    values = [adjusted(corpus, n, g) for g in observed_grams(corpus, n, k)]
    n1 = sum(1 for v in values if v == 1)
    n2 = sum(1 for v in values if v == 2)
    if n1 == 0 or n2 == 0:
        return Fraction(1, 2)
    d = Fraction(n1, n1 + 2 * n2)
    return min(max(d, Fraction(1, 20)), Fraction(19, 20))


def outcomes(corpus):
    vocab = sorted({t for s in corpus for t in s} | {UNK})
    return vocab + [EOS]


def prob(corpus, n, context, w, discounts, outs):
    p = Fraction(1, len(outs))
    for k in range(1, n + 1):
        h = tuple(context[len(context) - (k - 1):]) if k > 1 else ()
        counts = {x: adjusted(corpus, n, h + (x,)) for x in outs}
        total = sum(counts.values())
        if total == 0:
            continue
        types = sum(1 for v in counts.values() if v > 0)
        d = discounts[k]
        p = max(counts[w] - d, 0) / Fraction(total) + d * types / Fraction(total) * p
    return p


def main():
    rows = []
    for cid, corpus in enumerate(CORPORA):
        outs = outcomes(corpus)
        for n in ORDERS:
            discounts = {k: discount(corpus, n, k) for k in range(1, n + 1)}
            alphabet = [t for t in outs if t != EOS] + [BOS]
            for context in product(alphabet, repeat=n - 1):
                total = Fraction(0)
                for w in outs:
                    p = prob(corpus, n, list(context), w, discounts, outs)
                    total += p
                    rows.append((cid, n, " ".join(context), w, float(p)))
                assert total == 1, (cid, n, context, total)

    out = Path(__file__).with_name("kn_expected.inc")
    with out.open("w") as f:
        f.write("// Generated by kn_oracle.py. Do not edit.\n")
        for cid, n, ctx, w, p in rows:
            f.write(f'{{{cid}, {n}, "{ctx}", "{w}", {p.hex()}}},\n')
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
