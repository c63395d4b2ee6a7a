"""Naive reference implementations used as independent oracles.

Everything here is deliberately written by direct scanning over positions and
plain dictionaries, independent of the indexed fast paths in the package.
"""

import math
from collections import Counter
from itertools import product

import numpy as np

from mol import Sequence, uniform_alphabet


def seq(ids, D: int = 2) -> Sequence:
    return Sequence(np.array(list(ids), dtype=np.int64), uniform_alphabet(D))


def all_strings(D: int, n: int):
    alpha = uniform_alphabet(D)
    for ids in product(range(D), repeat=n):
        yield Sequence(np.array(ids, dtype=np.int64), alpha)


def count_oracle(ids, w, m: int) -> int:
    ids = list(ids)
    w = list(w)
    k = len(w)
    if k == 0:
        return m + 1
    return sum(1 for i in range(m - k + 1) if ids[i : i + k] == w)


def vocab_oracle(ids, k: int) -> int:
    ids = list(ids)
    if k == 0:
        return 1
    if k > len(ids):
        return 0
    return len({tuple(ids[i : i + k]) for i in range(len(ids) - k + 1)})


def maxrep_oracle(ids) -> int:
    ids = list(ids)
    n = len(ids)
    best = 0
    for k in range(1, n):
        grams = [tuple(ids[i : i + k]) for i in range(n - k + 1)]
        if len(set(grams)) < len(grams):
            best = k
    return best


def h_position_oracle(ids, k: int) -> float:
    ids = list(ids)
    n = len(ids)
    total = 0.0
    for i in range(k + 1, n + 1):
        ctx = count_oracle(ids, ids[i - k - 1 : i - 1], n - 1)
        ext = count_oracle(ids, ids[i - k - 1 : i], n)
        total += math.log2(ctx / ext)
    return total / (n - k)


def h_vocab_oracle(ids, k: int) -> float:
    ids = list(ids)
    n = len(ids)
    ext = Counter(tuple(ids[i : i + k + 1]) for i in range(n - k))
    return math.fsum(
        c / (n - k) * math.log2(count_oracle(ids, list(w[:-1]), n - 1) / c)
        for w, c in ext.items()
    )


def ppm_cond_oracle(ids, D: int, i: int, k: int) -> float:
    ids = list(ids)
    if k > i - 2:
        return 1.0 / D
    num = count_oracle(ids, ids[i - k - 1 : i], i - 1)
    den = count_oracle(ids, ids[i - k - 1 : i - 1], i - 2)
    return (num + 1.0) / (den + D)


def ppm_neglog_oracle(ids, D: int, k: int) -> float:
    ids = list(ids)
    return -math.fsum(
        math.log2(ppm_cond_oracle(ids, D, i, k)) for i in range(1, len(ids) + 1)
    )


def ppm_semidist_oracle(ids, D: int) -> float:
    ids = list(ids)
    n = len(ids)
    head = math.fsum(
        2.0 ** -ppm_neglog_oracle(ids, D, k) / (k + 1) ** 2 for k in range(max(n - 1, 0))
    )
    zeta_head = math.fsum(1.0 / j**2 for j in range(1, max(n - 1, 0) + 1))
    tail = D**-n * (math.pi**2 / 6.0 - zeta_head)
    pi_val = 36.0 / math.pi**4 / (n + 1) ** 2 * (head + tail)
    return -math.log2(pi_val)


def lz78_oracle(ids, D: int) -> int:
    """Bit cost of the LZ78 parse, phrases kept as explicit tuples."""
    ids = list(ids)
    dictionary = {(): 0}
    bits = 0
    phrase = []
    count = 0
    for a in ids:
        phrase.append(a)
        if tuple(phrase) not in dictionary:
            count += 1
            bits += math.ceil(math.log2(count)) if count > 1 else 0
            bits += math.ceil(math.log2(D))
            dictionary[tuple(phrase)] = count
            phrase = []
    if phrase:
        count += 1
        bits += math.ceil(math.log2(count)) if count > 1 else 0
        bits += math.ceil(math.log2(D))
    return bits


def block_prob_oracle(src, ids) -> float:
    """P(x_1^n) for a SourceModel, by marginal initial law plus transitions."""
    ids = list(ids)
    n = len(ids)
    M = src.order
    D = src.alphabet_size
    if n == 0:
        return 1.0
    if M == 0:
        p = src.transition[0]
        out = 1.0
        for a in ids:
            out *= p[a]
        return out
    head = ids[: min(n, M)]
    w = src.block_marginal(len(head))
    code = 0
    for a in head:
        code = code * D + a
    out = float(w[code])
    ctx = 0
    for a in ids[:M]:
        ctx = ctx * D + a
    for a in ids[M:]:
        out *= float(src.transition[ctx, a])
        ctx = (ctx * D + a) % (D**M)
    return out
