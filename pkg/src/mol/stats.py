"""Substring statistics: frequencies, vocabulary sizes, maximal repetition,
and empirical conditional entropies.

All entropies are base-2 (bits). The frequency convention counts overlapping
occurrences, with N(lambda | x_1^m) = m + 1 for the empty word.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequence import Sequence


def _suffix_array(x: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling, O(n log n) with numpy lexsort."""
    n = int(x.size)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    _, rank = np.unique(x, return_inverse=True)
    rank = rank.astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    h = 1
    while h < n and rank[sa[-1]] < n - 1:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - h] = rank[h:]
        sa = np.lexsort((key2, rank))
        r1 = rank[sa]
        r2 = key2[sa]
        changed = np.ones(n, dtype=np.int64)
        changed[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(changed) - 1
        rank = new_rank
        h *= 2
    return sa.astype(np.int64)


def _lcp_array(x: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai longest-common-prefix array; lcp[r] = lcp(suffix sa[r-1], suffix sa[r])."""
    n = int(sa.size)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(n, dtype=np.int64)
    h = 0
    xs = x.tolist()
    for i in range(n):
        r = rank[i]
        if r > 0:
            j = int(sa[r - 1])
            while i + h < n and j + h < n and xs[i + h] == xs[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


@dataclass
class EntropyProfile:
    """Empirical conditional entropies h_k for k = 0..kmax of one string.

    weighted[k] = (n-k) * h[k] is non-increasing in k, and h[k] = 0 beyond the
    maximal repetition length.
    """

    n: int
    h: list
    weighted: list
    vocab: list

    @property
    def kmax(self) -> int:
        return len(self.h) - 1

    def entries(self) -> list:
        return [
            {"k": k, "h": self.h[k], "weighted": self.weighted[k]}
            for k in range(len(self.h))
        ]

    def rows(self) -> list:
        """CSV rows (k, h_k, (n-k)*h_k, |V_k|)."""
        return [
            (k, self.h[k], self.weighted[k], self.vocab[k])
            for k in range(len(self.h))
        ]


class FrequencyIndex:
    """Immutable substring-statistics index over one sequence.

    Distinct k-grams are exposed as dense integer group ids per starting
    position; counts, vocabulary sizes and conditional entropies are all
    derived from those. A sorted suffix index with an LCP table backs the
    maximal-repetition query.
    """

    def __init__(self, seq: Sequence):
        self.seq = seq
        self.n = len(seq)
        self._x = seq.ids
        self._gids: dict[int, np.ndarray] = {}
        self._gcounts: dict[int, np.ndarray] = {}
        self._prior: dict[int, np.ndarray] = {}
        self._sa = None
        self._lcp = None
        self._maxrep = None
        self._h_cache: dict[int, float] = {}
        self.scratch: dict = {}

    # -- gram groups ---------------------------------------------------

    # gram-id caches keep all lengths up to this bound; above it only the two
    # most recent consecutive lengths stay resident (refinement locality)
    _KEEP_LEN = 4

    def gram_ids(self, k: int) -> np.ndarray:
        """Dense group ids of the k-grams at starts 0..n-k (equal grams share an id)."""
        if not 0 <= k <= self.n:
            raise ValueError(f"gram length {k} out of range for n={self.n}")
        got = self._gids.get(k)
        if got is None:
            base = max((j for j in self._gids if j < k), default=None)
            if base is None:
                ids = np.zeros(self.n + 1, dtype=np.int64)
                cnt = np.array([self.n + 1], dtype=np.int64)
                self._gids[0], self._gcounts[0] = ids, cnt
                base = 0
            for length in range(base + 1, k + 1):
                ids, cnt = self._refine(self._gids[length - 1], length)
                self._gids[length], self._gcounts[length] = ids, cnt
                self._prune(length)
            got = self._gids[k]
        return got

    def _prune(self, current: int) -> None:
        keep = {current, current - 1}
        for store in (self._gids, self._gcounts, self._prior):
            for length in [j for j in store if j > self._KEEP_LEN and j not in keep]:
                del store[length]

    def _refine(self, prev: np.ndarray, length: int):
        m = self.n - length + 1
        key = prev[:m] * self.seq.alphabet.size + self._x[length - 1 : length - 1 + m]
        _, inv, cnt = np.unique(key, return_inverse=True, return_counts=True)
        return inv.astype(np.int64), cnt.astype(np.int64)

    def gram_counts(self, k: int) -> np.ndarray:
        """Occurrence count N(w | x_1^n) per group id, for length-k grams."""
        self.gram_ids(k)
        return self._gcounts[k]

    def gram_prior_counts(self, k: int) -> np.ndarray:
        """Per start s, the number of earlier starts with an equal k-gram."""
        got = self._prior.get(k)
        if got is None:
            ids = self.gram_ids(k)
            got = prior_occurrence_counts(ids, self._gcounts[k])
            self._prior[k] = got
        return got

    # -- query surface -----------------------------------------------------

    def count(self, w, m: int | None = None) -> int:
        """Occurrences N(w | x_1^m) of w inside the length-m prefix, m in {n-1, n}.

        Counts overlap; the empty word counts m+1 times.
        """
        n = self.n
        m = n if m is None else m
        if m not in (n, n - 1) or m < 0:
            raise ValueError(f"prefix length must be n or n-1, got {m}")
        ids = w.ids if isinstance(w, Sequence) else np.asarray(w, dtype=np.int64)
        k = int(ids.size)
        if k == 0:
            return m + 1
        if k > n:
            return 0
        lim = n - k + 1
        hits = np.ones(lim, dtype=bool)
        for t in range(k):
            hits &= self._x[t : t + lim] == ids[t]
        total = int(hits.sum())
        if m == n - 1 and k <= n and bool(hits[lim - 1]):
            # N(w | x_1^{n-1}) = N(w | x_1^n) - [x ends with w]
            total -= 1
        return total

    def vocab_size(self, k: int) -> int:
        """Number of distinct length-k substrings; 1 for k=0, 0 for k > n."""
        if k < 0:
            raise ValueError("order must be >= 0")
        if k > self.n:
            return 0
        return int(self.gram_counts(k).size)

    def max_repetition(self) -> int:
        """Largest k such that some length-k substring occurs at least twice."""
        if self.n < 1:
            raise ValueError("maximal repetition needs a non-empty sequence")
        if self._maxrep is None:
            sa = _suffix_array(self._x)
            lcp = _lcp_array(self._x, sa)
            self._sa, self._lcp = sa, lcp
            self._maxrep = int(lcp.max()) if self.n > 1 else 0
            if self.n > 4096:
                self._sa = self._lcp = None  # large sequences keep only the scalar
        return self._maxrep

    def prefix_cond_entropy(self, k: int, prefix_len: int) -> float:
        """h_k(x_1^p) for a prefix of this sequence, from shared gram ids."""
        p = prefix_len
        if not 0 <= k < p <= self.n:
            raise ValueError(f"need 0 <= k < prefix <= n, got k={k}, prefix={p}")
        ids_k = self.gram_ids(k)
        ids_k1 = self.gram_ids(k + 1)
        m = p - k
        ctx = np.bincount(ids_k[:m])
        ext = np.bincount(ids_k1[:m])
        terms = np.log2(ctx[ids_k[:m]]) - np.log2(ext[ids_k1[:m]])
        return float(terms.sum()) / m

    def cond_entropy(self, k: int) -> float:
        """Empirical conditional entropy h_k(x_1^n) in bits, for 0 <= k < n.

        h_k = (1/(n-k)) sum_i log2[ N(x_{i-k}^{i-1} | x_1^{n-1}) / N(x_{i-k}^i | x_1^n) ].
        """
        if not 0 <= k < self.n:
            raise ValueError(f"conditional entropy needs 0 <= k < n, got k={k}, n={self.n}")
        got = self._h_cache.get(k)
        if got is None:
            got = self._h_cache[k] = self.prefix_cond_entropy(k, self.n)
        return got

    def profile(self, kmax: int) -> EntropyProfile:
        """EntropyProfile with h_k, (n-k) h_k and |V_k| for k = 0..kmax (kmax < n)."""
        if not 0 <= kmax < self.n:
            raise ValueError(f"profile needs 0 <= kmax < n, got kmax={kmax}, n={self.n}")
        h = [self.cond_entropy(k) for k in range(kmax + 1)]
        weighted = [(self.n - k) * h[k] for k in range(kmax + 1)]
        vocab = [self.vocab_size(k) for k in range(kmax + 1)]
        return EntropyProfile(n=self.n, h=h, weighted=weighted, vocab=vocab)


def build_index(x: Sequence) -> FrequencyIndex:
    """Index for substring queries; cached on the sequence, built lazily."""
    if x._index is None:
        x._index = FrequencyIndex(x)
    return x._index


def prior_occurrence_counts(ids: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """For each position, how many earlier positions carry the same group id."""
    order = np.argsort(ids, kind="stable")
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    out = np.empty(ids.size, dtype=np.int64)
    out[order] = np.arange(ids.size, dtype=np.int64) - starts[ids[order]]
    return out
