"""Universal code-length backends.

Two pointwise entropies H(x) = -log2 Pi(x) are provided: the PPM mixture
semi-distribution and an LZ78 parse cost plus the log(pi^2/6) + 2 log(n+1)
correction that turns it into a semi-distribution over all string lengths.
Everything is computed in log space, base 2.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np
from scipy.special import gammaln, polygamma

from .sequence import Sequence, uniform_alphabet
from .stats import FrequencyIndex, build_index, prior_occurrence_counts

LOG2E = 1.0 / math.log(2.0)
LOG2_PI2_OVER_6 = math.log2(math.pi**2 / 6.0)

KRAFT_ENUM_GUARD = 1 << 20


class BudgetError(RuntimeError):
    """Enumeration or state-space budget exceeded."""


def _lg_factorial(m) -> np.ndarray:
    """log2(m!) via the log-Gamma function; accepts arrays."""
    return gammaln(np.asarray(m, dtype=float) + 1.0) * LOG2E


def _zeta2_tail(m: int) -> float:
    """sum_{j > m} 1/j^2, exactly the trigamma function at m+1."""
    return float(polygamma(1, m + 1))


class _PpmHeadScan:
    """Resumable per-order scan of -log2 PPM_k(x_1^n) for k = 0, 1, 2, ...

    Counting is incremental in the position index: the factor at position i
    compares prior occurrences of the length-(k+1) gram ending at i against
    prior occurrences of its length-k context. Once every (k+1)-gram of the
    string is distinct, all higher orders assign the uniform measure D^-n,
    so the scan stops there (``done``).
    """

    def __init__(self, idx: FrequencyIndex):
        self.idx = idx
        n = idx.n
        self.neglogs: list[float] = []
        self.done = n <= 1
        self._ids = np.zeros(n + 1, dtype=np.int64)
        self._prior = np.arange(n + 1, dtype=np.int64)
        self._next_k = 0

    def ensure(self, klimit: int) -> "_PpmHeadScan":
        idx = self.idx
        n = idx.n
        x = idx._x
        D = idx.seq.alphabet.size
        log_d = math.log2(D)
        while not self.done and self._next_k <= min(klimit, n - 2):
            k = self._next_k
            m = n - k
            key = self._ids[:m] * D + x[k : k + m]
            _, inv, cnt = np.unique(key, return_inverse=True, return_counts=True)
            inv = inv.astype(np.int64)
            prior1 = prior_occurrence_counts(inv, cnt)
            bits = (k + 1) * log_d + float(
                np.log2(self._prior[1:m] + D).sum() - np.log2(prior1[1:] + 1).sum()
            )
            self.neglogs.append(bits)
            if int(cnt.max()) <= 1:
                self.done = True
            self._ids, self._prior = inv, prior1
            self._next_k = k + 1
            if self._next_k > n - 2:
                self.done = True
        if self.done:
            self._ids = self._prior = None  # only the per-order values remain
        return self


def _head_scan(x: Sequence, klimit: int) -> _PpmHeadScan:
    idx = build_index(x)
    scan = idx.scratch.get("ppm_head")
    if scan is None:
        scan = idx.scratch["ppm_head"] = _PpmHeadScan(idx)
    return scan.ensure(klimit)


def ppm_cond(x: Sequence, i: int, k: int) -> float:
    """Adaptive order-k transition probability PPM_k(x_i | x_1^{i-1}).

    Equals 1/D while the context is shorter than the prefix allows (k > i-2),
    else (N(x_{i-k}^i | x_1^{i-1}) + 1) / (N(x_{i-k}^{i-1} | x_1^{i-2}) + D).
    """
    n = len(x)
    if not 1 <= i <= n:
        raise IndexError(f"position {i} out of range for length {n}")
    if k < 0:
        raise ValueError("order must be >= 0")
    D = x.alphabet.size
    if k > i - 2:
        return 1.0 / D
    xs = x.ids
    num = _count_in_prefix(xs, xs[i - k - 1 : i], i - 1)
    den = _count_in_prefix(xs, xs[i - k - 1 : i - 1], i - 2)
    return (num + 1.0) / (den + D)


def _count_in_prefix(xs: np.ndarray, w: np.ndarray, upto: int) -> int:
    k = int(w.size)
    if k == 0:
        return upto + 1
    if k > upto:
        return 0
    lim = upto - k + 1
    hits = np.ones(lim, dtype=bool)
    for t in range(k):
        hits &= xs[t : t + lim] == w[t]
    return int(hits.sum())


def ppm_log_measure(x: Sequence, k: int) -> float:
    """-log2 PPM_k(x_1^n) accumulated position by position (in bits)."""
    if k < 0:
        raise ValueError("order must be >= 0")
    n = len(x)
    if n == 0:
        return 0.0
    D = x.alphabet.size
    if k > n - 2:
        return n * math.log2(D)
    scan = _head_scan(x, k)
    if k < len(scan.neglogs):
        return scan.neglogs[k]
    # scan stopped early: every remaining order assigns the uniform measure
    return n * math.log2(D)


def ppm_log_measure_closed(x: Sequence, k: int) -> float:
    """-log2 PPM_k via the factorial product over contexts, in log-Gamma form.

    Only the orders k <= n-2 admit the closed form; must match
    ppm_log_measure to 1e-9 wherever both are defined.
    """
    n = len(x)
    if k < 0 or k > n - 2:
        raise ValueError(f"closed form needs 0 <= k <= n-2, got k={k}, n={n}")
    D = x.alphabet.size
    idx = build_index(x)
    ids_k = idx.gram_ids(k)
    idx.gram_ids(k + 1)
    m = n - k
    ext_counts = idx.gram_counts(k + 1)
    ctx_succ = np.bincount(ids_k[:m])
    ctx_succ = ctx_succ[ctx_succ > 0]
    bits = k * math.log2(D) - (
        ctx_succ.size * float(_lg_factorial(D - 1))
        + float(_lg_factorial(ext_counts).sum())
        - float(_lg_factorial(ctx_succ + D - 1).sum())
    )
    return bits


def default_mixture_kmax(n: int, D: int) -> int:
    """Head cutoff for the mixture: min(n-2, ceil(log_D n) + 16)."""
    if n < 2:
        return -1
    return min(n - 2, math.ceil(math.log2(max(n, 2)) / math.log2(D)) + 16)


def ppm_semidistribution_entropy(
    x: Sequence, exact: bool = False, kmax: int | None = None
) -> float:
    """Pointwise entropy of the PPM mixture semi-distribution, in bits.

    H(x) = -log2[ (36/pi^4) (n+1)^-2 sum_k PPM_k(x)/(k+1)^2 ]. The head of the
    series is summed with log-sum-exp in ascending k; the infinite tail, where
    PPM_k(x) = D^-n, is folded in closed form via the trigamma function.

    With exact=True the head runs until every remaining order provably equals
    the uniform measure, so the value matches the full series; the default
    caps the head at ceil(log_D n) + 16 orders and treats the rest as uniform,
    which is a tight approximation for non-degenerate inputs.
    """
    n = len(x)
    D = x.alphabet.size
    if kmax is None:
        kmax = n - 2 if exact else default_mixture_kmax(n, D)
    kmax = min(kmax, n - 2)

    head: list[float] = []
    if n >= 2 and kmax >= 0:
        head = _head_scan(x, kmax).neglogs[: kmax + 1]
    terms = [-bits - 2.0 * math.log2(k + 1) for k, bits in enumerate(head)]
    tail = -n * math.log2(D) + math.log2(_zeta2_tail(len(head)))
    terms.append(tail)
    peak = max(terms)
    total = peak + math.log2(math.fsum(2.0 ** (t - peak) for t in terms))
    return 2.0 * math.log2(n + 1) + math.log2(math.pi**4 / 36.0) - total


def lz78_code_length(x: Sequence) -> float:
    """Total bit cost of the LZ78 incremental parse.

    Phrase j (1-based) is emitted as a dictionary back-reference among j
    options (the empty phrase plus phrases 1..j-1), costing ceil(log2 j)
    bits, followed by one symbol at ceil(log2 D) bits. A trailing match that
    runs out of input is emitted the same way, referencing its parent phrase.
    """
    D = x.alphabet.size
    sym_bits = (D - 1).bit_length()
    trie: dict = {}
    node = 0
    next_id = 1
    phrases = 0
    bits = 0
    for a in x.ids.tolist():
        child = trie.get((node, a))
        if child is None:
            phrases += 1
            bits += (phrases - 1).bit_length() + sym_bits
            trie[(node, a)] = next_id
            next_id += 1
            node = 0
        else:
            node = child
    if node != 0:
        phrases += 1
        bits += (phrases - 1).bit_length() + sym_bits
    return float(bits)


def lz78_entropy(x: Sequence) -> float:
    """LZ78 code length plus the length correction log2(pi^2/6) + 2 log2(n+1)."""
    return lz78_code_length(x) + LOG2_PI2_OVER_6 + 2.0 * math.log2(len(x) + 1)


def ppm_gap_lower(D: int) -> float:
    """-log2 (1/D)!, reading the factorial as Gamma(1 + 1/D)."""
    return -math.log2(math.gamma(1.0 + 1.0 / D))


def ppm_gap_upper(n: int) -> float:
    """log2(e^2 n)."""
    return 2.0 * LOG2E + math.log2(n)


def ppm_bound_gap(x: Sequence, k: int) -> float:
    """Normalized redundancy gap of PPM_k against the empirical entropy.

    gap = [-log2 PPM_k(x) - k log2 D - (n-k) h_k(x)] / (D |V_k(x_1^{n-1})|);
    it always lies in [ppm_gap_lower(D), ppm_gap_upper(n)].
    """
    n = len(x)
    if k < 0 or k > n - 2:
        raise ValueError(f"gap needs 0 <= k <= n-2, got k={k}, n={n}")
    D = x.alphabet.size
    idx = build_index(x)
    h_k = idx.cond_entropy(k)
    ids_k = idx.gram_ids(k)
    m = n - k
    vocab_prefix = int(np.unique(ids_k[:m]).size)
    bits = ppm_log_measure(x, k)
    return (bits - k * math.log2(D) - (n - k) * h_k) / (D * vocab_prefix)


class CodeLengthFunction:
    """A pointwise entropy H(x) = -log2 Pi(x) for a semi-distribution Pi."""

    name = "abstract"

    def evaluate(self, x: Sequence) -> float:
        raise NotImplementedError

    def test_length(self, x: Sequence) -> float:
        """Code length used by the order hypothesis test; defaults to evaluate."""
        return self.evaluate(x)


class PpmCode(CodeLengthFunction):
    """PPM mixture semi-distribution backend."""

    name = "ppm"

    def __init__(self, exact: bool = False, kmax: int | None = None):
        self.exact = exact
        self.kmax = kmax

    def evaluate(self, x: Sequence) -> float:
        return ppm_semidistribution_entropy(x, exact=self.exact, kmax=self.kmax)


class Lz78Code(CodeLengthFunction):
    """Corrected LZ78 backend; the raw parse cost feeds the hypothesis test."""

    name = "lz78"

    def evaluate(self, x: Sequence) -> float:
        return lz78_entropy(x)

    def test_length(self, x: Sequence) -> float:
        return lz78_code_length(x)


class UniformCode(CodeLengthFunction):
    """H(x) = n log2 D; its Kraft sum per length is exactly one."""

    name = "uniform"

    def evaluate(self, x: Sequence) -> float:
        return len(x) * math.log2(x.alphabet.size)


class OffsetCode(CodeLengthFunction):
    """A backend shifted by a constant, H(x) + c; used for monotonicity checks."""

    def __init__(self, inner: CodeLengthFunction, offset: float):
        self.inner = inner
        self.offset = float(offset)
        self.name = f"{inner.name}+{offset:g}"

    def evaluate(self, x: Sequence) -> float:
        return self.inner.evaluate(x) + self.offset


BACKENDS = ("ppm", "lz78")


def make_code(name: str, ppm_exact: bool = False, ppm_kmax: int | None = None) -> CodeLengthFunction:
    """Backend by name: "ppm" or "lz78"."""
    if name == "ppm":
        return PpmCode(exact=ppm_exact, kmax=ppm_kmax)
    if name == "lz78":
        return Lz78Code()
    raise ValueError(f"unknown backend: {name!r}")


def kraft_sum(code: CodeLengthFunction, n: int, D: int) -> float:
    """sum over all x in X^n of 2^-H(x), by full enumeration (guarded)."""
    if n < 0 or D < 2:
        raise ValueError("need n >= 0 and D >= 2")
    if D**n > KRAFT_ENUM_GUARD:
        raise BudgetError(f"enumeration of {D}^{n} strings exceeds the guard")
    alpha = uniform_alphabet(D)
    return math.fsum(
        2.0 ** -code.evaluate(Sequence(np.array(ids, dtype=np.int64), alpha))
        for ids in product(range(D), repeat=n)
    )
