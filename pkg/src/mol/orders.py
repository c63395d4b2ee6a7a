"""Markov order estimators driven by universal code lengths.

The universal order is the least k at which the weighted empirical entropy
(n-k) h_k(x) drops to the code length H(x). The Krichevsky-Trofimov order
picks the PPM order of maximal measure; the Merhav-Gutman-Ziv estimator and
the Ryabko-Astola-Malyutov test compare h_k against an LZ78 rate budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codes import CodeLengthFunction, _head_scan, lz78_code_length
from .sequence import Sequence
from .stats import EntropyProfile, build_index

KT_TIE_TOL = 1e-9


@dataclass
class OrderReport:
    """An estimated order together with the evidence that produced it."""

    n: int
    backend: str
    H_bits: float
    estimate: int
    profile: EntropyProfile

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "backend": self.backend,
            "H_bits": self.H_bits,
            "order": self.estimate,
            "profile": self.profile.entries(),
        }


@dataclass
class RamTestResult:
    """Hypothesis test of Markov order <= M at significance alpha."""

    M: int
    alpha: float
    statistic: float
    reject: bool


def universal_markov_order(x: Sequence, code: CodeLengthFunction) -> OrderReport:
    """Least k with (n-k) h_k(x) <= H(x); scans upward using monotonicity.

    The scan is guaranteed to stop by the maximal repetition length plus one,
    where h_k vanishes while H stays positive. The empty sequence gets order 0
    by convention.
    """
    n = len(x)
    H = float(code.evaluate(x))
    if n == 0:
        return OrderReport(n=0, backend=code.name, H_bits=H, estimate=0,
                           profile=EntropyProfile(n=0, h=[], weighted=[], vocab=[]))
    idx = build_index(x)
    k = 0
    while (n - k) * idx.cond_entropy(k) > H:
        k += 1
        if k >= n:
            raise AssertionError("order scan ran past every defined entropy")
    return OrderReport(n=n, backend=code.name, H_bits=H, estimate=k,
                       profile=idx.profile(k))


def kt_order(x: Sequence) -> int:
    """Least k maximizing PPM_k(x); near-equal log measures count as ties.

    Orders above the maximal repetition length all assign the uniform measure
    D^-n, so the scan covers k = 0..L and one representative of that plateau.
    """
    n = len(x)
    if n == 0:
        return 0
    D = x.alphabet.size
    scan = _head_scan(x, n - 2)
    candidates = list(scan.neglogs)
    if len(candidates) < n:
        candidates.append(n * math.log2(D))
    best = min(candidates)
    for k, bits in enumerate(candidates):
        if bits <= best + KT_TIE_TOL:
            return k
    raise AssertionError("unreachable")


def mgz_order(x: Sequence, lam: float) -> int:
    """Least k with h_k(x) <= LZ78(x)/n + lambda (raw parse cost, no correction)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    n = len(x)
    if n == 0:
        return 0
    threshold = lz78_code_length(x) / n + lam
    idx = build_index(x)
    k = 0
    while idx.cond_entropy(k) > threshold:
        k += 1
        if k >= n:
            raise AssertionError("order scan ran past every defined entropy")
    return k


def ram_test(x: Sequence, M: int, alpha: float, code: CodeLengthFunction) -> RamTestResult:
    """Test the null "Markov order <= M" against the code-length budget.

    Accepts iff (n-M) h_M(x) <= H_code(x) + log2(1/alpha), where H_code is the
    backend's test length (the raw parse cost for LZ78, the full pointwise
    entropy for PPM).
    """
    n = len(x)
    if not 0 <= M < n:
        raise ValueError(f"need 0 <= M < n, got M={M}, n={n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    idx = build_index(x)
    statistic = (n - M) * idx.cond_entropy(M) - float(code.test_length(x))
    return RamTestResult(M=M, alpha=alpha, statistic=statistic,
                         reject=statistic > math.log2(1.0 / alpha))
