"""Stationary generative sources with exact information-theoretic oracles,
and the Monte Carlo consistency-experiment runner."""

from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._version import __version__
from .codes import BudgetError, make_code
from .orders import kt_order, mgz_order, universal_markov_order
from .sequence import Sequence, uniform_alphabet

STATE_GUARD = 1 << 20
RNG_ALGORITHM = "numpy-pcg64"


class SourceError(ValueError):
    """Invalid transition table or a non-ergodic chain."""


def _graph_period(indptr_edges: list[list[int]]) -> int:
    """gcd of cycle lengths of a strongly connected digraph, via BFS levels."""
    n = len(indptr_edges)
    level = [-1] * n
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop()
        for v in indptr_edges[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g else 0


@dataclass(frozen=True, eq=False)
class SourceModel:
    """A stationary ergodic source: i.i.d. or a Markov chain of known order.

    transition has one row per context (all D**order words over the alphabet,
    most significant symbol first); stationary is the exact stationary law of
    the context chain.
    """

    kind: str
    order: int
    alphabet_size: int
    transition: np.ndarray
    stationary: np.ndarray
    label: str = ""

    @property
    def states(self) -> int:
        return self.transition.shape[0]

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "alphabet_size": self.alphabet_size,
            "label": self.label,
        }

    # -- sampling --------------------------------------------------------

    def sample(self, n: int, seed) -> Sequence:
        """Length-n sample: hidden initial context drawn from the stationary
        law, then n transitions. Deterministic given the seed."""
        rng = np.random.default_rng(seed)
        alpha = uniform_alphabet(self.alphabet_size)
        if n == 0:
            return Sequence(np.empty(0, dtype=np.int64), alpha)
        D = self.alphabet_size
        if self.order == 0:
            out = rng.choice(D, size=n, p=self.transition[0])
            return Sequence(out.astype(np.int64), alpha)
        S = self.states
        ctx = int(rng.choice(S, p=self.stationary))
        cum = np.cumsum(self.transition, axis=1)
        cum[:, -1] = 1.0
        rows = cum.tolist()
        us = rng.random(n).tolist()
        out = np.empty(n, dtype=np.int64)
        for t in range(n):
            a = bisect_right(rows[ctx], us[t])
            out[t] = a
            ctx = (ctx * D + a) % S
        return Sequence(out, alpha)

    # -- exact oracles -----------------------------------------------------

    def block_marginal(self, j: int) -> np.ndarray:
        """Stationary distribution of a length-j block, j <= order."""
        if not 0 <= j <= self.order:
            raise ValueError(f"block length {j} outside 0..{self.order}")
        if j == self.order:
            return self.stationary
        D = self.alphabet_size
        shaped = self.stationary.reshape((D,) * self.order)
        return shaped.sum(axis=tuple(range(j, self.order))).ravel()

    def cond_entropy(self, k: int) -> float:
        """True conditional entropy h_k in bits; equals the entropy rate for
        k >= the source order."""
        if k < 0:
            raise ValueError("order must be >= 0")
        M = self.order
        if k >= M:
            T = self.transition
            safe = np.where(T > 0, T, 1.0)
            row_h = -(T * np.log2(safe)).sum(axis=1)
            return float(self.stationary @ row_h)
        return self._block_entropy(k + 1) - self._block_entropy(k)

    def _block_entropy(self, j: int) -> float:
        w = self.block_marginal(j)
        w = w[w > 0]
        return float(-(w * np.log2(w)).sum())

    def entropy_rate(self) -> float:
        """h^P = inf_k h_k^P, attained at the source order."""
        return self.cond_entropy(self.order)

    def renyi_block_entropy(self, n: int) -> float:
        """Collision entropy of blocks, R_n = -log2 sum_x P(x_1^n)^2.

        Computed by a transfer recursion over squared transition weights with
        per-step rescaling, so long blocks do not underflow.
        """
        if n < 1:
            raise ValueError("block length must be >= 1")
        D = self.alphabet_size
        if self.order == 0:
            q = float((self.transition[0] ** 2).sum())
            return -n * math.log2(q)
        if n <= self.order:
            w = self.block_marginal(n)
            return -math.log2(float((w**2).sum()))
        S = self.states
        if n * S * D > (1 << 28):
            raise BudgetError("transfer recursion budget exceeded")
        t2 = self.transition**2
        nxt = ((np.arange(S)[:, None] * D + np.arange(D)[None, :]) % S).ravel()
        v = self.stationary**2
        acc = 0.0
        for _ in range(n - self.order):
            v = np.bincount(nxt, weights=(v[:, None] * t2).ravel(), minlength=S)
            scale = float(v.sum())
            v /= scale
            acc += math.log2(scale)
        return -acc

    def oracles(self, kmax: int, block_lengths=()) -> "SourceOracles":
        return SourceOracles(
            cond_entropies=[self.cond_entropy(k) for k in range(kmax + 1)],
            entropy_rate=self.entropy_rate(),
            renyi={int(n): self.renyi_block_entropy(n) for n in block_lengths},
        )


@dataclass
class SourceOracles:
    """Exact h_k, entropy rate and Renyi block entropies of one source."""

    cond_entropies: list
    entropy_rate: float
    renyi: dict


def _validate_rows(T: np.ndarray) -> np.ndarray:
    if np.any(T < 0):
        raise SourceError("negative transition probability")
    sums = T.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise SourceError("transition rows must sum to 1")
    return T / sums[:, None]


def _check_ergodic(T: np.ndarray, D: int) -> None:
    S = T.shape[0]
    if S == 1:
        return
    rows, cols = np.nonzero(T)
    dest = (rows * D + cols) % S
    graph = csr_matrix((np.ones(rows.size), (rows, dest)), shape=(S, S))
    n_comp, _ = connected_components(graph, directed=True, connection="strong")
    if n_comp != 1:
        raise SourceError("context chain is reducible")
    adjacency = [[] for _ in range(S)]
    for u, v in zip(rows.tolist(), dest.tolist()):
        adjacency[u].append(v)
    if _graph_period(adjacency) != 1:
        raise SourceError("context chain is periodic")


def _stationary_of(T: np.ndarray, D: int) -> np.ndarray:
    S = T.shape[0]
    if S == 1:
        return np.array([1.0])
    dest = ((np.arange(S)[:, None] * D + np.arange(D)[None, :]) % S).ravel()

    def step(pi):
        return np.bincount(dest, weights=(pi[:, None] * T).ravel(), minlength=S)

    if S <= 2048:
        K = np.zeros((S, S))
        np.add.at(K, (np.repeat(np.arange(S), D), dest), T.ravel())
        A = K.T - np.eye(S)
        A[-1, :] = 1.0
        b = np.zeros(S)
        b[-1] = 1.0
        pi = np.linalg.solve(A, b)
    else:
        pi = np.full(S, 1.0 / S)
        for _ in range(200000):
            nxt = step(pi)
            if np.abs(nxt - pi).sum() < 1e-14:
                pi = nxt
                break
            pi = nxt
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    if np.abs(step(pi) - pi).max() > 1e-10:
        raise SourceError("stationary distribution did not converge")
    return pi


def make_markov(
    D: int,
    order: int,
    transition=None,
    seed=None,
    concentration: float = 1.0,
    min_prob: float = 1e-3,
    label: str = "",
) -> SourceModel:
    """Order-M Markov source over D symbols, from a table or a random seed.

    Random generation draws Gamma(concentration) weights per row and mixes in
    a uniform floor so every entry is at least min_prob, which keeps the chain
    ergodic and the entropy rate bounded away from zero. Reducible or periodic
    chains are rejected.
    """
    if D < 2:
        raise SourceError("alphabet size must be >= 2")
    if order < 0:
        raise SourceError("order must be >= 0")
    S = D**order
    if S > STATE_GUARD:
        raise BudgetError(f"context space {D}^{order} exceeds the guard")
    if transition is not None:
        T = _validate_rows(np.asarray(transition, dtype=float).reshape(S, D))
    else:
        if seed is None:
            raise SourceError("random generation needs a seed")
        rng = np.random.default_rng(seed)
        raw = rng.gamma(concentration, size=(S, D))
        raw /= raw.sum(axis=1, keepdims=True)
        T = (1.0 - D * min_prob) * raw + min_prob
        T /= T.sum(axis=1, keepdims=True)
    _check_ergodic(T, D)
    pi = _stationary_of(T, D)
    return SourceModel(kind="markov" if order > 0 else "iid", order=order,
                       alphabet_size=D, transition=T, stationary=pi, label=label)


def make_iid(probabilities, label: str = "") -> SourceModel:
    """i.i.d. source with the given symbol distribution."""
    p = np.asarray(probabilities, dtype=float)
    return make_markov(len(p), 0, transition=p.reshape(1, -1), label=label)


def fair_coin() -> SourceModel:
    return make_iid([0.5, 0.5], label="fair-coin")


def sticky_chain(p_stay: float = 0.9) -> SourceModel:
    """Symmetric binary order-1 chain with P(repeat last symbol) = p_stay."""
    return make_markov(
        2, 1,
        transition=[[p_stay, 1.0 - p_stay], [1.0 - p_stay, p_stay]],
        label=f"sticky-{p_stay:g}",
    )


# -- consistency experiment ------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo sweep: estimate orders on sampled sequences."""

    lengths: tuple
    trials: int
    seed: int
    backends: tuple = ("ppm",)
    estimators: tuple = ("universal",)
    mgz_lambda: float = 0.1
    ppm_exact: bool = True
    jobs: int = 1

    def to_dict(self) -> dict:
        return {
            "lengths": list(self.lengths),
            "trials": self.trials,
            "seed": self.seed,
            "backends": list(self.backends),
            "estimators": list(self.estimators),
            "mgz_lambda": self.mgz_lambda,
            "ppm_exact": self.ppm_exact,
        }


def _run_trial(args) -> dict:
    src, n, seed_entropy, config = args
    x = src.sample(n, seed=np.random.SeedSequence(seed_entropy))
    out: dict = {"backends": {}}
    for name in config.backends:
        code = make_code(name, ppm_exact=config.ppm_exact)
        report = universal_markov_order(x, code)
        out["backends"][name] = {
            "order": report.estimate,
            "H_bits": report.H_bits,
            "h_at_order": report.profile.h[report.estimate],
        }
    if "kt" in config.estimators:
        out["kt"] = kt_order(x)
        ppm_result = out["backends"].get("ppm")
        if ppm_result is not None and ppm_result["order"] > out["kt"]:
            raise AssertionError(
                f"universal order {ppm_result['order']} exceeded KT order {out['kt']}"
            )
    if "mgz" in config.estimators:
        out["mgz"] = mgz_order(x, config.mgz_lambda)
    return out


def consistency_experiment(src: SourceModel, config: ExperimentConfig) -> dict:
    """Sampled distribution of order estimates across a grid of lengths.

    Per-trial seeds derive deterministically from (master seed, length index,
    trial index); trials may run in parallel and aggregation preserves trial
    order, so reports are bit-reproducible at any job count.
    """
    if config.trials < 1:
        raise ValueError("need at least one trial")
    kmax = src.order + 2
    report = {
        "meta": {
            "tool": "mol",
            "version": __version__,
            "rng": RNG_ALGORITHM,
            "seed": config.seed,
            "config": config.to_dict(),
            "source": src.describe(),
        },
        "true_order": src.order,
        "entropy_rate_bits": src.entropy_rate(),
        "cond_entropy_bits": [src.cond_entropy(k) for k in range(kmax + 1)],
        "runs": [],
    }
    tasks = [
        (src, n, (config.seed, n_index, trial), config)
        for n_index, n in enumerate(config.lengths)
        for trial in range(config.trials)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=1))
    else:
        results = [_run_trial(t) for t in tasks]

    for n_index, n in enumerate(config.lengths):
        chunk = results[n_index * config.trials : (n_index + 1) * config.trials]
        for backend in config.backends:
            orders = [r["backends"][backend]["order"] for r in chunk]
            h_at = [r["backends"][backend]["h_at_order"] for r in chunk]
            H_bits = [r["backends"][backend]["H_bits"] for r in chunk]
            run = {
                "n": n,
                "backend": backend,
                "orders": orders,
                "H_bits": H_bits,
                "h_at_order": h_at,
                "hit_rate": sum(1 for o in orders if o == src.order) / len(orders),
                "mean_order": sum(orders) / len(orders),
                "order_histogram": {
                    str(v): orders.count(v) for v in sorted(set(orders))
                },
            }
            if "kt" in config.estimators:
                kts = [r["kt"] for r in chunk]
                run["kt_orders"] = kts
                run["mean_kt"] = sum(kts) / len(kts)
            if "mgz" in config.estimators:
                run["mgz_orders"] = [r["mgz"] for r in chunk]
            report["runs"].append(run)
    return report


def experiment_summary_rows(report: dict) -> list:
    """CSV summary rows (n, backend, hit_rate, mean_M, mean_K, h_at_M, h_P)."""
    h_rate = report["entropy_rate_bits"]
    rows = []
    for run in report["runs"]:
        h_at = run["h_at_order"]
        rows.append(
            (
                run["n"],
                run["backend"],
                run["hit_rate"],
                run["mean_order"],
                run.get("mean_kt", ""),
                sum(h_at) / len(h_at),
                h_rate,
            )
        )
    return rows
