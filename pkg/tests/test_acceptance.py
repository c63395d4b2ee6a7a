"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The Monte Carlo criteria (5-8) share one session of experiment runs; the
inequality criteria (2-4) share one verify-battery workspace. Run with
``pytest tests/test_acceptance.py -v -s`` to watch the per-criterion lines.
"""

import math
import subprocess
import sys
import time

import pytest

from mol import (
    ExperimentConfig,
    consistency_experiment,
    fair_coin,
    hilberg_estimate,
    make_markov,
    sticky_chain,
)
from mol.verify import VerifyBudget, run_suites

MC_SEED = 20260810
MC_LENGTHS = (1_000, 10_000, 100_000)
MC_TRIALS = 100

INEQUALITY_SUITES = [
    "h-step-drop",
    "h-prefix-drop",
    "h-superadditivity",
    "weighted-monotone",
    "h-series-bound",
    "maxrep-lower-bound",
    "order-le-maxrep",
    "order-le-kt",
    "order-log-bound",
    "mi-vocab-bound",
]


def announce(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def battery():
    """Criteria 2-4: inequality, Kraft and redundancy-gap suites at the full
    exhaustive + random budget, over one shared workspace."""
    budget = VerifyBudget(
        alphabet_size=2,
        exhaustive_max_n=10,
        kraft_max_n=10,
        random_cases=10_000,
        random_max_n=2_000,
        random_max_alphabet=4,
        random_seed=MC_SEED,
    )
    start = time.monotonic()
    results = run_suites(INEQUALITY_SUITES + ["kraft", "ppm-gap-sandwich"], budget)
    elapsed = time.monotonic() - start
    return {r.name: r for r in results}, elapsed


@pytest.fixture(scope="module")
def mc_runs():
    """Criteria 5-8: 100 trials per length and source, PPM and LZ78 backends,
    KT orders on the memoryless source."""
    sources = [
        (fair_coin(), ("universal", "kt")),
        (sticky_chain(0.9), ("universal",)),
        (make_markov(2, 2, seed=11, concentration=1.0, label="random-order2"),
         ("universal",)),
    ]
    start = time.monotonic()
    runs = {}
    for src, estimators in sources:
        config = ExperimentConfig(
            lengths=MC_LENGTHS,
            trials=MC_TRIALS,
            seed=MC_SEED,
            backends=("ppm", "lz78"),
            estimators=estimators,
            ppm_exact=True,
            jobs=2,
        )
        runs[src.label] = (src, consistency_experiment(src, config))
    return runs, time.monotonic() - start


def _runs_for(report: dict, backend: str) -> list:
    return [r for r in report["runs"] if r["backend"] == backend]


def test_criterion_1_form_equivalence():
    budget = VerifyBudget(exhaustive_max_n=10, random_cases=0)
    start = time.monotonic()
    results = run_suites(["h-forms", "ppm-closed-form"], budget)
    elapsed = time.monotonic() - start
    ok = all(r.passed for r in results) and elapsed < 60.0
    cases = sum(r.cases for r in results)
    announce(1, ok, f"{cases} exhaustive form cross-checks in {elapsed:.1f}s")
    for r in results:
        assert r.passed, r.violations[:3]
    assert elapsed < 60.0


def test_criterion_2_inequality_suites(battery):
    results, elapsed = battery
    bad = {
        name: results[name].violations[:3]
        for name in INEQUALITY_SUITES
        if not results[name].passed
    }
    cases = sum(results[name].cases for name in INEQUALITY_SUITES)
    ok = not bad and elapsed < 600.0
    announce(2, ok, f"{cases} inequality checks, zero violations, {elapsed:.0f}s")
    assert not bad, bad
    assert elapsed < 600.0


def test_criterion_3_kraft(battery):
    results, _ = battery
    result = results["kraft"]
    announce(3, result.passed, f"{result.cases} Kraft enumerations (both backends, n=1..10)")
    assert result.passed, result.violations[:3]


def test_criterion_4_ppm_gap(battery):
    results, _ = battery
    result = results["ppm-gap-sandwich"]
    announce(4, result.passed, f"{result.cases} redundancy-gap sandwiches")
    assert result.passed, result.violations[:3]


def test_criterion_5_consistency(mc_runs):
    runs, elapsed = mc_runs
    details = []
    ok = elapsed < 1800.0
    for label, (src, report) in runs.items():
        rates = [r["hit_rate"] for r in _runs_for(report, "ppm")]
        details.append(f"{label}: {' -> '.join(f'{r:.2f}' for r in rates)}")
        if rates[-1] < 0.95:
            ok = False
        if any(b < a - 0.05 for a, b in zip(rates, rates[1:])):
            ok = False
    announce(5, ok, f"hit rates {'; '.join(details)}; {elapsed:.0f}s")
    assert elapsed < 1800.0
    for label, (src, report) in runs.items():
        rates = [r["hit_rate"] for r in _runs_for(report, "ppm")]
        assert rates[-1] >= 0.95, (label, rates)
        assert all(b >= a - 0.05 for a, b in zip(rates, rates[1:])), (label, rates)


def test_criterion_6_universality(mc_runs):
    runs, _ = mc_runs
    details = []
    ok = True
    for label, (src, report) in runs.items():
        h = src.entropy_rate()
        for backend in ("ppm", "lz78"):
            final = _runs_for(report, backend)[-1]
            n = final["n"]
            good = sum(1 for H in final["H_bits"] if abs(H / n - h) <= 0.05)
            frac = good / len(final["H_bits"])
            details.append(f"{label}/{backend}: {frac:.2f}")
            if frac < 0.95:
                ok = False
    announce(6, ok, f"per-symbol entropy within 0.05 bits at n=1e5: {'; '.join(details)}")
    for label, (src, report) in runs.items():
        h = src.entropy_rate()
        for backend in ("ppm", "lz78"):
            final = _runs_for(report, backend)[-1]
            frac = sum(
                1 for H in final["H_bits"] if abs(H / final["n"] - h) <= 0.05
            ) / len(final["H_bits"])
            assert frac >= 0.95, (label, backend, frac)


def test_criterion_7_order_and_entropy_echoes(mc_runs):
    runs, _ = mc_runs
    details = []
    ok = True
    for label, (src, report) in runs.items():
        h = src.entropy_rate()
        final = _runs_for(report, "ppm")[-1]
        ceiling = (1.0 / h + 0.5) * math.log2(final["n"])
        frac_order = sum(1 for M in final["orders"] if M <= ceiling) / len(final["orders"])
        frac_h = sum(
            1 for v in final["h_at_order"] if abs(v - h) <= 0.05
        ) / len(final["h_at_order"])
        details.append(f"{label}: order {frac_order:.2f}, entropy {frac_h:.2f}")
        ok = ok and frac_order >= 0.95 and frac_h >= 0.95
    announce(7, ok, "; ".join(details))
    for label, (src, report) in runs.items():
        h = src.entropy_rate()
        final = _runs_for(report, "ppm")[-1]
        ceiling = (1.0 / h + 0.5) * math.log2(final["n"])
        assert sum(1 for M in final["orders"] if M <= ceiling) >= 0.95 * len(final["orders"])
        assert sum(1 for v in final["h_at_order"] if abs(v - h) <= 0.05) >= 0.95 * len(
            final["h_at_order"]
        )


def test_criterion_8_kt_contrast(mc_runs):
    runs, _ = mc_runs
    _, report = runs["fair-coin"]
    final = _runs_for(report, "ppm")[-1]
    frac_zero = sum(1 for M in final["orders"] if M == 0) / len(final["orders"])
    dominance = all(
        all(m <= k for m, k in zip(run["orders"], run["kt_orders"]))
        for run in _runs_for(report, "ppm")
    )
    ok = frac_zero >= 0.95 and final["mean_kt"] > final["mean_order"] and dominance
    announce(
        8, ok,
        f"fair coin at n=1e5: M=0 in {frac_zero:.2f}, mean K {final['mean_kt']:.1f} "
        f"vs mean M {final['mean_order']:.2f}, dominance {dominance}",
    )
    assert frac_zero >= 0.95
    assert final["mean_kt"] > final["mean_order"]
    assert dominance


def test_criterion_9_hilberg_calibration():
    worst = 0.0
    for beta in (0.0, 0.25, 0.5, 0.75, 1.0):
        grid = {2**e: float(2**e) ** beta for e in range(2, 13)}
        err = abs(hilberg_estimate(grid).exponent - beta)
        worst = max(worst, err)
    ok = worst <= 0.05
    announce(9, ok, f"worst exponent error {worst:.3f} over beta grid")
    assert worst <= 0.05


def test_criterion_10_cli_determinism(tmp_path):
    def run(args):
        proc = subprocess.run(
            [sys.executable, "-m", "mol", *args], capture_output=True, text=True
        )
        assert proc.returncode == 0, proc.stderr
        return proc.stdout

    sample = tmp_path / "in.bin"
    sample.write_bytes(bytes([i % 3 for i in range(400)]))
    other = tmp_path / "in2.bin"
    other.write_bytes(bytes([(i // 2) % 2 for i in range(400)]))

    sim_args = [
        "simulate", "--order", "1", "--sticky", "0.9", "--n", "300,600",
        "--trials", "4", "--seed", "7", "--ppm-exact", "--estimators",
        "universal,kt", "--format", "csv",
    ]
    est_args = [
        "estimate", "--backend", "ppm", "--ppm-exact", "--kt", "--seed", "7",
        str(sample), str(other),
    ]
    outputs = set()
    for jobs in ("1", "1", "2"):
        outputs.add(run(sim_args + ["--jobs", jobs]))
        outputs.add(run(est_args + ["--jobs", jobs]))
    ok = len(outputs) == 2  # one distinct byte stream per command
    announce(10, ok, "simulate and estimate byte-identical across reruns and --jobs 1/2")
    assert ok
