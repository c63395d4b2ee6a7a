import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mol import (
    BudgetError,
    CodeLengthFunction,
    Lz78Code,
    PpmCode,
    UniformCode,
    ingest,
    kraft_sum,
    lz78_code_length,
    lz78_entropy,
    make_code,
    ppm_bound_gap,
    ppm_cond,
    ppm_gap_lower,
    ppm_gap_upper,
    ppm_log_measure,
    ppm_log_measure_closed,
    ppm_semidistribution_entropy,
)

from oracles import (
    all_strings,
    lz78_oracle,
    ppm_cond_oracle,
    ppm_neglog_oracle,
    ppm_semidist_oracle,
    seq,
)

random_ids = st.lists(st.integers(0, 2), min_size=1, max_size=80)
LOG2_PI2_6 = math.log2(math.pi**2 / 6.0)


# -- PPM conditional law -----------------------------------------------------


def test_ppm_cond_examples():
    x = ingest(b"ab")
    assert ppm_cond(x, 1, 0) == 0.5  # short context branch is forced at i=1
    assert ppm_cond(x, 1, 7) == 0.5
    assert ppm_cond(ingest(b"aa"), 2, 0) == pytest.approx(2.0 / 3.0)
    assert ppm_cond(ingest(b"aba"), 3, 1) == pytest.approx(0.5)  # context unseen
    with pytest.raises(IndexError):
        ppm_cond(x, 3, 0)
    with pytest.raises(ValueError):
        ppm_cond(x, 1, -1)


@given(random_ids, st.integers(0, 8), st.data())
def test_ppm_cond_matches_oracle(ids, k, data):
    x = seq(ids, 3)
    i = data.draw(st.integers(1, len(ids)))
    assert ppm_cond(x, i, k) == pytest.approx(ppm_cond_oracle(ids, 3, i, k), abs=1e-12)


@given(random_ids, st.integers(0, 8), st.data())
def test_ppm_cond_normalizes(ids, k, data):
    x = seq(ids, 3)
    i = data.draw(st.integers(1, len(ids)))
    total = 0.0
    for a in range(3):
        variant = ids.copy()
        variant[i - 1] = a
        total += ppm_cond(seq(variant, 3), i, k)
    assert total == pytest.approx(1.0, abs=1e-12)


# -- PPM log measures --------------------------------------------------------


def test_ppm_log_measure_examples():
    assert ppm_log_measure(ingest(b"aa"), 0) == pytest.approx(math.log2(3), abs=1e-12)
    x = ingest(b"abba")
    for k in (3, 4, 10):  # k > n-2 collapses to the uniform measure
        assert ppm_log_measure(x, k) == pytest.approx(4.0)
    assert ppm_log_measure(ingest(b""), 5) == 0.0


@given(random_ids, st.integers(0, 6))
def test_ppm_log_measure_matches_oracle(ids, k):
    assert ppm_log_measure(seq(ids, 3), k) == pytest.approx(
        ppm_neglog_oracle(ids, 3, k), abs=1e-9
    )


def test_ppm_closed_form_examples():
    assert ppm_log_measure_closed(ingest(b"aa"), 0) == pytest.approx(math.log2(3), abs=1e-9)
    assert ppm_log_measure_closed(ingest(b"aaaa"), 0) == pytest.approx(math.log2(5), abs=1e-9)
    x = ingest(b"abab")
    assert ppm_log_measure_closed(x, 1) == pytest.approx(ppm_log_measure(x, 1), abs=1e-9)
    with pytest.raises(ValueError):
        ppm_log_measure_closed(x, 3)


def test_ppm_closed_form_exhaustive():
    for n in range(2, 9):
        for x in all_strings(2, n):
            for k in range(n - 1):
                assert ppm_log_measure(x, k) == pytest.approx(
                    ppm_log_measure_closed(x, k), abs=1e-9
                )


# -- mixture semi-distribution -----------------------------------------------


def test_semidistribution_entropy_single_symbol():
    # all orders assign 1/2, the order weights sum to pi^2/6
    expected = -math.log2(36 / math.pi**4 * 0.25 * 0.5 * (math.pi**2 / 6))
    assert ppm_semidistribution_entropy(ingest(b"a"), exact=True) == pytest.approx(
        expected, abs=1e-12
    )
    assert expected == pytest.approx(3.718, abs=1e-3)


def test_semidistribution_entropy_empty():
    assert ppm_semidistribution_entropy(ingest(b""), exact=True) == pytest.approx(
        LOG2_PI2_6, abs=1e-9
    )


@given(random_ids)
def test_semidistribution_matches_oracle(ids):
    x = seq(ids[:24], 3)
    assert ppm_semidistribution_entropy(x, exact=True) == pytest.approx(
        ppm_semidist_oracle(x.ids.tolist(), 3), abs=1e-9
    )


@given(random_ids)
def test_semidistribution_uniform_sandwich(ids):
    x = seq(ids, 3)
    n = len(x)
    H = ppm_semidistribution_entropy(x, exact=True)
    assert H >= math.log2(3) - 1e-9
    assert H <= math.log2(math.pi**4 / 36) + 4 * math.log2(n + 1) + n * math.log2(3) + 1e-9


@given(random_ids)
def test_semidistribution_default_matches_exact_for_short_strings(ids):
    # the default head cap exceeds the maximal repetition here, so no loss
    x = seq(ids, 3)
    assert ppm_semidistribution_entropy(x) == pytest.approx(
        ppm_semidistribution_entropy(x, exact=True), abs=1e-9
    )


# -- LZ78 ---------------------------------------------------------------------


def test_lz78_examples():
    assert lz78_code_length(ingest(b"")) == 0.0
    assert lz78_code_length(ingest(b"a")) == 1.0
    assert lz78_code_length(ingest(b"aaaa")) == 6.0  # phrases a, aa, a
    assert lz78_entropy(ingest(b"")) == pytest.approx(LOG2_PI2_6)
    assert lz78_entropy(ingest(b"a")) == pytest.approx(1 + LOG2_PI2_6 + 2.0)


@given(st.lists(st.integers(0, 2), max_size=300))
def test_lz78_matches_oracle(ids):
    x = seq(ids, 3)
    assert lz78_code_length(x) == lz78_oracle(ids, 3)
    assert lz78_entropy(x) > lz78_code_length(x)


# -- Kraft sums ---------------------------------------------------------------


def test_kraft_uniform_code_is_tight():
    assert kraft_sum(UniformCode(), 3, 2) == pytest.approx(1.0, abs=1e-12)


def test_kraft_backends_small():
    for code in (PpmCode(exact=True), Lz78Code()):
        for n in range(1, 7):
            assert kraft_sum(code, n, 2) <= 1.0 + 1e-9


def test_kraft_negative_control():
    class Broken(CodeLengthFunction):
        name = "broken"

        def evaluate(self, x):
            return -1.0

    assert kraft_sum(Broken(), 3, 2) > 1.0


def test_kraft_budget_guard():
    with pytest.raises(BudgetError):
        kraft_sum(UniformCode(), 25, 2)


# -- redundancy gap -----------------------------------------------------------


def test_gap_lower_bound_is_gamma_value():
    assert ppm_gap_lower(2) == pytest.approx(-math.log2(math.sqrt(math.pi) / 2), abs=1e-12)


def test_gap_example_within_sandwich():
    x = ingest(b"aaaa")
    gap = ppm_bound_gap(x, 0)
    assert ppm_gap_lower(2) - 1e-9 <= gap <= ppm_gap_upper(4) + 1e-9
    with pytest.raises(ValueError):
        ppm_bound_gap(x, 3)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=60), st.integers(0, 4))
def test_gap_sandwich_random(ids, k):
    x = seq(ids)
    if k > len(ids) - 2:
        return
    gap = ppm_bound_gap(x, k)
    assert ppm_gap_lower(2) - 1e-9 <= gap <= ppm_gap_upper(len(ids)) + 1e-9


# -- backend objects ----------------------------------------------------------


def test_make_code_and_test_lengths():
    x = ingest(b"abab")
    ppm = make_code("ppm", ppm_exact=True)
    lz = make_code("lz78")
    assert ppm.name == "ppm" and lz.name == "lz78"
    assert ppm.test_length(x) == ppm.evaluate(x)
    assert lz.test_length(x) == lz78_code_length(x)
    assert lz.evaluate(x) == lz78_entropy(x)
    with pytest.raises(ValueError):
        make_code("huffman")


def test_universality_smoke():
    # H(X_1^n)/n approaches 1 bit on fair-coin samples; the PPM mixture is
    # already inside 0.05 bits at this scale, LZ78 converges like 1/log n
    from mol import fair_coin

    src = fair_coin()
    for trial in range(2):
        x = src.sample(30000, seed=np.random.SeedSequence((99, trial)))
        assert abs(PpmCode(exact=True).evaluate(x) / len(x) - 1.0) <= 0.05
        lz_rate = Lz78Code().evaluate(x) / len(x)
        assert 1.0 < lz_rate < 1.35
