"""Markov order lab: universal-code Markov order estimators for symbolic
sequences, with empirical entropy machinery, PPM and LZ78 backends, mutual
information bounds, and a simulation harness of stationary sources."""

from ._version import __version__
from .codes import (
    BACKENDS,
    BudgetError,
    CodeLengthFunction,
    Lz78Code,
    OffsetCode,
    PpmCode,
    UniformCode,
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
from .mi import (
    HilbergEstimate,
    MiReport,
    SplitPreconditionError,
    expected_mi_check,
    hilberg_estimate,
    mi_bound_rhs,
    mi_profile,
    mi_report,
    pointwise_mi,
)
from .orders import (
    OrderReport,
    RamTestResult,
    kt_order,
    mgz_order,
    ram_test,
    universal_markov_order,
)
from .sequence import Alphabet, AlphabetError, Sequence, ingest, uniform_alphabet
from .sources import (
    ExperimentConfig,
    SourceError,
    SourceModel,
    SourceOracles,
    consistency_experiment,
    experiment_summary_rows,
    fair_coin,
    make_iid,
    make_markov,
    sticky_chain,
)
from .stats import EntropyProfile, FrequencyIndex, build_index
from .verify import SuiteResult, VerifyBudget, run_suites

__all__ = [
    "__version__",
    "Alphabet",
    "AlphabetError",
    "BACKENDS",
    "BudgetError",
    "CodeLengthFunction",
    "EntropyProfile",
    "ExperimentConfig",
    "FrequencyIndex",
    "HilbergEstimate",
    "Lz78Code",
    "MiReport",
    "OffsetCode",
    "OrderReport",
    "PpmCode",
    "RamTestResult",
    "Sequence",
    "SourceError",
    "SourceModel",
    "SourceOracles",
    "SplitPreconditionError",
    "SuiteResult",
    "UniformCode",
    "VerifyBudget",
    "build_index",
    "consistency_experiment",
    "expected_mi_check",
    "experiment_summary_rows",
    "fair_coin",
    "hilberg_estimate",
    "ingest",
    "kraft_sum",
    "kt_order",
    "lz78_code_length",
    "lz78_entropy",
    "make_code",
    "make_iid",
    "make_markov",
    "mgz_order",
    "mi_bound_rhs",
    "mi_profile",
    "mi_report",
    "pointwise_mi",
    "ppm_bound_gap",
    "ppm_cond",
    "ppm_gap_lower",
    "ppm_gap_upper",
    "ppm_log_measure",
    "ppm_log_measure_closed",
    "ppm_semidistribution_entropy",
    "ram_test",
    "run_suites",
    "sticky_chain",
    "uniform_alphabet",
    "universal_markov_order",
]
