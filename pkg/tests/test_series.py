import math
from fractions import Fraction

import numpy as np
import pytest

from chebybias.primes import CheckpointGrid, SieveConfig, iter_prime_blocks, make_grid
from chebybias.series import (
    PrimeClassifier,
    accumulate_series,
    density_report,
    fit_loglog_slope,
    mertens_residual,
    residual_series,
    residue_table_classifier,
    scale_values,
)
from oracles import trial_primes, weighted_class_sum


def blocks(limit, **kw):
    return iter_prime_blocks(SieveConfig(limit, **kw))


@pytest.fixture(scope="module")
def primes_1e5():
    return trial_primes(10**5)


def test_counting_race_lead_before_crossing():
    grid = CheckpointGrid((26860,))
    series = accumulate_series(residue_table_classifier(4), 0.0, grid, blocks(26860))
    assert series.column("class_3")[0] >= series.column("class_1")[0]


def test_counting_race_first_violation_at_26861():
    grid = CheckpointGrid((26860, 26861))
    series = accumulate_series(residue_table_classifier(4), 0.0, grid, blocks(26861))
    assert series.column("class_3")[0] >= series.column("class_1")[0]
    assert series.column("class_1")[1] > series.column("class_3")[1]


def test_weighted_sums_match_brute_force_q4_x100(primes_1e5):
    grid = CheckpointGrid((100,))
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(100))
    for a in (1, 3):
        expect = weighted_class_sum(primes_1e5, 4, a, 0.5, 100)
        assert abs(series.column(f"class_{a}")[0] - expect) < 1e-12


def test_oracle_equivalence_to_1e5(primes_1e5):
    grid = make_grid(16, 10**5, 1.6)
    for q in (4, 8, 60):
        series = accumulate_series(residue_table_classifier(q), 0.5, grid, blocks(10**5))
        for a in [r for r in range(1, q) if math.gcd(r, q) == 1]:
            col = series.column(f"class_{a}")
            for i, x in enumerate(grid.points):
                expect = weighted_class_sum(primes_1e5, q, a, 0.5, x)
                assert abs(col[i] - expect) < 1e-12


def test_unordered_stream_rejected():
    grid = CheckpointGrid((100,))
    bad = [np.array([5, 3], dtype=np.int64)]
    with pytest.raises(ValueError):
        accumulate_series(residue_table_classifier(4), 0.5, grid, bad)
    bad2 = [np.array([5, 7]), np.array([7, 11])]
    with pytest.raises(ValueError):
        accumulate_series(residue_table_classifier(4), 0.5, grid, bad2)


def test_monotone_and_additive_to_1e6():
    grid = make_grid(16, 10**6, 1.2)
    series = accumulate_series(residue_table_classifier(60), 0.5, grid, blocks(10**6))
    total = np.zeros(len(grid))
    for name in series.metadata["class_columns"]:
        col = series.column(name)
        assert np.all(np.diff(col) >= 0)
        total += col
    total += series.column("excluded")
    assert np.max(np.abs(total - series.column("all"))) < 1e-12


def test_thread_count_does_not_change_bits():
    grid = make_grid(16, 10**6, 1.3)
    runs = []
    for threads in (1, 2, 4):
        series = accumulate_series(
            residue_table_classifier(4), 0.5, grid,
            blocks(10**6, segment_size=1 << 16, thread_count=threads),
        )
        runs.append(np.stack([series.column(c) for c in series.column_names()]))
    assert np.array_equal(runs[0], runs[1])
    assert np.array_equal(runs[0], runs[2])


def test_residual_identity_at_slope_zero():
    grid = make_grid(16, 10**4, 2.0)
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(10**4))
    out = residual_series(series, {"class_3": 1.0, "class_1": -1.0}, 0.0)
    combo = series.column("class_3") - series.column("class_1")
    assert np.allclose(out.column("residual"), combo, atol=0)


def test_residual_bounded_q4_to_1e8():
    grid = make_grid(10**3, 10**8, 1.05)
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(10**8))
    out = residual_series(series, {"class_3": 1.0, "class_1": -1.0}, 0.5)
    res = out.column("residual")
    assert np.max(res) - np.min(res) < 1.5
    assert np.max(np.abs(res)) < 2.0


def test_mod7_subfield_classes_near_flat():
    grid = make_grid(10**4, 10**7, 1.1)
    cls = residue_table_classifier(7, groups=[[1, 6], [2, 5], [3, 4]])
    series = accumulate_series(cls, 0.5, grid, blocks(10**7))
    for name in series.metadata["class_columns"]:
        out = residual_series(series, {"all": 1.0, name: -3.0}, 0.0)
        res = out.column("residual")
        assert np.max(res) - np.min(res) < 1.0


def test_residual_domain_error_below_e():
    grid = CheckpointGrid((2, 100))
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(100))
    with pytest.raises(ValueError):
        residual_series(series, {"class_1": 1.0}, 0.5)


def test_fit_recovers_synthetic_slope():
    grid = make_grid(16, 10**6, 1.5)
    x = np.asarray(grid.points, dtype=float)
    col = 0.5 * np.log(np.log(x)) + 3.0
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(16))
    series = series.with_column("synthetic", col)
    slope, intercept = fit_loglog_slope(series, "synthetic")
    assert abs(slope - 0.5) < 1e-9
    assert abs(intercept - 3.0) < 1e-9


def test_fit_constant_column():
    grid = make_grid(16, 10**6, 1.5)
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(16))
    series = series.with_column("const", np.full(len(grid), 2.5))
    slope, _ = fit_loglog_slope(series, "const")
    assert abs(slope) < 1e-9


def test_fit_requires_enough_checkpoints():
    grid = make_grid(16, 10**3, 2.0)
    series = accumulate_series(residue_table_classifier(4), 0.5, grid, blocks(16))
    series = series.with_column("c", np.zeros(len(grid)))
    with pytest.raises(ValueError):
        fit_loglog_slope(series, "c", x_lo=900)


def test_mertens_all_primes():
    grid = make_grid(10**3, 10**8, 1.3)
    cls = PrimeClassifier(
        label_count=1, labels=("any",), expected_density=(Fraction(1),),
        classify=lambda p: 0, classify_block=lambda b: np.zeros(b.size, dtype=np.int64),
    )
    out = mertens_residual(cls, 0, grid, blocks(10**8))
    assert abs(out.column("residual")[-1] - 0.2615) < 0.01


def test_mertens_class_residual_bounded():
    grid = make_grid(10**3, 10**8, 1.2)
    out = mertens_residual(residue_table_classifier(4), 0, grid, blocks(10**8))
    res = out.column("residual")
    assert np.max(np.abs(res)) < 1.0


def test_mertens_empty_class_exact():
    grid = make_grid(16, 10**4, 2.0)
    cls = PrimeClassifier(
        label_count=2, labels=("all", "none"),
        expected_density=(Fraction(2, 3), Fraction(1, 3)),
        classify=lambda p: 0, classify_block=lambda b: np.zeros(b.size, dtype=np.int64),
    )
    out = mertens_residual(cls, 1, grid, blocks(10**4))
    expect = -float(Fraction(1, 3)) * scale_values(grid, "loglog")
    assert np.array_equal(out.column("residual"), expect)


def test_density_q4_converges():
    grid = CheckpointGrid((10**7,))
    series = accumulate_series(residue_table_classifier(4), 0.0, grid, blocks(10**7))
    report = density_report(series)
    for a in (1, 3):
        assert abs(report.column(f"ratio_{a}")[0] - 0.5) < 0.005


def test_density_single_class_exact():
    grid = CheckpointGrid((100,))
    cls = PrimeClassifier(
        label_count=1, labels=("only",), expected_density=(Fraction(1),),
        classify=lambda p: 0, classify_block=lambda b: np.zeros(b.size, dtype=np.int64),
    )
    series = accumulate_series(cls, 0.0, grid, blocks(100))
    report = density_report(series)
    assert report.column("ratio_only")[0] == 1.0


def test_density_mod7_subfield():
    grid = CheckpointGrid((10**7,))
    cls = residue_table_classifier(7, groups=[[1, 6], [2, 5], [3, 4]])
    series = accumulate_series(cls, 0.0, grid, blocks(10**7))
    report = density_report(series)
    for name in ("ratio_1,6", "ratio_2,5", "ratio_3,4"):
        assert abs(report.column(name)[0] - 1 / 3) < 0.02 / 3


def test_density_undefined_before_first_prime():
    grid = CheckpointGrid((2, 10))
    cls = residue_table_classifier(4)
    series = accumulate_series(cls, 0.0, grid, blocks(10))
    # x=2 sees only the excluded prime 2, so no unit-class prime yet
    report = density_report(series)
    assert math.isnan(report.column("ratio_1")[0])
    assert not math.isnan(report.column("ratio_1")[1])
