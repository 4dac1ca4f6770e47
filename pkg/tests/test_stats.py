import io
import math
import random

import numpy as np
import pytest
from scipy import stats as sps

from epa_complexity.stats import (
    MeasurementMatrix, StatsError, aligned, correlate_matrices, count_significant, format_cell, kendall,
    ols, overlap, pearson, read_matrix, regress,
)

from oracles import kendall_tau_b


def test_pearson_trivial():
    assert pearson([1, 2, 3], [2, 4, 6]).coefficient == pytest.approx(1.0)
    r = pearson([1, 2, 3], [3, 2, 1])
    assert r.coefficient == pytest.approx(-1.0) and r.p_value == 0.0
    with pytest.raises(StatsError):
        pearson([1, 2], [1, 2])
    with pytest.raises(StatsError):
        pearson([1, 1, 1], [1, 2, 3])


def test_pearson_p_matches_scipy():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(3, 40))
        x = rng.normal(size=n)
        y = 0.3 * x + rng.normal(size=n)
        ref = sps.pearsonr(x, y)
        got = pearson(x, y)
        assert got.coefficient == pytest.approx(ref.statistic, abs=1e-12)
        assert got.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-300)


def test_kendall_trivial():
    assert kendall([1, 2, 3], [1, 2, 3]).coefficient == 1.0
    assert kendall([1, 2, 3], [3, 1, 2]).coefficient == pytest.approx(-1 / 3)
    with pytest.raises(StatsError):
        kendall([1, 1, 1], [1, 2, 3])


def test_kendall_vs_quadratic_oracle_with_ties():
    rng = random.Random(41)
    for _ in range(500):
        n = rng.randint(3, 50)
        x = [rng.randint(0, rng.randint(1, 8)) for _ in range(n)]
        y = [rng.randint(0, rng.randint(1, 8)) for _ in range(n)]
        if len(set(x)) == 1 or len(set(y)) == 1:
            continue
        assert kendall(x, y).coefficient == pytest.approx(kendall_tau_b(x, y), abs=1e-12)


def test_kendall_p_values_match_scipy():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(3, 40))
        x = rng.integers(0, 6, size=n).astype(float)
        y = (x + rng.integers(0, 4, size=n)).astype(float)
        if len(set(x)) == 1 or len(set(y)) == 1:
            continue
        ties = len(set(x)) < n or len(set(y)) < n
        method = "exact" if n <= 10 and not ties else "asymptotic"
        ref = sps.kendalltau(x, y, method=method)
        got = kendall(x, y)
        assert got.coefficient == pytest.approx(ref.statistic, abs=1e-12)
        assert got.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_kendall_exact_small_no_ties():
    for perm in ([2, 1, 3, 4, 5], [5, 4, 3, 2, 1], [3, 1, 4, 5, 2, 6, 8, 7]):
        ref = sps.kendalltau(range(len(perm)), perm, method="exact")
        assert kendall(list(range(len(perm))), perm).p_value == pytest.approx(ref.pvalue, rel=1e-12)


def test_symmetry_and_monotone_invariance():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=25), rng.normal(size=25)
    for f in (pearson, kendall):
        assert f(x, y).coefficient == pytest.approx(f(y, x).coefficient, abs=1e-12)
    assert pearson(3 * x + 1, y).coefficient == pytest.approx(pearson(x, y).coefficient)
    assert pearson(-2 * x, y).coefficient == pytest.approx(-pearson(x, y).coefficient)
    assert kendall(np.exp(x), y).coefficient == pytest.approx(kendall(x, y).coefficient)
    assert kendall(-x ** 3, y).coefficient == pytest.approx(-kendall(x, y).coefficient)


def test_missing_pairs_are_dropped():
    x, y = [1, 2, 3, 4.5, 2], [2, 1, 4, 3, 3]
    base = (pearson(x, y), kendall(x, y), ols(x, y))
    xx, yy = x + [math.nan, 7], y + [9, math.nan]
    assert (pearson(xx, yy), kendall(xx, yy), ols(xx, yy)) == base


def test_ols_exact_and_closed_form():
    r = ols([0, 1, 2], [1, 3, 5])
    assert (r.slope, r.intercept, r.r_squared) == pytest.approx((2, 1, 1))
    assert max(abs(e) for e in r.residuals) < 1e-12
    r = ols([0, 1, 2], [0, 1, 1])
    assert r.slope == pytest.approx(0.5) and r.intercept == pytest.approx(1 / 6)
    assert r.r_squared == pytest.approx(0.75)
    assert r.residuals == pytest.approx((-1 / 6, 1 / 3, -1 / 6))
    assert (r.residual_min, r.residual_median, r.residual_max) == pytest.approx((-1 / 6, -1 / 6, 1 / 3))
    with pytest.raises(StatsError, match="degenerate predictor"):
        ols([1, 1, 1], [1, 2, 3])


def test_ols_even_median_and_orthogonality():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = 2 * int(rng.integers(2, 15))
        x = rng.normal(size=n) * 10
        y = 2 * x + rng.normal(size=n)
        r = ols(x, y)
        res = np.asarray(r.residuals)
        scale = np.abs(y).sum()
        assert abs(res.sum()) <= 1e-9 * scale
        assert abs((res * x).sum()) <= 1e-9 * scale * np.abs(x).max()
        s = np.sort(res)
        assert r.residual_median == pytest.approx((s[n // 2 - 1] + s[n // 2]) / 2)
        ref = sps.linregress(x, y)
        assert r.slope_p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-300)
        assert r.r_squared == pytest.approx(ref.rvalue ** 2)


CSV = "log,a,b\nL1,1,2\nL2,2,-\nL3,3,5\nL4,4,\nL5,5,11\n"


def test_matrix_io_roundtrip():
    m = read_matrix(io.StringIO(CSV))
    assert m.row_ids == ("L1", "L2", "L3", "L4", "L5") and m.column_ids == ("a", "b")
    assert np.isnan(m.cells[1, 1]) and np.isnan(m.cells[3, 1])
    again = read_matrix(io.StringIO(m.to_csv()))
    assert np.array_equal(again.cells, m.cells, equal_nan=True)
    assert format_cell(0.1 + 0.2) == "0.30000000000000004" and format_cell(3.0) == "3"
    with pytest.raises(StatsError):
        read_matrix(io.StringIO("log,a\nL1,x\n"))
    with pytest.raises(StatsError):
        MeasurementMatrix(("r", "r"), ("a",), [[1], [2]])


def test_correlate_identical_single_column():
    m = MeasurementMatrix(("1", "2", "3", "4"), ("x",), [[1], [3], [2], [5]])
    cells = correlate_matrices(m, m, "pearson")
    assert len(cells) == 1 and cells[0].coefficient == pytest.approx(1.0)
    assert cells[0].significant_at == 0.01


def test_listwise_vs_pairwise():
    comp = MeasurementMatrix(("1", "2", "3", "4", "5"), ("x",), [[1], [2], [3], [4], [5]])
    qual = read_matrix(io.StringIO("log,q1,q2\n1,1,2\n2,2,-\n3,3,1\n4,5,3\n5,4,5\n"))
    lw = {c.quality: c for c in correlate_matrices(comp, qual, "kendall")}
    pw = {c.quality: c for c in correlate_matrices(comp, qual, "kendall", missing="pairwise")}
    assert lw["q1"].n == 4 and pw["q1"].n == 5 and lw["q2"].n == pw["q2"].n == 4
    a, _ = aligned(comp, qual)
    assert a.row_ids == ("1", "3", "4", "5")


def test_correlate_errors_and_overlap():
    a = MeasurementMatrix(("1", "2", "3"), ("x", "c"), [[1, 1], [2, 1], [3, 1]])
    b = MeasurementMatrix(("1", "2", "3"), ("y",), [[3], [2], [1]])
    cells = correlate_matrices(a, b, "kendall")
    assert cells[1].coefficient is None and cells[1].error
    with pytest.raises(StatsError):
        correlate_matrices(a, MeasurementMatrix(("9",), ("y",), [[1]]))
    assert count_significant(cells, 0.05) == 0  # n = 3: exact Kendall p = 1/3
    ids = tuple(str(i) for i in range(8))
    a = MeasurementMatrix(ids, ("up", "flat"), [[i, i % 2] for i in range(8)])
    b = MeasurementMatrix(ids, ("down",), [[10 - i * i] for i in range(8)])
    ov = overlap(correlate_matrices(a, b, "pearson"), correlate_matrices(a, b, "kendall"), 0.05)
    assert ov == {("up", "down"): "-"}


def test_regress_unknown_column():
    m = MeasurementMatrix(("1", "2", "3"), ("x",), [[0], [1], [2]])
    with pytest.raises(StatsError, match="unknown column"):
        regress(m, m, [("nope", "x")])
    rows = regress(m, MeasurementMatrix(("1", "2", "3"), ("y",), [[1], [3], [5]]), [("x", "y")])
    assert rows[0].result.r_squared == pytest.approx(1.0)
