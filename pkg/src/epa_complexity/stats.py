"""Pearson/Kendall correlation and single-predictor OLS over measurement
matrices, with explicit missing cells."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import betainc

MISSING_TOKENS = ("-", "")


class StatsError(ValueError):
    pass


# --- matrices -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Rows are logs, columns are measures; missing cells are NaN."""

    row_ids: tuple[str, ...]
    column_ids: tuple[str, ...]
    cells: np.ndarray
    corner: str = "log"

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=float)
        if cells.shape != (len(self.row_ids), len(self.column_ids)):
            raise StatsError(
                f"cell block is {cells.shape}, expected {(len(self.row_ids), len(self.column_ids))}"
            )
        for kind, ids in (("row", self.row_ids), ("column", self.column_ids)):
            if len(set(ids)) != len(ids):
                raise StatsError(f"duplicate {kind} ids")
        object.__setattr__(self, "cells", cells)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.cells[:, self.column_ids.index(name)]
        except ValueError:
            raise StatsError(f"unknown column {name!r}") from None

    def missing(self) -> np.ndarray:
        return np.isnan(self.cells)

    def select_rows(self, ids: Sequence[str]) -> "MeasurementMatrix":
        idx = [self.row_ids.index(r) for r in ids]
        return MeasurementMatrix(tuple(ids), self.column_ids, self.cells[idx], self.corner)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.corner, *self.column_ids])
        for rid, row in zip(self.row_ids, self.cells.tolist()):
            w.writerow([rid, *(format_cell(v) for v in row)])
        return buf.getvalue()


def format_cell(v: float) -> str:
    """Shortest round-trip text for a matrix cell; ``-`` when missing."""
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-"
    if float(v).is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(float(v))


def read_matrix(source) -> MeasurementMatrix:
    """Parse a matrix CSV: header of column ids, first column of row ids,
    ``-`` or empty for missing cells."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8-sig", newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8-sig")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise StatsError("empty matrix file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise StatsError("matrix needs at least one data column")
    ids, cells = [], []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise StatsError(f"row {lineno} has {len(r)} cells, expected {len(header)}")
        ids.append(r[0].strip())
        vals = []
        for c in r[1:]:
            c = c.strip()
            if c in MISSING_TOKENS:
                vals.append(math.nan)
                continue
            try:
                vals.append(float(c))
            except ValueError:
                raise StatsError(f"row {lineno}: not a number: {c!r}") from None
        cells.append(vals)
    arr = np.array(cells, dtype=float).reshape(len(ids), len(header) - 1)
    return MeasurementMatrix(tuple(ids), tuple(header[1:]), arr, header[0])


# --- results ------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    p_value: float
    n: int
    method: str


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    slope_p_value: float
    r_squared: float
    residual_min: float
    residual_median: float
    residual_max: float
    n: int
    residuals: tuple[float, ...] = field(repr=False, default=())


def _paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise StatsError("series must be one-dimensional and of equal length")
    keep = ~(np.isnan(x) | np.isnan(y))
    x, y = x[keep], y[keep]
    if len(x) < 3:
        raise StatsError(f"need at least 3 complete pairs, got {len(x)}")
    return x, y


def t_two_sided(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t via the regularized incomplete beta."""
    if math.isinf(t):
        return 0.0
    return float(betainc(0.5 * df, 0.5, df / (df + t * t)))


# --- pearson ------------------------------------------------------------------

def pearson(x, y) -> CorrelationResult:
    x, y = _paired(x, y)
    n = len(x)
    dx = x - math.fsum(x) / n
    dy = y - math.fsum(y) / n
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0 or syy == 0:
        raise StatsError("zero variance in a series")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return CorrelationResult(r, 0.0, n, "pearson")
    df = n - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return CorrelationResult(r, t_two_sided(t, df), n, "pearson")


# --- kendall ------------------------------------------------------------------

def _tie_groups(sorted_vals: np.ndarray) -> np.ndarray:
    """Sizes of runs of equal values in a sorted array."""
    if len(sorted_vals) == 0:
        return np.zeros(0, dtype=np.int64)
    edges = np.flatnonzero(np.diff(sorted_vals) != 0) + 1
    bounds = np.concatenate(([0], edges, [len(sorted_vals)]))
    return np.diff(bounds).astype(np.int64)


def _count_inversions(a: list) -> int:
    """Strict inversions (i < j, a[i] > a[j]) by bottom-up merge sort."""
    n = len(a)
    a = list(a)
    buf = [None] * n
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[k] = a[j]
                    inv += mid - i
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            buf[k:hi] = a[i:mid] if i < mid else a[j:hi]
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return inv


def _pairs(t: np.ndarray) -> int:
    return int((t * (t - 1) // 2).sum())


def kendall_s(x: np.ndarray, y: np.ndarray):
    """S = concordant - discordant, plus tie-group sizes, in O(n log n)."""
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    x_ties = _tie_groups(xs)
    y_ties = _tie_groups(np.sort(y))
    # pairs tied in both coordinates
    joint = 0
    start = 0
    for g in x_ties.tolist():
        joint += _pairs(_tie_groups(ys[start:start + g]))
        start += g
    swaps = _count_inversions(ys.tolist())
    n0 = len(x) * (len(x) - 1) // 2
    s = n0 - _pairs(x_ties) - _pairs(y_ties) + joint - 2 * swaps
    return s, x_ties, y_ties


def _mahonian_cdf(n: int, k: int) -> float:
    """P(inversions <= k) for a uniform random permutation of n items."""
    counts = [1]
    for m in range(2, n + 1):
        nxt = [0] * (len(counts) + m - 1)
        for i, c in enumerate(counts):
            for j in range(m):
                nxt[i + j] += c
        counts = nxt
    return sum(counts[: k + 1]) / math.factorial(n)


EXACT_MAX_N = 10


def kendall(x, y) -> CorrelationResult:
    """Kendall tau-b with a two-sided p-value.

    The p-value is exact (permutation distribution of the inversion count)
    for n <= 10 without ties, otherwise the normal approximation with the
    tie-adjusted variance of S.
    """
    x, y = _paired(x, y)
    n = len(x)
    s, tx, ty = kendall_s(x, y)
    n0 = n * (n - 1) // 2
    nx, ny = n0 - _pairs(tx), n0 - _pairs(ty)
    if nx == 0 or ny == 0:
        raise StatsError("a series is constant (all values tied)")
    tau = s / math.sqrt(nx * ny)
    tau = max(-1.0, min(1.0, tau))
    ties = bool((tx > 1).any() or (ty > 1).any())
    if n <= EXACT_MAX_N and not ties:
        dis = (n0 - s) // 2
        c = min(dis, n0 - dis)
        p = min(1.0, 2.0 * _mahonian_cdf(n, c))
        return CorrelationResult(tau, p, n, "kendall")
    v0 = n * (n - 1) * (2 * n + 5)
    vt = int((tx * (tx - 1) * (2 * tx + 5)).sum())
    vu = int((ty * (ty - 1) * (2 * ty + 5)).sum())
    v1 = int((tx * (tx - 1)).sum()) * int((ty * (ty - 1)).sum()) / (2.0 * n * (n - 1))
    v2 = (
        int((tx * (tx - 1) * (tx - 2)).sum()) * int((ty * (ty - 1) * (ty - 2)).sum())
        / (9.0 * n * (n - 1) * (n - 2))
    )
    var_s = (v0 - vt - vu) / 18.0 + v1 + v2
    if var_s <= 0:
        return CorrelationResult(tau, 1.0, n, "kendall")
    z = s / math.sqrt(var_s)
    return CorrelationResult(tau, math.erfc(abs(z) / math.sqrt(2.0)), n, "kendall")


METHODS = {"pearson": pearson, "kendall": kendall}


# --- regression ---------------------------------------------------------------

def ols(x, y) -> RegressionResult:
    """Least-squares fit of y = intercept + slope * x."""
    x, y = _paired(x, y)
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = x - mx
    dy = y - my
    sxx = math.fsum(dx * dx)
    if sxx == 0:
        raise StatsError("degenerate predictor (zero variance)")
    slope = math.fsum(dx * dy) / sxx
    intercept = my - slope * mx
    resid = y - (intercept + slope * x)
    ssr = math.fsum(resid * resid)
    sst = math.fsum(dy * dy)
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    df = n - 2
    se = math.sqrt(ssr / df / sxx)
    if se == 0:
        p = 0.0 if slope != 0 else 1.0
    else:
        p = t_two_sided(slope / se, df)
    return RegressionResult(
        slope=slope,
        intercept=intercept,
        slope_p_value=p,
        r_squared=r2,
        residual_min=float(resid.min()),
        residual_median=float(np.median(resid)),
        residual_max=float(resid.max()),
        n=n,
        residuals=tuple(resid.tolist()),
    )


# --- matrix level -------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationCell:
    complexity: str
    quality: str
    method: str
    coefficient: float | None
    p_value: float | None
    n: int
    significant_at: float | None
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "complexity": self.complexity,
            "quality": self.quality,
            "method": self.method,
            "coefficient": self.coefficient,
            "p_value": self.p_value,
            "n": self.n,
            "significant_at": self.significant_at,
        }


def aligned(complexity: MeasurementMatrix, quality: MeasurementMatrix, missing: str = "listwise"):
    """Restrict both matrices to their shared rows (in complexity order).

    ``listwise`` additionally drops every row with a missing cell in either
    matrix, so all column pairs share one sample; ``pairwise`` keeps those
    rows and leaves per-pair deletion to the estimators.
    """
    if missing not in ("listwise", "pairwise"):
        raise ValueError(f"unknown missing-value policy {missing!r}")
    qrows = set(quality.row_ids)
    shared = [r for r in complexity.row_ids if r in qrows]
    if not shared:
        raise StatsError("complexity and quality matrices share no rows")
    a = complexity.select_rows(shared)
    b = quality.select_rows(shared)
    if missing == "listwise":
        keep = ~(a.missing().any(axis=1) | b.missing().any(axis=1))
        ids = [r for r, k in zip(shared, keep.tolist()) if k]
        if not ids:
            raise StatsError("no row is complete in both matrices")
        a, b = a.select_rows(ids), b.select_rows(ids)
    return a, b


def correlate_matrices(
    complexity: MeasurementMatrix,
    quality: MeasurementMatrix,
    method: str = "kendall",
    alpha_levels: Sequence[float] = (0.01, 0.05),
    missing: str = "listwise",
) -> list[CorrelationCell]:
    """One result per (complexity column, quality column), ordered by column
    indices. ``significant_at`` is the smallest alpha with p <= alpha."""
    fn = METHODS.get(method)
    if fn is None:
        raise ValueError(f"unknown method {method!r}")
    a, b = aligned(complexity, quality, missing)
    levels = sorted(alpha_levels)
    out = []
    for ci, cname in enumerate(a.column_ids):
        x = a.cells[:, ci]
        for qi, qname in enumerate(b.column_ids):
            y = b.cells[:, qi]
            n = int((~(np.isnan(x) | np.isnan(y))).sum())
            try:
                res = fn(x, y)
            except StatsError as exc:
                out.append(CorrelationCell(cname, qname, method, None, None, n, None, str(exc)))
                continue
            sig = next((lv for lv in levels if res.p_value <= lv), None)
            out.append(CorrelationCell(cname, qname, method, res.coefficient, res.p_value, res.n, sig))
    return out


def count_significant(cells: Sequence[CorrelationCell], alpha: float) -> int:
    return sum(1 for c in cells if c.p_value is not None and c.p_value <= alpha)


def overlap(pearson_cells: Sequence[CorrelationCell], kendall_cells: Sequence[CorrelationCell], alpha: float = 0.05):
    """Pairs significant at ``alpha`` under both methods.

    Returns ``{(complexity, quality): sign}`` where sign is ``"+"`` or
    ``"-"``, taken from the Kendall coefficient.
    """
    kmap = {(c.complexity, c.quality): c for c in kendall_cells}
    out = {}
    for p in pearson_cells:
        k = kmap.get((p.complexity, p.quality))
        if k is None or p.p_value is None or k.p_value is None:
            continue
        if p.p_value <= alpha and k.p_value <= alpha:
            out[(p.complexity, p.quality)] = "-" if k.coefficient < 0 else "+"
    return out


@dataclass(frozen=True)
class RegressionRow:
    predictor: str
    outcome: str
    result: RegressionResult

    def as_dict(self) -> dict:
        r = self.result
        return {
            "predictor": self.predictor,
            "outcome": self.outcome,
            "residual_min": r.residual_min,
            "residual_median": r.residual_median,
            "residual_max": r.residual_max,
            "slope": r.slope,
            "intercept": r.intercept,
            "p_value": r.slope_p_value,
            "r_squared": r.r_squared,
            "n": r.n,
        }


def regress(
    complexity: MeasurementMatrix,
    quality: MeasurementMatrix,
    pairs: Sequence[tuple[str, str]],
    missing: str = "listwise",
) -> list[RegressionRow]:
    for pred, outcome in pairs:
        if pred not in complexity.column_ids:
            raise StatsError(f"unknown column {pred!r}")
        if outcome not in quality.column_ids:
            raise StatsError(f"unknown column {outcome!r}")
    a, b = aligned(complexity, quality, missing)
    return [RegressionRow(p, o, ols(a.column(p), b.column(o))) for p, o in pairs]
