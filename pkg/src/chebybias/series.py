"""Numerically stable accumulation of weighted prime sums at checkpoints.

The central object is a CheckpointSeries: one row per grid point, one
column per accumulated quantity (per-class sums, predictions,
residuals).  Sums use compensated (Neumaier) accumulation across
segment blocks; within a block numpy's pairwise summation is accurate
enough that the cross-block carry dominates the error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .primes import CheckpointGrid

E = math.e


class KahanSum:
    """Neumaier-compensated running sum of float blocks."""

    __slots__ = ("total", "compensation", "count")

    def __init__(self, total: float = 0.0, compensation: float = 0.0, count: int = 0):
        self.total = total
        self.compensation = compensation
        self.count = count

    def add(self, x: float, n: int = 1):
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.compensation += (self.total - t) + x
        else:
            self.compensation += (x - t) + self.total
        self.total = t
        self.count += n

    def add_block(self, values: np.ndarray):
        if values.size:
            self.add(float(np.sum(values)), values.size)

    @property
    def value(self) -> float:
        return self.total + self.compensation

    def state(self):
        return {"total": self.total, "compensation": self.compensation, "count": self.count}

    @classmethod
    def from_state(cls, d):
        return cls(d["total"], d["compensation"], d["count"])


@dataclass
class WeightedSum:
    """Running sum of p^(-s) terms with its compensation carry."""

    s: float = 0.5
    accumulator: KahanSum = field(default_factory=KahanSum)

    @property
    def value(self) -> float:
        return self.accumulator.value

    @property
    def compensation(self) -> float:
        return self.accumulator.compensation

    @property
    def count(self) -> int:
        return self.accumulator.count

    def add_primes(self, primes: np.ndarray):
        self.accumulator.add_block(weight_block(primes, self.s))


def weight_block(primes: np.ndarray, s: float) -> np.ndarray:
    """p^(-s) for a block of primes, as float64."""
    if s == 0.0:
        return np.ones(primes.size, dtype=np.float64)
    p = primes.astype(np.float64)
    if s == 0.5:
        return 1.0 / np.sqrt(p)
    if s == 1.0:
        return 1.0 / p
    return p ** (-s)


@dataclass(frozen=True)
class PrimeClassifier:
    """Total map prime -> class label; label -1 means excluded (ramified)."""

    label_count: int
    labels: tuple[str, ...]
    expected_density: tuple[Fraction, ...]
    classify: Callable[[int], int]
    classify_block: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if len(self.labels) != self.label_count:
            raise ValueError("labels length must equal label_count")
        if len(self.expected_density) != self.label_count:
            raise ValueError("expected_density length must equal label_count")

    def block_labels(self, primes: np.ndarray) -> np.ndarray:
        if self.classify_block is not None:
            return self.classify_block(primes)
        return np.fromiter(
            (self.classify(int(p)) for p in primes), dtype=np.int64, count=primes.size
        )


def residue_table_classifier(q: int, groups: list[list[int]] | None = None,
                             names: list[str] | None = None) -> PrimeClassifier:
    """Classify primes by residue mod q; non-units (p | q) are excluded.

    groups optionally merges unit residues into labelled classes (used
    for Frobenius classes of subfields); default is one class per unit.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    units = [a for a in range(1, q) if math.gcd(a, q) == 1]
    if groups is None:
        groups = [[a] for a in units]
    seen = [a for grp in groups for a in grp]
    if sorted(seen) != sorted(units):
        raise ValueError("groups must partition the units mod q")
    if names is None:
        names = [",".join(str(a) for a in grp) for grp in groups]
    table = np.full(q, -1, dtype=np.int64)
    for idx, grp in enumerate(groups):
        for a in grp:
            table[a] = idx
    phi = len(units)
    density = tuple(Fraction(len(grp), phi) for grp in groups)

    def classify(p: int) -> int:
        return int(table[p % q])

    def classify_block(primes: np.ndarray) -> np.ndarray:
        return table[primes % q]

    return PrimeClassifier(
        label_count=len(groups),
        labels=tuple(names),
        expected_density=density,
        classify=classify,
        classify_block=classify_block,
    )


@dataclass
class CheckpointSeries:
    """Columns of per-checkpoint values over a shared grid."""

    grid: CheckpointGrid
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.grid)
        for name, col in self.columns.items():
            if len(col) != n:
                raise ValueError(f"column {name!r} has {len(col)} entries, grid has {n}")

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def with_column(self, name: str, values: np.ndarray) -> "CheckpointSeries":
        cols = dict(self.columns)
        cols[name] = np.asarray(values, dtype=np.float64)
        return CheckpointSeries(self.grid, cols, dict(self.metadata))

    def column_names(self) -> list[str]:
        return list(self.columns)


def scale_values(grid: CheckpointGrid, scale: str) -> np.ndarray:
    """loglog x over the grid, or log n for degree-indexed grids."""
    x = np.asarray(grid.points, dtype=np.float64)
    if scale == "loglog":
        if grid.points[0] <= E:
            raise ValueError("log log x undefined or nonpositive at checkpoint <= e")
        return np.log(np.log(x))
    if scale == "logn":
        return np.log(x)
    raise ValueError(f"unknown scale {scale!r}")


def linear_combination(series: CheckpointSeries, coeffs: dict[str, float]) -> np.ndarray:
    out = np.zeros(len(series.grid))
    for name, c in coeffs.items():
        if name not in series.columns:
            raise ValueError(f"unknown column {name!r}")
        out += c * series.columns[name]
    return out


def residual_series(series: CheckpointSeries, combo: dict[str, float], slope: float,
                    scale: str = "loglog", name: str = "residual") -> CheckpointSeries:
    """Append combo - slope * scale(x) as a new column; inputs untouched."""
    values = linear_combination(series, combo) - slope * scale_values(series.grid, scale)
    return series.with_column(name, values)


def fit_loglog_slope(series: CheckpointSeries, column: str, x_lo: int = 16) -> tuple[float, float]:
    """Least-squares slope and intercept of a column against log log x."""
    x = np.asarray(series.grid.points, dtype=np.float64)
    keep = x >= max(x_lo, 16)
    if int(keep.sum()) < 8:
        raise ValueError("need at least 8 checkpoints with x >= max(x_lo, 16)")
    t = np.log(np.log(x[keep]))
    y = series.column(column)[keep]
    slope, intercept = np.polyfit(t, y, 1)
    return float(slope), float(intercept)


class SeriesJob:
    """One accumulation task fed block-wise by the streaming driver.

    Subclasses implement feed(primes) and snapshot(x) -> {column: value},
    where x is the checkpoint value being emitted.
    """

    def feed(self, primes: np.ndarray):
        raise NotImplementedError

    def snapshot(self, x: int) -> dict[str, float]:
        raise NotImplementedError

    def metadata(self) -> dict:
        return {}

    def state(self) -> dict:
        raise NotImplementedError

    def load_state(self, state: dict):
        raise NotImplementedError


class ClassSumJob(SeriesJob):
    """Per-class weighted sums plus the all-prime and excluded columns."""

    def __init__(self, classifier: PrimeClassifier, s: float):
        self.classifier = classifier
        self.s = s
        self.class_sums = [KahanSum() for _ in range(classifier.label_count)]
        self.excluded_sum = KahanSum()
        self.all_sum = KahanSum()

    def feed(self, primes: np.ndarray):
        weights = weight_block(primes, self.s)
        labels = self.classifier.block_labels(primes)
        self.all_sum.add_block(weights)
        for idx, acc in enumerate(self.class_sums):
            sel = labels == idx
            if sel.any():
                acc.add_block(weights[sel])
        sel = labels == -1
        if sel.any():
            self.excluded_sum.add_block(weights[sel])

    def snapshot(self, x: int) -> dict[str, float]:
        row = {f"class_{name}": acc.value
               for name, acc in zip(self.classifier.labels, self.class_sums)}
        row["excluded"] = self.excluded_sum.value
        row["all"] = self.all_sum.value
        return row

    def metadata(self) -> dict:
        return {
            "s": self.s,
            "class_columns": [f"class_{name}" for name in self.classifier.labels],
            "excluded_column": "excluded",
            "all_column": "all",
            "expected_density": [str(d) for d in self.classifier.expected_density],
        }

    def state(self) -> dict:
        return {
            "class_sums": [acc.state() for acc in self.class_sums],
            "excluded_sum": self.excluded_sum.state(),
            "all_sum": self.all_sum.state(),
        }

    def load_state(self, state: dict):
        self.class_sums = [KahanSum.from_state(d) for d in state["class_sums"]]
        self.excluded_sum = KahanSum.from_state(state["excluded_sum"])
        self.all_sum = KahanSum.from_state(state["all_sum"])


def as_blocks(primes) -> Iterable[np.ndarray]:
    """Normalize a prime stream (ints or int arrays) to int64 blocks."""
    if isinstance(primes, np.ndarray):
        yield primes.astype(np.int64, copy=False)
        return
    buf = []
    for item in primes:
        if isinstance(item, np.ndarray):
            if buf:
                yield np.array(buf, dtype=np.int64)
                buf = []
            yield item.astype(np.int64, copy=False)
        else:
            buf.append(int(item))
            if len(buf) >= 65536:
                yield np.array(buf, dtype=np.int64)
                buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)


def drive_jobs(jobs: list[SeriesJob], grid: CheckpointGrid, primes,
               row_callback=None, start_index: int = 0) -> list[CheckpointSeries]:
    """Feed ascending prime blocks to every job, snapshotting at grid points.

    Raises on out-of-order input.  row_callback(i, x, rows) is invoked as
    each checkpoint completes, before the next block is consumed.
    """
    points = grid.points
    n = len(points)
    idx = start_index
    last = 0
    rows: list[list[dict[str, float]]] = [[] for _ in jobs]

    def _emit():
        nonlocal idx
        snaps = [job.snapshot(points[idx]) for job in jobs]
        for r, s in zip(rows, snaps):
            r.append(s)
        if row_callback is not None:
            row_callback(idx, points[idx], snaps)
        idx += 1

    for block in as_blocks(primes):
        if block.size == 0:
            continue
        if int(block[0]) <= last or np.any(np.diff(block) <= 0):
            raise ValueError("prime stream must be strictly increasing")
        last = int(block[-1])
        pos = 0
        while idx < n and points[idx] < int(block[-1]):
            cut = int(np.searchsorted(block, points[idx], side="right"))
            if cut > pos:
                for job in jobs:
                    job.feed(block[pos:cut])
                pos = cut
            _emit()
        if pos < block.size:
            for job in jobs:
                job.feed(block[pos:])
    while idx < n:
        _emit()

    out = []
    for job, job_rows in zip(jobs, rows):
        names = list(job_rows[0])
        cols = {name: np.array([r[name] for r in job_rows]) for name in names}
        out.append(CheckpointSeries(grid, cols, job.metadata()))
    return out


def accumulate_series(classifier: PrimeClassifier, s: float, grid: CheckpointGrid,
                      primes) -> CheckpointSeries:
    """Per-class sums of p^(-s) at every checkpoint of the grid."""
    return drive_jobs([ClassSumJob(classifier, s)], grid, primes)[0]


def mertens_residual(classifier: PrimeClassifier, label: int, grid: CheckpointGrid,
                     primes) -> CheckpointSeries:
    """Sum of 1/p over one class minus density * loglog x (expected bounded)."""
    series = accumulate_series(classifier, 1.0, grid, primes)
    density = float(classifier.expected_density[label])
    col = f"class_{classifier.labels[label]}"
    out = residual_series(series, {col: 1.0}, density, "loglog")
    out.metadata["density"] = density
    return out


def density_report(series: CheckpointSeries) -> CheckpointSeries:
    """Per-label fraction count_l(x) / total(x) for an s=0 counting series.

    Checkpoints where no prime has been counted yet report NaN.
    """
    meta = series.metadata
    if meta.get("s") != 0.0:
        raise ValueError("density_report requires an s=0 counting series")
    class_cols = meta["class_columns"]
    total = np.zeros(len(series.grid))
    for name in class_cols:
        total += series.column(name)
    cols = {}
    with np.errstate(invalid="ignore", divide="ignore"):
        for name in class_cols:
            ratio = np.where(total > 0, series.column(name) / total, np.nan)
            cols["ratio_" + name.removeprefix("class_")] = ratio
    return CheckpointSeries(series.grid, cols, dict(meta))
