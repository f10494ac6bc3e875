"""
Reproducible ensemble runner.

Each single-shot experiment draws from its own counter-based stream keyed by
``(seed, sample_index)``, so a run gives the same readings whether samples
are processed serially or spread over worker threads. Reductions use exactly
rounded sums (``math.fsum``), which makes them independent of summation
order.
"""
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput

__all__ = ["RngStream", "EnsembleReport", "PostSelectedRun", "summarize",
           "run_ensemble", "run_postselected", "write_readings_csv", "write_histogram_csv"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def generator(self):
        key = [int(self.seed) & _MASK64, int(self.stream_id) & _MASK64]
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, stream_id):
        return RngStream(self.seed, stream_id)


@dataclass(frozen=True)
class EnsembleReport:
    n: int
    mean: float
    std_error: float
    bin_edges: np.ndarray
    counts: np.ndarray
    seed: int = None

    @property
    def histogram(self):
        return self.bin_edges, self.counts


def summarize(readings, bins=50, seed=None):
    x = np.asarray(readings, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("no readings to summarize")
    n = x.size
    mean = math.fsum(x) / n
    if n > 1:
        var = math.fsum((x - mean) ** 2) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    lo, hi = float(x.min()), float(x.max())
    scale = max(abs(lo), abs(hi), 1.0)
    # spans near the float resolution would give zero-width bins
    pad = 0.01 * (hi - lo) if hi - lo > 1e-9 * scale else 0.01 * scale
    counts, edges = np.histogram(x, bins=bins, range=(lo - pad, hi + pad))
    return EnsembleReport(n, mean, se, edges, counts, seed)


def _draw(experiment, seed, indices):
    return [experiment(RngStream(seed, int(i))) for i in indices]


def _collect(experiment, n, seed, workers):
    if n < 1:
        raise ValueError("need at least one sample")
    if workers <= 1:
        return _draw(experiment, seed, range(n))
    chunks = np.array_split(np.arange(n), workers)
    with ThreadPoolExecutor(workers) as pool:
        parts = pool.map(lambda idx: _draw(experiment, seed, idx), chunks)
        # chunks come back in submission order, so the concatenation is the serial order
        return [r for part in parts for r in part]


def run_ensemble(experiment, n, seed, bins=50, workers=1):
    """Run `n` independent single-shot experiments and summarize the readings.

    Parameters
    ----------
    experiment : callable
        ``experiment(stream: RngStream) -> float``; must draw randomness only
        from ``stream.generator()``.
    n : int
        Number of shots.
    seed : int
        Ensemble seed; shot ``k`` uses ``RngStream(seed, k)``.
    workers : int
        Thread count. Results do not depend on it.

    Returns
    -------
    report : EnsembleReport
    readings : ndarray
    """
    readings = np.asarray(_collect(experiment, n, seed, workers), dtype=float)
    return summarize(readings, bins, seed), readings


@dataclass(frozen=True)
class PostSelectedRun:
    report: EnsembleReport  # accepted readings only
    readings: np.ndarray
    accepted: np.ndarray
    trials: int

    @property
    def accepted_fraction(self):
        return float(np.count_nonzero(self.accepted)) / self.trials


def run_postselected(trial, n, seed, bins=50, workers=1):
    """Like :func:`run_ensemble` for ``trial(stream) -> (reading, success)``."""
    results = _collect(trial, n, seed, workers)
    readings = np.array([r for r, _ in results], dtype=float)
    accepted = np.array([bool(s) for _, s in results])
    if not accepted.any():
        raise EmptyInput("post-selection never succeeded")
    return PostSelectedRun(summarize(readings[accepted], bins, seed), readings, accepted, n)


def write_readings_csv(stream, readings, success=None, report=None):
    """Per-sample rows (sample_index, reading, success_flag) plus a summary row."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["sample_index", "reading", "success_flag"])
    if success is None:
        success = np.ones(len(readings), dtype=bool)
    for k, (r, s) in enumerate(zip(readings, success)):
        writer.writerow([k, format(float(r), ".17g"), int(bool(s))])
    if report is not None:
        writer.writerow(["summary", format(report.mean, ".17g"), format(report.std_error, ".17g")])


def write_histogram_csv(stream, report):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", "count"])
    edges = report.bin_edges
    for left, right, count in zip(edges[:-1], edges[1:], report.counts):
        writer.writerow([format(left, ".17g"), format(right, ".17g"), int(count)])
