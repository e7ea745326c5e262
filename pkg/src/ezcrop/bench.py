"""Microbenchmark: energy metric vs rank metric across slice sizes.

Times the per-slice metric computation only (no I/O, no scoring plumbing)
on identical random n x n slices, takes the median over repetitions after
a discarded warm-up, and fits a log-log growth slope per metric. BLAS/FFT
worker pools are pinned to one thread by default so wall times reflect
algorithmic growth rather than parallel speedup; pass ``threads`` to probe
the parallel path instead.

Input data is deterministic for a given seed; wall times naturally vary.
"""

import time
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .importance import DEFAULT_BETA, energy_zone_ratio, numerical_rank

MIN_SIZES = 4
MIN_SIZE = 16
MIN_REPS = 5

TIMING_NOTE = (
    "medians of per-slice metric computation only (transform/decomposition "
    "plus score arithmetic); input generation, file I/O and warm-up excluded"
)


@dataclass
class TimingRecord:
    metric: str
    n: int
    reps: int
    median_seconds: float
    slope: float  # fitted log-log growth rate across all sizes, per metric


def fit_loglog_slope(sizes, times):
    """Least-squares slope of log(time) against log(size)."""
    sizes = np.asarray(sizes, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if sizes.size != times.size or sizes.size < 2:
        raise ValueError("need two or more (size, time) pairs")
    if np.any(times <= 0.0):
        raise ValueError("times must be positive")
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def _median_time(func, arg, reps):
    func(arg)  # warm-up, discarded
    samples = []
    for _ in range(reps):
        start = time.perf_counter()
        func(arg)
        samples.append(time.perf_counter() - start)
    return float(np.median(samples))


def _energy_once(m):
    return energy_zone_ratio(m[np.newaxis], DEFAULT_BETA)


def run_bench(sizes, reps, seed, threads=1):
    """Time both metrics at every size; returns TimingRecords with fitted slopes."""
    sizes = [int(n) for n in sizes]
    if len(sizes) < MIN_SIZES:
        raise ValueError(f"need at least {MIN_SIZES} sizes")
    if min(sizes) < MIN_SIZE:
        raise ValueError(f"sizes must be >= {MIN_SIZE}")
    if reps < MIN_REPS:
        raise ValueError(f"reps must be >= {MIN_REPS}")
    rng = np.random.default_rng(seed)
    slices = {n: rng.standard_normal((n, n)) for n in sizes}
    timed = {"energy": _energy_once, "rank": numerical_rank}
    medians = {}
    with threadpool_limits(limits=threads):
        for n in sizes:
            for metric, func in timed.items():
                medians[(metric, n)] = _median_time(func, slices[n], reps)
    records = []
    for metric in timed:
        slope = fit_loglog_slope(sizes, [medians[(metric, n)] for n in sizes])
        records.extend(
            TimingRecord(
                metric=metric,
                n=n,
                reps=reps,
                median_seconds=medians[(metric, n)],
                slope=slope,
            )
            for n in sizes
        )
    return records


def report_doc(records, seed, threads):
    """JSON-ready benchmark report."""
    return {
        "seed": seed,
        "threads": threads,
        "note": TIMING_NOTE,
        "records": [
            {
                "metric": r.metric,
                "n": r.n,
                "reps": r.reps,
                "median_seconds": r.median_seconds,
                "slope": r.slope,
            }
            for r in records
        ],
    }
