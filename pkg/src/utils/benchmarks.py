"""Timing harness for the two quasi-linear stages.

compute_sigma should grow like N^2 up to log factors and multiple_coords
like log m at a fixed modulus; the fitted log-log slopes are reported next
to the raw timings.
"""
import logging
import os
import time

import numpy as np
import pandas as pd

from src.pipelines.frobenius_e2 import compute_e2
from src.pipelines.sigma_function import compute_sigma
from src.utils.config import get_settings
from src.utils.division_polynomials import make_context, multiple_coords
from src.utils.elliptic_curves import CurveQ, RationalPoint
from src.utils.visualizations import BenchmarkVisualizer

logger = logging.getLogger(__name__)

SIGMA_SIZES = (250, 500, 1000)
QUICK_SIGMA_SIZES = (25, 50, 100)
MULTIPLE_EXPONENTS = (10, 20, 30)

# 37a with its generator (0, 0); ordinary at 5
BENCH_CURVE = CurveQ(0, 0, 1, -1, 0)
BENCH_POINT = RationalPoint(0, 0, 1)
BENCH_PRIME = 5
BENCH_MODULUS_DIGITS = 20


def time_sigma(sizes, E=BENCH_CURVE, p=BENCH_PRIME):
    """Time compute_sigma at each N; E2 is computed once at the largest N"""
    e2 = compute_e2(E, p, max(sizes) - 3)
    rows = []
    for N in sorted(sizes):
        start = time.perf_counter()
        compute_sigma(E, p, N, e2.reduce(N - 3))
        seconds = time.perf_counter() - start
        rows.append({"operation": "compute_sigma", "size": N, "scale": N,
                     "seconds": seconds, "evaluations": None})
        logger.info("time_sigma: N=%d %.3fs", N, seconds)
    return rows


def time_multiple(exponents, E=BENCH_CURVE, P=BENCH_POINT, R=None):
    """Time multiple_coords at m = 2^k for a fixed odd modulus"""
    R = R or BENCH_PRIME ** BENCH_MODULUS_DIGITS
    rows = []
    for k in sorted(exponents):
        ctx = make_context(E, P, R)
        start = time.perf_counter()
        multiple_coords(ctx, 2 ** k)
        seconds = time.perf_counter() - start
        rows.append({"operation": "multiple_coords", "size": 2 ** k, "scale": k,
                     "seconds": seconds, "evaluations": ctx.evaluations})
        logger.info("time_multiple: m=2^%d %.4fs (%d evaluations)", k, seconds, ctx.evaluations)
    return rows


def fit_slopes(table):
    """log-log slope of seconds against scale, per operation"""
    slopes = {}
    for operation, rows in table.groupby("operation"):
        if len(rows) < 2:
            continue
        x = np.log(rows["scale"].astype(float))
        y = np.log(rows["seconds"].clip(lower=1e-9).astype(float))
        slopes[operation] = float(np.polyfit(x, y, 1)[0])
    return slopes


def run_benchmarks(quick=False, output_dir=None, plot=False):
    """(timings DataFrame, slopes); the table is also written as CSV"""
    output_dir = output_dir or get_settings().output_dir
    sizes = QUICK_SIGMA_SIZES if quick else SIGMA_SIZES
    table = pd.DataFrame(time_sigma(sizes) + time_multiple(MULTIPLE_EXPONENTS))
    slopes = fit_slopes(table)

    os.makedirs(output_dir, exist_ok=True)
    csv_path = os.path.join(output_dir, "timings.csv")
    table.to_csv(csv_path, index=False)
    logger.info("run_benchmarks: wrote %s", csv_path)
    if plot:
        logger.info("run_benchmarks: wrote %s", BenchmarkVisualizer(output_dir).plot_timings(table))
    return table, slopes
