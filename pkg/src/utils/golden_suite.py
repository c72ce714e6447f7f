"""Replay the expected values of a fixture file against the pipelines.

Every expected entry becomes one report row; a failing row names the
fixture label, the stage and the first mismatching index (a digit exponent
for expansions, a list position otherwise).
"""
import logging
from concurrent.futures import ProcessPoolExecutor

import pandas as pd

from src.pipelines.frobenius_e2 import (
    compute_e2,
    frobenius_trace,
    kedlaya_frobenius_matrix,
    kedlaya_with_column_trick,
)
from src.pipelines.height_pipeline import HeightJob, padic_height
from src.pipelines.sigma_function import compute_sigma
from src.utils.division_polynomials import make_context, multiple_coords
from src.utils.elliptic_curves import short_weierstrass_model
from src.utils.errors import PadicHeightError
from src.utils.fixtures import load_fixtures
from src.utils.padic_numbers import PadicNumber, parse_expansion

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["line", "label", "stage", "p", "prec", "passed", "index", "expected", "actual", "error"]


def _digit_at(number, exponent):
    """Digit of p^exponent, or None where the number is not known"""
    if exponent >= number.absolute_precision:
        return None
    if exponent < number.valuation:
        return 0
    return number.digits()[exponent - number.valuation]


def first_digit_mismatch(expected, actual):
    """Exponent of the first digit where two expansions disagree, or None"""
    low = min(expected.valuation, actual.valuation)
    high = max(expected.absolute_precision, actual.absolute_precision)
    for exponent in range(low, high):
        if _digit_at(expected, exponent) != _digit_at(actual, exponent):
            return exponent
    return None


def first_list_mismatch(expected, actual):
    for index in range(max(len(expected), len(actual))):
        left = expected[index] if index < len(expected) else None
        right = actual[index] if index < len(actual) else None
        if left != right:
            return index
    return None


def _evaluate(fixture, entry):
    """(mismatch index, rendered actual value) for one expected entry"""
    E = fixture.curve()
    p, prec = entry.p, entry.prec

    if entry.stage == "e2":
        e2 = compute_e2(E, p, prec, use_column_trick=entry.column_trick)
        actual = PadicNumber.from_int(e2.value, p, prec)
        return first_digit_mismatch(parse_expansion(entry.value), actual), actual.render()

    if entry.stage == "frobenius":
        A, B = short_weierstrass_model(E)
        if entry.column_trick:
            F = kedlaya_with_column_trick(A, B, p, prec, frobenius_trace(E, p))
        else:
            F = kedlaya_frobenius_matrix(A, B, p, prec)
        actual = [F.a.value, F.b.value, F.c.value, F.d.value]
        return first_list_mismatch(entry.value, actual), F.render()

    if entry.stage == "sigma":
        e2 = compute_e2(E, p, prec - 3) if prec >= 4 else None
        sigma = compute_sigma(E, p, prec, e2)
        actual = list(sigma.coeffs[1:])
        return first_list_mismatch(entry.value, actual), sigma.render()

    if entry.stage == "multiple":
        R = entry.modulus
        ctx = make_context(E, fixture.point(), R)
        alpha, beta, d = multiple_coords(ctx, entry.m)
        _, beta_expected, d_expected = entry.value
        # (beta, d) is only defined up to a common sign
        if (beta, d) == ((-beta_expected) % R, (-d_expected) % R):
            beta, d = beta_expected % R, d_expected % R
        actual = [alpha, beta, d]
        expected = [v % R for v in entry.value]
        return first_list_mismatch(expected, actual), f"alpha={alpha} beta={beta} d={d}"

    job = HeightJob.create(E, fixture.point(), p, prec, fixture.tamagawa_lcm, entry.normalization)
    actual = padic_height(job).value
    return first_digit_mismatch(parse_expansion(entry.value), actual), actual.render()


def run_fixture(line, fixture):
    """Report rows for every expected value of one fixture"""
    rows = []
    for entry in fixture.expected:
        row = {
            "line": line,
            "label": fixture.label,
            "stage": entry.stage,
            "p": entry.p,
            "prec": entry.prec,
            "passed": False,
            "index": None,
            "expected": entry.value if isinstance(entry.value, str) else str(entry.value),
            "actual": None,
            "error": None,
        }
        try:
            index, row["actual"] = _evaluate(fixture, entry)
            row["index"] = index
            row["passed"] = index is None
        except PadicHeightError as error:
            row["error"] = str(error)
        if not row["passed"]:
            logger.warning("golden: %s %s failed at index %s %s",
                           fixture.label, entry.stage, row["index"], row["error"] or "")
        rows.append(row)
    return rows


def run_golden_suite(path, jobs=1):
    """DataFrame with one row per expected value, ordered by fixture line"""
    fixtures = load_fixtures(path)
    if jobs > 1 and len(fixtures) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_fixture, line, fixture) for line, fixture in fixtures]
            batches = [future.result() for future in futures]
    else:
        batches = [run_fixture(line, fixture) for line, fixture in fixtures]

    report = pd.DataFrame([row for batch in batches for row in batch], columns=REPORT_COLUMNS)
    failures = int((~report["passed"]).sum()) if len(report) else 0
    logger.info("run_golden_suite: %d checks, %d failures", len(report), failures)
    return report
