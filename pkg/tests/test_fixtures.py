import json
import os
import tempfile
import unittest

from pydantic import ValidationError

from src.pipelines.height_pipeline import HeightJob, padic_height
from src.utils.elliptic_curves import CurveQ
from src.utils.errors import FixtureError
from src.utils.fixtures import CurveFixture, ExpectedValue, HeightReport, load_fixtures

SHIPPED = os.path.join(os.path.dirname(__file__), "..", "data", "fixtures.jsonl")


class TestLoadFixtures(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "fixtures.jsonl")

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, lines):
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")

    def test_shipped_file(self):
        fixtures = load_fixtures(SHIPPED)
        labels = [fixture.label for _, fixture in fixtures]
        self.assertEqual(labels, ["26a2", "91b1", "214a1", "37a", "92b1", "y2=x3+7x+8"])
        _, f214 = fixtures[2]
        self.assertEqual(f214.curve(), CurveQ(1, 0, 0, -12, 16))
        self.assertEqual((f214.point().alpha, f214.point().beta, f214.point().d), (0, -4, 1))
        self.assertIsNone(fixtures[0][1].point())

    def test_blank_lines_are_skipped(self):
        record = {"label": "37a", "a_invariants": [0, 0, 1, -1, 0]}
        self._write(["", json.dumps(record), "", json.dumps(record)])
        self.assertEqual([line for line, _ in load_fixtures(self.path)], [2, 4])

    def test_empty_file(self):
        self._write([""])
        self.assertEqual(load_fixtures(self.path), [])

    def test_missing_file(self):
        with self.assertRaisesRegex(FixtureError, "cannot read"):
            load_fixtures(os.path.join(self.tmp.name, "absent.jsonl"))

    def test_error_names_the_line(self):
        good = {"label": "37a", "a_invariants": [0, 0, 1, -1, 0]}
        bad = {"label": "short", "a_invariants": [0, 0, 1, -1]}
        self._write([json.dumps(good), json.dumps(bad)])
        with self.assertRaises(FixtureError) as caught:
            load_fixtures(self.path)
        self.assertIn(":2: a_invariants", str(caught.exception))

    def test_malformed_json(self):
        self._write(["{not json"])
        with self.assertRaisesRegex(FixtureError, ":1:"):
            load_fixtures(self.path)


class TestFixtureValidation(unittest.TestCase):
    def test_singular_curve(self):
        with self.assertRaises(ValidationError):
            CurveFixture(label="cusp", a_invariants=[0, 0, 0, 0, 0])

    def test_point_off_curve(self):
        with self.assertRaises(ValidationError):
            CurveFixture(label="37a", a_invariants=[0, 0, 1, -1, 0], generator=[1, 1, 1, 1])

    def test_zero_denominator(self):
        with self.assertRaises(ValidationError):
            CurveFixture(label="37a", a_invariants=[0, 0, 1, -1, 0], generator=[0, 0, 0, 1])

    def test_height_needs_generator(self):
        entry = {"stage": "height", "p": 5, "prec": 5, "value": "O(5^5)"}
        with self.assertRaises(ValidationError):
            CurveFixture(label="37a", a_invariants=[0, 0, 1, -1, 0], expected=[entry])

    def test_stage_fields(self):
        cases = [
            {"stage": "e2", "prec": 3, "value": "O(5^3)"},
            {"stage": "e2", "p": 6, "prec": 3, "value": "O(5^3)"},
            {"stage": "e2", "p": 5, "prec": 3, "value": [1, 2]},
            {"stage": "frobenius", "p": 11, "prec": 3, "value": [1, 2, 3]},
            {"stage": "multiple", "m": 101, "value": [32, 4, 65]},
            {"stage": "multiple", "m": 101, "modulus": 99, "value": [32, 4]},
            {"stage": "trace", "p": 5, "prec": 3, "value": "O(5^3)"},
        ]
        for case in cases:
            with self.subTest(case=case):
                with self.assertRaises(ValidationError):
                    ExpectedValue(**case)

    def test_defaults(self):
        entry = ExpectedValue(stage="sigma", p=5, prec=9, value=[1, 2])
        self.assertFalse(entry.column_trick)
        self.assertEqual(entry.normalization, "standard")


class TestHeightReport(unittest.TestCase):
    def test_json_round_trip(self):
        fixture = CurveFixture(label="37a", a_invariants=[0, 0, 1, -1, 0], generator=[0, 1, 0, 1])
        result = padic_height(HeightJob.create(fixture.curve(), fixture.point(), 5, 5, 1))
        report = HeightReport.from_result(result)
        self.assertEqual((report.valuation, report.digits, report.p, report.precision),
                         (1, [4, 3, 3, 4], 5, 5))
        restored = HeightReport.model_validate_json(report.model_dump_json())
        self.assertEqual(restored.render(), result.render())
        self.assertEqual(restored.diagnostics["n1"], 8)


if __name__ == "__main__":
    unittest.main()
