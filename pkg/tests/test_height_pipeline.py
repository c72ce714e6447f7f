import os
import unittest

from src.pipelines.frobenius_e2 import charpoly_check, compute_e2, frobenius_trace, kedlaya_frobenius_matrix
from src.pipelines.height_pipeline import HeightJob, evaluate_sigma_ratio, padic_height, precision_ledger
from src.pipelines.sigma_function import SigmaSeries
from src.utils.division_polynomials import make_context, multiple_coords
from src.utils.elliptic_curves import CurveQ, RationalPoint, is_good_ordinary, scalar_mul, short_weierstrass_model
from src.utils.errors import A2Violated, NotGoodOrdinary, PreconditionViolated, TorsionPoint
from src.utils.padic_numbers import PadicNumber, ZModPN, iwasawa_log

SLOW = os.environ.get("PADIC_HEIGHTS_SLOW_TESTS") == "1"


class TestSmallPrimeHeights(unittest.TestCase):
    def setUp(self):
        self.e37 = CurveQ(0, 0, 1, -1, 0)
        self.P37 = RationalPoint.from_xy(0, 0)
        self.e92 = CurveQ(0, 0, 0, -1, 1)
        self.P92 = RationalPoint.from_xy(1, 1)

    def test_37a(self):
        result = padic_height(HeightJob.create(self.e37, self.P37, 5, 5, 1))
        self.assertEqual(result.render(), "4*5 + 3*5^2 + 3*5^3 + 4*5^4 + O(5^5)")
        self.assertEqual(result.precision, 5)
        self.assertEqual(result.diagnostics["n1"], 8)
        self.assertIn(result.diagnostics["sign"], (1, -1))

    def test_92b1(self):
        job = HeightJob.create(self.e92, self.P92, 5, 5, 12)
        self.assertEqual((job.n1, job.n, job.m, job.M_prime), (8, 24, 2, 5))
        self.assertEqual(padic_height(job).render(), "3*5 + 3*5^2 + 2*5^3 + 5^4 + O(5^5)")

    def test_quadraticity(self):
        h = padic_height(HeightJob.create(self.e37, self.P37, 5, 5, 1)).value
        for k in (2, 3):
            Q = scalar_mul(self.e37, k, self.P37)
            hk = padic_height(HeightJob.create(self.e37, Q, 5, 5, 1)).value
            with self.subTest(k=k):
                self.assertEqual(hk.render(), (h * (k * k)).render())

    def test_mst_normalization(self):
        standard = padic_height(HeightJob.create(self.e37, self.P37, 5, 5, 1)).value
        mst = padic_height(HeightJob.create(self.e37, self.P37, 5, 5, 1, "mst")).value
        self.assertEqual(mst.valuation, standard.valuation - 1)
        self.assertEqual((mst * 2).shift(1), standard)

    def test_92b1_at_precision_10(self):
        job = HeightJob.create(self.e92, self.P92, 5, 10, 12)
        h = padic_height(job).value
        self.assertTrue(h.render().startswith("3*5 + 3*5^2 + 2*5^3 + 5^4 + "))
        self.assertEqual(h.absolute_precision, 10)
        e2 = compute_e2(self.e92, 5, precision_ledger(job)[1])
        self.assertTrue(PadicNumber.from_int(e2.value, 5, e2.N).render().startswith(
            "3 + 2*5 + 2*5^3 + 3*5^5 + 2*5^7 + "))

    def test_more_precision_truncates_to_less(self):
        for E, P, n2, M in [(self.e37, self.P37, 1, 5), (self.e92, self.P92, 12, 4)]:
            low = padic_height(HeightJob.create(E, P, 5, M, n2)).value
            high = padic_height(HeightJob.create(E, P, 5, M + 2, n2)).value
            with self.subTest(curve=str(E)):
                self.assertEqual(high.truncate(low.absolute_precision).render(), low.render())

    @unittest.skipUnless(SLOW, "set PADIC_HEIGHTS_SLOW_TESTS=1")
    def test_92b1_high_precision(self):
        h = padic_height(HeightJob.create(self.e92, self.P92, 5, 20, 12)).value
        self.assertTrue(h.render().startswith("3*5 + 3*5^2 + 2*5^3 + 5^4 + "))
        self.assertEqual(h.absolute_precision, 20)

    @unittest.skipUnless(SLOW, "set PADIC_HEIGHTS_SLOW_TESTS=1")
    def test_92b1_at_precision_500(self):
        high_job = HeightJob.create(self.e92, self.P92, 5, 500, 12)
        low_job = HeightJob.create(self.e92, self.P92, 5, 10, 12)
        high, low = padic_height(high_job).value, padic_height(low_job).value
        self.assertEqual(high.absolute_precision, 500)
        self.assertEqual(high.truncate(10).render(), low.render())
        e2_high = compute_e2(self.e92, 5, precision_ledger(high_job)[1])
        e2_low = compute_e2(self.e92, 5, precision_ledger(low_job)[1])
        self.assertEqual(e2_high.reduce(e2_low.N), e2_low)


class TestLargePrimes(unittest.TestCase):
    @unittest.skipUnless(SLOW, "set PADIC_HEIGHTS_SLOW_TESTS=1")
    def test_full_pipeline(self):
        candidates = [
            (CurveQ(0, 0, 1, -1, 0), RationalPoint.from_xy(0, 0), 1),
            (CurveQ(0, 1, 1, -7, 5), RationalPoint.from_xy("5/4", "-3/8"), 1),
        ]
        for p in (10007, 99991):
            E, P, n2 = next(c for c in candidates if is_good_ordinary(c[0], p))
            A, B = short_weierstrass_model(E)
            a_p = frobenius_trace(E, p)
            F = kedlaya_frobenius_matrix(A, B, p, 3)
            result = padic_height(HeightJob.create(E, P, p, 6, n2))
            with self.subTest(p=p, curve=str(E)):
                self.assertEqual(F.det().value, p)
                self.assertEqual(F.trace().value, a_p % p ** 3)
                self.assertTrue(charpoly_check(F, a_p))
                self.assertEqual(result.value.absolute_precision, 6)


class TestAnomalousExample(unittest.TestCase):
    """214a1 at p = 43, where n1 = 43 and the height has a pole"""

    def setUp(self):
        self.E = CurveQ(1, 0, 0, -12, 16)
        self.P = RationalPoint.from_xy(0, -4)
        self.job = HeightJob.create(self.E, self.P, 43, 6, 7)

    def test_job(self):
        self.assertEqual((self.job.n1, self.job.n, self.job.m, self.job.M_prime), (43, 301, 43, 8))
        self.assertEqual(precision_ledger(self.job), (9, 6, 43 ** 8))

    def test_multiple_of_7P(self):
        R = 43 ** 8
        Q = scalar_mul(self.E, 7, self.P)
        alpha, beta, d = multiple_coords(make_context(self.E, Q, R), 43)
        self.assertEqual(alpha, 9491762277279)
        self.assertIn(beta, (10171094217691, R - 10171094217691))
        self.assertIn(d, (3360349669562, R - 3360349669562))

    def test_sigma_ratio(self):
        sigma = SigmaSeries(43, 9, (1, 135909305554, 3933286396, 129848206, 2650487, 77893, 1561, 8))
        R = 43 ** 8
        triple = tuple(ZModPN.of(v, 43, 8) for v in (9491762277279, 10171094217691, 3360349669562))
        u = evaluate_sigma_ratio(sigma, triple)
        self.assertIn(u.value, (1430987165464, R - 1430987165464))
        self.assertEqual(iwasawa_log(u).value, 43 * 44668563676)

    def test_shared_sign_of_beta_and_d(self):
        sigma = SigmaSeries(43, 9, (1, 135909305554, 3933286396, 129848206, 2650487, 77893, 1561, 8))
        R = 43 ** 8
        alpha, beta, d = 9491762277279, 10171094217691, 3360349669562
        plus = evaluate_sigma_ratio(sigma, tuple(ZModPN.of(v, 43, 8) for v in (alpha, beta, d)))
        minus = evaluate_sigma_ratio(sigma, tuple(ZModPN.of(v, 43, 8) for v in (alpha, -beta, -d)))
        self.assertEqual(minus.value, (R - plus.value) % R)
        self.assertEqual(iwasawa_log(minus), iwasawa_log(plus))

    def test_height(self):
        result = padic_height(self.job)
        self.assertEqual(
            result.render(),
            "6*43^-1 + 14 + 43 + 15*43^2 + 38*43^3 + 8*43^4 + 15*43^5 + O(43^6)")
        self.assertEqual(result.value.valuation, -1)
        self.assertEqual(result.diagnostics["e2_precision"], 6)
        self.assertEqual(result.diagnostics["sigma_precision"], 9)
        _, _, d = multiple_coords(make_context(self.E, scalar_mul(self.E, 7, self.P), 43 ** 8), 43)
        self.assertEqual(result.diagnostics["sign"], 1 if d <= 43 ** 8 // 2 else -1)


class TestPreconditions(unittest.TestCase):
    def setUp(self):
        self.e37 = CurveQ(0, 0, 1, -1, 0)
        self.P37 = RationalPoint.from_xy(0, 0)

    def test_p_must_be_prime(self):
        for p in (4, 3, 9):
            with self.subTest(p=p):
                with self.assertRaisesRegex(PreconditionViolated, "p must be a prime"):
                    HeightJob.create(self.e37, self.P37, p, 5, 1)

    def test_precision(self):
        with self.assertRaises(PreconditionViolated):
            HeightJob.create(self.e37, self.P37, 5, 1, 1)
        with self.assertRaises(PreconditionViolated):
            HeightJob.create(self.e37, self.P37, 5, 5, 0)

    def test_point_not_on_curve(self):
        with self.assertRaises(PreconditionViolated):
            HeightJob.create(self.e37, RationalPoint.from_xy(1, 1), 5, 5, 1)

    def test_bad_or_supersingular_prime(self):
        with self.assertRaises(NotGoodOrdinary):
            HeightJob.create(self.e37, self.P37, 37, 5, 1)
        with self.assertRaises(NotGoodOrdinary):
            HeightJob.create(self.e37, self.P37, 17, 3, 1)

    def test_torsion_point(self):
        job = HeightJob.create(CurveQ(0, 0, 0, 0, 1), RationalPoint.from_xy(2, 3), 7, 3, 1)
        with self.assertRaises(TorsionPoint):
            padic_height(job)

    def test_tamagawa_lcm_too_small(self):
        job = HeightJob.create(CurveQ(0, 0, 0, -1, 1), RationalPoint.from_xy(1, 1), 5, 3, 1)
        with self.assertRaises(A2Violated):
            padic_height(job)

    def test_unknown_normalization(self):
        with self.assertRaises(ValueError):
            HeightJob.create(self.e37, self.P37, 5, 5, 1, "canonical")


if __name__ == "__main__":
    unittest.main()
