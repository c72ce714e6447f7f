import math
import random
import unittest

from src.utils.division_polynomials import g_value, make_context, multiple_coords, psi_value
from src.utils.elliptic_curves import CurveQ, RationalPoint
from src.utils.errors import EvenModulus, PreconditionViolated, TorsionCollapse
from tests.oracles import exact_multiple, exact_multiples, exact_psi


class TestExample91b1(unittest.TestCase):
    """y^2 + y = x^3 + x^2 - 7x + 5, P = (5/4, -3/8), R = 99"""

    def setUp(self):
        self.E = CurveQ(0, 1, 1, -7, 5)
        self.P = RationalPoint.from_xy("5/4", "-3/8")
        self.ctx = make_context(self.E, self.P, 99)

    def test_constants(self):
        ctx = self.ctx
        self.assertEqual((ctx.alpha, ctx.beta, ctx.d), (5, 96, 2))
        self.assertEqual(ctx.a, {1: 0, 2: 4, 3: 8, 4: 86, 6: 23})
        self.assertEqual(ctx.b, {2: 16, 4: 73, 6: 57, 8: 59})
        self.assertEqual((ctx.B4, ctx.B6, ctx.B8, ctx.T), (6, 4, 67, 2))

    def test_g_values(self):
        table = {
            0: 0, 1: 1, 2: 98, 3: 67, 4: 10, 5: 37, 6: 63, 7: 98, 8: 35, 9: 50,
            10: 73, 11: 98, 12: 0, 13: 64, 14: 71, 15: 4, 16: 1, 22: 1, 23: 35,
            24: 0, 25: 91, 26: 17, 27: 67, 28: 46, 48: 0, 49: 1, 50: 62, 51: 49,
            52: 46, 53: 1, 99: 49, 100: 19, 101: 82, 102: 72, 103: 98,
        }
        for j, expected in table.items():
            with self.subTest(j=j):
                self.assertEqual(g_value(self.ctx, j), expected)

    def test_psi(self):
        self.assertEqual([psi_value(self.ctx, j) for j in (100, 101, 102)], [38, 82, 45])

    def test_multiple(self):
        self.assertEqual(multiple_coords(self.ctx, 101), (32, 4, 65))

    def test_evaluation_count_is_logarithmic(self):
        multiple_coords(self.ctx, 101)
        self.assertLessEqual(self.ctx.evaluations, 8 * math.log2(101))

    def test_large_m(self):
        for k in (10, 20, 30):
            ctx = make_context(self.E, self.P, 5 ** 20 + 2)
            multiple_coords(ctx, 2 ** k)
            with self.subTest(k=k):
                self.assertLessEqual(ctx.evaluations, 8 * k)


class TestAgainstExactMultiples(unittest.TestCase):
    def test_small_multiples(self):
        for ainvs, xy, R in [
            ((0, 1, 1, -7, 5), ("5/4", "-3/8"), 10007),
            ((0, 0, 1, -1, 0), (0, 0), 5 ** 10),
            ((1, 0, 0, -12, 16), ("3/4", "-25/8"), 43 ** 8),
        ]:
            E = CurveQ(*ainvs)
            P = RationalPoint.from_xy(*xy)
            for m in range(2, 9):
                alpha, beta, d = exact_multiple(E, P, m)
                theta, omega, d_m = multiple_coords(make_context(E, P, R), m)
                with self.subTest(curve=str(E), m=m):
                    self.assertEqual(theta, alpha % R)
                    self.assertIn((omega, d_m), [(beta % R, d % R), (-beta % R, -d % R)])

    def test_random_multiples(self):
        rng = random.Random(5003)
        curves = [
            ((0, 0, 1, -1, 0), (0, 0), 500),
            ((0, 1, 1, -7, 5), ("5/4", "-3/8"), 100),
            ((1, 0, 0, -12, 16), ("3/4", "-25/8"), 40),
        ]
        tables = {}
        for _ in range(100):
            ainvs, xy, m_max = rng.choice(curves)
            E = CurveQ(*ainvs)
            if ainvs not in tables:
                tables[ainvs] = exact_multiples(E, RationalPoint.from_xy(*xy), m_max)
            m = rng.randint(2, m_max)
            p = rng.choice([3, 5, 7, 11, 13, 43, 10007, 99991, 999983])
            R = p ** rng.randint(1, int(math.log(10 ** 9, p)))
            alpha, beta, d = tables[ainvs][m - 1]
            theta, omega, d_m = multiple_coords(make_context(E, RationalPoint.from_xy(*xy), R), m)
            with self.subTest(curve=str(E), m=m, R=R):
                self.assertLessEqual(R, 10 ** 9)
                self.assertEqual(theta, alpha % R)
                self.assertIn((omega, d_m), [(beta % R, d % R), (-beta % R, -d % R)])


class TestAgainstClassicalPsi(unittest.TestCase):
    def test_scaled_psi_up_to_20(self):
        # psi~_j = (-1)^(j+1) d^(j^2-1) psi_j(Q)
        for ainvs, xy, R in [
            ((0, 1, 1, -7, 5), ("5/4", "-3/8"), 99),
            ((0, 0, 1, -1, 0), (0, 0), 5 ** 10),
            ((1, 0, 0, -12, 16), ("3/4", "-25/8"), 43 ** 8),
            ((0, 0, 0, -1, 1), (1, 1), 10007 ** 2),
        ]:
            E = CurveQ(*ainvs)
            Q = RationalPoint.from_xy(*xy)
            ctx = make_context(E, Q, R)
            psi = exact_psi(E, Q.x, Q.y, 20)
            for j in range(1, 21):
                scaled = (-1) ** (j + 1) * Q.d ** (j * j - 1) * psi[j]
                with self.subTest(curve=str(E), j=j):
                    self.assertEqual(scaled.denominator, 1)
                    self.assertEqual(psi_value(ctx, j), int(scaled) % R)
                    if j % 2:
                        self.assertEqual(g_value(ctx, j), int(scaled) % R)


class TestFailures(unittest.TestCase):
    def setUp(self):
        self.E = CurveQ(0, 0, 0, 0, 1)
        self.Q = RationalPoint.from_xy(2, 3)

    def test_torsion_collapse(self):
        ctx = make_context(self.E, self.Q, 7 ** 3)
        with self.assertRaises(TorsionCollapse):
            multiple_coords(ctx, 6)

    def test_even_modulus(self):
        with self.assertRaises(EvenModulus):
            make_context(self.E, self.Q, 100)

    def test_small_modulus(self):
        with self.assertRaises(ValueError):
            make_context(self.E, self.Q, 1)

    def test_point_at_infinity(self):
        with self.assertRaises(PreconditionViolated):
            make_context(self.E, RationalPoint.infinity(), 99)

    def test_m_at_least_two(self):
        with self.assertRaises(ValueError):
            multiple_coords(make_context(self.E, self.Q, 99), 1)


if __name__ == "__main__":
    unittest.main()
