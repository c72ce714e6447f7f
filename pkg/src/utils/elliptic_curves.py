"""Weierstrass curves over Q, rational points and reduction checks"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from sympy import factorint, isprime, primerange

from src.utils.config import get_settings
from src.utils.errors import BadReduction, FactorizationTooHard

logger = logging.getLogger(__name__)

MAZUR_BOUND = 12


@dataclass(frozen=True)
class CurveQ:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f"singular Weierstrass equation {self.a_invariants}")

    @classmethod
    def from_list(cls, ainvs):
        if len(ainvs) != 5:
            raise ValueError(f"expected five a-invariants, got {len(ainvs)}")
        return cls(*(int(a) for a in ainvs))

    @property
    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @cached_property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @cached_property
    def c4(self):
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @cached_property
    def c6(self):
        b2, b4, b6, _ = self.b_invariants
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @cached_property
    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def contains(self, point):
        if point.is_infinity:
            return True
        x, y = point.x, point.y
        a1, a2, a3, a4, a6 = self.a_invariants
        return y * y + a1 * x * y + a3 * y == x ** 3 + a2 * x * x + a4 * x + a6

    def __str__(self):
        return f"[{self.a1},{self.a2},{self.a3},{self.a4},{self.a6}]"


@dataclass(frozen=True)
class RationalPoint:
    """(alpha/d^2, beta/d^3) with d >= 1 and gcd(alpha, d) = gcd(beta, d) = 1"""
    alpha: int = 0
    beta: int = 1
    d: int = 0
    is_infinity: bool = False

    @classmethod
    def infinity(cls):
        return cls(0, 1, 0, True)

    @classmethod
    def from_xy(cls, x, y):
        x, y = Fraction(x), Fraction(y)
        d = math.isqrt(x.denominator)
        if d * d != x.denominator or y.denominator != d ** 3:
            raise ValueError(f"({x}, {y}) is not of the form (alpha/d^2, beta/d^3)")
        return cls(x.numerator, y.numerator, d)

    @property
    def x(self):
        return Fraction(self.alpha, self.d ** 2)

    @property
    def y(self):
        return Fraction(self.beta, self.d ** 3)

    def reduce(self, R):
        """(alpha, beta, d) mod R"""
        return self.alpha % R, self.beta % R, self.d % R

    def __str__(self):
        if self.is_infinity:
            return "O"
        return f"({self.x}, {self.y})"


def negate(E, P):
    if P.is_infinity:
        return P
    return RationalPoint.from_xy(P.x, -P.y - E.a1 * P.x - E.a3)


def point_add(E, P, Q):
    """Chord-and-tangent addition"""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    a1, a2, a3, a4, _ = E.a_invariants
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2 and y1 + y2 + a1 * x2 + a3 == 0:
        return RationalPoint.infinity()
    if x1 == x2:
        slope = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        slope = (y2 - y1) / (x2 - x1)
    intercept = y1 - slope * x1
    x3 = slope * slope + a1 * slope - a2 - x1 - x2
    y3 = -(slope + a1) * x3 - intercept - a3
    return RationalPoint.from_xy(x3, y3)


def scalar_mul(E, n, P):
    """n * P by double-and-add"""
    if n < 0:
        return scalar_mul(E, -n, negate(E, P))
    result = RationalPoint.infinity()
    addend = P
    while n:
        if n & 1:
            result = point_add(E, result, addend)
        n >>= 1
        if n:
            addend = point_add(E, addend, addend)
    return result


def torsion_order(E, P):
    """Order of P if it is at most the Mazur bound, else None"""
    Q = P
    for k in range(1, MAZUR_BOUND + 1):
        if Q.is_infinity:
            return k
        Q = point_add(E, Q, P)
    return None


def count_points(E, p):
    """#E(F_p) and a_p = p + 1 - #E(F_p) by scanning x in F_p.

    Completing the square, y solutions over x correspond to square roots of
    4x^3 + b2 x^2 + 2 b4 x + b6.
    """
    if E.discriminant % p == 0:
        raise BadReduction(f"p={p} divides the discriminant")
    if p > 3 * 10 ** 9:
        # x * x must fit in int64
        raise ValueError(f"p={p} is too large to enumerate")
    b2, b4, b6, _ = E.b_invariants
    xs = np.arange(p, dtype=np.int64)
    roots = np.bincount((xs * xs) % p, minlength=p)
    f = (4 * xs + b2 % p) % p
    f = (f * xs + (2 * b4) % p) % p
    f = (f * xs + b6 % p) % p
    n1 = 1 + int(roots[f].sum())
    a_p = p + 1 - n1
    if a_p * a_p > 4 * p:
        raise RuntimeError(f"point count {n1} at p={p} violates the Hasse bound")
    logger.debug("count_points: p=%d n1=%d a_p=%d", p, n1, a_p)
    return n1, a_p


def is_good_ordinary(E, p, a_p=None):
    """Good reduction at p and p does not divide a_p"""
    if E.discriminant % p == 0:
        return False
    if a_p is None:
        _, a_p = count_points(E, p)
    return a_p % p != 0


def short_weierstrass_model(E):
    """(A, B) with y^2 = x^3 + A x + B isomorphic to E"""
    return Fraction(-E.c4, 48), Fraction(-E.c6, 864)


def prime_factors(n, limit=None):
    """Prime divisors of |n| by trial division, finishing with a primality test"""
    n = abs(n)
    if limit is None:
        limit = get_settings().trial_division_limit
    primes = []
    for q in primerange(2, limit + 1):
        if q * q > n:
            break
        if n % q == 0:
            primes.append(q)
            while n % q == 0:
                n //= q
    if n > 1:
        if isprime(n):
            primes.append(n)
        elif n.bit_length() > 64:
            raise FactorizationTooHard(f"cofactor {n} has no factor below {limit}")
        else:
            primes.extend(sorted(factorint(n)))
    return sorted(primes)


def singular_reduction_primes(E, P):
    """Primes dividing the discriminant at which P reduces to the singular point.

    P mod ell is singular iff both partials of the homogenised equation vanish
    at (alpha, beta, d); ell | d means P reduces to O.
    """
    if P.is_infinity:
        return []
    a1, a2, a3, a4, _ = E.a_invariants
    alpha, beta, d = P.alpha, P.beta, P.d
    singular = []
    for ell in prime_factors(E.discriminant):
        if d % ell == 0:
            continue
        d_y = 2 * beta + a1 * alpha * d + a3 * d ** 3
        d_x = a1 * beta * d - 3 * alpha * alpha - 2 * a2 * alpha * d * d - a4 * d ** 4
        if d_y % ell == 0 and d_x % ell == 0:
            singular.append(ell)
    return singular


def check_A1_A2(E, P, p):
    """(a1_holds, a2_holds): P reduces to O mod p, and to nonsingular points at bad primes"""
    if E.discriminant % p == 0:
        raise BadReduction(f"p={p} divides the discriminant")
    if P.is_infinity:
        return True, True
    singular = singular_reduction_primes(E, P)
    if singular:
        logger.info("check_A1_A2: %s reduces to a singular point mod %s", P, singular)
    return P.d % p == 0, not singular
