"""Frobenius on H^1 of y^2 = x^3 + A x + B and the value of E2 at (E, omega).

The Frobenius lift x -> x^p, 1/y -> y^-p (1 + E/y^(2p))^(-1/2) with
E = (x^p)^3 + A x^p + B - (x^3 + A x + B)^p is expanded in the ring

    Z/p^W [x, T, 1/T] / (x^3 + A x + B - T),     T = y^2,

whose elements are Laurent polynomials in T with coefficients c0 + c1 x + c2 x^2.
Images of dx/y and x dx/y are then reduced onto that basis with the exact
differentials d(x^i y^(2j-1)) and d(x^i y^-(2j-1)). All reduction steps
work on p^L times the true forms so that the divisions by 2j-1, 6j-1 and
6j+1 stay exact.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from src.utils.config import get_settings
from src.utils.elliptic_curves import count_points, short_weierstrass_model
from src.utils.errors import (
    BadReduction,
    DegenerateColumn,
    FrobeniusCheckFailed,
    NotAUnit,
    NotGoodOrdinary,
    PrecisionExhausted,
    SingularReduction,
)
from src.utils.kronecker import poly_mul
from src.utils.padic_numbers import ZModPN, ilog, padic_val

logger = logging.getLogger(__name__)

TRACE_FROM_MATRIX_MIN_PRIME = 17


@dataclass(frozen=True)
class FrobeniusMatrix:
    """[[a, b], [c, d]] on the basis {dx/y, x dx/y}; column j is the image of basis vector j"""
    a: ZModPN
    b: ZModPN
    c: ZModPN
    d: ZModPN
    precision: dict = field(default=None, compare=False)

    @classmethod
    def from_ints(cls, rows, p, N, precision=None):
        (a, b), (c, d) = rows
        return cls(*(ZModPN.of(v, p, N) for v in (a, b, c, d)), precision=precision)

    @property
    def p(self):
        return self.a.p

    @property
    def N(self):
        return self.a.N

    def rows(self):
        return [[self.a.value, self.b.value], [self.c.value, self.d.value]]

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __matmul__(self, other):
        return FrobeniusMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def power(self, n):
        """F^n by repeated squaring"""
        one, zero = ZModPN(self.a.modulus, 1), ZModPN(self.a.modulus, 0)
        result = FrobeniusMatrix(one, zero, zero, one)
        base = self
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    def reduce(self, N):
        return FrobeniusMatrix(*(x.reduce(N) for x in (self.a, self.b, self.c, self.d)))

    def render(self):
        return f"[[{self.a.value}, {self.b.value}], [{self.c.value}, {self.d.value}]] mod {self.p}^{self.N}"


def _residue(value, m):
    """An exact rational or ZModPN read mod m"""
    if isinstance(value, ZModPN):
        return value.value % m
    value = Fraction(value)
    return value.numerator * pow(value.denominator, -1, m) % m


def _trim(low, coeffs):
    """Drop zero T-levels at both ends"""
    start, end = 0, len(coeffs)
    while end > 3 and not any(coeffs[end - 3:end]):
        end -= 3
    while start < end - 3 and not any(coeffs[start:start + 3]):
        start += 3
    return low + start // 3, coeffs[start:end]


class _CurveRing:
    """Arithmetic in Z/m [x, T, 1/T] / (x^3 + A x + B - T).

    An element is (low, coeffs) where coeffs[3*i + s] is the coefficient of
    x^s T^(low + i).
    """

    def __init__(self, A, B, m):
        self.A = A
        self.B = B
        self.m = m

    def one(self):
        return 0, [1, 0, 0]

    def x(self):
        return 0, [0, 1, 0]

    def mul(self, f, g):
        low_f, cf = f
        low_g, cg = g
        m, A, B = self.m, self.A, self.B
        # spread to width 5 per T-power so x-degrees up to 4 cannot collide
        wide_f = [0] * (5 * (len(cf) // 3))
        for i in range(0, len(cf), 3):
            wide_f[5 * (i // 3):5 * (i // 3) + 3] = cf[i:i + 3]
        wide_g = [0] * (5 * (len(cg) // 3))
        for i in range(0, len(cg), 3):
            wide_g[5 * (i // 3):5 * (i // 3) + 3] = cg[i:i + 3]
        product = poly_mul(wide_f, wide_g, m)
        levels = len(cf) // 3 + len(cg) // 3
        out = [0] * (3 * levels)
        for i in range(levels - 1):
            d0, d1, d2, d3, d4 = (product[5 * i:5 * i + 5] + [0] * 5)[:5]
            # x^3 = T - A x - B, x^4 = x T - A x^2 - B x
            out[3 * i] += d0 - B * d3
            out[3 * i + 1] += d1 - A * d3 - B * d4
            out[3 * i + 2] += d2 - A * d4
            out[3 * i + 3] += d3
            out[3 * i + 4] += d4
        return _trim(low_f + low_g, [c % m for c in out])

    def power(self, f, n):
        result = self.one()
        while n:
            if n & 1:
                result = self.mul(result, f)
            n >>= 1
            if n:
                f = self.mul(f, f)
        return result

    def add(self, f, g, scale=1):
        """f + scale * g"""
        low = min(f[0], g[0])
        high = max(f[0] + len(f[1]) // 3, g[0] + len(g[1]) // 3)
        out = [0] * (3 * (high - low))
        for (start, coeffs), factor in ((f, 1), (g, scale)):
            base = 3 * (start - low)
            for i, c in enumerate(coeffs):
                out[base + i] += factor * c
        return low, [c % self.m for c in out]

    def scale(self, f, c):
        return f[0], [v * c % self.m for v in f[1]]

    def shift(self, f, k):
        """Multiply by T^k"""
        return f[0] + k, f[1]


@dataclass
class _Plan:
    """Working precision for one Kedlaya run"""
    p: int
    N: int
    terms: int
    scale: int
    work: int


def _plan(p, N, guard):
    jpos = (2 * p - 1) // 3 + 2
    terms = N + 2
    while True:
        jneg = p * (terms - 1) + (p - 1) // 2 + 1
        scale = max(ilog(2 * jneg + 1, p), ilog(6 * jpos + 1, p)) + 1
        needed = N + scale
        if needed <= terms:
            break
        terms = needed
    return _Plan(p=p, N=N, terms=terms, scale=scale, work=N + 3 * scale + guard)


def _divide(value, k, p, m):
    """value / k mod m; the p-part of k must divide value"""
    v = padic_val(k, p)
    if v:
        pv = p ** v
        if value % pv:
            raise PrecisionExhausted(f"division by {k} is not exact at working precision")
        value //= pv
        k //= pv
    return value * pow(k, -1, m) % m


def _reduce_form(form, A, B, p, m):
    """Reduce sum c_i(T) x^i dx/y onto (dx/y, x dx/y); returns the two coefficients"""
    low, coeffs = form
    rows = [list(coeffs[i:i + 3]) for i in range(0, len(coeffs), 3)]
    if low > 0:
        rows = [[0, 0, 0] for _ in range(low)] + rows
        low = 0
    zero_index = -low
    while len(rows) <= zero_index:
        rows.append([0, 0, 0])

    A_third = A * pow(3, -1, m) % m
    D_inv = pow((4 * A ** 3 + 27 * B * B) % m, -1, m)
    # 1 = ka u + kb v and x = kc u + kd v with u = 3B + 2A x, v = -2A^2/3 + 3B x
    ka, kb = 9 * B * D_inv % m, -6 * A * D_inv % m
    kc, kd = 2 * A * A * D_inv % m, 9 * B * D_inv % m

    # T^-j rows, most negative first:
    # u T^-j = (6j-5)/(2j-1) T^-(j-1), v T^-j = (6j-7)/(2j-1) x T^-(j-1)
    carry0 = carry1 = 0
    for index in range(zero_index):
        j = zero_index - index
        c0, c1, c2 = rows[index]
        c0 = (c0 + carry0 - A_third * c2) % m
        c1 = (c1 + carry1) % m
        s0 = (c0 * ka + c1 * kc) % m
        s1 = (c0 * kb + c1 * kd) % m
        carry0 = _divide(s0 * (6 * j - 5) % m, 2 * j - 1, p, m)
        carry1 = _divide(s1 * (6 * j - 7) % m, 2 * j - 1, p, m)
    const = rows[zero_index]
    positive = rows[zero_index + 1:]

    # T^j rows, highest first:
    # T^j = (2j-1)(2A x + 3B)/(6j-1) T^(j-1), x T^j = (2j-1)(2A x^2 + 3B x)/(6j+1) T^(j-1)
    up0 = up1 = up2 = 0
    for j in range(len(positive), 0, -1):
        c0, c1, c2 = positive[j - 1]
        c0 = (c0 + up0 - A_third * (c2 + up2)) % m
        c1 = (c1 + up1) % m
        f0 = _divide(c0 * (2 * j - 1) % m, 6 * j - 1, p, m)
        f1 = _divide(c1 * (2 * j - 1) % m, 6 * j + 1, p, m)
        up0 = 3 * B * f0 % m
        up1 = (2 * A * f0 + 3 * B * f1) % m
        up2 = 2 * A * f1 % m

    c0 = (const[0] + carry0 + up0) % m
    c1 = (const[1] + carry1 + up1) % m
    c2 = (const[2] + up2) % m
    return (c0 - A_third * c2) % m, c1


def _frobenius_images(A, B, p, plan, vectors):
    """Images of v0 dx/y + v1 x dx/y for each (v0, v1), scaled by p^L and reduced"""
    m = p ** plan.work
    A_m, B_m = _residue(A, m), _residue(B, m)
    D = (4 * A_m ** 3 + 27 * B_m ** 2) % p
    if D == 0:
        raise SingularReduction(f"x^3 + A x + B has a repeated root mod {p}")
    ring = _CurveRing(A_m, B_m, m)

    x_pm1 = ring.power(ring.x(), p - 1)
    X = ring.mul(x_pm1, ring.x())
    X3 = ring.mul(ring.mul(X, X), X)
    E = ring.add(ring.add(X3, X, A_m), ring.one(), B_m)
    E = ring.add(E, ring.shift(ring.one(), p), -1)
    e = ring.shift(E, -p)

    # (1 + e)^(-1/2) = sum binom(-1/2, k) e^k
    series = ring.one()
    term = ring.one()
    for k in range(1, plan.terms):
        term = ring.mul(term, e)
        binom = (-1) ** k * math.comb(2 * k, k) * pow(4 ** k, -1, m) % m
        series = ring.add(series, term, binom)
    G = ring.shift(ring.scale(series, p ** (plan.scale + 1)), -(p - 1) // 2)
    logger.debug("kedlaya: p=%d work=%d terms=%d scale=%d", p, plan.work, plan.terms, plan.scale)

    results = []
    for v0, v1 in vectors:
        poly = ring.add(ring.scale(ring.one(), v0), X, v1)
        form = ring.mul(ring.mul(x_pm1, poly), G)
        r0, r1 = _reduce_form(form, A_m, B_m, p, m)
        pL = p ** plan.scale
        if r0 % pL or r1 % pL:
            raise PrecisionExhausted("reduced form is not divisible by the scaling power")
        pN = p ** plan.N
        results.append((r0 // pL % pN, r1 // pL % pN))
    return results


def _with_retries(compute, p, N):
    retries = get_settings().kedlaya_retries
    guard = 2
    for attempt in range(retries + 1):
        try:
            return compute(_plan(p, N, guard))
        except (PrecisionExhausted, FrobeniusCheckFailed) as error:
            if attempt == retries:
                raise
            logger.warning("kedlaya: %s; retrying with %d more guard digits", error, 2)
            guard += 2


def kedlaya_frobenius_matrix(A, B, p, N, a_p=None):
    """Frobenius matrix on {dx/y, x dx/y} mod p^N.

    A and B may be exact rationals (p-integral) or ZModPN residues.
    """
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")

    def compute(plan):
        (f00, f10), (f01, f11) = _frobenius_images(A, B, p, plan, [(1, 0), (0, 1)])
        F = FrobeniusMatrix.from_ints([[f00, f01], [f10, f11]], p, N)
        _check(F, a_p)
        return F

    F = _with_retries(compute, p, N)
    logger.info("kedlaya_frobenius_matrix: p=%d N=%d %s", p, N, F.render())
    return F


def _check(F, a_p):
    p, N = F.p, F.N
    if F.det().value != p % p ** N:
        raise FrobeniusCheckFailed(f"det F = {F.det().value}, expected {p} mod {p}^{N}")
    if a_p is not None and F.trace().value != a_p % p ** N:
        raise FrobeniusCheckFailed(f"trace F = {F.trace().value}, expected a_p = {a_p}")


def charpoly_check(F, a_p):
    """True when F^2 - a_p F + p I vanishes mod p^N"""
    square = F @ F
    residual = (
        square.a - a_p * F.a + F.p,
        square.b - a_p * F.b,
        square.c - a_p * F.c,
        square.d - a_p * F.d + F.p,
    )
    return all(entry.value == 0 for entry in residual)


def e2_from_matrix(F, N):
    """E2 = -12 B / D where F^N = [[A, B], [C, D]]"""
    power = F.power(N)
    if not power.d.is_unit():
        raise FrobeniusCheckFailed(f"bottom-right entry {power.d.value} of F^{N} is not a unit")
    return -12 * power.b * pow(power.d.value, -1, power.d.modulus.value)


def complete_matrix_from_column(second_col, trace, det):
    """Fill in the first column from the second, the trace and the determinant.

    Returns a FrobeniusMatrix whose ``precision`` maps each entry name to the
    exponent of p it is known to; C loses v_p(B) digits.
    """
    b, d = second_col
    p, N = b.p, b.N
    if b.value == 0:
        raise DegenerateColumn(f"top-right entry vanishes mod {p}^{N}")
    a = trace - d
    v = padic_val(b.value, p)
    numerator = (a * d - det).value
    pv = p ** v
    if numerator % pv:
        raise PrecisionExhausted("A D - det is not divisible by the p-part of B")
    c = (numerator // pv) * pow(b.value // pv, -1, p ** N)
    precision = {"a": N, "b": N, "c": N - v, "d": N}
    return FrobeniusMatrix(a, b, ZModPN.of(c % p ** (N - v), p, N), d, precision=precision)


def kedlaya_with_column_trick(A, B, p, N, a_p):
    """Frobenius matrix from one column plus trace and determinant.

    The second column reduced mod p decides the basis: when its top entry
    is not a unit the column of (1 + x) dx/y is computed instead, and the
    completed matrix is conjugated back to {dx/y, x dx/y}.
    """
    def column(vector, precision):
        def compute(plan):
            return _frobenius_images(A, B, p, plan, [vector])[0]
        return _with_retries(compute, p, precision)

    trace = ZModPN.of(a_p, p, N)
    det = ZModPN.of(p, p, N)
    top, _ = column((0, 1), 1)
    if top % p:
        b, d = column((0, 1), N)
        F = complete_matrix_from_column((ZModPN.of(b, p, N), ZModPN.of(d, p, N)), trace, det)
    else:
        logger.info("kedlaya_with_column_trick: top-right entry is not a unit mod %d, "
                    "switching to the basis {dx/y, (1+x) dx/y}", p)
        u, w = column((1, 1), N)
        # coordinates of the image of (1+x)dx/y in the basis {dx/y, (1+x)dx/y}
        new_col = (ZModPN.of(u - w, p, N), ZModPN.of(w, p, N))
        G = complete_matrix_from_column(new_col, trace, det)
        # F = P G P^-1 with P = [[1, 1], [0, 1]]
        F = FrobeniusMatrix(G.a + G.c, G.b + G.d - G.a - G.c, G.c, G.d - G.c,
                            precision=G.precision)
    _check(F, a_p)
    return F


def _counts_points(p):
    # reading a_p off the trace mod p needs |a_p| < 2 sqrt(p) < p/2, i.e. p >= 17
    return p < TRACE_FROM_MATRIX_MIN_PRIME or p <= get_settings().enumeration_budget


def frobenius_trace(E, p):
    """a_p by point counting, or from the Frobenius matrix mod p above the enumeration budget"""
    if E.discriminant % p == 0:
        raise BadReduction(f"p={p} divides the discriminant")
    if _counts_points(p):
        return count_points(E, p)[1]
    A, B = short_weierstrass_model(E)
    trace = kedlaya_frobenius_matrix(A, B, p, 1).trace().value
    return trace - p if trace > p // 2 else trace


def compute_e2(E, p, N, use_column_trick=False):
    """E2(E, omega) mod p^N for the invariant differential of the given equation"""
    if E.discriminant % p == 0:
        raise BadReduction(f"p={p} divides the discriminant")
    counted = _counts_points(p)
    if not counted:
        logger.warning("compute_e2: p=%d is above the enumeration budget, skipping the trace check", p)
    a_p = frobenius_trace(E, p)
    A, B = short_weierstrass_model(E)
    if a_p % p == 0:
        raise NotGoodOrdinary(f"a_{p} = {a_p} is divisible by {p}")
    if use_column_trick:
        F = kedlaya_with_column_trick(A, B, p, N, a_p)
    else:
        F = kedlaya_frobenius_matrix(A, B, p, N, a_p if counted else None)
    try:
        e2 = e2_from_matrix(F, N)
    except NotAUnit as error:
        raise FrobeniusCheckFailed(str(error))
    logger.info("compute_e2: p=%d N=%d E2=%d", p, N, e2.value)
    return e2
