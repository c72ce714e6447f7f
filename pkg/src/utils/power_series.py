"""Truncated power series over Z/p^N and series known modulo the ideal I_N.

A ``PadicSeries`` stores coefficients of t^offset, t^(offset+1), ... as
plain integers in [0, p^N); it is known up to O(t^(offset + len)).
"""
import logging
from dataclasses import dataclass

from src.utils.errors import ModulusMismatch, NotAUnit, NotIntegrable
from src.utils.kronecker import poly_mul
from src.utils.padic_numbers import ZModPN, get_modulus, padic_val, render_expansion

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PadicSeries:
    modulus: object
    coeffs: tuple
    offset: int = 0

    def __post_init__(self):
        m = self.modulus.value
        object.__setattr__(self, "coeffs", tuple(int(c) % m for c in self.coeffs))

    @classmethod
    def from_ints(cls, values, p, N, offset=0):
        return cls(get_modulus(p, N), tuple(values), offset)

    @property
    def p(self):
        return self.modulus.p

    @property
    def N(self):
        return self.modulus.N

    @property
    def order(self):
        """Exponent of the O(t^k) bound"""
        return self.offset + len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def coefficient(self, exponent):
        """Coefficient of t^exponent as a ZModPN"""
        index = exponent - self.offset
        if index >= len(self.coeffs):
            raise IndexError(f"t^{exponent} is beyond O(t^{self.order})")
        value = self.coeffs[index] if index >= 0 else 0
        return ZModPN(self.modulus, value)

    def truncate(self, length):
        return PadicSeries(self.modulus, self.coeffs[:length], self.offset)

    def padded(self, length):
        """Coefficient list of exactly ``length`` entries, zero-extended"""
        values = list(self.coeffs[:length])
        return values + [0] * (length - len(values))

    def reduce(self, N):
        return PadicSeries(get_modulus(self.p, N), self.coeffs, self.offset)

    def shift(self, k):
        """Multiply by t^k"""
        return PadicSeries(self.modulus, self.coeffs, self.offset + k)

    def scale(self, c):
        c = int(c)
        return PadicSeries(self.modulus, tuple(x * c for x in self.coeffs), self.offset)

    def _check(self, other):
        if other.modulus != self.modulus:
            raise ModulusMismatch(
                f"series over Z/{self.p}^{self.N} and Z/{other.p}^{other.N}")

    def __add__(self, other):
        self._check(other)
        low = min(self.offset, other.offset)
        high = min(self.order, other.order)
        values = [0] * max(high - low, 0)
        for series in (self, other):
            for i, c in enumerate(series.coeffs):
                e = series.offset + i
                if e < high:
                    values[e - low] += c
        return PadicSeries(self.modulus, tuple(values), low)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        terms = [f"{c}*t^{self.offset + i}" for i, c in enumerate(self.coeffs) if c]
        terms.append(f"O(t^{self.order})")
        return f"PadicSeries[{self.p}^{self.N}](" + " + ".join(terms) + ")"


def series_mul(f, g, trunc):
    """f * g keeping ``trunc`` coefficients; offsets add"""
    f._check(g)
    coeffs = poly_mul(list(f.coeffs), list(g.coeffs), f.modulus.value, trunc)
    return PadicSeries(f.modulus, tuple(coeffs), f.offset + g.offset)


def series_inv(f, trunc):
    """1/f by Newton iteration g <- g(2 - fg); the leading coefficient must be a unit"""
    m = f.modulus.value
    if not f.coeffs or f.coeffs[0] % f.p == 0:
        raise NotAUnit("series with non-unit leading coefficient is not invertible")
    coeffs = list(f.coeffs)
    g = [pow(coeffs[0], -1, m)]
    n = 1
    while n < trunc:
        n = min(2 * n, trunc)
        fg = poly_mul(coeffs[:n], g, m, n)
        fg += [0] * (n - len(fg))
        e = [(-c) % m for c in fg]
        e[0] = (e[0] + 2) % m
        g = poly_mul(g, e, m, n)
    return PadicSeries(f.modulus, tuple(g[:trunc]), -f.offset)


def series_derivative(f):
    """d/dt, reported with the offset the result naturally has"""
    if f.offset == 0:
        return PadicSeries(f.modulus, tuple(j * c for j, c in enumerate(f.coeffs) if j), 0)
    coeffs = tuple((f.offset + j) * c for j, c in enumerate(f.coeffs))
    return PadicSeries(f.modulus, coeffs, f.offset - 1)


def divide_exact(c, k, p, m):
    """c / k mod m, or None when the p-part of k does not divide c"""
    v = padic_val(k, p)
    pv = p ** v
    if c % pv:
        return None
    return (c // pv) * pow(k // pv, -1, m) % m


def series_integrate(f):
    """Formal antiderivative with zero constant term.

    Returns:
        (integral, loss) where loss maps each exponent whose coefficient lost
        precision to the exponent of p it is still known to
    """
    p, N, m = f.p, f.N, f.modulus.value
    result_offset = f.offset + 1 if f.offset < -1 else 0
    length = f.order + 1 - result_offset
    values = [0] * length
    loss = {}
    for i, c in enumerate(f.coeffs):
        e = f.offset + i
        if e == -1:
            if c:
                raise NotIntegrable(-1, "t^-1 term has no antiderivative")
            continue
        k = e + 1
        quotient = divide_exact(c, k, p, m)
        if quotient is None:
            raise NotIntegrable(e, f"coefficient {c} of t^{e} is not divisible by the p-part of {k}")
        values[k - result_offset] = quotient
        v = padic_val(k, p)
        if v:
            loss[k] = max(N - v, 0)
    if loss:
        logger.debug("series_integrate: precision loss at exponents %s", sorted(loss))
    return PadicSeries(f.modulus, tuple(values), result_offset), loss


@dataclass(frozen=True)
class IdealSeries:
    """sum_{1 <= k < N} c_k t^k with c_k known modulo p^(N-k)"""
    p: int
    N: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != max(self.N - 1, 0):
            raise ValueError(f"expected {self.N - 1} coefficients, got {len(self.coeffs)}")
        reduced = tuple(int(c) % self.p ** (self.N - k) for k, c in enumerate(self.coeffs, start=1))
        object.__setattr__(self, "coeffs", reduced)

    def coefficient(self, k):
        if not 1 <= k < self.N:
            raise IndexError(f"t^{k} is not stored modulo I_{self.N}")
        return ZModPN.of(self.coeffs[k - 1], self.p, self.N - k)

    def precision(self, k):
        return self.N - k

    def truncate(self, N):
        """The image of this series modulo I_N for N no larger than the current one"""
        if N > self.N:
            raise ValueError(f"cannot raise I_{self.N} to I_{N}")
        return type(self)(self.p, N, self.coeffs[:max(N - 1, 0)])

    def render(self):
        lines = []
        for k, c in enumerate(self.coeffs, start=1):
            digits = []
            value = c
            for _ in range(self.N - k):
                value, d = divmod(value, self.p)
                digits.append(d)
            lines.append(f"t^{k}: " + render_expansion(self.p, 0, digits, self.N - k))
        return "\n".join(lines)
