"""Residues mod p^N and p-adic numbers with explicit precision.

Everything above this module works with plain Python integers reduced into
[0, p^N); ``ZModPN`` wraps such a residue together with a shared
``PadicModulus`` so that mixed-precision mistakes fail loudly.
"""
import functools
import logging
import math
import re
from dataclasses import dataclass, field

from src.utils.errors import ModulusMismatch, NotAUnit

logger = logging.getLogger(__name__)


def ilog(n, p):
    """Largest k with p^k <= n (0 for n < p)"""
    k = 0
    power = p
    while power <= n:
        power *= p
        k += 1
    return k


def padic_val(a, p):
    """Largest k with p^k | a, or math.inf for a = 0"""
    if a == 0:
        return math.inf
    a = abs(a)
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k


def split_unit(a, p):
    """Write a nonzero integer as p^v * u with p not dividing u"""
    v = padic_val(a, p)
    return v, a // p ** v


@dataclass(frozen=True)
class PadicModulus:
    p: int
    N: int
    value: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.N < 0:
            raise ValueError(f"precision must be non-negative, got {self.N}")
        object.__setattr__(self, "value", self.p ** self.N)


@functools.lru_cache(maxsize=None)
def get_modulus(p, N):
    """Shared modulus descriptor for Z/p^N"""
    return PadicModulus(p, N)


@dataclass(frozen=True)
class ZModPN:
    modulus: PadicModulus
    value: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.modulus.value)

    @classmethod
    def of(cls, value, p, N):
        return cls(get_modulus(p, N), value)

    @property
    def p(self):
        return self.modulus.p

    @property
    def N(self):
        return self.modulus.N

    def _coerce(self, other):
        if isinstance(other, ZModPN):
            if other.modulus != self.modulus:
                raise ModulusMismatch(
                    f"Z/{self.p}^{self.N} and Z/{other.p}^{other.N} cannot be combined")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ZModPN(self.modulus, self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ZModPN(self.modulus, self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ZModPN(self.modulus, o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ZModPN(self.modulus, self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return ZModPN(self.modulus, -self.value)

    def __pow__(self, exponent):
        if exponent < 0:
            return inv_mod_ppow(self) ** (-exponent)
        return ZModPN(self.modulus, pow(self.value, exponent, self.modulus.value))

    def __int__(self):
        return self.value

    def is_unit(self):
        return self.value % self.p != 0

    def reduce(self, N):
        """The same residue in the coarser ring Z/p^N"""
        if N > self.N:
            raise ValueError(f"cannot raise precision from {self.N} to {N}")
        return ZModPN.of(self.value, self.p, N)

    def lift(self, N):
        """Re-read the stored representative in the finer ring Z/p^N"""
        return ZModPN.of(self.value, self.p, N)

    def __repr__(self):
        return f"{self.value} mod {self.p}^{self.N}"


def inv_mod_ppow(a):
    """Inverse of a unit residue mod p^N"""
    if a.value % a.p == 0:
        raise NotAUnit(f"{a.value} is divisible by {a.p}")
    return ZModPN(a.modulus, pow(a.value, -1, a.modulus.value))


def iwasawa_log(u):
    """Iwasawa logarithm of a unit, correct mod p^N.

    log_p(u) = (p-1)^{-1} log(u^{p-1}) where u^{p-1} = 1 + x with p | x; the
    series sum (-1)^{k+1} x^k / k is evaluated with guard digits so that the
    divisions by k are exact.
    """
    p, N = u.p, u.N
    if u.value % p == 0:
        raise NotAUnit(f"log of {u.value}, which is divisible by {p}")
    guard = ilog(2 * N + 2, p) + 1
    work = p ** (N + guard)
    pN = p ** N
    x = (pow(u.value, p - 1, work) - 1) % work

    total = 0
    power = 1
    k = 0
    # terms with k - floor(log_p k) >= N vanish mod p^N
    while True:
        k += 1
        if k - ilog(k, p) >= N:
            break
        power = power * x % work
        v, unit = split_unit(k, p)
        term = (power // p ** v) * pow(unit, -1, pN)
        total += term if k % 2 else -term
    result = total * pow(p - 1, -1, pN)
    logger.debug("iwasawa_log: p=%d N=%d terms=%d guard=%d", p, N, k - 1, guard)
    return ZModPN.of(result, p, N)


@dataclass(frozen=True)
class PadicNumber:
    """p^valuation * unit, known modulo p^(valuation + precision).

    The distinguished zero has ``unit`` None and ``precision`` 0; its
    valuation is the absolute precision to which it is known.
    """
    p: int
    valuation: int
    unit: object
    precision: int

    @classmethod
    def zero(cls, p, absolute_precision):
        return cls(p, absolute_precision, None, 0)

    @classmethod
    def from_int(cls, value, p, absolute_precision, valuation_shift=0):
        """value * p^valuation_shift, where value is known mod p^absolute_precision"""
        if absolute_precision <= 0:
            return cls.zero(p, absolute_precision + valuation_shift)
        value %= p ** absolute_precision
        if value == 0:
            return cls.zero(p, absolute_precision + valuation_shift)
        v, unit = split_unit(value, p)
        relative = absolute_precision - v
        return cls(p, v + valuation_shift, ZModPN.of(unit, p, relative), relative)

    @property
    def absolute_precision(self):
        return self.valuation + self.precision

    def is_zero(self):
        return self.unit is None

    def shift(self, k):
        """Multiply by p^k"""
        return PadicNumber(self.p, self.valuation + k, self.unit, self.precision)

    def truncate(self, absolute_precision):
        if absolute_precision >= self.absolute_precision:
            return self
        if self.is_zero() or absolute_precision <= self.valuation:
            return PadicNumber.zero(self.p, absolute_precision)
        return PadicNumber.from_int(
            self.unit.value, self.p, absolute_precision - self.valuation, self.valuation)

    def _scaled_value(self, base):
        """Integer representative of self * p^(-base)"""
        if self.is_zero():
            return 0
        return self.unit.value * self.p ** (self.valuation - base)

    def __add__(self, other):
        if isinstance(other, int):
            other = PadicNumber.from_int(other, self.p, self.absolute_precision)
        if other.p != self.p:
            raise ModulusMismatch(f"{self.p}-adic and {other.p}-adic numbers")
        base = min(self.valuation, other.valuation)
        absolute = min(self.absolute_precision, other.absolute_precision)
        total = self._scaled_value(base) + other._scaled_value(base)
        return PadicNumber.from_int(total, self.p, absolute - base, base)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.p, self.valuation, -self.unit, self.precision)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return PadicNumber.zero(self.p, self.absolute_precision)
            v, unit = split_unit(other, self.p)
            if self.is_zero():
                return self.shift(v)
            return PadicNumber(self.p, self.valuation + v, self.unit * unit, self.precision)
        if other.p != self.p:
            raise ModulusMismatch(f"{self.p}-adic and {other.p}-adic numbers")
        if self.is_zero() or other.is_zero():
            absolute = min(self.absolute_precision + (0 if other.is_zero() else other.valuation),
                           other.absolute_precision + (0 if self.is_zero() else self.valuation))
            return PadicNumber.zero(self.p, absolute)
        precision = min(self.precision, other.precision)
        unit = self.unit.reduce(precision) * other.unit.reduce(precision)
        return PadicNumber(self.p, self.valuation + other.valuation, unit, precision)

    __rmul__ = __mul__

    def digits(self):
        """Base-p digits d_v, ..., d_{v+precision-1}, least significant first"""
        value = 0 if self.is_zero() else self.unit.value
        out = []
        for _ in range(self.precision):
            value, d = divmod(value, self.p)
            out.append(d)
        return out

    def render(self):
        return render_expansion(self.p, self.valuation, self.digits(), self.absolute_precision)

    def to_json(self):
        return {
            "valuation": self.valuation,
            "digits": self.digits(),
            "p": self.p,
            "precision": self.absolute_precision,
        }

    def __str__(self):
        return self.render()


def _power_text(p, e):
    if e == 1:
        return str(p)
    return f"{p}^{e}"


def render_expansion(p, valuation, digits, absolute_precision):
    """Least-significant-first digit string, e.g. '4*5 + 3*5^2 + O(5^5)'"""
    terms = []
    for i, d in enumerate(digits):
        if d == 0:
            continue
        e = valuation + i
        if e == 0:
            terms.append(str(d))
        elif d == 1:
            terms.append(_power_text(p, e))
        else:
            terms.append(f"{d}*{_power_text(p, e)}")
    terms.append(f"O({_power_text(p, absolute_precision)})")
    return " + ".join(terms)


_TERM = re.compile(r"^(?:(\d+)\*)?(\d+)(?:\^(-?\d+))?$")
_BIG_O = re.compile(r"^O\((\d+)(?:\^(-?\d+))?\)$")


def parse_expansion(text):
    """Parse the output of render_expansion back into a PadicNumber"""
    parts = [part.strip() for part in text.split(" + ")]
    match = _BIG_O.match(parts[-1]) if parts else None
    if not match:
        raise ValueError(f"expansion must end with O(p^k): {text!r}")
    p = int(match.group(1))
    absolute = int(match.group(2)) if match.group(2) is not None else 1

    coefficients = {}
    for part in parts[:-1]:
        term = _TERM.match(part)
        if not term:
            raise ValueError(f"cannot parse term {part!r}")
        digit, base, exponent = term.groups()
        base = int(base)
        if digit is None and exponent is None:
            # bare integer: a constant digit, or p itself
            e, d = (1, 1) if base == p else (0, base)
        else:
            if base != p:
                raise ValueError(f"term {part!r} is not a power of {p}")
            e = int(exponent) if exponent is not None else 1
            d = int(digit) if digit is not None else 1
        if not 0 < d < p or e in coefficients or e >= absolute:
            raise ValueError(f"invalid digit term {part!r}")
        coefficients[e] = d

    if not coefficients:
        return PadicNumber.zero(p, absolute)
    low = min(coefficients)
    value = sum(d * p ** (e - low) for e, d in coefficients.items())
    return PadicNumber.from_int(value, p, absolute - low, low)
