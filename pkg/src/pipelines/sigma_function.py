"""The p-adic sigma function modulo I_N.

sigma(t) = t * theta(t) where theta'/theta = h(t) and

    h(t) = -1/t - omega(t) * (integral of (x(t) + c) omega(t) dt + a1/2),
    c = (a1^2 + 4 a2 - E2) / 12.

theta is recovered from h by a division-free Newton iteration whose
integration errors all land in the ideal J = (p^(k-1) t^p, p^(k-2) t^(p^2), ...).
"""
import logging
from dataclasses import dataclass

from src.utils.errors import NotIntegrable, PreconditionViolated
from src.utils.formal_group import compute_w, compute_xy_omega
from src.utils.kronecker import poly_mul
from src.utils.padic_numbers import ZModPN, get_modulus, ilog
from src.utils.power_series import (
    IdealSeries,
    PadicSeries,
    divide_exact,
    series_derivative,
    series_integrate,
    series_inv,
    series_mul,
)

logger = logging.getLogger(__name__)


class SigmaSeries(IdealSeries):
    """sigma_p(t) = t + c_2 t^2 + ... with c_k known mod p^(N-k)"""

    def render(self):
        terms = ["t"]
        for k in range(2, self.N):
            c = self.coeffs[k - 1]
            terms.append(f"({c} + O({self.p}^{self.N - k}))*t^{k}")
        terms.append(f"O(t^{self.N})")
        return " + ".join(terms)


@dataclass(frozen=True)
class HSeries:
    """h(t) with its precision profile.

    ``regular`` holds t^0 .. t^(N-1) over Z/p^(N-3); the constant term is
    carried separately mod p^(N-2).
    """
    regular: PadicSeries
    constant: ZModPN
    profile: dict

    def lifted(self):
        """The stored residues read mod p^(N-2), constant replaced by its lift"""
        p, k = self.constant.p, self.constant.N
        coeffs = (self.constant.value,) + self.regular.coeffs[1:]
        return PadicSeries(get_modulus(p, k), coeffs)


def half(value, modulus):
    return value * pow(2, -1, modulus.value)


def compute_c(E, e2):
    """(a1^2 + 4 a2 - E2) / 12 at the precision of e2"""
    numerator = ZModPN(e2.modulus, E.a1 * E.a1 + 4 * E.a2) - e2
    return numerator * pow(12, -1, e2.modulus.value)


def compute_h_hat(fg, c, N):
    """Build h(t) from the formal group data and c.

    The coefficient of t^j (1 <= j < N) is known mod p^(N-3-floor(log_p j));
    the constant term is a1/2, returned mod p^(N-2).
    """
    modulus = fg.modulus
    p = modulus.p
    a1 = fg.curve.a1
    if c.modulus != modulus:
        c = ZModPN(modulus, c.value)

    # (x + c) omega = t^-2 [(X + c t^2) omega]
    X = list(fg.x_unit.coeffs)
    if len(X) > 2:
        X[2] += c.value
    shifted = PadicSeries(modulus, tuple(X), -2)
    product = series_mul(shifted, fg.omega, N + 1)

    integral, loss = series_integrate(product)
    values = list(integral.coeffs)
    values[1] += half(a1, modulus)
    integral = PadicSeries(modulus, tuple(values), integral.offset)

    inner = series_mul(fg.omega, integral, N + 1)
    if inner.coeffs[0] != modulus.value - 1:
        raise PreconditionViolated(
            f"t^-1 coefficient of omega * integral is {inner.coeffs[0]}, expected -1")
    regular = PadicSeries(modulus, tuple(-value for value in inner.coeffs[1:N + 1]))

    expected = half(a1, modulus) % modulus.value
    if regular.coeffs[0] != expected:
        raise PreconditionViolated(
            f"constant term of h is {regular.coeffs[0]}, expected a1/2 = {expected}")
    constant = ZModPN.of(half(a1, get_modulus(p, N - 2)), p, N - 2)

    profile = {0: N - 2}
    for j in range(1, N):
        profile[j] = N - 3 - ilog(j, p)
    if loss:
        logger.debug("compute_h_hat: integration lost digits at %s", sorted(loss))
    return HSeries(regular=regular, constant=constant, profile=profile)


def brent_solve(f, n):
    """F with F(0) = 1 and F'/F = f, modulo (t^n, J).

    Each step doubles the number of correct terms: g = F'/F - f is integrated
    with exact divisions, and F <- F (1 - G).
    """
    p, k = f.p, f.N
    m = f.modulus.value
    if n * n >= p ** k:
        raise PreconditionViolated(f"n={n} is not below p^(k/2) for p={p}, k={k}")
    target = list(f.coeffs)
    F = [1]
    known = 1
    while known < n:
        known = min(2 * known, n)
        current = PadicSeries(f.modulus, tuple(F + [0] * (known - len(F))))
        log_derivative = series_mul(series_derivative(current),
                                    series_inv(current, known - 1), known - 1)
        G = [0] * known
        for j, c in enumerate(log_derivative.coeffs):
            target_j = target[j] if j < len(target) else 0
            quotient = divide_exact(c - target_j, j + 1, p, m)
            if quotient is None:
                raise NotIntegrable(j, f"F'/F - f is not integrable at t^{j} (p={p}, k={k})")
            G[j + 1] = quotient
        one_minus_G = [(-g) % m for g in G]
        one_minus_G[0] = 1
        F = poly_mul(current.padded(known), one_minus_G, m, known)
        logger.debug("brent_solve: %d terms correct mod J", known)
    return PadicSeries(f.modulus, tuple(F[:n] + [0] * (n - len(F))))


def trivial_sigma(E, p, N):
    """sigma mod I_N for N <= 3"""
    coeffs = []
    if N >= 2:
        coeffs.append(1)
    if N >= 3:
        coeffs.append(E.a1 * pow(2, -1, p))
    return SigmaSeries(p, N, tuple(coeffs))


def compute_sigma(E, p, N, e2=None):
    """sigma_p(t) mod I_N given E2 mod p^(N-3)"""
    if N <= 3:
        return trivial_sigma(E, p, N)
    if e2 is None:
        raise PreconditionViolated(f"E2 mod {p}^{N - 3} is required for N={N}")
    if e2.p != p or e2.N < N - 3:
        raise PreconditionViolated(f"E2 must be known mod {p}^{N - 3}, got {e2!r}")
    e2 = e2.reduce(N - 3)

    c = compute_c(E, e2)
    fg = compute_xy_omega(E, compute_w(E, p, N))
    h = compute_h_hat(fg, c, N)
    theta = brent_solve(h.lifted(), N - 1)

    coeffs = [1] + [theta.coeffs[k - 1] for k in range(2, N)]
    sigma = SigmaSeries(p, N, tuple(coeffs))
    if sigma.coeffs[1] != h.constant.value % p ** (N - 2):
        raise PreconditionViolated("coefficient of t^2 in sigma differs from a1/2")
    logger.info("compute_sigma: p=%d N=%d assembled", p, N)
    return sigma
