"""Formal group expansions w(t), x(t), y(t) and omega(t) of a Weierstrass curve.

Everything is computed over Z/p^(N-3) to O(t^(N+1)); poles are kept out of
the stored series by working with t^-3 w, t^2 x and t^3 y.
"""
import logging
from dataclasses import dataclass

from src.utils.padic_numbers import get_modulus
from src.utils.power_series import PadicSeries, series_derivative, series_inv, series_mul

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormalGroupData:
    N: int
    w_unit: PadicSeries
    x_unit: PadicSeries
    y_unit: PadicSeries
    omega: PadicSeries
    curve: object = None

    @property
    def modulus(self):
        return self.w_unit.modulus

    @property
    def x_series(self):
        """x(t) = t^-2 (t^2 x)"""
        return self.x_unit.shift(-2)

    @property
    def y_series(self):
        """y(t) = t^-3 (t^3 y)"""
        return self.y_unit.shift(-3)


def _monomial(modulus, exponent, coefficient, length):
    values = [0] * length
    if exponent < length:
        values[exponent] = coefficient
    return PadicSeries(modulus, tuple(values))


def compute_w(E, p, N):
    """t^-3 w(t) to O(t^(N+1)) over Z/p^(N-3).

    Newton iteration on F(w) = w - (t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3)
    starting from w = t^3; the number of correct terms of w doubles each step.
    In terms of W = t^-3 w one step is

        W' = (1 - a3 t^3 W^2 - a4 t^4 W^2 - 2 a6 t^6 W^3)
             / (1 - a1 t - a2 t^2 - 2 a3 t^3 W - 2 a4 t^4 W - 3 a6 t^6 W^2)
    """
    if N < 4:
        raise ValueError(f"formal group expansions need N >= 4, got {N}")
    modulus = get_modulus(p, N - 3)
    a1, a2, a3, a4, a6 = E.a_invariants

    target = N + 4
    known = 4
    W = PadicSeries(modulus, (1,))
    while known < target:
        known = min(2 * known, target)
        n = known - 3
        W = PadicSeries(modulus, tuple(W.padded(n)))
        W2 = series_mul(W, W, n)
        W3 = series_mul(W2, W, n)

        numerator = (_monomial(modulus, 0, 1, n)
                     - series_mul(_monomial(modulus, 3, a3, n), W2, n)
                     - series_mul(_monomial(modulus, 4, a4, n), W2, n)
                     - series_mul(_monomial(modulus, 6, 2 * a6, n), W3, n))
        denominator = (_monomial(modulus, 0, 1, n)
                       - _monomial(modulus, 1, a1, n)
                       - _monomial(modulus, 2, a2, n)
                       - series_mul(_monomial(modulus, 3, 2 * a3, n), W, n)
                       - series_mul(_monomial(modulus, 4, 2 * a4, n), W, n)
                       - series_mul(_monomial(modulus, 6, 3 * a6, n), W2, n))
        W = series_mul(numerator, series_inv(denominator, n), n)
        logger.debug("compute_w: w known to O(t^%d)", known)
    return W


def compute_xy_omega(E, w):
    """x(t) = t/w, y(t) = -1/w and omega(t) = x'(t) / (2y + a1 x + a3).

    With X = t^2 x = 1/W the invariant differential is

        omega = (-2X + t X') / (-2X + a1 t X + a3 t^3)
    """
    n = len(w)
    modulus = w.modulus
    X = series_inv(w, n)
    Y = -X

    t_dX = PadicSeries(modulus, (0,) + series_derivative(X).coeffs)
    numerator = X.scale(-2) + t_dX
    denominator = (X.scale(-2)
                   + PadicSeries(modulus, tuple([0] + list(X.scale(E.a1).coeffs[:n - 1])))
                   + _monomial(modulus, 3, E.a3, n))
    omega = series_mul(numerator, series_inv(denominator, n), n)
    logger.debug("compute_xy_omega: %d terms over Z/%d^%d", n, modulus.p, modulus.N)
    return FormalGroupData(N=n - 1, w_unit=w, x_unit=X, y_unit=Y, omega=omega, curve=E)
