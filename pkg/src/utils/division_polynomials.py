"""Coordinates of mQ mod R from normalized division polynomial values.

With Q = (alpha/d^2, beta/d^3) the scaled values g~_j = d^(j^2-1) psi_j(Q)
(up to the factor T~ for even j) satisfy the usual doubling recurrences with
every quantity an integer, so they can be evaluated mod any odd R.
"""
import logging
from dataclasses import dataclass, field

from src.utils.elliptic_curves import torsion_order
from src.utils.errors import EvenModulus, PreconditionViolated, TorsionCollapse

logger = logging.getLogger(__name__)


@dataclass
class DivPolyContext:
    R: int
    alpha: int
    beta: int
    d: int
    a: dict
    b: dict
    B4: int
    B6: int
    B8: int
    T: int
    memo: dict = field(default_factory=dict)
    evaluations: int = 0
    curve: object = None
    point: object = None


def make_context(E, Q, R):
    """Normalized constants of E at Q, reduced mod the odd modulus R"""
    if R % 2 == 0:
        raise EvenModulus(f"R={R} is even; the recurrence needs 1/2")
    if R < 3:
        raise ValueError(f"R must be at least 3, got {R}")
    if Q.is_infinity:
        raise PreconditionViolated("Q is the point at infinity")
    alpha, beta, d = Q.reduce(R)

    a = {k: d ** k * getattr(E, f"a{k}") % R for k in (1, 2, 3, 4, 6)}
    b = {
        2: (a[1] * a[1] + 4 * a[2]) % R,
        4: (2 * a[4] + a[1] * a[3]) % R,
        6: (a[3] * a[3] + 4 * a[6]) % R,
        8: (a[1] * a[1] * a[6] + 4 * a[2] * a[6] - a[1] * a[3] * a[4]
            + a[2] * a[3] * a[3] - a[4] * a[4]) % R,
    }
    B4 = (6 * alpha ** 2 + b[2] * alpha + b[4]) % R
    B6 = (4 * alpha ** 3 + b[2] * alpha ** 2 + 2 * b[4] * alpha + b[6]) % R
    B8 = (3 * alpha ** 4 + b[2] * alpha ** 3 + 3 * b[4] * alpha ** 2
          + 3 * b[6] * alpha + b[8]) % R
    T = (2 * beta + a[1] * alpha + a[3]) % R

    ctx = DivPolyContext(R=R, alpha=alpha, beta=beta, d=d, a=a, b=b,
                         B4=B4, B6=B6, B8=B8, T=T, curve=E, point=Q)
    ctx.memo.update({
        0: 0,
        1: 1,
        2: R - 1,
        3: B8,
        4: (B6 * B6 - B4 * B8) % R,
    })
    return ctx


def g_value(ctx, j):
    """g~_j mod R, recursing on the window around j/2 and memoizing"""
    memo = ctx.memo
    if j in memo:
        return memo[j]
    R = ctx.R
    n = j // 2
    if j % 2:
        g_n2, g_n, g_nm1, g_n1 = g_value(ctx, n + 2), g_value(ctx, n), g_value(ctx, n - 1), g_value(ctx, n + 1)
        B6_sq = ctx.B6 * ctx.B6
        if n % 2 == 0:
            value = B6_sq * g_n2 * g_n ** 3 - g_nm1 * g_n1 ** 3
        else:
            value = g_n2 * g_n ** 3 - B6_sq * g_nm1 * g_n1 ** 3
    else:
        g_n = g_value(ctx, n)
        value = g_n * (g_value(ctx, n - 2) * g_value(ctx, n + 1) ** 2
                       - g_value(ctx, n + 2) * g_value(ctx, n - 1) ** 2)
    value %= R
    memo[j] = value
    ctx.evaluations += 1
    return value


def psi_value(ctx, j):
    """psi~_j = T~^((j+1) mod 2) g~_j"""
    g = g_value(ctx, j)
    return g * ctx.T % ctx.R if j % 2 == 0 else g


def multiple_coords(ctx, m):
    """(alpha(mQ), +-beta(mQ), +-d(mQ)) mod R; the two signs agree"""
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    R = ctx.R
    psi_m = psi_value(ctx, m)
    psi_next = psi_value(ctx, m + 1)
    psi_prev = psi_value(ctx, m - 1)
    if psi_m == 0 and ctx.curve is not None:
        order = torsion_order(ctx.curve, ctx.point)
        if order is not None and m % order == 0:
            raise TorsionCollapse(f"{m}Q is the identity: Q has order {order}")

    theta = (ctx.alpha * psi_m * psi_m - psi_next * psi_prev) % R
    g = {k: g_value(ctx, k) for k in range(m - 2, m + 3)}
    T_power = ctx.T if m % 2 else 1
    omega = (T_power * (g[m - 2] * g[m + 1] ** 2 - g[m + 2] * g[m - 1] ** 2)
             + psi_m * (ctx.a[1] * theta + ctx.a[3] * psi_m * psi_m))
    omega = -omega * pow(2, -1, R) % R
    d_m = psi_m * ctx.d % R
    logger.debug("multiple_coords: m=%d evaluations=%d", m, ctx.evaluations)
    return theta, omega, d_m
