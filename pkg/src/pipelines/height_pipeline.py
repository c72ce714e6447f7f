"""Cyclotomic p-adic height of a rational point.

    h_p(P) = (2 / n^2) log_p(sigma_p(mQ) / d(mQ)),   Q = n2 P, n = lcm(n1, n2), m = n / n2

with mQ obtained mod p^M' from division polynomial values and sigma known
mod I_(M'+1), M' = M + 2 v_p(n).
"""
import logging
import math
from dataclasses import dataclass, field

from sympy import isprime

from src.pipelines.frobenius_e2 import compute_e2, frobenius_trace
from src.pipelines.sigma_function import compute_sigma
from src.utils.division_polynomials import make_context, multiple_coords
from src.utils.elliptic_curves import check_A1_A2, scalar_mul, torsion_order
from src.utils.errors import (
    A1Violated,
    A2Violated,
    NotAUnit,
    NotGoodOrdinary,
    PreconditionViolated,
    TorsionPoint,
)
from src.utils.padic_numbers import PadicNumber, ZModPN, iwasawa_log, padic_val, split_unit

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("standard", "mst")


@dataclass(frozen=True)
class HeightJob:
    curve: object
    point: object
    p: int
    M: int
    n2: int
    n1: int
    normalization: str = "standard"

    @classmethod
    def create(cls, curve, point, p, M, n2, normalization="standard"):
        """Validate the inputs and count points on the reduction"""
        if not (isinstance(p, int) and p >= 5 and isprime(p)):
            raise PreconditionViolated(f"p must be a prime >= 5, got {p}")
        if M < 2:
            raise PreconditionViolated(f"precision M must be at least 2, got {M}")
        if n2 < 1:
            raise PreconditionViolated(f"tamagawa LCM must be positive, got {n2}")
        if normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {normalization!r}")
        if point.is_infinity or not curve.contains(point):
            raise PreconditionViolated(f"{point} is not an affine point of {curve}")
        if curve.discriminant % p == 0:
            raise NotGoodOrdinary(f"{curve} has bad reduction at {p}")
        a_p = frobenius_trace(curve, p)
        if a_p % p == 0:
            raise NotGoodOrdinary(f"{curve} is supersingular at {p} (a_p = {a_p})")
        return cls(curve, point, p, M, n2, p + 1 - a_p, normalization)

    @property
    def n(self):
        return self.n1 * self.n2 // math.gcd(self.n1, self.n2)

    @property
    def m(self):
        return self.n // self.n2

    @property
    def M_prime(self):
        return self.M + 2 * padic_val(self.n, self.p)


@dataclass(frozen=True)
class HeightResult:
    value: PadicNumber
    precision: int
    diagnostics: dict = field(default_factory=dict)

    def render(self):
        return self.value.render()


def precision_ledger(job):
    """(N_sigma, N_e2, R); N_e2 is 0 when sigma mod I_N_sigma needs no E2"""
    M_prime = job.M_prime
    N_sigma = M_prime + 1
    N_e2 = M_prime - 2 if N_sigma >= 4 else 0
    return N_sigma, N_e2, job.p ** M_prime


def evaluate_sigma_ratio(sigma, triple):
    """(-alpha/beta)(1 + sum c_(k+1) t^k) mod p^M' with t = -d alpha / beta"""
    alpha, beta, d = triple
    p, M_prime = alpha.p, alpha.N
    R = alpha.modulus.value
    if d.value % p:
        raise A1Violated(f"d(mQ) = {d.value} is not divisible by {p}")
    if beta.value % p == 0:
        raise NotAUnit(f"beta(mQ) = {beta.value} is divisible by {p}")
    inv_beta = pow(beta.value, -1, R)
    ratio = -alpha.value * inv_beta % R
    t = -d.value * alpha.value * inv_beta % R

    total = 1
    t_power = 1
    for k in range(1, M_prime):
        t_power = t_power * t % R
        if k + 1 >= sigma.N:
            break
        total += sigma.coeffs[k] * t_power
    return ZModPN.of(ratio * total, p, M_prime)


def _multiple(job, Q, R):
    p, m = job.p, job.m
    M_prime = job.M_prime
    if m == 1:
        alpha, beta, d = Q.reduce(R)
    else:
        ctx = make_context(job.curve, Q, R)
        alpha, beta, d = multiple_coords(ctx, m)
        logger.debug("padic_height: %d division polynomial evaluations for m=%d", ctx.evaluations, m)
    return tuple(ZModPN.of(v, p, M_prime) for v in (alpha, beta, d))


def _balanced_sign(value, R):
    """Sign of the representative of value mod R in (-R/2, R/2]"""
    return 1 if value % R <= R // 2 else -1


def padic_height(job):
    """h_p(P) mod p^M"""
    E, P, p = job.curve, job.point, job.p
    order = torsion_order(E, P)
    if order is not None:
        raise TorsionPoint(f"{P} has order {order}")

    Q = scalar_mul(E, job.n2, P)
    _, a2_holds = check_A1_A2(E, Q, p)
    if not a2_holds:
        raise A2Violated(f"{job.n2}P reduces to a singular point at a bad prime; check the tamagawa LCM")
    v = padic_val(job.n, p)
    if padic_val(job.n2, p):
        logger.warning("padic_height: p=%d divides the tamagawa LCM %d", p, job.n2)

    N_sigma, N_e2, R = precision_ledger(job)
    e2 = compute_e2(E, p, N_e2) if N_e2 else None
    sigma = compute_sigma(E, p, N_sigma, e2)
    triple = _multiple(job, Q, R)
    u = evaluate_sigma_ratio(sigma, triple)
    log_u = iwasawa_log(u)

    _, unit = split_unit(job.n * job.n, p)
    scaled = log_u.value * 2 * pow(unit, -1, R) % R
    value = PadicNumber.from_int(scaled, p, job.M_prime, -2 * v)
    if job.normalization == "mst":
        inv2 = pow(2, -1, p ** max(value.precision, 1))
        value = (value * inv2).shift(-1)

    result = HeightResult(
        value=value,
        precision=job.M,
        diagnostics={
            "n1": job.n1,
            "n2": job.n2,
            "n": job.n,
            "m": job.m,
            "M_prime": job.M_prime,
            "e2_precision": N_e2,
            "sigma_precision": N_sigma,
            "sign": _balanced_sign(triple[2].value, R),
            "p_divides_tamagawa": bool(padic_val(job.n2, p)),
        },
    )
    logger.info("padic_height: %s", result.render())
    return result
