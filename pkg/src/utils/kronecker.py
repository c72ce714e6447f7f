"""Polynomial multiplication over Z/m by Kronecker substitution.

Coefficient lists are packed into one big integer with fixed-width slots,
multiplied once as gmpy2 integers and unpacked again.
"""
from gmpy2 import mpz

SCHOOLBOOK_THRESHOLD = 32


def _schoolbook(a, b, m, out_len):
    out = [0] * out_len
    for i, ai in enumerate(a):
        if ai == 0 or i >= out_len:
            continue
        for j in range(min(len(b), out_len - i)):
            out[i + j] += ai * b[j]
    return [c % m for c in out]


def _pack(coeffs, nbytes):
    return int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in coeffs), "little")


def _big_mul(x, y):
    return int(mpz(x) * mpz(y))


def poly_mul(a, b, m, trunc=None):
    """Product of two coefficient lists mod m, keeping at most trunc terms.

    Args:
        a, b: coefficients (constant term first), each reduced into [0, m)
        m: modulus
        trunc: number of output coefficients to keep, or None for all

    Returns:
        list of len(a) + len(b) - 1 coefficients (or trunc, if smaller)
    """
    if not a or not b:
        return []
    full_len = len(a) + len(b) - 1
    out_len = full_len if trunc is None else min(trunc, full_len)
    if out_len <= 0:
        return []
    square = a is b
    a = a[:out_len]
    b = a if square else b[:out_len]
    if min(len(a), len(b)) < SCHOOLBOOK_THRESHOLD:
        return _schoolbook(a, b, m, out_len)

    # slot must hold a sum of min(len) products below m^2
    bits = 2 * m.bit_length() + min(len(a), len(b)).bit_length() + 1
    nbytes = (bits + 7) // 8
    packed_a = _pack(a, nbytes)
    packed_b = packed_a if square else _pack(b, nbytes)
    product = _big_mul(packed_a, packed_b)

    total = len(a) + len(b) - 1
    raw = product.to_bytes(total * nbytes, "little")
    return [
        int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") % m
        for i in range(out_len)
    ]
