"""Sound enclosures and exact comparisons for rational powers.

Moment comparisons need values like ``E[Z^q]^{1/q}`` or ``2^{1-1/q}`` that
are irrational for fractional exponents.  Rather than trusting float
rounding, every such value is handled one of two ways:

* as an exact *power product* ``prod base_i^{expo_i}`` with rational bases
  and exponents, which two sides can compare exactly by clearing exponent
  denominators (raising both sides to a common integer power is monotone
  on nonnegative reals); or
* as a directed enclosure ``[lo, hi]`` of exact rationals obtained from
  integer k-th roots, so a verdict reached by comparing an upper bound
  against a lower bound can never be flipped by rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

try:
    from gmpy2 import iroot as _gmpy_iroot
except ImportError:  # pragma: no cover - gmpy2 is optional
    _gmpy_iroot = None

PowerFactor = Tuple[Fraction, Fraction]  # (base >= 0, exponent)
PowerProduct = Tuple[PowerFactor, ...]

DEFAULT_BITS = 96
MAX_BITS = 4096


def iroot_floor(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1, computed exactly."""
    if n < 0 or k < 1:
        raise ValueError("iroot_floor needs n >= 0 and k >= 1")
    if n in (0, 1) or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    # k = 2^j reduces to nested integer square roots
    if k & (k - 1) == 0:
        r = n
        while k > 1:
            r = math.isqrt(r)
            k >>= 1
        return r
    if _gmpy_iroot is not None:
        return int(_gmpy_iroot(n, k)[0])
    # Newton iteration on integers, seeded from the float estimate
    r = int(n ** (1.0 / k)) + 1
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > n:
        r -= 1
    return r


def nth_root_bounds(x: Fraction, k: int, bits: int = DEFAULT_BITS) -> Tuple[Fraction, Fraction]:
    """Enclosure lo <= x**(1/k) <= hi with hi - lo <= 2**-bits * (1/den)."""
    if x < 0:
        raise ValueError("nth_root_bounds needs x >= 0")
    if k < 1:
        raise ValueError("k must be >= 1")
    if x == 0:
        return Fraction(0), Fraction(0)
    if k == 1:
        return x, x
    num, den = x.numerator, x.denominator
    # x^{1/k} = (num * den^{k-1})^{1/k} / den
    m = num * den ** (k - 1)
    shifted = m << (k * bits)
    r = iroot_floor(shifted, k)
    scale = den << bits
    if r ** k == shifted:
        v = Fraction(r, scale)
        return v, v
    return Fraction(r, scale), Fraction(r + 1, scale)


def pow_bounds(x: Fraction, expo: Fraction, bits: int = DEFAULT_BITS) -> Tuple[Fraction, Fraction]:
    """Enclosure of x**expo for x >= 0 (x > 0 when expo < 0)."""
    a, b = expo.numerator, expo.denominator
    if x == 0:
        if a <= 0:
            raise ZeroDivisionError("0 to a nonpositive power")
        return Fraction(0), Fraction(0)
    y = x ** a  # exact Fraction, handles negative a
    return nth_root_bounds(y, b, bits)


def product_bounds(factors: Iterable[PowerFactor], bits: int = DEFAULT_BITS) -> Tuple[Fraction, Fraction]:
    """Enclosure of prod base^expo over nonnegative bases."""
    lo = hi = Fraction(1)
    for base, expo in factors:
        blo, bhi = pow_bounds(base, expo, bits)
        lo *= blo
        hi *= bhi
    return lo, hi


def product_value(factors: Sequence[PowerFactor]) -> float:
    out = 1.0
    for base, expo in factors:
        out *= float(base) ** float(expo)
    return out


def compare_products(left: Sequence[PowerFactor], right: Sequence[PowerFactor]) -> int:
    """Exact three-way comparison of two power products (-1, 0, or 1).

    Both sides are raised to the lcm of all exponent denominators, turning
    them into plain Fractions; this is monotone so the order is preserved.
    """
    lcm = 1
    for base, expo in tuple(left) + tuple(right):
        if base < 0:
            raise ValueError("power products need nonnegative bases")
        lcm = lcm * expo.denominator // math.gcd(lcm, expo.denominator)

    def raised(factors):
        value = Fraction(1)
        for base, expo in factors:
            e = expo * lcm
            assert e.denominator == 1
            e = e.numerator
            if base == 0:
                if e > 0:
                    return Fraction(0)
                raise ZeroDivisionError("0 to a nonpositive power")
            value *= Fraction(base) ** e
        return value

    lv, rv = raised(left), raised(right)
    return (lv > rv) - (lv < rv)


def compare_with_bounds(left: Sequence[PowerFactor],
                        right: Sequence[PowerFactor],
                        start_bits: int = DEFAULT_BITS,
                        max_bits: int = MAX_BITS) -> Optional[int]:
    """Directed comparison via enclosures, escalating precision.

    Returns -1 or 1 once the enclosures separate, or None if the two
    sides stayed indistinguishable at max_bits (candidates for exact
    equality; resolve those with compare_products where representable).
    """
    bits = start_bits
    while bits <= max_bits:
        llo, lhi = product_bounds(left, bits)
        rlo, rhi = product_bounds(right, bits)
        if lhi < rlo:
            return -1
        if llo > rhi:
            return 1
        bits *= 2
    return None
