"""Exact rational values and their wire format.

All rationals cross process boundaries as strings ``"p/q"`` so that JSON
round-trips never lose exactness; floats stay JSON numbers and always
travel next to an ``"exact": false`` flag.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

ONE = Fraction(1)
ZERO = Fraction(0)


def frac(value) -> Fraction:
    """Coerce ints, ``"p/q"`` / ``"p"`` / decimal strings, and Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise ValueError(
            f"refusing to coerce float {value!r} to an exact rational; "
            "pass a 'p/q' string instead")
    raise ValueError(f"cannot interpret {value!r} as a rational")


def frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def scalar_to_json(value: Scalar):
    """Fractions become 'p/q' strings, floats stay floats, inf -> 'inf'."""
    if isinstance(value, Fraction):
        return frac_str(value)
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        return value
    if isinstance(value, int):
        return frac_str(Fraction(value))
    raise ValueError(f"not a scalar: {value!r}")


def scalar_from_json(value) -> Scalar:
    if isinstance(value, str):
        if value == "inf":
            return float("inf")
        return Fraction(value)
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise ValueError(f"not a scalar: {value!r}")
