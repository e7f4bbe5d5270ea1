"""Utility functions for recourse-lab."""

import math
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

Number = Union[int, Fraction]
Ratio = Union[Fraction, float]

INFINITY = math.inf


def to_fraction(value: Union[str, int, float, Fraction]) -> Fraction:
    """
    Convert user input into an exact fraction.

    Floats go through their decimal repr, so ``1.25`` becomes ``5/4`` rather
    than the binary approximation.

    Args:
        value: A number or a string such as ``"3/2"`` or ``"2.598"``

    Returns:
        Fraction: The exact value
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            raise ValueError(f"cannot convert {value} to a fraction")
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def format_fraction(value: Optional[Union[Rational, float]]) -> Optional[str]:
    """Render a number exactly: ``"6/5"``, ``"3"``, ``"inf"``, ``"-inf"`` or None."""
    if value is None:
        return None
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format_fraction(Fraction(repr(value)))
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: Optional[str]) -> Optional[Ratio]:
    """Inverse of :func:`format_fraction`."""
    if text is None:
        return None
    if text == "inf":
        return INFINITY
    if text == "-inf":
        return -INFINITY
    return Fraction(text)


def competitive_ratio(alg: Number, ref: Number) -> Ratio:
    """
    Symmetric ratio ``max(alg/ref, ref/alg)``.

    Both zero gives 1; exactly one zero gives infinity.
    """
    if alg == 0 and ref == 0:
        return Fraction(1)
    if alg == 0 or ref == 0:
        return INFINITY
    alg, ref = Fraction(alg), Fraction(ref)
    return max(alg / ref, ref / alg)

