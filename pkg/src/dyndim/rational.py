from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import ValidationError

Q = Fraction


def q(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction. Floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_q(x)
    raise ValidationError(f"not an exact rational: {x!r}")


def parse_q(s: str) -> Fraction:
    text = s.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValidationError(f"malformed rational {s!r}") from None
    if d == 0:
        raise ValidationError(f"zero denominator in {s!r}")
    return Fraction(p, d)


def fmt_q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, int(v))
    return out
