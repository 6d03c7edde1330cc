"""Points of the real line with an explicit rationality status.

Rationality of a binary float carries no information, so the gallery
functions that distinguish rational from irrational arguments decide by
type instead:

* ``int`` and ``fractions.Fraction`` are exact rationals;
* :class:`Irrational` marks a point known to be irrational, stored as a
  float approximation plus a label;
* a plain ``float`` is a *generic* real and is treated like an irrational
  point.  Uniform partitions and random tags are therefore "generic" unless
  a caller asks for exact rationals explicitly.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "Irrational",
    "is_rational",
    "to_float",
    "encode_real",
    "decode_real",
    "parse_point",
]


@dataclass(frozen=True)
class Irrational:
    """A point of the real line that is irrational by construction.

    Only comparisons and translation by exact or generic reals are
    supported; that is all partition and window bookkeeping needs.
    """

    value: float
    label: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("Irrational value must be finite")

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        if self.label:
            return f"Irrational({self.value!r}, {self.label!r})"
        return f"Irrational({self.value!r})"

    def _key(self, other):
        if isinstance(other, Irrational):
            return other.value
        if isinstance(other, numbers.Real):
            return float(other)
        return NotImplemented

    def __lt__(self, other):
        o = self._key(other)
        return NotImplemented if o is NotImplemented else self.value < o

    def __le__(self, other):
        o = self._key(other)
        return NotImplemented if o is NotImplemented else self.value <= o

    def __gt__(self, other):
        o = self._key(other)
        return NotImplemented if o is NotImplemented else self.value > o

    def __ge__(self, other):
        o = self._key(other)
        return NotImplemented if o is NotImplemented else self.value >= o

    def __eq__(self, other):
        # never equal to a rational, even if the float approximations agree
        if isinstance(other, Irrational):
            return self.value == other.value
        return False

    def __hash__(self):
        return hash(("irrational", self.value))

    def __add__(self, other):
        if isinstance(other, Irrational):
            return NotImplemented
        if isinstance(other, numbers.Real):
            return Irrational(self.value + float(other), self.label)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Irrational):
            return self.value - other.value
        if isinstance(other, numbers.Real):
            return Irrational(self.value - float(other), self.label)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, numbers.Real):
            return Irrational(float(other) - self.value, self.label)
        return NotImplemented

    def __neg__(self):
        return Irrational(-self.value, self.label)


def is_rational(t) -> bool:
    """True only for exact rational inputs (ints and Fractions)."""
    if isinstance(t, bool):
        return True
    return isinstance(t, numbers.Rational)


def to_float(t) -> float:
    return float(t)


def encode_real(t):
    """JSON-friendly encoding that preserves the rationality status."""
    if isinstance(t, Irrational):
        out = {"irrational": t.value}
        if t.label:
            out["label"] = t.label
        return out
    if isinstance(t, Fraction):
        if t.denominator == 1:
            return f"{t.numerator}/1"
        return f"{t.numerator}/{t.denominator}"
    if isinstance(t, numbers.Integral):
        return f"{int(t)}/1"
    return float(t)


def decode_real(obj):
    """Inverse of :func:`encode_real`."""
    if isinstance(obj, dict):
        return Irrational(float(obj["irrational"]), obj.get("label", ""))
    if isinstance(obj, str):
        return Fraction(obj)
    return float(obj)


def parse_point(text: str):
    """Parse a command-line point.

    ``"1/3"`` gives an exact rational, ``"irr:0.7071"`` an irrational and
    anything else a generic float.
    """
    text = text.strip()
    if text.startswith("irr:"):
        return Irrational(float(text[4:]), text[4:])
    if "/" in text:
        return Fraction(text)
    return float(text)
