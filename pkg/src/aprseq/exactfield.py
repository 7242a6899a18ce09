"""Exact scalars over the rationals and prime fields GF(p).

Two layers live here.  :class:`FieldSpec` carries the raw arithmetic used by
the hot loops elsewhere in the package (raw values are :class:`Fraction` for
the rationals and ``int`` residues in ``[0, p)`` for prime fields).
:class:`Scalar` wraps a raw value together with its field for the public API.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

RawValue = Union[int, Fraction]

RATIONAL = "rational"
PRIME = "gf"

_RATIONAL_TOKEN = re.compile(r"-?\d+(/\d+)?")
_RESIDUE_TOKEN = re.compile(r"\d+")


class FieldError(ValueError):
    """Raised for malformed field descriptions or mixed-field arithmetic."""


@lru_cache(maxsize=None)
def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    from sympy import isprime

    return bool(isprime(p))


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.modulus is not None:
                raise FieldError("the rational field takes no modulus")
        elif self.kind == PRIME:
            if not isinstance(self.modulus, int) or not _is_prime(self.modulus):
                raise FieldError(f"modulus {self.modulus!r} is not a prime")
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldSpec:
        return cls(RATIONAL)

    @classmethod
    def gf(cls, p: int) -> FieldSpec:
        return cls(PRIME, p)

    @classmethod
    def parse(cls, text: str) -> FieldSpec:
        """Parse ``rational``/``char0``/``Q`` or ``gf:p``/``gf p``/``GF(p)``."""
        t = text.strip().lower()
        if t in ("rational", "rationals", "q", "char0"):
            return cls.rationals()
        m = re.fullmatch(r"gf\s*[:( ]\s*(\d+)\s*\)?", t)
        if m is None:
            raise FieldError(f"cannot parse field {text!r}")
        return cls.gf(int(m.group(1)))

    @property
    def is_rational(self) -> bool:
        return self.kind == RATIONAL

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == RATIONAL else self.modulus

    def __str__(self):
        return "rational" if self.is_rational else f"gf {self.modulus}"

    # -- raw arithmetic -------------------------------------------------

    def coerce(self, value) -> RawValue:
        """Map an int, Fraction or Scalar to this field's canonical raw value."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldError(f"scalar over {value.field} used in {self}")
            return value.value
        if isinstance(value, bool):
            value = int(value)
        if self.kind == RATIONAL:
            if isinstance(value, (int, Fraction)):
                return Fraction(value)
            raise FieldError(f"cannot coerce {value!r} to a rational")
        if isinstance(value, int):
            return value % self.modulus
        if isinstance(value, Fraction):
            return value.numerator * self.inv(value.denominator % self.modulus) % self.modulus
        raise FieldError(f"cannot coerce {value!r} to GF({self.modulus})")

    @property
    def zero(self) -> RawValue:
        return Fraction(0) if self.kind == RATIONAL else 0

    @property
    def one(self) -> RawValue:
        return Fraction(1) if self.kind == RATIONAL else 1

    def add(self, a, b):
        return a + b if self.kind == RATIONAL else (a + b) % self.modulus

    def sub(self, a, b):
        return a - b if self.kind == RATIONAL else (a - b) % self.modulus

    def mul(self, a, b):
        return a * b if self.kind == RATIONAL else (a * b) % self.modulus

    def neg(self, a):
        return -a if self.kind == RATIONAL else (-a) % self.modulus

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("zero has no inverse")
        if self.kind == RATIONAL:
            return 1 / Fraction(a)
        # pow(a, -1, p) runs the extended Euclidean algorithm
        return pow(a, -1, self.modulus)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def scalar(self, value) -> Scalar:
        return Scalar(self, self.coerce(value))

    def format_raw(self, value: RawValue) -> str:
        if self.kind == RATIONAL:
            v = Fraction(value)
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return str(value)


QQ = FieldSpec.rationals()


@dataclass(frozen=True)
class Scalar:
    """An immutable field element.

    Arithmetic between scalars of different fields raises :class:`FieldError`.
    Plain ``int``/``Fraction`` operands are coerced into the scalar's field.
    """

    field: FieldSpec
    value: RawValue

    def __post_init__(self):
        canonical = self.field.coerce(self.value)
        if canonical != self.value or type(canonical) is not type(self.value):
            object.__setattr__(self, "value", canonical)

    def _other(self, other) -> RawValue:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldError(f"cannot mix {self.field} and {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return Scalar(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self) -> Scalar:
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldError(f"cannot compare {self.field} and {other.field}")
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return bool(self.value)

    def __str__(self):
        return self.field.format_raw(self.value)

    def __repr__(self):
        return f"Scalar({self}, {self.field})"

    def is_zero(self) -> bool:
        return not self.value


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "eq": lambda a, b: a == b,
}


def scalar_arith(lhs: Scalar, rhs: Scalar | None, op: str):
    """Apply ``op`` (add, sub, mul, div, neg, inv, eq) to scalars.

    ``neg`` and ``inv`` are unary and ignore ``rhs``.
    """
    if op == "neg":
        return -lhs
    if op == "inv":
        return lhs.inverse()
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    if not isinstance(rhs, Scalar):
        raise TypeError("binary operations need two scalars")
    if rhs.field != lhs.field:
        raise FieldError(f"cannot mix {lhs.field} and {rhs.field}")
    return fn(lhs, rhs)


def parse_raw(text: str, field: FieldSpec) -> RawValue:
    token = text.strip()
    if field.is_rational:
        if not _RATIONAL_TOKEN.fullmatch(token):
            raise ValueError(f"malformed rational {text!r}")
        num, _, den = token.partition("/")
        if den and int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den) if den else 1)
    if not _RESIDUE_TOKEN.fullmatch(token):
        raise ValueError(f"malformed residue {text!r} for GF({field.modulus})")
    return int(token) % field.modulus


def parse_scalar(text: str, field: FieldSpec) -> Scalar:
    """Parse ``[-]digits[/digits]`` (rationals) or ``digits`` (prime fields)."""
    return Scalar(field, parse_raw(text, field))


def sample_raw(rng: random.Random, field: FieldSpec, bound: int = 100) -> RawValue:
    if bound < 1:
        raise ValueError("bound must be positive")
    if field.is_rational:
        return Fraction(rng.randint(-bound, bound))
    return rng.randrange(field.modulus)


def sample_scalar(rng: random.Random, field: FieldSpec, bound: int = 100) -> Scalar:
    """Draw a uniform integer in [-bound, bound] (rationals) or a uniform residue."""
    return Scalar(field, sample_raw(rng, field, bound))
