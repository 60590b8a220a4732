"""Exact field arithmetic for the rationals and the prime fields 𝔽_p.

Rationals are :class:`fractions.Fraction` values; prime-field elements are
:class:`Residue` values stored as canonical representatives in ``[0, p)``.
No floating point value ever enters the engine.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Union

from loopalg import LoopAlgError

logger = logging.getLogger(__name__)


class ScalarError(LoopAlgError):
    """Problem with a field element."""


class InvalidInverse(ScalarError, ZeroDivisionError):
    """Inverse of zero requested."""


class FieldMismatch(ScalarError, TypeError):
    """Elements of two different fields were combined."""


class ScalarParseError(ScalarError, ValueError):
    """A serialized scalar could not be read."""


def is_prime(p: int) -> bool:
    """Deterministic primality by trial division.

    Parameters
    ----------
    p
        The integer to test.

    Returns
    -------
    bool
        `True` if `p` is a prime number.
    """
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


def extended_euclid(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


class Residue:
    """An element of 𝔽_p in canonical form."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other: object) -> int:
        if isinstance(other, Residue):
            if other.p != self.p:
                raise FieldMismatch(f"F{self.p} and F{other.p}")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other
        raise FieldMismatch(f"F{self.p} and {type(other).__name__}")

    def inverse(self) -> "Residue":
        if self.value == 0:
            raise InvalidInverse(f"0 has no inverse in F{self.p}")
        _, x, _ = extended_euclid(self.value, self.p)
        return Residue(x, self.p)

    def __add__(self, other: object) -> "Residue":
        return Residue(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Residue":
        return Residue(self.value - self._coerce(other), self.p)

    def __rsub__(self, other: object) -> "Residue":
        return Residue(self._coerce(other) - self.value, self.p)

    def __mul__(self, other: object) -> "Residue":
        return Residue(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "Residue":
        return self * Residue(self._coerce(other), self.p).inverse()

    def __rtruediv__(self, other: object) -> "Residue":
        return Residue(self._coerce(other), self.p) * self.inverse()

    def __neg__(self) -> "Residue":
        return Residue(-self.value, self.p)

    def __pow__(self, exponent: int) -> "Residue":
        if exponent < 0:
            return self.inverse() ** -exponent
        return Residue(pow(self.value, exponent, self.p), self.p)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Residue):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.p))

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"Residue({self.value}, {self.p})"

    def __str__(self) -> str:
        return str(self.value)


Scalar = Union[Fraction, Residue]


@dataclass(frozen=True)
class FieldSpec:
    """The coefficient field: the rationals or a prime field.

    Parameters
    ----------
    kind
        ``"rationals"`` or ``"prime_field"``.
    p
        The characteristic, present iff `kind` is ``"prime_field"``.
    """

    kind: Literal["rationals", "prime_field"]
    p: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "rationals":
            if self.p is not None:
                raise ScalarError("the rationals take no characteristic")
        elif self.kind == "prime_field":
            if self.p is None or not is_prime(self.p):
                raise ScalarError(f"{self.p} is not a prime")
        else:
            raise ScalarError(f"unknown field kind {self.kind}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("rationals")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime_field", p)

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    def __call__(self, value: "int | str | Fraction | Residue") -> Scalar:
        """Coerce `value` into this field.

        Parameters
        ----------
        value
            An integer, a fraction, a serialized scalar or an element of this field.

        Returns
        -------
        Scalar
            The canonical element.

        Raises
        ------
        FieldMismatch
            If `value` is a residue of another field.
        InvalidInverse
            If a fraction's denominator vanishes in 𝔽_p.
        """
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Residue):
            if self.p != value.p:
                raise FieldMismatch(f"F{value.p} element used over {self}")
            return value
        if self.p is None:
            return Fraction(value)
        value = Fraction(value)
        denominator = Residue(value.denominator, self.p)
        return Residue(value.numerator, self.p) * denominator.inverse()

    def parse(self, text: str) -> Scalar:
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ScalarParseError(f"cannot read scalar {text!r}") from e
        return self(value)

    def serialize(self, value: Scalar) -> str | int:
        """Canonical JSON form: ``"3/4"``, ``"-2"`` or an integer residue."""
        if isinstance(value, Residue):
            return value.value
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"

    def inv(self, value: Scalar) -> Scalar:
        if not value:
            raise InvalidInverse(f"0 has no inverse over {self}")
        if isinstance(value, Residue):
            return value.inverse()
        return 1 / value

    def __str__(self) -> str:
        return "Q" if self.p is None else f"F{self.p}"


def field_of(value: Scalar) -> FieldSpec:
    if isinstance(value, Residue):
        return FieldSpec.prime(value.p)
    if isinstance(value, Fraction):
        return FieldSpec.rationals()
    raise FieldMismatch(f"{value!r} is not a field element")


def scalar_arith(
    a: Scalar,
    b: Scalar | None,
    op: Literal["add", "mul", "neg", "inv"],
) -> Scalar:
    """Apply a field operation.

    ``neg`` negates `a`; ``inv`` inverts `b` when given, otherwise `a`.

    Parameters
    ----------
    a
        First operand.
    b
        Second operand, ignored for ``neg``.
    op
        The operation.

    Returns
    -------
    Scalar
        The exact result in canonical form.

    Raises
    ------
    FieldMismatch
        If the operands live in different fields.
    InvalidInverse
        If zero is inverted.
    """
    field = field_of(a)
    if b is not None and field_of(b) != field:
        raise FieldMismatch(f"{field} and {field_of(b)}")
    if op == "add":
        assert b is not None
        return a + b  # type: ignore[operator]
    if op == "mul":
        assert b is not None
        return a * b  # type: ignore[operator]
    if op == "neg":
        return -a
    if op == "inv":
        return field.inv(a if b is None else b)
    raise ValueError(f"unknown operation {op}")


def sign(exponent: int) -> int:
    """``(-1) ** exponent``."""
    return -1 if exponent % 2 else 1
