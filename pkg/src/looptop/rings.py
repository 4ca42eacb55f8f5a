"""Exact coefficient rings: the integers, the rationals and prime fields F_p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


@dataclass(frozen=True)
class Ring:
    """A commutative coefficient ring with exact arithmetic.

    Elements are plain Python numbers: ``int`` for ZZ and F_p (reduced
    into ``[0, p)``), ``Fraction`` for QQ.
    """

    name: str
    characteristic: int = 0
    is_field: bool = False

    def __call__(self, x) -> int | Fraction:
        return self.coerce(x)

    def coerce(self, x) -> int | Fraction:
        if isinstance(x, float):
            raise TypeError(f"refusing to coerce float {x!r} into {self.name}")
        if self.characteristic:
            x = Fraction(x)
            return (x.numerator * pow(x.denominator, -1, self.characteristic)) % self.characteristic
        if self.is_field:
            return Fraction(x)
        if isinstance(x, Rational) and x.denominator != 1:
            raise ValueError(f"{x} is not an integer")
        return int(x)

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def is_unit(self, x) -> bool:
        x = self.coerce(x)
        if self.is_field:
            return x != 0
        return x in (1, -1)

    def inverse(self, x):
        x = self.coerce(x)
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in {self.name}")
        if self.characteristic:
            return pow(x, -1, self.characteristic)
        if self.is_field:
            return 1 / x
        return x

    def format(self, x) -> str:
        return str(self.coerce(x))

    def __str__(self) -> str:
        return self.name


ZZ = Ring("Z")
QQ = Ring("Q", 0, True)


def GF(p: int) -> Ring:
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    return Ring(f"F{p}", p, True)


F2 = GF(2)


def ring_from_name(name: str) -> Ring:
    """Parse ``Z``, ``Q``, ``F2``, ``F3``, ... (case-insensitive, ``ZZ``/``QQ`` accepted)."""
    key = name.strip().upper()
    if key in ("Z", "ZZ"):
        return ZZ
    if key in ("Q", "QQ"):
        return QQ
    if key.startswith("F") and key[1:].isdigit():
        return GF(int(key[1:]))
    if key.startswith("GF") and key[2:].isdigit():
        return GF(int(key[2:]))
    raise ValueError(f"unknown coefficient ring {name!r}")
