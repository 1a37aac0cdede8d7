"""Exact Clebsch-Gordan coefficients and Wigner 3-j / 6-j symbols.

All quantum numbers are half-integers stored as doubled integers
(:class:`HalfInt`), which keeps parity bookkeeping exact.  The symbols are
evaluated from the Racah closed-form sums using arbitrary-precision integer
arithmetic: every value is carried as ``sign * sqrt(p/q)`` with ``p/q`` a
non-negative rational in lowest terms, and converted to float only at the
boundary.  The Condon-Shortley phase convention is used throughout.

Selection-rule violations (triangle failures, non-conserved projections)
return an exact zero rather than raising, so callers may sum over full
sublevel grids.  Malformed (j, m) pairings raise
:class:`~raman_pairs.errors.InputDomainError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import InputDomainError

__all__ = [
    "HalfInt",
    "halfint",
    "CoupledValue",
    "triangle_ok",
    "clebsch_gordan",
    "wigner_3j",
    "wigner_6j",
]

HalfIntLike = Union["HalfInt", int, str, Fraction]


@dataclass(frozen=True, order=True)
class HalfInt:
    """An integer or half-integer quantum number, stored doubled.

    ``HalfInt(twice=3)`` is 3/2.  Use :func:`halfint` to build one from a
    plain int, a :class:`~fractions.Fraction`, or a string like ``"3/2"``.
    """

    twice: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice, int):
            raise InputDomainError(f"doubled value must be an int, got {self.twice!r}")

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2.0

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __add__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice + halfint(other).twice)

    def __sub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice - halfint(other).twice)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self.twice})"


def halfint(value: HalfIntLike) -> HalfInt:
    """Coerce ``value`` to a :class:`HalfInt`.

    Accepts HalfInt, int (whole units), Fraction with denominator 1 or 2,
    and strings such as ``"2"`` or ``"-3/2"``.  Floats are rejected.
    """
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, bool):
        raise InputDomainError("bool is not a quantum number")
    if isinstance(value, int):
        return HalfInt(2 * value)
    if isinstance(value, str):
        try:
            value = Fraction(value)
        except ValueError as exc:
            raise InputDomainError(f"cannot parse half-integer from {value!r}") from exc
    if isinstance(value, Fraction):
        doubled = value * 2
        if doubled.denominator != 1:
            raise InputDomainError(f"{value} is not an integer or half-integer")
        return HalfInt(int(doubled))
    raise InputDomainError(f"cannot interpret {value!r} as a half-integer")


@dataclass(frozen=True)
class CoupledValue:
    """A coupling coefficient as float plus its exact form ``sign*sqrt(p/q)``."""

    value: float
    sign: int
    radicand: Fraction

    def __float__(self) -> float:
        return self.value

    @classmethod
    def from_exact(cls, sign: int, radicand: Fraction) -> "CoupledValue":
        if radicand < 0:
            raise ValueError("radicand must be non-negative")
        if sign == 0 or radicand == 0:
            return cls(0.0, 0, Fraction(0))
        return cls(sign * math.sqrt(float(radicand)), sign, radicand)


_ZERO = CoupledValue(0.0, 0, Fraction(0))


def _check_jm_pair(j: HalfInt, m: HalfInt, label: str) -> None:
    if j.twice < 0:
        raise InputDomainError(f"{label}: j must be non-negative, got {j}")
    if (j.twice - m.twice) % 2 != 0:
        raise InputDomainError(f"{label}: j={j} and m={m} differ by a non-integer")
    if abs(m.twice) > j.twice:
        raise InputDomainError(f"{label}: |m|={abs(m)} exceeds j={j}")


def triangle_ok(a: HalfIntLike, b: HalfIntLike, c: HalfIntLike) -> bool:
    """True iff (a, b, c) can close a triangle with integer perimeter."""
    ta, tb, tc = halfint(a).twice, halfint(b).twice, halfint(c).twice
    if ta < 0 or tb < 0 or tc < 0:
        raise InputDomainError("triangle arguments must be non-negative")
    if (ta + tb + tc) % 2 != 0:
        return False
    return abs(ta - tb) <= tc <= ta + tb


def _factorial(n: int) -> int:
    if n < 0:
        raise ValueError("negative factorial")
    return math.factorial(n)


def _triangle_factor(ta: int, tb: int, tc: int) -> Fraction:
    """Exact squared triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!."""
    return Fraction(
        _factorial((ta + tb - tc) // 2)
        * _factorial((ta - tb + tc) // 2)
        * _factorial((-ta + tb + tc) // 2),
        _factorial((ta + tb + tc) // 2 + 1),
    )


@lru_cache(maxsize=200_000)
def _wigner_3j_exact(
    tj1: int, tj2: int, tj3: int, tm1: int, tm2: int, tm3: int
) -> tuple[int, Fraction]:
    """(sign, radicand) of the 3-j symbol via the Racah sum; inputs doubled."""
    if tm1 + tm2 + tm3 != 0:
        return 0, Fraction(0)
    if not (abs(tj1 - tj2) <= tj3 <= tj1 + tj2) or (tj1 + tj2 + tj3) % 2 != 0:
        return 0, Fraction(0)

    # Summation bounds for t in the alternating series.
    t1 = (tj2 - tj3 - tm1) // 2
    t2 = (tj1 - tj3 + tm2) // 2
    t3 = (tj1 + tj2 - tj3) // 2
    t4 = (tj1 - tm1) // 2
    t5 = (tj2 + tm2) // 2
    tmin = max(0, t1, t2)
    tmax = min(t3, t4, t5)
    if tmin > tmax:
        return 0, Fraction(0)

    series = Fraction(0)
    for t in range(tmin, tmax + 1):
        denom = (
            _factorial(t)
            * _factorial(t - t1)
            * _factorial(t - t2)
            * _factorial(t3 - t)
            * _factorial(t4 - t)
            * _factorial(t5 - t)
        )
        series += Fraction(-1 if t % 2 else 1, denom)
    if series == 0:
        return 0, Fraction(0)

    radicand = (
        series**2
        * _triangle_factor(tj1, tj2, tj3)
        * _factorial((tj1 + tm1) // 2)
        * _factorial((tj1 - tm1) // 2)
        * _factorial((tj2 + tm2) // 2)
        * _factorial((tj2 - tm2) // 2)
        * _factorial((tj3 + tm3) // 2)
        * _factorial((tj3 - tm3) // 2)
    )
    # Global phase (-1)^(j1 - j2 - m3); the exponent is an integer here.
    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    sign = phase * (1 if series > 0 else -1)
    return sign, radicand


def wigner_3j(
    j1: HalfIntLike,
    j2: HalfIntLike,
    j3: HalfIntLike,
    m1: HalfIntLike,
    m2: HalfIntLike,
    m3: HalfIntLike,
) -> CoupledValue:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3)."""
    j1, j2, j3 = halfint(j1), halfint(j2), halfint(j3)
    m1, m2, m3 = halfint(m1), halfint(m2), halfint(m3)
    _check_jm_pair(j1, m1, "j1/m1")
    _check_jm_pair(j2, m2, "j2/m2")
    _check_jm_pair(j3, m3, "j3/m3")
    sign, radicand = _wigner_3j_exact(
        j1.twice, j2.twice, j3.twice, m1.twice, m2.twice, m3.twice
    )
    return CoupledValue.from_exact(sign, radicand)


def clebsch_gordan(
    j1: HalfIntLike,
    m1: HalfIntLike,
    j2: HalfIntLike,
    m2: HalfIntLike,
    J: HalfIntLike,
    M: HalfIntLike,
) -> CoupledValue:
    """Clebsch-Gordan coefficient <J M | j1 m1; j2 m2> (Condon-Shortley).

    Computed from the 3-j symbol through the standard bridge
    ``(-1)^(j1-j2+M) sqrt(2J+1) (j1 j2 J; m1 m2 -M)``.
    """
    j1, j2, J = halfint(j1), halfint(j2), halfint(J)
    m1, m2, M = halfint(m1), halfint(m2), halfint(M)
    _check_jm_pair(j1, m1, "j1/m1")
    _check_jm_pair(j2, m2, "j2/m2")
    _check_jm_pair(J, M, "J/M")
    if m1.twice + m2.twice != M.twice:
        return _ZERO
    sign3, radicand3 = _wigner_3j_exact(
        j1.twice, j2.twice, J.twice, m1.twice, m2.twice, -M.twice
    )
    if sign3 == 0:
        return _ZERO
    phase = -1 if ((j1.twice - j2.twice + M.twice) // 2) % 2 else 1
    return CoupledValue.from_exact(phase * sign3, radicand3 * (J.twice + 1))


@lru_cache(maxsize=200_000)
def _wigner_6j_exact(
    tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int
) -> tuple[int, Fraction]:
    """(sign, radicand) of the 6-j symbol via the Racah sum; inputs doubled."""
    triads = (
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    )
    for ta, tb, tc in triads:
        if (ta + tb + tc) % 2 != 0 or not (abs(ta - tb) <= tc <= ta + tb):
            return 0, Fraction(0)

    # Triad perimeters and opposite-pair sums, all integers.
    s1 = (tj1 + tj2 + tj3) // 2
    s2 = (tj1 + tj5 + tj6) // 2
    s3 = (tj4 + tj2 + tj6) // 2
    s4 = (tj4 + tj5 + tj3) // 2
    p1 = (tj1 + tj2 + tj4 + tj5) // 2
    p2 = (tj2 + tj3 + tj5 + tj6) // 2
    p3 = (tj3 + tj1 + tj6 + tj4) // 2

    tmin = max(s1, s2, s3, s4)
    tmax = min(p1, p2, p3)
    if tmin > tmax:
        return 0, Fraction(0)

    series = Fraction(0)
    for t in range(tmin, tmax + 1):
        num = _factorial(t + 1)
        denom = (
            _factorial(t - s1)
            * _factorial(t - s2)
            * _factorial(t - s3)
            * _factorial(t - s4)
            * _factorial(p1 - t)
            * _factorial(p2 - t)
            * _factorial(p3 - t)
        )
        series += Fraction(-num if t % 2 else num, denom)
    if series == 0:
        return 0, Fraction(0)

    radicand = (
        series**2
        * _triangle_factor(tj1, tj2, tj3)
        * _triangle_factor(tj1, tj5, tj6)
        * _triangle_factor(tj4, tj2, tj6)
        * _triangle_factor(tj4, tj5, tj3)
    )
    return (1 if series > 0 else -1), radicand


def wigner_6j(
    j1: HalfIntLike,
    j2: HalfIntLike,
    j3: HalfIntLike,
    j4: HalfIntLike,
    j5: HalfIntLike,
    j6: HalfIntLike,
) -> CoupledValue:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}.

    Returns exact zero unless all four triads {j1 j2 j3}, {j1 j5 j6},
    {j4 j2 j6}, {j4 j5 j3} satisfy the triangle rule.
    """
    js = tuple(halfint(j) for j in (j1, j2, j3, j4, j5, j6))
    for j in js:
        if j.twice < 0:
            raise InputDomainError(f"angular momenta must be non-negative, got {j}")
    sign, radicand = _wigner_6j_exact(*(j.twice for j in js))
    return CoupledValue.from_exact(sign, radicand)
