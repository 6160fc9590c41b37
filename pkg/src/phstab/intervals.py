"""Thin certified-interval layer on top of mpmath's interval context.

Everything downstream manipulates exact Fractions or interval enclosures;
floats appear only in non-certified prescans and reports. The global
``iv.prec`` is managed through ``workprec`` so nested evaluations restore
the caller's precision.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv
from mpmath.libmp import to_rational


@contextmanager
def workprec(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def iv_from_fraction(x: Fraction):
    """Certified enclosure of an exact rational (outward-rounded division)."""
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def iv_hull(lo: Fraction, hi: Fraction):
    a = iv_from_fraction(lo)
    b = iv_from_fraction(hi)
    return iv.mpf([a.a, b.b])


def fraction_bounds(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval (dyadic, hence exact)."""
    lo_t, hi_t = x._mpi_
    pl, ql = to_rational(lo_t)
    ph, qh = to_rational(hi_t)
    # int() strips gmpy's mpz so downstream stdlib code sees plain ints.
    return Fraction(int(pl), int(ql)), Fraction(int(ph), int(qh))


@dataclass(frozen=True)
class RealBall:
    """A real number as midpoint ± absolute error bound, both exact rationals.

    Invariant: |stored - exact| <= err.
    """

    value: Fraction
    err: Fraction

    @property
    def lower(self) -> Fraction:
        return self.value - self.err

    @property
    def upper(self) -> Fraction:
        return self.value + self.err

    @property
    def bits(self) -> int:
        """Largest b with err <= 2**-b (0 for err >= 1, exact -> huge)."""
        if self.err == 0:
            return 1 << 30
        return max(0, -math.ceil(math.log2(self.err)))

    @classmethod
    def from_bounds(cls, lo: Fraction, hi: Fraction) -> "RealBall":
        mid = (lo + hi) / 2
        return cls(mid, hi - mid)

    @classmethod
    def from_iv(cls, x) -> "RealBall":
        lo, hi = fraction_bounds(x)
        return cls.from_bounds(lo, hi)

    def abs(self) -> "RealBall":
        lo, hi = self.lower, self.upper
        alo = max(Fraction(0), max(lo, -hi))
        ahi = max(abs(lo), abs(hi))
        return RealBall.from_bounds(alo, ahi)

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class ComplexIv:
    """Complex number with interval real and imaginary parts."""

    re: object
    im: object

    def __add__(self, other):
        if isinstance(other, ComplexIv):
            return ComplexIv(self.re + other.re, self.im + other.im)
        return ComplexIv(self.re + other, self.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexIv):
            return ComplexIv(self.re - other.re, self.im - other.im)
        return ComplexIv(self.re - other, self.im)

    def __mul__(self, other):
        if isinstance(other, ComplexIv):
            return ComplexIv(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return ComplexIv(self.re * other, self.im * other)

    __rmul__ = __mul__

    def conj(self) -> "ComplexIv":
        return ComplexIv(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def abs(self):
        a2 = self.abs2()
        if a2.a < 0:
            a2 = iv.mpf([0, a2.b])
        return iv.sqrt(a2)

    def abs_ball(self) -> RealBall:
        return RealBall.from_iv(self.abs())

    def midpoint(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    def max_err(self) -> float:
        return max(float(self.re.delta), float(self.im.delta)) / 2


def unit_phase(theta) -> ComplexIv:
    """e^{i theta} for an interval angle."""
    return ComplexIv(iv.cos(theta), iv.sin(theta))
