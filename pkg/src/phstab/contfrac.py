"""Arbitrary-precision continued-fraction engine.

Quotient expansion, convergent tables, the classical convergent bounds,
Legendre's criterion, best-approximation brute force, and certified rational
enclosures of the represented number. All quotients and convergents are
Python big integers; all enclosures are exact Fractions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd, isqrt
from typing import Callable, Iterator, Optional

from .errors import BitBudgetExceeded, InsufficientPrecision, TableExhausted
from .intervals import RealBall

# Registry of named quotient rules (populated e.g. by alpha_factory).
RULE_REGISTRY: dict[str, Callable[[dict], Callable[[int], int]]] = {}

_PRECISION_CAP = 1 << 22  # hard stop for adaptive refinement loops


class IrrationalSpec:
    """Exact, precision-extendable description of a positive real number."""

    def quotient_iter(self) -> Iterator[int]:
        raise NotImplementedError

    def is_rational(self) -> Optional[bool]:
        """True/False when known from the representation, None if undecided."""
        raise NotImplementedError

    def enclosure(self, bits: int, strict: bool = True) -> RealBall:
        """Rational enclosure with error <= 2**-bits.

        With strict=False, sources whose precision is capped (finite rule
        depth, fixed digit strings) return their widest available enclosure
        instead of raising.
        """
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __float__(self) -> float:
        return float(self.enclosure(64).value)


@dataclass(frozen=True)
class QuadraticSurd(IrrationalSpec):
    """The number (p + sqrt(D)) / q with D a positive non-square integer."""

    D: int
    p: int = 0
    q: int = 1

    def __post_init__(self):
        if self.D <= 0 or isqrt(self.D) ** 2 == self.D:
            raise ValueError("D must be a positive non-square integer")
        if self.q == 0:
            raise ValueError("q must be nonzero")
        if self.enclosure(16).upper <= 0:
            raise ValueError("represented value must be positive")

    def is_rational(self):
        return False

    def quotient_iter(self) -> Iterator[int]:
        # Exact periodic algorithm on (P + sqrt(D))/Q, maintaining Q | D - P^2.
        P, Q, D = self.p, self.q, self.D
        if (D - P * P) % Q != 0:
            P *= abs(Q)
            D *= Q * Q
            Q *= abs(Q)
        while True:
            s = isqrt(D)
            if Q > 0:
                a = (P + s) // Q
            else:
                a = -((P + s) // (-Q)) - 1
            yield a
            P = a * Q - P
            Q = (D - P * P) // Q

    def enclosure(self, bits: int, strict: bool = True) -> RealBall:
        k = bits + 4 + max(self.q.bit_length(), abs(self.p).bit_length())
        s_lo = Fraction(isqrt(self.D << (2 * k)), 1 << k)
        s_hi = s_lo + Fraction(1, 1 << k)
        lo = (self.p + s_lo) / self.q
        hi = (self.p + s_hi) / self.q
        if self.q < 0:
            lo, hi = hi, lo
        return RealBall.from_bounds(lo, hi)

    def to_json(self) -> dict:
        return {"kind": "surd", "D": self.D, "p": self.p, "q": self.q}


@dataclass(frozen=True)
class ExplicitQuotients(IrrationalSpec):
    """A finite quotient list; represents the exact rational [a0; a1, ...]."""

    a: tuple[int, ...]

    def __init__(self, a):
        object.__setattr__(self, "a", tuple(int(x) for x in a))
        if not self.a:
            raise ValueError("quotient list must be nonempty")
        if any(x < 1 for x in self.a[1:]):
            raise ValueError("quotients a_n must be >= 1 for n >= 1")
        if self.value() <= 0:
            raise ValueError("represented value must be positive")

    def value(self) -> Fraction:
        v = Fraction(self.a[-1])
        for x in reversed(self.a[:-1]):
            v = x + 1 / v
        return v

    def is_rational(self):
        return True

    def quotient_iter(self) -> Iterator[int]:
        return iter(self.a)

    def enclosure(self, bits: int, strict: bool = True) -> RealBall:
        return RealBall(self.value(), Fraction(0))

    def to_json(self) -> dict:
        return {"kind": "quotients", "a": list(self.a)}


@dataclass(frozen=True)
class RuleQuotients(IrrationalSpec):
    """Quotients generated on demand by a registered rule.

    ``bit_budget`` caps the denominator growth used when converting the
    quotient stream into rational enclosures.
    """

    name: str
    params: dict = field(default_factory=dict)
    bit_budget: int = 1 << 16
    _gen: Optional[Callable[[int], int]] = field(
        default=None, repr=False, compare=False
    )

    def _generator(self) -> Callable[[int], int]:
        if self._gen is not None:
            return self._gen
        if self.name not in RULE_REGISTRY:
            raise KeyError(f"unknown quotient rule {self.name!r}")
        gen = RULE_REGISTRY[self.name](self.params)
        object.__setattr__(self, "_gen", gen)
        return gen

    def is_rational(self):
        return False

    def quotient_iter(self) -> Iterator[int]:
        gen = self._generator()
        n = 0
        while True:
            try:
                a = gen(n)
            except TableExhausted:
                return
            yield a
            n += 1

    def enclosure(self, bits: int, strict: bool = True) -> RealBall:
        p2, p1 = 1, None
        q2, q1 = 0, None
        prev = None
        bracket = None  # hull of the two most recent convergents
        for a in self.quotient_iter():
            if p1 is None:
                p1, q1 = a, 1
                prev = (a, 1)
                continue
            p1, p2 = a * p1 + p2, p1
            q1, q2 = a * q1 + q2, q1
            lo = Fraction(prev[0], prev[1])
            hi = Fraction(p1, q1)
            if lo > hi:
                lo, hi = hi, lo
            bracket = (lo, hi)
            if hi - lo <= Fraction(1, 1 << bits):
                return RealBall.from_bounds(lo, hi)
            if q1.bit_length() > self.bit_budget:
                if strict:
                    raise BitBudgetExceeded(
                        f"q_n exceeds {self.bit_budget} bits before reaching "
                        f"2^-{bits} enclosure width"
                    )
                return RealBall.from_bounds(lo, hi)
            prev = (p1, q1)
        # Finite stream: alpha lies strictly between the last two convergents.
        if bracket is None:
            raise InsufficientPrecision("quotient stream too short to enclose")
        if strict:
            raise InsufficientPrecision(
                f"rule depth exhausted before a 2^-{bits} enclosure"
            )
        return RealBall.from_bounds(*bracket)

    def to_json(self) -> dict:
        return {
            "kind": "rule",
            "name": self.name,
            "f": self.params,
            "bit_budget": self.bit_budget,
        }


@dataclass(frozen=True)
class DecimalLiteral(IrrationalSpec):
    """A decimal digit string correct to a guaranteed number of bits."""

    digits: str
    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("guaranteed bit count must be >= 1")
        if self._value() <= 0:
            raise ValueError("represented value must be positive")

    def _value(self) -> Fraction:
        return Fraction(self.digits)

    def is_rational(self):
        return None

    def quotient_iter(self) -> Iterator[int]:
        # Interval continued fraction: emit quotients only while both
        # endpoints of the enclosure agree on the floor.
        ball = self.enclosure(self.bits)
        lo, hi = ball.lower, ball.upper
        while True:
            flo = math.floor(lo)
            fhi = math.floor(hi)
            if flo != fhi:
                raise InsufficientPrecision(
                    "quotient not determined by the guaranteed digits"
                )
            yield flo
            lo, hi = lo - flo, hi - flo
            if lo <= 0:
                raise InsufficientPrecision(
                    "quotient not determined by the guaranteed digits"
                )
            lo, hi = 1 / hi, 1 / lo

    def enclosure(self, bits: int, strict: bool = True) -> RealBall:
        if bits > self.bits and strict:
            raise InsufficientPrecision(
                f"requested {bits} bits but only {self.bits} are guaranteed"
            )
        return RealBall(self._value(), Fraction(1, 1 << self.bits))

    def to_json(self) -> dict:
        return {"kind": "decimal", "digits": self.digits, "bits": self.bits}


SQRT2 = QuadraticSurd(D=2)
GOLDEN = QuadraticSurd(D=5, p=1, q=2)


def spec_from_json(obj: dict | str) -> IrrationalSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj["kind"]
    if kind == "surd":
        return QuadraticSurd(D=obj["D"], p=obj.get("p", 0), q=obj.get("q", 1))
    if kind == "quotients":
        return ExplicitQuotients(obj["a"])
    if kind == "rule":
        return RuleQuotients(
            name=obj["name"],
            params=obj.get("f", {}),
            bit_budget=obj.get("bit_budget", 1 << 16),
        )
    if kind == "decimal":
        return DecimalLiteral(digits=obj["digits"], bits=obj["bits"])
    raise ValueError(f"unknown spec kind {kind!r}")


@dataclass(frozen=True)
class Convergent:
    n: int
    p: int
    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("q must be positive")
        if gcd(self.p, self.q) != 1:
            raise ValueError("p/q must be in lowest terms")

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class ConvergentTable:
    source: IrrationalSpec
    quotients: tuple[int, ...]
    convergents: tuple[Convergent, ...]
    terminated: bool = False

    def __len__(self) -> int:
        return len(self.convergents)

    def check_identity(self) -> bool:
        """p_n q_{n+1} - p_{n+1} q_n = (-1)^{n+1}, exactly."""
        for n in range(len(self) - 1):
            c0, c1 = self.convergents[n], self.convergents[n + 1]
            if c0.p * c1.q - c1.p * c0.q != (-1) ** (n + 1):
                return False
        return True

    def to_csv(self) -> str:
        lines = ["n,a_n,p_n,q_n"]
        for n, (a, c) in enumerate(zip(self.quotients, self.convergents)):
            lines.append(f"{n},{a},{c.p},{c.q}")
        return "\n".join(lines) + "\n"


def expand(alpha: IrrationalSpec, n: int) -> ConvergentTable:
    """First n+1 quotients and convergents of alpha.

    Rational input terminates early; the returned table is shorter and
    flagged instead of raising.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    quotients: list[int] = []
    convergents: list[Convergent] = []
    p1, p2 = 1, 0
    q1, q2 = 0, 1
    it = alpha.quotient_iter()
    terminated = False
    for k in range(n + 1):
        try:
            a = next(it)
        except StopIteration:
            terminated = True
            break
        if k >= 1 and a < 1:
            raise ValueError(f"a_{k} = {a} violates a_n >= 1")
        quotients.append(a)
        p1, p2 = a * p1 + p2, p1
        q1, q2 = a * q1 + q2, q1
        convergents.append(Convergent(k, p1, q1))
    return ConvergentTable(
        source=alpha,
        quotients=tuple(quotients),
        convergents=tuple(convergents),
        terminated=terminated,
    )


def _adaptive_enclosure(alpha: IrrationalSpec, bits: int) -> RealBall:
    """Enclosure with graceful failure for precision-capped sources."""
    if bits > _PRECISION_CAP:
        raise InsufficientPrecision(f"refinement cap {_PRECISION_CAP} bits hit")
    return alpha.enclosure(bits)


@dataclass(frozen=True)
class BoundReport:
    n: int
    lower_margin: Fraction
    upper_margin: Fraction

    @property
    def passed(self) -> bool:
        return self.lower_margin > 0 and self.upper_margin > 0


def check_bounds(table: ConvergentTable, bits: int = 0) -> list[BoundReport]:
    """Verify 1/((a_{n+1}+2) q_n^2) < |alpha - p_n/q_n| < 1/(a_{n+1} q_n^2)
    for every n with a successor, in exact rational arithmetic.
    """
    if len(table) < 2:
        raise ValueError("table needs at least 2 entries")
    qN = table.convergents[-1].q
    need = bits or 4 * qN.bit_length() + 64
    while True:
        ball = _adaptive_enclosure(table.source, need)
        lo, hi = ball.lower, ball.upper
        reports: list[BoundReport] = []
        undecided = False
        for n in range(len(table) - 1):
            c = table.convergents[n]
            a_next = table.quotients[n + 1]
            pv = c.value
            d_lo = max(Fraction(0), max(lo - pv, pv - hi))
            d_hi = max(abs(lo - pv), abs(hi - pv))
            lb = Fraction(1, (a_next + 2) * c.q**2)
            ub = Fraction(1, a_next * c.q**2)
            # decisive pass: d_lo > lb and d_hi < ub
            # decisive fail: d_hi <= lb (lower bound violated) or
            #                d_lo >= ub (upper bound violated)
            if d_lo > lb and d_hi < ub:
                reports.append(BoundReport(n, d_lo - lb, ub - d_hi))
            elif d_hi <= lb or d_lo >= ub:
                reports.append(BoundReport(n, d_hi - lb, ub - d_lo))
            else:
                undecided = True
                break
        if not undecided:
            return reports
        need *= 2


def legendre_is_convergent(p: int, q: int, alpha: IrrationalSpec) -> bool:
    """True iff p/q occurs among the convergents of alpha with q_m >= q.

    Also enforces Legendre's criterion as an internal consistency check:
    a certified |alpha - p/q| < 1/(2 q^2) forces a True result.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    if gcd(p, q) != 1:
        raise ValueError("p/q must be in lowest terms")
    found = False
    n = 8
    while True:
        table = expand(alpha, n)
        if any(c.p == p and c.q == q for c in table.convergents):
            found = True
            break
        if table.terminated or table.convergents[-1].q >= q:
            break
        n *= 2
    bits = 4 * q.bit_length() + 32
    target = Fraction(1, 2 * q * q)
    while bits <= _PRECISION_CAP:
        ball = _adaptive_enclosure(alpha, bits)
        d_hi = max(abs(ball.lower - Fraction(p, q)), abs(ball.upper - Fraction(p, q)))
        d_lo = max(
            Fraction(0),
            max(ball.lower - Fraction(p, q), Fraction(p, q) - ball.upper),
        )
        if d_hi < target:
            if not found:
                raise AssertionError(
                    "Legendre criterion violated: |alpha - p/q| < 1/(2q^2) "
                    "but p/q is not a convergent"
                )
            break
        if d_lo >= target:
            break
        bits *= 2
    return found


def best_approx_check(table: ConvergentTable, qmax: int) -> bool:
    """Brute-force the best-approximation property up to denominator qmax.

    For each n with q_{n+1} <= qmax + 1, confirms that no 0 < q < q_{n+1}
    has min_p |q alpha - p| < |q_n alpha - p_n|.
    """
    if qmax > 10**5:
        raise ValueError("qmax too large for exhaustive search")
    if qmax > table.convergents[-1].q:
        raise ValueError("qmax exceeds the table's last denominator")
    bits = 4 * qmax.bit_length() + 96
    while True:
        ball = _adaptive_enclosure(table.source, bits)
        lo, hi = ball.lower, ball.upper
        dist: list[tuple[Fraction, Fraction]] = []
        for q in range(1, qmax + 1):
            # nearest integer to q*alpha; with tiny enclosure widths both
            # endpoints give the same candidate set {floor, ceil}
            xlo, xhi = q * lo, q * hi
            cands = {math.floor(xlo), math.ceil(xlo), math.floor(xhi), math.ceil(xhi)}
            d_lo = min(max(Fraction(0), max(xlo - p, p - xhi)) for p in cands)
            d_hi = min(max(abs(xlo - p), abs(xhi - p)) for p in cands)
            dist.append((d_lo, d_hi))
        undecided = False
        for c in table.convergents:
            n, qn = c.n, c.q
            if n + 1 >= len(table):
                break
            qnext = table.convergents[n + 1].q
            if qnext - 1 > qmax:
                break
            dn_lo, dn_hi = dist[qn - 1]
            for q in range(1, qnext):
                if q == qn:
                    continue
                d_lo, d_hi = dist[q - 1]
                if d_hi < dn_lo:
                    return False
                if d_lo < dn_hi:
                    undecided = True
        if not undecided:
            return True
        if bits >= _PRECISION_CAP:
            raise InsufficientPrecision("best-approximation check undecidable")
        bits *= 2


def eval_alpha(alpha: IrrationalSpec, bits: int) -> RealBall:
    """Certified enclosure of alpha with absolute error <= 2**-bits."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    ball = alpha.enclosure(bits)
    assert ball.err <= Fraction(1, 1 << bits) or ball.err == 0
    return ball


def required_bits(t_magnitude, target_bits: int, guard: int = 64) -> int:
    """Working precision for trig evaluation at time t: absorbs the bits
    lost to argument reduction plus guard bits for cancellation."""
    t = Fraction(t_magnitude) if not isinstance(t_magnitude, Fraction) else t_magnitude
    mag = abs(t.numerator) // t.denominator + 2
    return target_bits + guard + mag.bit_length()
