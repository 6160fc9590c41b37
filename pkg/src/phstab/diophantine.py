"""Odd/odd rational approximation machinery.

Distances to odd integers, odd/odd approximant streams built from the
convergent parity pattern, badly-approximable prefix diagnostics, and
large-gap searches.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .contfrac import (
    _PRECISION_CAP,
    ConvergentTable,
    IrrationalSpec,
    eval_alpha,
)
from .errors import BitBudgetExceeded, InsufficientPrecision, TableExhausted
from .intervals import RealBall


def min_odd_dist(
    alpha: IrrationalSpec, v: int, bits: int = 128
) -> tuple[int, RealBall]:
    """The odd integer u minimizing |v*alpha - u| and the certified distance.

    Ties (possible only for rational alpha) break toward the smaller u.
    """
    if v < 1 or v % 2 == 0:
        raise ValueError("v must be an odd positive integer")
    if alpha.is_rational() is True:
        x = v * alpha.enclosure(1).value
        lo_odd = 2 * math.floor((x - 1) / 2) + 1
        hi_odd = lo_odd + 2
        d_lo, d_hi = abs(x - lo_odd), abs(x - hi_odd)
        u = lo_odd if d_lo <= d_hi else hi_odd
        return u, RealBall(abs(x - u), Fraction(0))
    need = bits + v.bit_length() + 8
    while need <= _PRECISION_CAP:
        ball = eval_alpha(alpha, need)
        xlo, xhi = v * ball.lower, v * ball.upper
        u = 2 * math.floor(((xlo + xhi) / 2 - 1) / 2 + Fraction(1, 2)) + 1
        # certified minimal iff the enclosure stays within (u-1, u+1)
        if xlo > u - 1 and xhi < u + 1:
            d_lo = max(Fraction(0), max(xlo - u, u - xhi))
            d_hi = max(abs(xlo - u), abs(xhi - u))
            return u, RealBall.from_bounds(d_lo, d_hi)
        need *= 2
    raise InsufficientPrecision("v*alpha straddles a midpoint between odd integers")


@dataclass(frozen=True)
class OddOddApproximant:
    u: int
    v: int
    err: RealBall

    def __post_init__(self):
        if self.u % 2 == 0 or self.v % 2 == 0 or self.v <= 0:
            raise ValueError("u and v must be odd, v positive")


def odd_odd_stream(table: ConvergentTable, count: int) -> list[OddOddApproximant]:
    """First ``count`` odd/odd approximants of the table's number.

    Odd/odd convergents are taken directly; for a mixed-parity consecutive
    pair the difference (p_{n+1}-p_n)/(q_{n+1}-q_n) is odd/odd and satisfies
    the same quadratic error bound. Results have strictly increasing v and
    certified err < 2/v^2; duplicate v keep the smaller error.
    """
    convs = table.convergents

    def eps_hi(n: int) -> Fraction:
        """Upper bound on |q_n alpha - p_n| from the table structure:
        1/q_{n+1} when the successor is known, else 1/q_n (valid since the
        continued fraction continues with some a_{n+1} >= 1)."""
        if table.terminated and n == len(convs) - 1:
            return Fraction(0)
        if n + 1 < len(convs):
            return Fraction(1, convs[n + 1].q)
        return Fraction(1, convs[n].q)

    cands: dict[int, tuple[int, Fraction]] = {}
    for n, c in enumerate(convs):
        if c.p % 2 == 1 and c.q % 2 == 1:
            cands.setdefault(c.q, (c.p, eps_hi(n) / c.q))
        elif n + 1 < len(convs):
            c1 = convs[n + 1]
            if c1.p % 2 == 1 and c1.q % 2 == 1:
                continue
            u, v = c1.p - c.p, c1.q - c.q
            if u % 2 == 1 and v % 2 == 1 and v > 0:
                cands.setdefault(v, (u, (eps_hi(n) + eps_hi(n + 1)) / v))
    vs = sorted(cands)
    if len(vs) < count:
        raise TableExhausted(
            f"table yields {len(vs)} odd/odd approximants, {count} requested"
        )
    vs = vs[:count]
    bits = 4 * vs[-1].bit_length() + 96
    while True:
        try:
            ball = eval_alpha(table.source, bits)
            refinable = True
        except (BitBudgetExceeded, InsufficientPrecision):
            ball = table.source.enclosure(bits, strict=False)
            refinable = False
        out: list[OddOddApproximant] = []
        undecided = False
        for v in vs:
            u, struct_hi = cands[v]
            target = Fraction(u, v)
            d_lo = max(Fraction(0), max(ball.lower - target, target - ball.upper))
            d_hi = min(
                max(abs(ball.lower - target), abs(ball.upper - target)), struct_hi
            )
            bound = Fraction(2, v * v)
            if d_hi >= bound:
                if d_lo >= bound:
                    raise AssertionError(
                        f"odd/odd approximant {u}/{v} violates err < 2/v^2"
                    )
                undecided = True
                break
            out.append(OddOddApproximant(u, v, RealBall.from_bounds(d_lo, d_hi)))
        if not undecided:
            return out
        if not refinable or bits >= _PRECISION_CAP:
            raise InsufficientPrecision("err < 2/v^2 undecidable")
        bits *= 2


@dataclass(frozen=True)
class ParityReport:
    ok: bool
    both_even_pairs: tuple[int, ...]
    shapes: tuple[str, ...]
    alternating_pattern_ok: bool | None


def parity_audit(table: ConvergentTable) -> ParityReport:
    """Check that consecutive p's (and q's) are never both even, and for
    all-even quotient tables confirm the alternating odd/odd, odd/even shape.
    """

    def shape(c):
        return ("even" if c.p % 2 == 0 else "odd") + "/" + (
            "even" if c.q % 2 == 0 else "odd"
        )

    convs = table.convergents
    bad = []
    for n in range(len(convs) - 1):
        if convs[n].p % 2 == 0 and convs[n + 1].p % 2 == 0:
            bad.append(n)
        elif convs[n].q % 2 == 0 and convs[n + 1].q % 2 == 0:
            bad.append(n)
    shapes = tuple(shape(c) for c in convs)
    pattern_ok = None
    if len(table.quotients) > 1 and all(a % 2 == 0 for a in table.quotients[1:]):
        pattern_ok = all(
            s == ("odd/odd" if n % 2 == 0 else "odd/even")
            for n, s in enumerate(shapes)
        )
    return ParityReport(
        ok=not bad,
        both_even_pairs=tuple(bad),
        shapes=shapes,
        alternating_pattern_ok=pattern_ok,
    )


@dataclass(frozen=True)
class ApproxProfile:
    max_a: int
    c_lower: Fraction
    prefix_len: int
    bounded_on_prefix: bool
    verdict: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "max_a": self.max_a,
                "c_lower": f"{self.c_lower.numerator}/{self.c_lower.denominator}",
                "prefix_len": self.prefix_len,
                "verdict": self.verdict,
            }
        )


def badly_approx_profile(table: ConvergentTable) -> ApproxProfile:
    """Prefix evidence for/against bounded partial quotients.

    c_lower is an exact rational lower bound for q^2 |alpha - p/q| over the
    table's convergents (with successor). Finite data cannot prove
    badly-approximable; the verdict is explicitly prefix evidence.
    """
    if len(table) < 3:
        raise ValueError("table needs at least 3 entries")
    qs = table.quotients[1:]
    max_a = max(qs)
    bits = 4 * table.convergents[-1].q.bit_length() + 64
    ball = eval_alpha(table.source, bits)
    c_lower = None
    for n in range(len(table) - 1):
        c = table.convergents[n]
        pv = c.value
        d_lo = max(Fraction(0), max(ball.lower - pv, pv - ball.upper))
        val = c.q * c.q * d_lo
        c_lower = val if c_lower is None else min(c_lower, val)
    half = len(qs) // 2
    growing = max(qs[half:]) >= 10 * max(qs[:half]) if half >= 1 else False
    verdict = (
        "not badly approximable on prefix (growing quotients)"
        if growing
        else f"bounded quotients so far (max a_n = {max_a}, prefix evidence)"
    )
    return ApproxProfile(
        max_a=max_a,
        c_lower=c_lower,
        prefix_len=len(table),
        bounded_on_prefix=not growing,
        verdict=verdict,
    )


def large_gap_search(table: ConvergentTable, threshold: int) -> list[int]:
    """Indices n with odd/odd convergent p_n/q_n and a_{n+1} >= threshold."""
    out = []
    for n, c in enumerate(table.convergents):
        if n + 1 >= len(table.quotients):
            break
        if c.p % 2 == 1 and c.q % 2 == 1 and table.quotients[n + 1] >= threshold:
            out.append(n)
    return out


def stream_to_csv(approximants: list[OddOddApproximant]) -> str:
    lines = ["v,u,err"]
    for a in approximants:
        with mp.workdps(25):
            err = mp.nstr(
                mp.mpf(a.err.value.numerator) / mp.mpf(a.err.value.denominator),
                17,
                min_fixed=1,
                max_fixed=0,
            )
        lines.append(f"{a.v},{a.u},{err}")
    return "\n".join(lines) + "\n"
