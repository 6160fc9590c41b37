"""Decay-rate calculus: monotone growth functions, generalized inverses,
and the conversion of resolvent growth into semigroup decay predictions.

A growth function M maps frequency eta to the certified resolvent-norm
supremum over [-i eta, i eta].  Three rate formulas are supported:

* ``BattyDuyckaerts``: bound(t) = c / M_log^{-1}(t / c), where
  M_log(eta) = M(eta) (log(1 + M(eta)) + log(1 + eta)).
* ``RSS-upper``: bound(t) = C / M^{-1}(t); valid only when M is of
  positive increase, so a certificate is required.
* ``LowerBound``: bound(t) = c / M^{-1}(C t).

Generalized inverses follow the sup convention
inv(y) = sup { eta : fn(eta) <= y }, so fn(inv(y)) <= y with equality on
the range of fn.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import BelowRange, MissingCertificate, ValidationError
from .spectral import GrowthCurve

__all__ = [
    "MonotoneFn",
    "DecayPrediction",
    "PositiveIncreaseCertificate",
    "PositiveIncreaseRefutation",
    "power_fn",
    "power_log_fn",
    "from_growth_curve",
    "m_log",
    "invert",
    "predict",
    "positive_increase_estimate",
    "transfer_certificate",
    "prediction_to_csv",
]

_INV_RTOL = 1e-9
_DOMAIN_CAP = 1e300


@dataclass(frozen=True)
class MonotoneFn:
    """A positive, increasing function on [lo, hi] with a generalized inverse.

    ``hi`` may be ``math.inf`` for closed forms.  Curve-backed instances are
    immutable snapshots of their knots.
    """

    fn: Callable[[float], float]
    lo: float
    hi: float = math.inf
    label: str = ""

    def __post_init__(self) -> None:
        if not self.lo >= 0:
            raise ValidationError("domain start must be >= 0")
        if not self.hi > self.lo:
            raise ValidationError("domain must have positive length")

    def __call__(self, x: float) -> float:
        if x < self.lo or x > self.hi:
            raise ValidationError(
                f"argument {x} outside domain [{self.lo}, {self.hi}]"
            )
        return self.fn(x)


def power_fn(p: float, label: str | None = None) -> MonotoneFn:
    """M(eta) = eta**p on (0, inf)."""
    if p <= 0:
        raise ValidationError("exponent must be positive")
    return MonotoneFn(lambda x: x**p, lo=0.0, label=label or f"eta^{p}")


def power_log_fn(p: float, s: float, lo: float = math.e) -> MonotoneFn:
    """M(eta) = eta**p * (log eta)**s on [lo, inf), lo > 1."""
    if p <= 0 or s < 0:
        raise ValidationError("need p > 0 and s >= 0")
    if lo <= 1.0:
        raise ValidationError("power-log domain must start above 1")
    return MonotoneFn(
        lambda x: x**p * math.log(x) ** s,
        lo=lo,
        label=f"eta^{p}*(log eta)^{s}",
    )


def from_growth_curve(
    curve: GrowthCurve, which: str = "lower"
) -> MonotoneFn:
    """Wrap a certified growth curve as a monotone function.

    Interpolation is log-linear between knots; the domain is the knot
    range.  ``which`` selects the lower or upper certified value at each
    knot (the curve is monotone in eta either way).
    """
    if which not in ("lower", "upper"):
        raise ValidationError("which must be 'lower' or 'upper'")
    pts = [
        (p.eta, p.m_lower if which == "lower" else p.m_upper)
        for p in curve.points
    ]
    if len(pts) < 2:
        raise ValidationError("curve needs at least two knots")
    xs = [math.log(e) for e, _ in pts]
    ys = [math.log(m) for _, m in pts]

    def fn(x: float) -> float:
        lx = math.log(x)
        if lx <= xs[0]:
            return math.exp(ys[0])
        if lx >= xs[-1]:
            return math.exp(ys[-1])
        # binary search for the bracketing knot pair
        a, b = 0, len(xs) - 1
        while b - a > 1:
            mid = (a + b) // 2
            if xs[mid] <= lx:
                a = mid
            else:
                b = mid
        w = (lx - xs[a]) / (xs[b] - xs[a])
        return math.exp(ys[a] + w * (ys[b] - ys[a]))

    return MonotoneFn(
        fn, lo=pts[0][0], hi=pts[-1][0], label=f"growth-curve({which})"
    )


def m_log(fn: MonotoneFn) -> MonotoneFn:
    """M_log(eta) = M(eta) (log(1 + M(eta)) + log(1 + eta))."""

    def g(x: float) -> float:
        m = fn(x)
        return m * (math.log1p(m) + math.log1p(x))

    return MonotoneFn(g, lo=fn.lo, hi=fn.hi, label=f"m_log[{fn.label}]")


def invert(fn: MonotoneFn, y: float, rtol: float = _INV_RTOL) -> float:
    """Generalized inverse sup { eta : fn(eta) <= y } by bisection.

    Raises BelowRange when y < fn(lo).  Values above the range (for a
    bounded domain) clamp to the domain endpoint, per the sup convention.
    """
    lo = fn.lo
    f_lo = fn(lo)
    if y < f_lo:
        raise BelowRange(
            f"target {y} below fn({lo}) = {f_lo}; inverse undefined"
        )
    hi_cap = min(fn.hi, _DOMAIN_CAP)
    hi = max(lo, 1.0)
    while hi < hi_cap and fn(min(hi, hi_cap)) <= y:
        hi = hi * 2
    hi = min(hi, hi_cap)
    if fn(hi) <= y:
        return hi
    # invariant: fn(lo) <= y < fn(hi)
    while hi - lo > rtol * max(abs(lo), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fn(mid) <= y:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class PositiveIncreaseCertificate:
    """Evidence (not proof) that fn(lambda t)/fn(t) >= c lambda^alpha
    over the recorded finite grids."""

    alpha_hat: float
    c: float
    lambda_grid: tuple[float, ...]
    t_grid: tuple[float, ...]
    label: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "positive-increase-certificate",
                "alpha_hat": self.alpha_hat,
                "c": self.c,
                "lambda_grid": list(self.lambda_grid),
                "t_grid": list(self.t_grid),
                "label": self.label,
            }
        )


@dataclass(frozen=True)
class PositiveIncreaseRefutation:
    """Witness pairs where the dilation ratio stays near 1 for large
    lambda, refuting positive increase over the grid."""

    alpha_hat: float
    witnesses: tuple[tuple[float, float, float], ...]  # (lambda, t, ratio)
    lambda_grid: tuple[float, ...]
    t_grid: tuple[float, ...]
    label: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "positive-increase-refutation",
                "alpha_hat": self.alpha_hat,
                "witnesses": [list(w) for w in self.witnesses],
                "lambda_grid": list(self.lambda_grid),
                "t_grid": list(self.t_grid),
                "label": self.label,
            }
        )


_ALPHA_MARGIN = 0.05


def positive_increase_estimate(
    fn: MonotoneFn,
    lambda_grid: Sequence[float],
    t_grid: Sequence[float],
) -> PositiveIncreaseCertificate | PositiveIncreaseRefutation:
    """Fit the largest alpha and c in (0, 1] with
    fn(lambda t)/fn(t) >= c lambda^alpha over the grids.

    Grid points with lambda * t outside the domain are skipped.  Returns a
    certificate when the fitted exponent clears a fixed margin, otherwise
    refutation evidence listing the flattest ratios at the largest lambdas.
    """
    lams = sorted(set(float(x) for x in lambda_grid))
    ts = sorted(set(float(x) for x in t_grid))
    if not lams or not ts:
        raise ValidationError("grids must be non-empty")
    if lams[0] < 1.0:
        raise ValidationError("dilation factors must be >= 1")
    ratios: list[tuple[float, float, float]] = []
    for lam in lams:
        if lam == 1.0:
            continue
        for t in ts:
            if t < fn.lo or lam * t > fn.hi:
                continue
            ratios.append((lam, t, fn(lam * t) / fn(t)))
    if not ratios:
        raise ValidationError("no grid point has lambda*t inside the domain")
    # largest alpha satisfying r >= lambda^alpha pointwise, then c for margin
    alpha_hat = min(
        math.log(max(r, 1e-300)) / math.log(lam) for lam, _, r in ratios
    )
    alpha_hat = max(alpha_hat, 0.0)
    if alpha_hat > _ALPHA_MARGIN:
        c = min(
            min(r / lam**alpha_hat for lam, _, r in ratios), 1.0
        )
        return PositiveIncreaseCertificate(
            alpha_hat=alpha_hat,
            c=c,
            lambda_grid=tuple(lams),
            t_grid=tuple(ts),
            label=fn.label,
        )
    flat = sorted(
        (w for w in ratios if w[0] >= 10.0 and w[2] < 2.0),
        key=lambda w: (w[2], -w[0]),
    )
    if not flat:
        flat = sorted(ratios, key=lambda w: (w[2], -w[0]))
    return PositiveIncreaseRefutation(
        alpha_hat=alpha_hat,
        witnesses=tuple(flat[:8]),
        lambda_grid=tuple(lams),
        t_grid=tuple(ts),
        label=fn.label,
    )


def transfer_certificate(
    cert: PositiveIncreaseCertificate, d: float, D: float
) -> PositiveIncreaseCertificate:
    """Transfer a certificate from f to g when d*f <= g <= D*f pointwise:
    g(lambda t)/g(t) >= (d/D) f(lambda t)/f(t), so the exponent carries
    over with constant scaled by d/D."""
    if not (0 < d <= D):
        raise ValidationError("need 0 < d <= D")
    return PositiveIncreaseCertificate(
        alpha_hat=cert.alpha_hat,
        c=min(cert.c * d / D, 1.0),
        lambda_grid=cert.lambda_grid,
        t_grid=cert.t_grid,
        label=f"sandwich({d}/{D})[{cert.label}]",
    )


_KINDS = ("BattyDuyckaerts", "RSS-upper", "LowerBound")


@dataclass(frozen=True)
class DecayPrediction:
    """(t, bound) pairs produced by one of the rate formulas, with the
    constants used.  Shape-only unless the caller supplies constants."""

    kind: str
    c: float
    C: float
    points: tuple[tuple[float, float], ...] = field(default_factory=tuple)
    label: str = ""

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "bound", "kind"])
        for t, b in self.points:
            w.writerow([repr(t), repr(b), self.kind])
        return buf.getvalue()


def predict(
    fn: MonotoneFn,
    kind: str,
    t_list: Sequence[float],
    c: float = 1.0,
    C: float = 1.0,
    certificate: PositiveIncreaseCertificate | None = None,
) -> DecayPrediction:
    """Evaluate one rate formula at the given times.

    ``fn`` is the growth function M.  Constants default to 1 (the
    underlying theorems assert existence, not values), yielding
    shape-only predictions.
    """
    if kind not in _KINDS:
        raise ValidationError(f"kind must be one of {_KINDS}")
    if c <= 0 or C <= 0:
        raise ValidationError("constants must be positive")
    ts = [float(t) for t in t_list]
    if any(t <= 0 for t in ts):
        raise ValidationError("times must be positive")
    if kind == "RSS-upper":
        if certificate is None or isinstance(
            certificate, PositiveIncreaseRefutation
        ):
            raise MissingCertificate(
                "RSS upper bound requires a positive-increase certificate"
            )
        pts = tuple((t, C / invert(fn, t)) for t in ts)
    elif kind == "BattyDuyckaerts":
        ml = m_log(fn)
        pts = tuple((t, c / invert(ml, t / c)) for t in ts)
    else:
        pts = tuple((t, c / invert(fn, C * t)) for t in ts)
    return DecayPrediction(kind=kind, c=c, C=C, points=pts, label=fn.label)


def prediction_to_csv(pred: DecayPrediction) -> str:
    return pred.to_csv()
