"""Boundary matrix of the universal example and certified optimization.

T_{t,alpha} = M diag(e^{it}, e^{i alpha t}) + I with M = (1/2)[[1,1],[1,1]],
det T = 1 + (e^{it} + e^{i alpha t})/2. The auxiliary functions are
h(t) = |2 + e^{i pi t} + e^{i pi alpha t}| and g(t) = h(t/pi)/2 = |det T_t|.
Infima of h and suprema of ||T_t^{-1}|| are bracketed by branch-and-bound
with interval bounds, so every reported lower/upper pair is certified.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import iv

from .contfrac import IrrationalSpec, eval_alpha, required_bits
from .diophantine import min_odd_dist
from .errors import (
    BitBudgetExceeded,
    InsufficientPrecision,
    OutOfRange,
    SingularMatrix,
)
from .intervals import (
    ComplexIv,
    RealBall,
    fraction_bounds,
    iv_hull,
    unit_phase,
    workprec,
)


class HEvaluator:
    """Caches the alpha enclosure and evaluates T_t, det, h, g, ||T^{-1}||.

    All methods assume they run inside ``workprec(bits)`` matching the
    ``alpha_at(bits)`` they use; the public wrappers below handle that.
    """

    def __init__(self, alpha: IrrationalSpec):
        self.alpha = alpha
        self._cache: dict[int, tuple[Fraction, Fraction]] = {}

    def alpha_bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        if bits not in self._cache:
            try:
                ball = eval_alpha(self.alpha, bits)
            except (BitBudgetExceeded, InsufficientPrecision):
                # Precision-capped sources (finite rule depth, digit strings)
                # fall back to their widest certified enclosure; downstream
                # interval arithmetic stays sound, just wider.
                ball = self.alpha.enclosure(bits, strict=False)
            self._cache[bits] = (ball.lower, ball.upper)
        return self._cache[bits]

    def alpha_at(self, bits: int):
        """Interval enclosure of alpha at >= bits accuracy (current prec)."""
        return iv_hull(*self.alpha_bounds(bits))

    def alpha_float(self) -> float:
        return float(sum(self.alpha_bounds(64)) / 2)

    # -- pointwise evaluations (call inside workprec) -----------------------

    def phases(self, t, a):
        """(e^{it}, e^{i alpha t}) for interval t, alpha enclosure a."""
        return unit_phase(t), unit_phase(a * t)

    def det_iv(self, t, a) -> ComplexIv:
        e1, e2 = self.phases(t, a)
        half = iv.mpf(1) / 2
        return ComplexIv(1 + half * (e1.re + e2.re), half * (e1.im + e2.im))

    def w_iv(self, t, a) -> ComplexIv:
        """w(t) = 2 + e^{i pi t} + e^{i pi alpha t}, so h = |w|."""
        e1, e2 = self.phases(iv.pi * t, a)
        return ComplexIv(2 + e1.re + e2.re, e1.im + e2.im)

    def inv_norm_iv(self, t, a):
        """Interval for ||T_t^{-1}|| = sigma_max / |det| over interval t."""
        ct, ca = iv.cos(t), iv.cos(a * t)
        cd = iv.cos((1 - a) * t)
        frob2 = 3 + ct + ca
        det2 = iv.mpf(3) / 2 + ct + ca + cd / 2
        if det2.a <= 0:
            raise SingularMatrix(f"|det|^2 enclosure {det2} touches zero at t={t}")
        disc = frob2 * frob2 - 4 * det2
        if disc.a < 0:
            disc = iv.mpf([0, max(float(disc.b), 0.0)])
        sigma2 = (frob2 + iv.sqrt(disc)) / 2
        return iv.sqrt(sigma2 / det2)


def _as_iv(t):
    """Accepts floats, Fractions, and ready-made interval values (so exact
    times like 3*iv.pi can be probed)."""
    if isinstance(t, Fraction):
        return iv.mpf(t.numerator) / iv.mpf(t.denominator)
    if hasattr(t, "_mpi_"):
        return t
    return iv.mpf(t)


def _t_float(t) -> float:
    if hasattr(t, "_mpi_"):
        return float(t.mid)
    return float(t)


def _bits_for(t_magnitude: float, bits: int) -> int:
    return required_bits(max(abs(t_magnitude), 1), bits)


@dataclass(frozen=True)
class BoundaryMatrix2:
    """T_{t,alpha} with interval entries."""

    t: float
    entries: tuple  # ((ComplexIv, ComplexIv), (ComplexIv, ComplexIv))
    bits: int

    def det(self) -> ComplexIv:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def max_entry_err(self) -> float:
        return max(e.max_err() for row in self.entries for e in row)

    def norm_upper(self) -> float:
        """Upper bound on the spectral norm via the Frobenius norm."""
        s = iv.mpf(0)
        for row in self.entries:
            for e in row:
                s = s + e.abs2()
        return float(iv.sqrt(s).b)


def t_matrix(alpha: IrrationalSpec, t, bits: int = 128) -> BoundaryMatrix2:
    ev = HEvaluator(alpha)
    work = _bits_for(_t_float(t), bits)
    with workprec(work):
        a = ev.alpha_at(work)
        ti = _as_iv(t)
        e1, e2 = ev.phases(ti, a)
        half = iv.mpf(1) / 2
        one = iv.mpf(1)
        entries = (
            (ComplexIv(one + half * e1.re, half * e1.im), e2 * half),
            (e1 * half, ComplexIv(one + half * e2.re, half * e2.im)),
        )
        return BoundaryMatrix2(t=_t_float(t), entries=entries, bits=bits)


def det_t(alpha: IrrationalSpec, t, bits: int = 128) -> ComplexIv:
    ev = HEvaluator(alpha)
    work = _bits_for(_t_float(t), bits)
    with workprec(work):
        return ev.det_iv(_as_iv(t), ev.alpha_at(work))


def h_eval(alpha: IrrationalSpec, t, bits: int = 128) -> RealBall:
    """h(t) = |2 + e^{i pi t} + e^{i pi alpha t}|."""
    ev = HEvaluator(alpha)
    work = _bits_for(_t_float(t), bits)
    with workprec(work):
        return ev.w_iv(_as_iv(t), ev.alpha_at(work)).abs_ball()


def g_eval(alpha: IrrationalSpec, t, bits: int = 128) -> RealBall:
    """g(t) = h(t/pi)/2 = |det T_t|."""
    ev = HEvaluator(alpha)
    work = _bits_for(_t_float(t), bits)
    with workprec(work):
        return ev.det_iv(_as_iv(t), ev.alpha_at(work)).abs_ball()


def inv_norm(alpha: IrrationalSpec, t, bits: int = 128) -> RealBall:
    ev = HEvaluator(alpha)
    work = _bits_for(_t_float(t), bits)
    with workprec(work):
        return RealBall.from_iv(ev.inv_norm_iv(_as_iv(t), ev.alpha_at(work)))


def witness_time(alpha: IrrationalSpec, u: int, v: int, bits: int = 128):
    """Enclosure of t0 = pi (v + delta), delta = -(v alpha - u)/(1 + alpha).

    This is the shifted time at which g comes within a constant factor of
    the odd distance; returned as (t_enclosure, delta_enclosure) at the
    caller's current precision policy.
    """
    ev = HEvaluator(alpha)
    work = _bits_for(float(v) * 4, bits)
    with workprec(work):
        a = ev.alpha_at(work)
        delta = -(v * a - u) / (1 + a)
        return iv.pi * (v + delta), delta


def g_at_witness(alpha: IrrationalSpec, u: int, v: int, bits: int = 128) -> RealBall:
    """Certified g(pi (v + delta)) at the shifted odd/odd witness time.

    g there can be astronomically small (that is the point of the shifted
    time), so precision is doubled until the enclosure is relatively tight.
    """
    ev = HEvaluator(alpha)
    work = _bits_for(float(v) * 4, bits)
    while True:
        with workprec(work):
            a = ev.alpha_at(work)
            delta = -(v * a - u) / (1 + a)
            t = iv.pi * (v + delta)
            ball = ev.det_iv(t, a).abs_ball()
        if ball.lower > 0 and ball.err < ball.lower / (1 << 20):
            return ball
        if work >= (1 << 20):
            raise InsufficientPrecision(
                f"g at the witness time for (u={u}, v={v}) is not separated "
                f"from 0 at {work} bits"
            )
        work *= 2


# -- certified infimum of h ------------------------------------------------


@dataclass(frozen=True)
class CertifiedInf:
    a: float
    b: float
    lower: float
    upper: float
    witness: float
    grid_step: float
    lipschitz: float
    bits: int


def _f_and_slope(ev: HEvaluator, c, a):
    """Interval F(c) = h(c)^2 and F'(c) at a point c.

    F = |w|^2 with w = 2 + e^{i pi t} + e^{i pi alpha t};
    F' = 2 Re(conj(w) w') with w' = i pi e^{i pi t} + i pi alpha e^{i pi a t}.
    """
    e1, e2 = ev.phases(iv.pi * c, a)
    w = ComplexIv(2 + e1.re + e2.re, e1.im + e2.im)
    wp = ComplexIv(-iv.pi * (e1.im + a * e2.im), iv.pi * (e1.re + a * e2.re))
    f = w.abs2()
    fp = 2 * (w.conj() * wp).re
    return f, fp


def inf_h_interval(
    alpha: IrrationalSpec, a: float, b: float, tol: float = 1e-6, bits: int = 128
) -> CertifiedInf:
    """Bracket inf_{t in [a,b]} h(t) to within tol.

    Branch-and-bound on F = h^2 with the second-order midpoint bound
    F(t) >= F(c) - |F'(c)| r - L2 r^2 / 2 on |t - c| <= r, where
    L2 >= sup |F''| = 2 pi^2 ((1+alpha)^2 + 4 (1+alpha^2)).
    """
    if not b > a:
        raise OutOfRange(f"degenerate interval [{a}, {b}]")
    if tol <= 0:
        raise OutOfRange("tol must be positive")
    ev = HEvaluator(alpha)
    work = _bits_for(max(abs(a), abs(b), 1.0), bits)
    with workprec(work):
        av = ev.alpha_at(work)
        a_hi = float(av.b)
        lips = math.pi * (1 + a_hi) * 1.0000001
        l2 = 2 * math.pi**2 * ((1 + a_hi) ** 2 + 4 * (1 + a_hi**2)) * 1.0000001

        best_up = math.inf  # least certified upper bound on F at a point
        witness = a
        finest = (b - a) / 2

        def visit(c: float, r: float):
            nonlocal best_up, witness
            f, fp = _f_and_slope(ev, iv.mpf(c), av)
            fu = float(f.b)
            if fu < best_up:
                best_up, witness = fu, c
            speed = max(abs(float(fp.a)), abs(float(fp.b)))
            lb = float(f.a) - speed * r - l2 * r * r / 2
            return lb

        c0 = (a + b) / 2
        heap = [(visit(c0, b - c0), c0, b - c0)]
        lower = heap[0][0]
        # A few extra seeds so best_up starts realistic.
        for c in np.linspace(a, b, 17):
            visit(float(c), 0.0)

        while heap:
            lb, c, r = heapq.heappop(heap)
            lower = lb
            if math.sqrt(best_up) - math.sqrt(max(lower, 0.0)) <= tol:
                break
            finest = min(finest, r / 2)
            for cc in (c - r / 2, c + r / 2):
                clb = visit(cc, r / 2)
                if clb < best_up:
                    heapq.heappush(heap, (clb, cc, r / 2))
        else:
            lower = best_up  # heap exhausted: every cell was pruned

        return CertifiedInf(
            a=a,
            b=b,
            lower=math.sqrt(max(lower, 0.0)),
            upper=math.sqrt(best_up),
            witness=witness,
            grid_step=finest,
            lipschitz=lips,
            bits=work,
        )


# -- growth curve ----------------------------------------------------------


@dataclass(frozen=True)
class GrowthPoint:
    eta: float
    m_lower: float
    m_upper: float
    witness: float


@dataclass(frozen=True)
class GrowthCurve:
    alpha_json: dict
    tol: float
    bits: int
    points: tuple

    def to_csv(self) -> str:
        lines = ["eta,m_lower,m_upper"]
        for p in self.points:
            lines.append(f"{p.eta!r},{p.m_lower!r},{p.m_upper!r}")
        return "\n".join(lines) + "\n"


_MIN_CELL = 1e-13


def _sup_inv_norm(ev, av, a: float, b: float, tol: float, seed: float):  # noqa: C901
    """Bracket sup_{t in [a,b]} ||T_t^{-1}|| to relative width tol.

    Cell bounds use the centered form v(c) +/- (|v'(c)| r + L r^2 / 2) for
    v = |det|^2 = 3/2 + cos t + cos(alpha t) + cos((1-alpha) t)/2 and for
    the squared Frobenius norm F = 3 + cos t + cos(alpha t); then
    ||T^{-1}||^2 = sigma_max^2 / |det|^2 with
    sigma_max^2 = (F + sqrt(F^2 - 4 |det|^2)) / 2.
    The centered form prunes geometrically near resonances, where naive
    interval extension would need O(|det|^-2) many cells.
    """
    af = ev.alpha_float()
    bf = 1 - af
    l2_det = (1 + af * af + bf * bf / 2) * 1.01  # >= sup |(|det|^2)''|
    l2_frob = (1 + af * af) * 1.01  # >= sup |F''|
    # Below this cell radius the alpha enclosure, not the cell width,
    # dominates the bound slack; further subdivision cannot help.
    a_err = float(av.delta) / 2

    best_lo = seed
    witness = a
    stuck_up = 0.0  # certified upper over cells parked at the floor

    def point(t: float):
        nonlocal best_lo, witness
        n = ev.inv_norm_iv(iv.mpf(t), av)
        if float(n.a) > best_lo:
            best_lo, witness = float(n.a), t
        return n

    def cell_upper(c: float, r: float) -> float:
        ti = iv.mpf(c)
        e1, e2 = unit_phase(ti), unit_phase(av * ti)
        e3 = unit_phase((1 - av) * ti)
        det2 = iv.mpf(3) / 2 + e1.re + e2.re + e3.re / 2
        ddet2 = -(e1.im + av * e2.im + (1 - av) * e3.im / 2)
        frob2 = 3 + e1.re + e2.re
        dfrob2 = -(e1.im + av * e2.im)
        pad_d = max(abs(float(ddet2.a)), abs(float(ddet2.b))) * r + l2_det * r * r / 2
        det2_lo = float(det2.a) - pad_d
        if det2_lo <= 0:
            if r < _MIN_CELL:
                raise SingularMatrix(
                    f"det enclosure contains 0 near t={c} (cell radius {r})"
                )
            return math.inf
        pad_f = (
            max(abs(float(dfrob2.a)), abs(float(dfrob2.b))) * r + l2_frob * r * r / 2
        )
        frob2_up = min(5.0, float(frob2.b) + pad_f)
        disc = max(frob2_up * frob2_up - 4 * det2_lo, 0.0)
        sigma2_up = (frob2_up + math.sqrt(disc)) / 2
        return math.sqrt(sigma2_up / det2_lo)

    # Float prescan seeds the incumbent near the true maximizer.
    grid = np.linspace(a, b, max(64, int((b - a) * 64)) + 1)
    ct, ca = np.cos(grid), np.cos(af * grid)
    det2g = np.maximum(1.5 + ct + ca + 0.5 * np.cos(bf * grid), 1e-300)
    frob2g = 3.0 + ct + ca
    nvals = np.sqrt(
        (frob2g + np.sqrt(np.maximum(frob2g**2 - 4 * det2g, 0.0))) / (2 * det2g)
    )
    for i in np.argsort(nvals)[-4:]:
        point(float(grid[i]))

    step = min(1.0, b - a)
    cells = []
    x = a
    while x < b:
        y = min(x + step, b)
        c, r = (x + y) / 2, (y - x) / 2
        ub = cell_upper(c, r)
        if ub > best_lo * (1 + tol):
            heapq.heappush(cells, (-ub, c, r))
        x = y

    # Cells are dropped only once their upper bound is at most the current
    # incumbent times (1 + tol), and the incumbent never decreases, so on
    # exit best_lo * (1 + tol) is a certified upper bound for the segment.
    while cells:
        nub, c, r = heapq.heappop(cells)
        if -nub <= best_lo * (1 + tol):
            break
        point(c)
        if r < max(1e-13, 4 * a_err * (abs(c) + 1)):
            stuck_up = max(stuck_up, -nub)
            continue
        for cc in (c - r / 2, c + r / 2):
            ub = cell_upper(cc, r / 2)
            if ub > best_lo * (1 + tol):
                heapq.heappush(cells, (-ub, cc, r / 2))

    return best_lo, max(best_lo * (1 + tol), stuck_up), witness


def growth_curve(
    alpha: IrrationalSpec, eta_list, tol: float = 1e-3, bits: int = 128
) -> GrowthCurve:
    """Bracket m_alpha(eta) = sup_{|t| <= eta} ||T_t^{-1}|| for each eta.

    Evenness of |det| and of the singular values under t -> -t reduces the
    range to [0, eta]; the sup is accumulated segment by segment so the
    monotone envelope is exact by construction.
    """
    etas = [float(e) for e in eta_list]
    if any(e <= 0 for e in etas) or any(
        e2 <= e1 for e1, e2 in zip(etas, etas[1:])
    ):
        raise OutOfRange("eta list must be positive and strictly increasing")
    ev = HEvaluator(alpha)
    work = _bits_for(max(etas), bits)
    points = []
    with workprec(work):
        av = ev.alpha_at(work)
        run_lo, run_up, run_wit = 1.0, 1.0, 0.0  # ||T_0^{-1}|| = 1 exactly
        prev = 0.0
        for eta in etas:
            lo, up, wit = _sup_inv_norm(ev, av, prev, eta, tol, seed=run_lo)
            if lo > run_lo:
                run_lo, run_wit = lo, wit
            run_up = max(run_up, up)
            points.append(
                GrowthPoint(eta=eta, m_lower=run_lo, m_upper=run_up, witness=run_wit)
            )
            prev = eta
    return GrowthCurve(
        alpha_json=alpha.to_json(), tol=tol, bits=work, points=tuple(points)
    )


# -- odd/odd sandwich ------------------------------------------------------


@dataclass(frozen=True)
class SandwichReport:
    v: int
    u: int
    dist_lower: float
    dist_upper: float
    inf_lower: float
    inf_upper: float
    ratio_lo: float
    ratio_hi: float
    constant: float
    upper_ok: bool


def sandwich_constant(alpha: IrrationalSpec) -> float:
    """36 pi^2 / min{(1+alpha)^2, 1} rounded up."""
    ev = HEvaluator(alpha)
    with workprec(96):
        a = ev.alpha_at(96)
        one_plus = (1 + a) * (1 + a)
        denom = min(float(one_plus.a), 1.0)
        return float((36 * iv.pi * iv.pi).b) / denom


def sandwich_report(
    alpha: IrrationalSpec, odd_v_list, tol: float = 1e-6, bits: int = 128
) -> list[SandwichReport]:
    """Per odd v: min odd dist, certified inf of h on [v-1, v+1], ratios."""
    const = sandwich_constant(alpha)
    out = []
    for v in odd_v_list:
        v = int(v)
        if v <= 0 or v % 2 == 0:
            raise OutOfRange(f"v={v} is not a positive odd integer")
        u, dist = min_odd_dist(alpha, v, bits=bits)
        d_lo, d_up = float(dist.lower), float(dist.upper)
        # Near resonances inf h ~ dist^2 can sit far below an absolute tol,
        # which would zero out the lower ratio; tighten proportionally.
        tol_v = min(tol, d_lo * d_lo / 16)
        ci = inf_h_interval(alpha, v - 1.0, v + 1.0, tol=tol_v, bits=bits)
        ratio_lo = ci.lower / (d_up * d_up)
        ratio_hi = ci.upper / (d_lo * d_lo)
        upper_ok = ci.lower <= const * d_up * d_up + tol
        assert upper_ok, (
            f"sandwich upper bound violated at v={v}: "
            f"inf_h in [{ci.lower}, {ci.upper}], const*dist^2 <= {const * d_up**2}"
        )
        out.append(
            SandwichReport(
                v=v,
                u=u,
                dist_lower=d_lo,
                dist_upper=d_up,
                inf_lower=ci.lower,
                inf_upper=ci.upper,
                ratio_lo=ratio_lo,
                ratio_hi=ratio_hi,
                constant=const,
                upper_ok=upper_ok,
            )
        )
    return out


def sandwich_to_csv(reports: list[SandwichReport]) -> str:
    lines = ["v,u,dist,inf_lower,inf_upper,ratio_lo,ratio_hi"]
    for r in reports:
        d = (r.dist_lower + r.dist_upper) / 2
        lines.append(
            f"{r.v},{r.u},{d!r},{r.inf_lower!r},{r.inf_upper!r},"
            f"{r.ratio_lo!r},{r.ratio_hi!r}"
        )
    return "\n".join(lines) + "\n"
