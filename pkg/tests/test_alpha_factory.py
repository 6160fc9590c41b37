"""Construction of alpha realizing a prescribed decay target."""

import json
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phstab import alpha_factory as af
from phstab import contfrac as cf
from phstab.errors import MonotonicityViolation, OutOfRange


def _oracle_quotient(target_log_f, q_prev: int) -> int:
    """Independent recomputation of a_n = 2*ceil(1/(sqrt(f(pi q)) q))
    at 600 decimal digits."""
    with mpmath.workdps(600):
        t = mpmath.pi * q_prev
        inv = mpmath.exp(-mpmath.mpf(target_log_f(t)) / 2) / q_prev
        return int(2 * mpmath.ceil(inv))


def test_power4_quotients_vs_oracle():
    target = af.PowerLog(p=4, s=0)
    ca = af.construct(target, bit_budget=4096)
    qs = ca.table.quotients
    assert qs[0] == 1 and qs[1] == 20 and qs[2] == 396
    # recompute each from the recursion independently
    q_prev = 1
    with mpmath.workdps(600):
        for n in range(1, min(7, len(qs))):
            t = mpmath.pi * q_prev
            inv = 1 / (mpmath.sqrt(t**-4) * q_prev)
            assert qs[n] == int(2 * mpmath.ceil(inv))
            q_prev = ca.table.convergents[n].q


def test_exp_quotients_vs_oracle():
    ca = af.construct(af.ExpDecay(beta=1.0), bit_budget=40000)
    qs = ca.table.quotients
    assert qs[0] == 1
    with mpmath.workdps(60):
        a1 = int(2 * mpmath.ceil(mpmath.exp(mpmath.pi / 2)))
        assert qs[1] == a1  # = 10
        q1 = ca.table.convergents[1].q
        a2 = int(2 * mpmath.ceil(mpmath.exp(mpmath.pi * q1 / 2) / q1))
        assert qs[2] == a2  # = 1327126
    assert qs[1] == 10 and qs[2] == 1327126


def test_quotients_all_even_and_depth_capped():
    ca = af.construct(af.PowerLog(p=2, s=0), bit_budget=512)
    assert all(a % 2 == 0 for a in ca.table.quotients[1:])
    assert ca.q_last.bit_length() <= 512


def test_constructed_alpha_in_one_two():
    ca = af.construct(af.PowerLog(p=3, s=1), bit_budget=1024)
    ball = ca.spec.enclosure(64, strict=False)
    assert 1 < float(ball.lower) and float(ball.upper) < 2


def test_tabulated_validation_and_interpolation():
    bad = af.Tabulated(((1.0, 0.5), (2.0, 0.9)))
    with pytest.raises(MonotonicityViolation):
        bad.validate()
    good = af.Tabulated(((1.0, 1.0), (10.0, 0.01), (100.0, 1e-6)))
    good.validate()
    # log f is interpolated linearly in t between knots
    assert good.value(1.0) == pytest.approx(1.0)
    assert good.value(10.0) == pytest.approx(0.01)
    assert good.value(5.5) == pytest.approx(math.exp(math.log(0.01) / 2), rel=1e-9)
    assert 0.01 < good.value(5.5) < 1.0


def test_target_json_round_trip():
    targets = [
        af.ExpDecay(beta=2.5),
        af.PowerLog(p=4, s=0),
        af.Tabulated(((1.0, 1.0), (2.0, 0.5))),
    ]
    for t in targets:
        again = af.target_from_json(json.dumps(t.to_json()))
        assert again == t


def test_predicted_bounds_and_range_guard():
    ca = af.construct(af.PowerLog(p=4, s=0), bit_budget=1024)
    t = math.pi * 5
    lo, hi = af.predicted_bounds(ca, t)
    assert lo == pytest.approx((t + math.pi) ** -4)
    assert hi == pytest.approx((t - math.pi) ** -4)
    with pytest.raises(OutOfRange):
        af.predicted_bounds(ca, math.pi * ca.q_last * 10)


def test_construction_rule_is_reproducible_from_json():
    ca = af.construct(af.PowerLog(p=4, s=0), bit_budget=2048)
    spec2 = cf.spec_from_json(json.dumps(ca.spec.to_json()))
    t1 = cf.expand(ca.spec, 4)
    t2 = cf.expand(spec2, 4)
    assert t1.quotients == t2.quotients


@given(p=st.floats(min_value=1.0, max_value=6.0),
       s=st.floats(min_value=0.0, max_value=3.0))
@settings(max_examples=10, deadline=None)
def test_construction_even_quotients_property(p, s):
    ca = af.construct(af.PowerLog(p=p, s=s), bit_budget=700)
    assert all(a % 2 == 0 and a >= 2 for a in ca.table.quotients[1:])
    assert ca.table.check_identity()
