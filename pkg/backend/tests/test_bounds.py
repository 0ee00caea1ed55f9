"""Prime counting, lcm(1..k), Chebyshev estimates and the lower bounds."""

import math

import pytest

from syncsmith.config import config
from syncsmith.core.bounds import (
    chebyshev_check,
    chebyshev_detail,
    chebyshev_scan,
    dynamic_state_lower_bound,
    lcm_upto_factored,
    log_lcm_upto,
    lower_bounds,
    prime_count,
    primes_upto,
    thm5_consistent,
)
from syncsmith.core.sequences import lcm_upto
from syncsmith.exceptions import InvalidParameterError


@pytest.mark.parametrize("k, expected", [(0, 0), (1, 0), (2, 1), (10, 4), (100, 25), (1000, 168), (10 ** 5, 9592)])
def test_prime_count(k, expected):
    assert prime_count(k) == expected


def test_primes_upto():
    assert primes_upto(20).tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
    assert primes_upto(1).tolist() == []


def test_factored_lcm_matches_running_lcm():
    running = 1
    for k in range(1, 5001):
        running = math.lcm(running, k)
        assert lcm_upto_factored(k) == running
        if k <= 40:
            assert lcm_upto(k) == running
        if k % 250 == 0:
            assert log_lcm_upto(k) == pytest.approx(math.log(running), rel=1e-9)


def test_log_lcm_small_values():
    assert log_lcm_upto(2) == pytest.approx(math.log(2))
    assert log_lcm_upto(4) == pytest.approx(2 * math.log(2) + math.log(3))
    assert log_lcm_upto(1) == 0.0


def test_chebyshev_small_values():
    assert chebyshev_check(2)
    assert chebyshev_check(10)
    detail = chebyshev_detail(10)
    assert detail["pi"] == 4
    assert detail["log_lcm"] == pytest.approx(math.log(2520))


def test_pi_estimate_with_1_11_fails_at_seven():
    detail = chebyshev_detail(7)
    assert detail["lcm_ok"]
    assert not detail["pi_ok"]
    assert not chebyshev_check(7)
    assert chebyshev_check(7, pi_constant=config.bounds.ROSSER_SCHOENFELD_CONSTANT)


def test_chebyshev_scan_to_one_hundred_thousand():
    frame = chebyshev_scan(10 ** 5)
    assert len(frame) == 10 ** 5 - 1
    assert frame["lcm_ok"].all()
    failures = set(frame.loc[~frame["pi_ok"], "k"].tolist())
    assert {7, 113} <= failures

    wide = chebyshev_scan(10 ** 5, pi_constant=config.bounds.ROSSER_SCHOENFELD_CONSTANT)
    assert wide["pi_ok"].all()


def test_scan_agrees_with_detail():
    frame = chebyshev_scan(500).set_index("k")
    for k in (2, 3, 16, 97, 113, 256, 500):
        detail = chebyshev_detail(k)
        assert frame.loc[k, "pi"] == detail["pi"]
        assert frame.loc[k, "log_lcm"] == pytest.approx(detail["log_lcm"])
        assert bool(frame.loc[k, "pi_ok"]) == detail["pi_ok"]


@pytest.mark.parametrize("n, state_lb, time_lb, dynamic_lb", [(4, 5, 2, 1), (19, 20, 17, 3), (100, 101, 98, 4)])
def test_lower_bounds(n, state_lb, time_lb, dynamic_lb):
    report = lower_bounds(n)
    assert report.self_stab_state_lb == state_lb
    assert report.self_stab_time_lb == time_lb
    assert report.dynamic_state_lb == dynamic_lb
    assert report.supporting.pi_n == prime_count(n)


def test_lower_bounds_need_four_nodes():
    with pytest.raises(InvalidParameterError):
        lower_bounds(3)


def test_dynamic_bound_small_networks():
    assert dynamic_state_lower_bound(2) == 1
    assert dynamic_state_lower_bound(12) == 2
    with pytest.raises(InvalidParameterError):
        dynamic_state_lower_bound(1)


def test_state_bound_is_consistent_with_two_group_networks():
    for q in range(1, 60):
        assert thm5_consistent(q)
        assert dynamic_state_lower_bound(2 * lcm_upto(q)) <= q
