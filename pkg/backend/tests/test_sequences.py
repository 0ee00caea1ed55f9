"""Recurrent tapes, periodicity certificates, paired tapes and cherry rows."""

from functools import reduce
from math import lcm

import numpy as np
import pytest

from syncsmith.config import config
from syncsmith.core.sequences import (
    cherry_family,
    find_period,
    first_order_tape,
    lcm_upto,
    minimal_start,
    pair_tape_thm2,
    periodic_index,
    second_order_step,
    second_order_tape,
)
from syncsmith.core.zoo import load_fsm
from syncsmith.exceptions import InitialStateError, InvalidParameterError, SequenceError, SizeWarning, Unenumerable
from syncsmith.models.schemas import PeriodicityCertificate


# =============================================================================
# tapes and periods
# =============================================================================

def test_second_order_tape_mod2(modmax2):
    assert second_order_tape(modmax2, 0, 0, 8).values == (0, 0, 1, 0, 0, 1, 0, 0)


def test_second_order_tape_mod3(modmax3):
    assert second_order_tape(modmax3, 0, 0, 10).values == (0, 0, 1, 2, 0, 0, 1, 2, 0, 0)
    assert find_period(second_order_step(modmax3), (0, 0), order=2) == PeriodicityCertificate(ell=1, L=4)


def test_second_order_period_mod2(modmax2):
    cert = find_period(second_order_step(modmax2), (0, 0), order=2)
    assert (cert.ell, cert.L) == (1, 3)


def test_constant_tape(constant2):
    assert second_order_tape(constant2, 0, 1, 5).values == (0, 1, 1, 1, 1)
    cert = find_period(second_order_step(constant2), (0, 1), order=2)
    assert (cert.ell, cert.L) == (2, 1)


def test_first_order_periods():
    assert find_period(lambda x: x, 0) == PeriodicityCertificate(ell=1, L=1)
    assert find_period(lambda x: (x + 1) % 3, 0) == PeriodicityCertificate(ell=1, L=3)
    tail = {0: 1, 1: 2, 2: 3, 3: 2}
    cert = find_period(tail.get, 0)
    assert (cert.ell, cert.L) == (3, 2)
    assert cert.verify(first_order_tape(tail.get, 0, 20).values)


def test_periodic_index_folds_onto_first_cycle():
    tail = {0: 1, 1: 2, 2: 3, 3: 2}
    cert = find_period(tail.get, 0)
    assert [periodic_index(r, cert) for r in range(8)] == [0, 1, 2, 3, 2, 3, 2, 3]
    values = first_order_tape(tail.get, 0, 30).values
    assert all(values[r] == values[periodic_index(r, cert)] for r in range(30))


def test_tape_document(modmax2):
    cert = find_period(second_order_step(modmax2), (0, 0), order=2)
    doc = second_order_tape(modmax2, 0, 0, 5).to_document(modmax2.name_of, cert)
    assert doc == {
        "generator": "second-order",
        "values": ["0", "0", "1", "0", "0"],
        "certificate": {"ell": 1, "L": 3},
    }
    assert "certificate" not in first_order_tape(lambda x: x, 7, 2).to_document()


def test_find_period_step_limit():
    with pytest.raises(SequenceError):
        find_period(lambda x: x + 1, 0, max_steps=50)


def test_bad_order():
    with pytest.raises(InvalidParameterError):
        find_period(lambda x: x, 0, order=3)


def test_minimal_start():
    assert minimal_start([5, 6, 0, 1, 0, 1, 0], 2) == 2
    assert minimal_start([0, 1, 0, 1], 2) == 0


@pytest.mark.parametrize("a, expected", [(1, 1), (2, 2), (4, 12), (6, 60), (10, 2520)])
def test_lcm_upto(a, expected):
    assert lcm_upto(a) == expected


def test_lcm_upto_divisibility():
    for a in range(1, 31):
        assert lcm_upto(a + 1) % lcm_upto(a) == 0
        assert all(lcm_upto(a) % b == 0 for b in range(1, a + 1))
        assert lcm_upto(a) == reduce(lcm, range(1, a + 1), 1)


def test_every_map_on_a_finite_set_is_periodic_from_its_size():
    """x^{r + X^!} == x^r for r >= X^! on any map of an X-element set."""
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        size = int(rng.integers(2, 8))
        table = rng.integers(0, size, size).tolist()
        seed = int(rng.integers(0, size))
        L = lcm_upto(size)
        values = first_order_tape(table.__getitem__, seed, 3 * L).values
        assert PeriodicityCertificate(ell=L, L=L).verify(values)

        cert = find_period(table.__getitem__, seed)
        assert cert.ell <= size and cert.L <= size
        assert L % cert.L == 0
        assert cert.verify(values)
        assert minimal_start(values, cert.L) == cert.ell - 1


# =============================================================================
# paired tapes
# =============================================================================

def test_paired_tapes_first_terms(modmax2):
    p, q, _ = pair_tape_thm2(modmax2, 0, 0, 1, 5)
    assert p[1] == 0
    assert q[2] == 0


def test_paired_tapes_follow_their_recurrences(modmax3):
    send = modmax3.message_of
    for seeds in [(0, 0, 0), (1, 2, 0), (2, 2, 1)]:
        p, q, cert = pair_tape_thm2(modmax3, *seeds, 40)
        assert (p[0], q[0], q[1]) == seeds
        for r in range(0, 39):
            assert p[r + 1] == modmax3.transition(p[r], [send(q[r]), send(p[r]), send(q[r + 1])])
        for r in range(1, 39):
            assert q[r + 1] == modmax3.transition(q[r], [send(p[r - 1]), send(q[r]), send(p[r])])
        assert cert.verify(list(zip(p.values, q.values)))


def test_paired_period_mod3(modmax3):
    p, q, cert = pair_tape_thm2(modmax3, 0, 0, 0, 12)
    assert list(zip(p.values, q.values))[:6] == [(0, 0), (1, 0), (0, 2), (0, 0), (2, 1), (0, 0)]
    assert (cert.ell, cert.L) == (1, 5)


def test_paired_constant(constant2):
    _, _, cert = pair_tape_thm2(constant2, 0, 1, 1, 6)
    assert (cert.ell, cert.L) == (1, 1)


# =============================================================================
# cherry family
# =============================================================================

def test_cherry_family_mod2(modmax2):
    family = cherry_family(modmax2, 0, 4)
    assert family.L == 2
    assert family.rows[0][:8] == (0, 1, 0, 1, 0, 1, 0, 1)
    assert family.rows[1] == family.rows[0]
    assert family.entry(2, 0) == 0
    assert family.entry(0, 100) == 0
    assert family.entry(0, 101) == 1
    assert family.verify_rows()


def test_cherry_family_mod3(modmax3):
    family = cherry_family(modmax3, 1, 5)
    assert family.L == 6
    assert len(family.rows) == 6
    assert all(len(row) == 4 * family.L for row in family.rows)
    assert family.verify_rows()


def test_cherry_needs_enumerable(floodmax):
    with pytest.raises(Unenumerable):
        cherry_family(floodmax, 0, 3)


def test_cherry_seed_must_be_initial(fsm_document):
    fsm_document["initial"] = ["0"]
    alg = load_fsm(fsm_document)
    with pytest.raises(InitialStateError):
        cherry_family(alg, "1", 3)


def test_cherry_budget(modmax3, monkeypatch):
    monkeypatch.setattr(config.runtime, "NODE_BUDGET", 10)
    with pytest.raises(SizeWarning):
        cherry_family(modmax3, 0, 3)
