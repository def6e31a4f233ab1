#!/usr/bin/env python
# -*- coding: utf-8 -*-
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultranorm.komatsu import (RSequenceError, geometric, linear,
                               nachbin_domination_check, power,
                               product_sequence, regularization_certificate,
                               regularize, running_product, shipped_r_list,
                               table)
from ultranorm.reports import Status
from ultranorm.sequences import associated_function, gevrey

__author__ = "ultranorm developers"
__license__ = "mit"


t_grid = np.logspace(-2, 3, 400)
monotone_tables = st.lists(st.floats(0.0, 5.0), min_size=30,
                           max_size=60).map(
    lambda steps: np.concatenate([[0.1], 0.1 + np.cumsum(steps) +
                                  np.linspace(0, 1, len(steps))]))


def test_rejects_bad_sequences():
    with pytest.raises(RSequenceError):
        table([1, 2, 3])
    with pytest.raises(RSequenceError):
        table([3, 2, 1, 4], diverges=True)
    with pytest.raises(RSequenceError):
        table([2, 2, 2], diverges=True)
    with pytest.raises(RSequenceError):
        table([0, 1, 2], diverges=True)
    with pytest.raises(RSequenceError):
        linear(0, 1)


def test_running_product():
    assert np.isclose(np.exp(running_product(linear(1, 1), 3)), 24.0)


def test_product_sequence(factorial):
    product = product_sequence(factorial, linear(1, 1))
    # p! (p+1)!
    assert np.allclose(product.values(4), [1, 2, 12, 144, 2880])
    assert product.log_convex


def test_regularize_geometric_is_identity():
    r = geometric(2.0)
    r_prime = regularize(r, 50)
    assert np.allclose(r_prime.log_values(50), r.log_values(50))


def test_regularize_caps_fast_growth():
    r = table(np.exp(np.arange(40.0) ** 1.5), diverges=True)
    r_prime = regularize(r, 39)
    lp = r_prime.log_values(39)
    j = np.arange(39)
    assert np.all(lp[1:] <= (j + 1) * np.log(2) + lp[:-1] + 1e-12)
    assert np.all(lp <= r.log_values(39) + 1e-12)


@settings(max_examples=40, deadline=None)
@given(values=monotone_tables)
def test_regularize_properties(values):
    r = table(values, diverges=True)
    J = len(values) - 1
    r_prime = regularize(r, J)
    lr, lp = r.log_values(J), r_prime.log_values(J)
    assert np.all(lp <= lr + 1e-12)
    assert np.all(np.diff(lp) >= 0)
    assert np.all(lp[1:] <= np.arange(1, J + 1) * np.log(2) + lp[:-1]
                  + 1e-12)
    again = regularize(r_prime, J)
    assert np.allclose(again.log_values(J), lp)


@pytest.mark.parametrize("r", shipped_r_list(), ids=lambda r: r.name)
def test_regularization_certificate(factorial, r):
    record = regularization_certificate(factorial, r, regularize(r, 200), 200)
    assert record.status is Status.PASS
    assert record.constants["dominated"] and record.constants["doubling"]


def test_uncapped_sequence_is_not_certified(factorial):
    r = geometric(2.0, scale=5.0)
    record = regularization_certificate(factorial, r, r, 50)
    assert record.status is Status.FAIL
    assert record.constants["doubling"]
    assert not record.constants["capped"]
    # M_1 r_1 / M_0 = 10 > 2 C0 at p = 0
    assert not record.constants["m2prime"]
    assert record.constants["H"] == 2 * record.constants["M_H"]


def test_random_tables_certify(factorial):
    rng = np.random.default_rng(3)
    for _ in range(10):
        values = np.cumsum(rng.exponential(1.0, 201)) + 0.5
        r = table(values, diverges=True)
        record = regularization_certificate(factorial, r, regularize(r, 200),
                                            200)
        assert record.passed


@pytest.mark.parametrize("n", [1, 2, 3])
def test_nachbin_domination(factorial, n):
    r_prime = regularize(linear(1, 1), 200)
    record = nachbin_domination_check(factorial, r_prime, n, t_grid)
    assert record.status is Status.PASS
    assert record.constants["max_tail_increment"] <= 1e-9
    assert record.constants["bound"] >= \
        np.exp(record.constants["log_ratio_last"])


def test_nachbin_domination_fails_for_a_slow_sequence(factorial):
    record = nachbin_domination_check(factorial, power(0.001), 2, t_grid)
    assert record.status is Status.FAIL
    assert record.constants["max_tail_increment"] > 1e-9
    assert any("last tenth" in reason for reason in record.provenance)


def test_shifted_associated_function_is_smaller(factorial):
    product = product_sequence(factorial, linear(1, 1))
    t = np.array([1.0, 10.0, 100.0])
    assert np.all(associated_function(product, t) <=
                  associated_function(factorial, t))


def test_scaled():
    r = linear(1, 1).scaled(np.pi)
    assert np.isclose(r.values(3)[3], 4 * np.pi)


def test_shared_extension_under_threads():
    r = linear(1.0, 1.0)
    requests = [int(J) for J in np.random.RandomState(0).randint(1, 5000,
                                                                  200)]
    with ThreadPoolExecutor(8) as pool:
        slices = list(pool.map(r.log_values, requests))
    for J, values in zip(requests, slices):
        assert len(values) == J + 1
        assert np.allclose(values, np.log(np.arange(J + 1) + 1.0))
    assert len(r) > max(requests)
