#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np
import pytest

from ultranorm.reports import Status
from ultranorm.utilities import SpatialGrid
from ultranorm.weights import (Bump, ChainError, NachbinWeight,
                               NormalizationError, WeightSystem,
                               admissibility_chain, admissibility_check,
                               assoc_exp_system, build_v_witness, build_vbar,
                               check_decreasing, condition_s_check,
                               condition_v_witness_check, constant_system,
                               equivalence_band, exp_rate, gaussian_system,
                               mollify_weight, nachbin_membership,
                               poly_decay_system, polynomial,
                               read_weight_table, scaled,
                               sequence_space_system, standard_bump, tensor,
                               tensor_domination_check, unit,
                               vbar_inequality_check)

__author__ = "ultranorm developers"
__license__ = "mit"


coarse = SpatialGrid(10.0, 201)
wide = SpatialGrid(20.0, 401)


def test_systems_are_decreasing(factorial, spatial):
    for V in [assoc_exp_system(factorial), poly_decay_system(1),
              gaussian_system(1.0), constant_system(exp_rate(1.0))]:
        assert check_decreasing(V, 6, spatial) == (True, None)


def test_increasing_system_is_caught():
    V = WeightSystem(lambda n: polynomial(n), kind="increasing")
    ok, witness = check_decreasing(V, 3, coarse)
    assert not ok
    assert witness["n"] == 1


def test_indexing_starts_at_one(factorial):
    with pytest.raises(IndexError):
        assoc_exp_system(factorial)[0]


def test_condition_s():
    far = SpatialGrid(1000.0, 11)
    ok, info = condition_s_check(poly_decay_system(1), 1, 2, far)
    assert ok and info["boundary_ratio"] <= 1e-2
    ok, _ = condition_s_check(poly_decay_system(1), 1, 2, SpatialGrid(20.0))
    assert not ok
    ok, info = condition_s_check(constant_system(unit()), 1, 2, far)
    assert not ok and np.isclose(info["boundary_ratio"], 1.0)
    with pytest.raises(ValueError):
        condition_s_check(poly_decay_system(1), 2, 2, far)


def test_condition_s_in_the_plane(factorial):
    far = SpatialGrid(1000.0, 3, 2)
    ok, _ = condition_s_check(poly_decay_system(1, dim=2), 1, 2, far,
                              diagonal=True)
    assert ok


def test_nachbin_membership(factorial):
    V = assoc_exp_system(factorial)
    v5 = NachbinWeight.from_system(V, [(1.0, 5)], name="v5")
    record = nachbin_membership(v5, V, 5, wide)
    assert record.status is Status.PASS
    assert np.isclose(max(record.constants["sup_ratios"]), 1.0)
    record = nachbin_membership(v5, V, 8, wide)
    assert record.status is Status.INCONCLUSIVE
    assert record.provenance


def test_polynomial_belongs_to_vbar(factorial):
    V = assoc_exp_system(factorial)
    record = nachbin_membership(NachbinWeight.direct(polynomial(2)), V, 3,
                                wide)
    assert record.status is Status.PASS


def test_condition_v_witness():
    V = poly_decay_system(1)
    grid = SpatialGrid(50.0, 201)
    v, lambdas, N_of_n = build_v_witness(V, 4, grid)
    assert N_of_n[1] == 1
    assert all(1 <= N <= 4 for N in N_of_n.values())
    assert condition_v_witness_check(V, lambdas, v, N_of_n, grid) == \
        (True, None)


def test_admissibility(factorial):
    V = assoc_exp_system(factorial)
    record = admissibility_check(V, factorial, 1.0, [(1, 2)], 1.0, coarse,
                                 coarse)
    assert record.status is Status.PASS
    assert record.constants["C_measured"][0] <= 1.0 + 1e-9


def test_admissibility_failure_names_hypothesis(factorial):
    V = assoc_exp_system(factorial)
    record = admissibility_check(V, factorial, 0.1, [(1, 2)], 1.0, coarse,
                                 coarse)
    assert record.status is Status.FAIL
    assert "hypothesis" in record.provenance[0]
    with pytest.raises(ValueError):
        admissibility_check(V, factorial, 1.0, [(2, 1)], 1.0, coarse, coarse)
    with pytest.raises(ValueError):
        admissibility_check(V, factorial, 0.0, [(1, 2)], 1.0, coarse, coarse)


def test_vbar_from_chain(factorial):
    V = assoc_exp_system(factorial)
    v = NachbinWeight.direct(polynomial(2), name="poly2")
    chain = admissibility_chain(V, factorial, 1.0, v, 1, 4, coarse, coarse)
    assert [link.n for link in chain] == [1, 2, 4, 8]
    assert all(np.isfinite(link.C) and np.isfinite(link.C_prime)
               for link in chain)
    vbar = build_vbar(V, chain)
    assert len(vbar) == 3
    record = vbar_inequality_check(v, vbar, factorial, 1.0, coarse, coarse)
    assert record.status is Status.PASS


def test_short_chain(factorial):
    V = assoc_exp_system(factorial)
    v = NachbinWeight.direct(polynomial(2))
    chain = admissibility_chain(V, factorial, 1.0, v, 1, 1, coarse, coarse)
    with pytest.raises(ChainError):
        build_vbar(V, chain)
    with pytest.raises(ChainError):
        NachbinWeight([])


def test_tensor_domination():
    grid = SpatialGrid(5.0, 51)
    v, w = polynomial(1), polynomial(1)
    record = tensor_domination_check(tensor(v, w), v, w, grid, grid)
    assert record.status is Status.PASS
    record = tensor_domination_check(scaled(tensor(v, w), 2.0), v, w, grid,
                                     grid)
    assert record.status is Status.FAIL
    assert np.isclose(record.constants["max_log_excess"], np.log(2))


def test_sequence_space_system():
    V = sequence_space_system(dim=2)
    assert np.isclose(V[2].log(np.array([[1, 2]]))[0], -3 * np.log(2))


def test_nachbin_weight_is_infimum():
    v = NachbinWeight([(0.0, polynomial(1)), (np.log(2), unit())])
    x = np.array([0.0, 0.5, 3.0])
    assert np.allclose(v(x), np.minimum(1 + np.abs(x), 2.0))
    assert len(v.add_term(0.5, unit())) == 3
    assert len(v.truncated(1)) == 1


def test_standard_bump():
    bump = standard_bump(0.5)
    assert abs(bump.integral - 1) <= 1e-12
    assert np.all(bump.values >= 0)


def test_mollify_weight():
    axis = np.linspace(-5, 5, 1001)
    mollified = mollify_weight(axis, np.exp(np.abs(axis)), standard_bump(0.5))
    low, high = mollified.params["support"]
    inner = axis[(axis >= low) & (axis <= high)]
    low, high = equivalence_band(mollified, exp_rate(1.0), inner)
    assert np.exp(-0.5) <= low <= high <= np.exp(0.5)


def test_mollify_weight_trims_the_ends():
    axis = np.linspace(-5, 5, 1001)
    mollified = mollify_weight(axis, np.exp(axis), standard_bump(0.5))
    low, high = mollified.params["support"]
    assert low == pytest.approx(-4.5, abs=1e-9)
    assert high == pytest.approx(4.5, abs=1e-9)
    inner = axis[(axis >= low) & (axis <= high)]
    ratio = mollified.log(inner) - inner
    assert np.exp(ratio.max() - ratio.min()) <= 1 + 1e-6


def test_mollify_weight_needs_room_for_the_bump():
    with pytest.raises(ValueError):
        mollify_weight(np.linspace(0, 0.5, 11), np.ones(11),
                       standard_bump(0.5))


def test_mollify_rejects_unnormalized_bump():
    bump = standard_bump(0.5)
    with pytest.raises(NormalizationError):
        mollify_weight([0.0, 1.0], [1.0, 1.0], Bump(bump.offsets,
                                                     2 * bump.values))


def test_read_weight_table(tmpdir):
    good = tmpdir.join("weight.csv")
    good.write("x,value\n-1,2.0\n0,1.0\n1,2.0\n")
    x, values = read_weight_table(str(good))
    assert list(x) == [-1.0, 0.0, 1.0]
    assert list(values) == [2.0, 1.0, 2.0]
    bad = tmpdir.join("bad.csv")
    bad.write("x,value\n0,-1.0\n")
    with pytest.raises(ValueError):
        read_weight_table(str(bad))
