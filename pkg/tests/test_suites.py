#!/usr/bin/env python
# -*- coding: utf-8 -*-
import os
from concurrent.futures import ThreadPoolExecutor

import pytest

from ultranorm.config import ExperimentConfig, load_config
from ultranorm.functions import sup_sequence
from ultranorm.reports import CheckRecord, Status
from ultranorm.stft import Translation
from ultranorm.suites import (CheckRegistry, _diagram_chain,
                              _normalized_window, _vbar_check,
                              lemma_algebraic_equality, prop_stft_gg,
                              prop_stft_projective, run_suites,
                              theorem_diagram)

__author__ = "ultranorm developers"
__license__ = "mit"


configs = os.path.join(os.path.dirname(__file__), "..", "configs")


def passing(name):
    return lambda: CheckRecord(name, "", Status.PASS)


def failing(name):
    return lambda: CheckRecord(name, "", Status.FAIL)


def raising():
    raise ArithmeticError("overflow in the ratio")


def test_registry_order_and_blocking():
    registry = CheckRegistry("demo")
    registry.add("c", passing("c"), "third", requires=["b"])
    registry.add("b", failing("b"), "second", requires=["a"])
    registry.add("a", passing("a"), "first")
    registry.add("d", passing("d"), "independent")
    records = registry.run()
    assert [r.name for r in records] == ["a", "b", "c", "d"]
    assert [r.status for r in records] == [Status.PASS, Status.FAIL,
                                           Status.INCONCLUSIVE, Status.PASS]
    assert records[2].provenance == ["depends on b (fail)"]
    assert len(registry) == 4


def test_registry_turns_errors_into_failures():
    registry = CheckRegistry("demo")
    registry.add("overflow", raising, "ratio")
    record, = registry.run()
    assert record.status is Status.FAIL
    assert "ArithmeticError" in record.provenance[0]


def test_registry_rejects_bad_graphs():
    registry = CheckRegistry("demo")
    registry.add("a", passing("a"), "first")
    with pytest.raises(ValueError):
        registry.add("a", passing("a"), "again")
    registry.add("b", passing("b"), "second", requires=["missing"])
    with pytest.raises(ValueError):
        registry.run()


def test_registry_threads_keep_order():
    registry = CheckRegistry("demo")
    for k in range(20):
        registry.add(f"check{k:02d}", passing(f"check{k:02d}"), "independent")
    with ThreadPoolExecutor(4) as pool:
        threaded = registry.run(pool)
    assert [r.name for r in threaded] == [r.name for r in registry.run()]


def test_lemma_algebraic_equality(small_config):
    report = lemma_algebraic_equality(small_config)
    assert [r.name for r in report.records] == [
        "admissibility", "vbar", "agreement[0]", "agreement[1]",
        "agreement[2]"]
    assert report.status is Status.PASS
    A = small_config.sequence("A")
    V = small_config.weight_system("V")
    n = int(small_config.admissibility["n"])
    state = {}
    _vbar_check(small_config, V, A, state)()
    phi = small_config.function_family()[0]
    spatial = small_config.spatial_grid()
    alpha_max = small_config.decay["alpha_max"]
    constants = report["agreement[0]"].constants
    assert constants["inductive_weight"] == repr(V[n])
    assert constants["projective_weight"] == repr(state["vbar"])
    assert constants["inductive"] and constants["projective"]
    inductive = sup_sequence(phi, V[n], spatial, alpha_max)
    projective = sup_sequence(phi, state["vbar"], spatial, alpha_max)
    for alpha in [(0,), (5,), (alpha_max,)]:
        key = str(alpha[0])
        assert constants["log_sup_inductive"][key] == inductive[alpha]
        assert constants["log_sup_projective"][key] == projective[alpha]


def test_prop_stft_gg(small_config):
    report = prop_stft_gg(small_config)
    names = [r.name for r in report.records]
    assert {"window_class", "admissibility", "admissibility_adjoint",
            "decay[2]", "adjoint[2]", "reconstruction[2]"} <= set(names)
    assert report.status is Status.PASS
    assert report.exit_code == 0
    assert report["admissibility_adjoint"].constants["pairs"] == [[2, 4]]
    decay = report["decay[0]"].constants
    assert decay["C"] <= decay["bound"]


def test_failed_hypothesis_blocks_dependents(small_config):
    data = small_config.to_dict()
    data["admissibility"]["tau"] = 0.1
    report = prop_stft_gg(ExperimentConfig.from_dict(data))
    assert report["admissibility"].status is Status.FAIL
    assert report["decay[0]"].status is Status.INCONCLUSIVE
    assert "depends on admissibility (fail)" in report["decay[0]"].provenance
    assert report["reconstruction[1]"].status is Status.INCONCLUSIVE
    assert "depends on admissibility_adjoint (fail)" in \
        report["adjoint[0]"].provenance
    assert report.exit_code == 1


def test_prop_stft_projective(small_config):
    report = prop_stft_projective(small_config)
    names = [r.name for r in report.records]
    assert sum(name.startswith("regularization[random") for name in names) \
        == 10
    assert "nachbin_domination[1j+1,n=3]" in names
    assert report["vbar_inequality"].status is Status.PASS
    assert report.status is Status.PASS


def test_theorem_diagram(small_config):
    report = theorem_diagram(small_config)
    assert report["normalization"].status is Status.PASS
    assert report["vbar"].status is Status.PASS
    diagram = report["diagram[0]"]
    assert diagram.status is Status.PASS
    assert diagram.constants["commutation_error"] <= 1e-6
    assert 0 < diagram.constants["C1"] <= diagram.constants["C1_bound"]
    for name, C2 in diagram.constants["C2"].items():
        assert C2 <= diagram.constants["C2_bound"][name]


def test_diagram_fails_under_a_wrong_constant(small_config):
    M, A = small_config.sequence("M"), small_config.sequence("A")
    V = small_config.weight_system("V")
    psi = small_config.window("psi")
    gamma = _normalized_window(psi, small_config.window("gamma"), 1e-8)
    state = {}
    assert _vbar_check(small_config, V, A, state)().status is Status.PASS
    phi = small_config.function_family()[0]
    tau = small_config.admissibility["tau"]

    def chain(C):
        return _diagram_chain(
            phi, psi, gamma, M, 1.0, V, 1, state["v"], state["vbar"],
            small_config.r_sequence_list(), small_config.phase_grid(),
            small_config.spatial_grid(),
            small_config.reconstruction_grid().nodes(), small_config.decay,
            small_config.tolerances, Translation(A, tau, C))
    assert chain(1.0).status is Status.PASS
    record = chain(1e-12)
    assert record.status is Status.FAIL
    assert record.provenance[0].startswith("C1 = ")
    assert record.constants["C1"] > record.constants["C1_bound"]


def test_theorem_diagram_with_constant_weight(small_config):
    data = load_config(os.path.join(configs, "constant_weight.json")).to_dict()
    small = small_config.to_dict()
    data["functions"] = small["functions"]
    data["r_sequences"] = small["r_sequences"]
    data["grids"] = small["grids"]
    report = theorem_diagram(ExperimentConfig.from_dict(data))
    assert report["admissibility"].status is Status.PASS
    assert report["mollification"].status is Status.PASS
    assert report.status is Status.PASS


def test_run_suites_prefixes_and_is_reproducible(small_config):
    data = small_config.to_dict()
    data["suites"] = ["lemma_algebraic_equality", "prop_stft_projective"]
    config = ExperimentConfig.from_dict(data)
    serial = run_suites(config)
    with ThreadPoolExecutor(4) as pool:
        threaded = run_suites(config, pool)
    assert serial.records[0].name.startswith("lemma_algebraic_equality/")
    assert serial.to_json(with_timestamp=False) == \
        threaded.to_json(with_timestamp=False)
