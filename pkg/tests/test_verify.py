import json

import numpy as np
import pytest

from matchedpair.algebra import MatchedPairTensors
from matchedpair.instances import UnknownInstance, su2k
from matchedpair.report import SuiteReport
from matchedpair.verify import (SUITES, ConventionUnresolved, SuiteNotApplicable, UnknownSuite,
                                applicable_suites, run_suite, sign_resolution)


def test_registry_and_applicability():
    assert set(applicable_suites("su2k")) == set(SUITES)
    heis = applicable_suites("heisenberg")
    assert "field_equivalence" not in heis and "convergence" not in heis
    assert "spline_baseline" in heis and "field_equivalence" in applicable_suites("abelian:2")


def test_errors():
    with pytest.raises(UnknownSuite):
        run_suite("nosuch", "su2k")
    with pytest.raises(UnknownInstance):
        run_suite("degeneration", "nosuch")
    with pytest.raises(SuiteNotApplicable):
        run_suite("printed_system", "heisenberg")
    with pytest.raises(ValueError):
        run_suite("degeneration", "su2k", samples=0)
    with pytest.raises(ValueError):
        run_suite("degeneration", "su2k", tol=-1.0)


def test_reports_are_deterministic():
    a = run_suite("algebra_axioms", "su2k", samples=20, seed=3).to_json()
    b = run_suite("algebra_axioms", "su2k", samples=20, seed=3).to_json()
    assert a == b
    d = json.loads(a)
    assert d["pass"] and d["samples"] == 20 and d["seed"] == 3


@pytest.mark.parametrize("name", ["algebra_axioms", "degeneration", "field_equivalence",
                                  "spline_baseline", "cocycles", "g_t2g", "realization"])
@pytest.mark.parametrize("instance", ["su2k", "heisenberg", "abelian:3"])
def test_quick_suites_pass(name, instance):
    if name not in applicable_suites(instance):
        pytest.skip("not applicable")
    rep = run_suite(name, instance, samples=10, seed=1)
    assert rep.passed, rep.summary()


def test_printed_system_is_red_and_explained():
    rep = run_suite("printed_system", "su2k", samples=10, seed=1)
    assert not rep.passed
    assert rep.details["printed"] > 0.1
    assert rep.details["corrected"] < 1e-12
    assert rep.findings and rep.failed_checks() == ["printed"]


def test_spline_baseline_heisenberg_records_metric_finding():
    rep = run_suite("spline_baseline", "heisenberg", samples=5, seed=0)
    assert rep.passed
    assert rep.details["bracket_vs_coadjoint_form"] > 0.1
    rep = run_suite("spline_baseline", "abelian:2", samples=5, seed=0)
    assert rep.passed and rep.details["abelian_cubic"] < 1e-12


def test_tol_override_scales_checks():
    rep = run_suite("degeneration", "su2k", samples=5, seed=0, tol=1e-30)
    assert not rep.passed


def test_sign_resolution():
    res = sign_resolution("su2k", samples=20)
    assert res["sign_b_star"] == -1 and res["status"] == "resolved"
    assert res["reports"]["-1"]["pass"] and not res["reports"]["1"]["pass"]
    ab = sign_resolution("abelian:3", samples=5)
    assert ab["sign_b_star"] is None and ab["status"].startswith("indeterminate")


def test_sign_resolution_raises_when_neither_sign_fits():
    inst = su2k()
    p = inst.printed_tensors
    bent = MatchedPairTensors(p.g, p.h, p.act_left, p.act_right * 1.5, p.sign_b_star)
    with pytest.raises(ConventionUnresolved):
        sign_resolution(inst, samples=5, tensors=bent)


def test_report_observe_and_serialization():
    rep = SuiteReport("x", "y", 3, 0, 1e-6)
    rep.observe(1e-8, {"a": np.arange(2)}, "c1")
    rep.observe(0.5, {"a": np.array([1 + 2j])}, "c2", tol=1.0)
    assert rep.passed and rep.max_residual == pytest.approx(5e-7)
    rep.observe(float("nan"), None, "c3")
    assert not rep.passed and rep.failed_checks() == ["c3"]
    d = json.loads(rep.to_json())
    assert d["check_tolerances"]["c2"] == 1.0 and d["details"]["c1"] == 1e-8
    assert "FAIL" in rep.summary()
