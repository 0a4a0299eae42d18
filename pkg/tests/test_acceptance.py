"""Acceptance criteria AC1 to AC10, one verdict line each.

Every suite runs at its default sample count with seed 42. Verdict lines are
printed as the tests run (visible with ``-s``) and again in the terminal
summary.
"""
import time

import pytest

from conftest import ACCEPTANCE
from matchedpair.verify import run_suite, sign_resolution

SEED = 42


def record(key: str, ok: bool, text: str) -> None:
    line = f"{key} {'PASS' if ok else 'FAIL'}: {text}"
    ACCEPTANCE[key] = line
    print(line)


def checks(rep, names=None) -> str:
    names = names or list(rep.check_tolerances)
    return ", ".join(f"{n}={rep.details[n]:.2e}<={rep.check_tolerances[n]:g}" for n in names)


def test_ac1_group_axioms():
    t0 = time.perf_counter()
    rep = run_suite("group_axioms", "su2k", seed=SEED)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.samples == 1000 and elapsed < 5.0
    record("AC1", ok, f"{rep.samples} samples, max {rep.max_residual:.2e} <= 1e-10, "
                      f"{elapsed:.2f} s < 5 s")
    assert ok


def test_ac2_cocycles():
    rep = run_suite("cocycles", "su2k", seed=SEED)
    ok = rep.passed and rep.samples == 1000
    record("AC2", ok, checks(rep, ["phi", "phi_ttg", "chi"]))
    assert ok


def test_ac3_realization():
    rep = run_suite("realization", "su2k", seed=SEED)
    ok = rep.passed and rep.samples == 1000
    record("AC3", ok, checks(rep, ["multiplicative_12_21", "multiplicative_21_12",
                                   "round_trip_12", "round_trip_21"]))
    assert ok


def test_ac4_g_t2g():
    rep = run_suite("g_t2g", "su2k", seed=SEED)
    ok = rep.passed and rep.samples == 1000
    record("AC4", ok, checks(rep, ["assemble_split", "split_assemble", "factorization"]))
    assert ok


def test_ac5_t2_actions():
    rep = run_suite("t2_actions", "su2k", seed=SEED)
    ok = rep.passed and rep.samples == 200
    findings = "; findings: " + " | ".join(rep.findings) if rep.findings else ""
    record("AC5", ok, checks(rep) + findings)
    assert ok


def test_ac6_residual_identity():
    rep = run_suite("residual_identity", "su2k", seed=SEED)
    ok = rep.passed and rep.samples == 50
    record("AC6", ok, checks(rep))
    assert ok


@pytest.fixture(scope="module")
def ac7():
    field = run_suite("field_equivalence", "su2k", seed=SEED)
    printed = run_suite("printed_system", "su2k", seed=SEED)
    sign = sign_resolution("su2k", seed=SEED)
    display_ok = field.passed and sign["status"] == "resolved"
    record("AC7", display_ok and printed.passed,
           f"display {field.details['second_order']:.2e} <= 1e-12 under sign_b_star="
           f"{sign['sign_b_star']} only; printed third-order system "
           f"{printed.details['printed']:.2e} > 1e-12 (with two slips repaired "
           f"{printed.details['corrected']:.2e})")
    return field, printed, sign


def test_ac7_display_and_sign(ac7):
    field, _, sign = ac7
    assert field.passed
    assert sign["sign_b_star"] == -1
    assert sign["reports"]["-1"]["pass"] and not sign["reports"]["1"]["pass"]


@pytest.mark.xfail(strict=True, reason="the closed third-order system carries two term slips; "
                                       "see the decisions ledger")
def test_ac7_printed_third_order_system(ac7):
    _, printed, _ = ac7
    assert printed.passed


def test_ac7_printed_failure_is_the_known_slip(ac7):
    _, printed, _ = ac7
    assert printed.details["corrected"] <= 1e-12


def test_ac8_degenerations():
    rep = run_suite("degeneration", "su2k", seed=SEED)
    names = [f"{k}_display" for k in ("sd1", "sd2", "decoupled")]
    ok = rep.passed and rep.samples == 100
    record("AC8", ok, checks(rep, names))
    assert ok


def test_ac9_spline_baselines():
    ab = run_suite("spline_baseline", "abelian:3", seed=SEED)
    su = run_suite("spline_baseline", "su2k", seed=SEED)
    ok = ab.passed and su.passed
    record("AC9", ok, f"{checks(ab)}; {checks(su)}")
    assert ok


def test_ac10_convergence_and_momentum():
    rep = run_suite("convergence", "su2k", seed=SEED)
    ratios = rep.details["energy_ratios"]
    ends = rep.details["endpoint_energy_ratios"]
    ok = all(14 <= r <= 18 for r in ratios) and rep.details["spatial_momentum"] <= 1e-6
    record("AC10", ok,
           f"energy ratios (max error over [0,10]) {', '.join(f'{r:.2f}' for r in ratios)} in "
           f"[14,18]; at t=10 only {', '.join(f'{r:.2f}' for r in ends)}; "
           f"momentum Ad*_g drift {rep.details['spatial_momentum']:.2e} <= 1e-6")
    assert ok and rep.passed
