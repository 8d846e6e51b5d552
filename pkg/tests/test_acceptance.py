"""Acceptance criteria 1-7, one test each.

Each test prints a single PASS/FAIL line (visible with or without ``-s``)
before asserting, so a run of this file doubles as the acceptance report.
"""

import math
import time

import numpy as np
import pytest

from dnhirota.cli import main
from dnhirota.heisenberg import clear_caches, dual_bases, g_extract, g_sum_target, hierarchy_coefficients
from dnhirota.verify import (
    cartan_residual,
    duality_residual,
    evaluator_equivalence,
    exp_orbit_residual,
    fresh_beta_discrepancy,
    fresh_g_discrepancy,
    grading_commutator_residual,
    heisenberg_pairing_residual,
    infinitesimal_orbit_residual,
    root_pairing_residual,
    vacuum_residual,
    weyl_residual,
)

from . import oracles

RANKS = range(3, 9)
SEED = 20240607


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  criterion {number}: {title}  ({detail})")
        return ok

    return emit


def test_criterion_1_beta_cross_check(report):
    clear_caches()
    start = time.perf_counter()
    worst = max(fresh_beta_discrepancy(n) for n in RANKS)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed <= 5
    assert report(1, "beta extracted vs closed, n=3..8", ok, f"max diff {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_g_cross_check(report):
    worst = max(fresh_g_discrepancy(n) for n in RANKS)
    # literal values from an independent exact evaluation of the closed form
    lit = {n: [complex(oracles.exact_g(n, r).evalf(30)) for r in range(1, n + 1)] for n in (4, 5)}
    r2 = math.sqrt(2)
    expect = {4: [0.5, 4.5, 4.5, 4.5], 5: [6 - 4 * r2, 2, 6 + 4 * r2, 8, 8]}
    lit_err = max(abs(a - b) for n in (4, 5) for a, b in zip(lit[n], expect[n]))
    got_err = max(
        abs(g_extract(r, dual_bases(n)) - expect[n][r - 1]) for n in (4, 5) for r in range(1, n + 1)
    )
    ok = worst <= 1e-9 and lit_err <= 1e-12 and got_err <= 1e-9
    assert report(2, "g extracted vs closed; n=4,5 literals", ok,
                  f"max diff {worst:.2e}, literal diff {got_err:.2e}")


def test_criterion_3_g_sum_identity(report):
    worst = 0.0
    for n in RANKS:
        g = hierarchy_coefficients(n).g
        worst = max(worst, abs(sum(g.values()) - g_sum_target(n)))
    named = g_sum_target(4) == 14 and g_sum_target(5) == 30
    ok = worst <= 1e-9 and named
    assert report(3, "sum g_r = nh(h+1)/12, n=3..8", ok, f"max residual {worst:.2e}")


def test_criterion_4_structure_suites(report):
    clear_caches()
    start = time.perf_counter()
    suites = {
        "weyl": weyl_residual,
        "cartan": cartan_residual,
        "T pairing": heisenberg_pairing_residual,
        "A pairings": root_pairing_residual,
        "duality": duality_residual,
        "commutator grading": lambda n: grading_commutator_residual(n, hierarchy_coefficients(n)),
    }
    worst = {name: max(fn(n) for n in RANKS) for name, fn in suites.items()}
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-9 and elapsed <= 30
    name = max(worst, key=worst.get)
    assert report(4, "structure suites, n=3..8", ok,
                  f"worst {name} {worst[name]:.2e}, {elapsed:.2f}s")


def test_criterion_5_evaluator_equivalence(report):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = max(evaluator_equivalence(n, 8, rng, pairs=20) for n in (4, 5))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed <= 60
    assert report(5, "kw_lhs vs gm_residual, 20 pairs, N=8, n=4,5", ok,
                  f"max rel diff {worst:.2e}, seed {SEED}, {elapsed:.2f}s")


def test_criterion_6_tau_checks(report):
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    parts = {}
    for n in (4, 5):
        coeffs = hierarchy_coefficients(n)
        vac = vacuum_residual(n, 8, coeffs)
        parts[f"vacuum n={n}"] = vac
        parts[f"exp n={n}"] = exp_orbit_residual(n, 8, coeffs, rng, samples=5)
        parts[f"orbit n={n}"], _ = infinitesimal_orbit_residual(n, 8, coeffs)
        assert vac == 0.0 or vac <= 1e-12
    elapsed = time.perf_counter() - start
    ok = max(parts.values()) <= 1e-8 and elapsed <= 120
    name = max(parts, key=parts.get)
    assert report(6, "vacuum, exp orbit, infinitesimal orbit (order 2), N=8", ok,
                  f"worst {name} {parts[name]:.2e}, {elapsed:.2f}s")


def test_criterion_7_negative_control(report, capsys):
    import json

    code = main(["verify", "--n", "4", "--degree", "8", "--format", "json",
                 "--inject-beta-error", "0.01"])
    out = json.loads(capsys.readouterr().out)
    failed = {c["name"] for c in out["checks"] if not c["passed"]}
    coeff_code = main(["coeffs", "--n", "4", "--inject-beta-error", "0.01"])
    capsys.readouterr()
    ok = (
        code == 1
        and coeff_code == 1
        and "beta_extract_vs_closed" in failed
        and "evaluator_equivalence" in failed
    )
    assert report(7, "fault injection 1e-2 in one beta", ok,
                  f"exit {code}, failed: {', '.join(sorted(failed))}")
