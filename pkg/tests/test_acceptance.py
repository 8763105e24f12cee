"""Acceptance criteria, each at its stated tolerance and time limit.

Every test prints a single ``PASS``/``FAIL`` line (shown even without ``-s``)
before asserting, so the run log doubles as the acceptance report.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from ctmaps.experiment import (DEFAULT_SEED, VERDICT_TEXT, certify_gamma, default_r,
                               run_ct_experiment, sample_H_freeness, verify_u, verify_w1)
from ctmaps.growth import GrowthModel, distortion_table, materialize_w
from ctmaps.hnn import cross_oracle
from ctmaps.rips import ALPHABET_G, RipsParams, c_family, d_family, presentation
from ctmaps.smallcancel import ONE_SIXTH, Abelian, check_cprime, find_min_r
from ctmaps.stallings import cprime_half_sufficient, nielsen_check
from ctmaps.words import format_word

TESTS = Path(__file__).resolve().parent


@pytest.fixture
def report(capsys):
    """Return a callable printing one PASS/FAIL line past pytest's capture."""
    def emit(k: int, ok: bool, elapsed: float, limit: float, detail: str) -> bool:
        ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {k}: {detail} "
                  f"[{elapsed:.1f} s, limit {limit:.0f} s]")
        return ok
    return emit


@pytest.fixture(scope="module")
def params() -> RipsParams:
    return RipsParams(default_r(2), 2)


def test_criterion_1_cprime_certification(report):
    t0 = time.perf_counter()
    r = find_min_r(ONE_SIXTH, 2, 60, "G", 2)
    lines, ok = [], r is not None
    if ok:
        for group in ("G", "Gbcd", "Gcd", "Gc1d"):
            holds, rep = check_cprime(presentation(group, RipsParams(r, 2)), ONE_SIXTH)
            ok &= holds and rep.max_ratio < Fraction(1, 6)
            w = rep.witness
            lines.append(f"{group} ratio {rep.max_ratio}"
                         + (f" piece {format_word(w[2])}" if w else ""))
    elapsed = time.perf_counter() - t0
    assert report(1, ok, elapsed, 60, f"r* = {r}; " + "; ".join(lines))


def test_criterion_2_nielsen(report, params):
    t0 = time.perf_counter()
    C = nielsen_check(c_family(params.r))
    D = nielsen_check(d_family(params.r, params.l))
    half_C = cprime_half_sufficient(c_family(params.r))
    half_D = cprime_half_sufficient(d_family(params.r, params.l))
    elapsed = time.perf_counter() - t0
    ok = C.passed and D.passed and half_C and half_D
    assert report(2, ok, elapsed, 10,
                  f"C family N0-N2 {C.passed}, D family N0-N2 {D.passed} "
                  f"({D.triples_checked} triples), C'(1/2) {half_C}/{half_D}")


def test_criterion_3_cross_oracle(report, params):
    t0 = time.perf_counter()
    rep = cross_oracle(10_000, 40, DEFAULT_SEED, params)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.agree == 10_000
    assert report(3, ok, elapsed, 300,
                  f"{rep.agree}/10000 agree, {rep.trivial} trivial, "
                  f"{len(rep.disagreements)} disagreements")


def test_criterion_4_geodesic_certification(report, params):
    t0 = time.perf_counter()
    expected = ALPHABET_G.parse("a^-1 d1 a")
    bad = []
    for n in range(1, 11):
        cert = certify_gamma(n, params)
        if not (cert.geodesic and cert.longest_match == expected):
            match = "none" if cert.longest_match is None else format_word(cert.longest_match)
            bad.append(f"n={n}: geodesic {cert.geodesic}, longest match {match} "
                       f"(length {cert.longest_match_length})")
    elapsed = time.perf_counter() - t0
    detail = ("all n in 1..10 strongly Dehn-reduced with longest match a^-1 d1 a"
              if not bad else "; ".join(bad))
    assert report(4, not bad, elapsed, 30, detail)


def test_criterion_5_w1_identity(report, params):
    t0 = time.perf_counter()
    rep = verify_w1(params)
    elapsed = time.perf_counter() - t0
    r = params.r
    ok = rep.trivial and rep.w1_length == r + r * (3 * r + 1) // 2
    assert report(5, ok, elapsed, 10,
                  f"gamma_1 D1^-1 -> empty in {rep.trace_steps} steps, |w1| = {rep.w1_length}")


def test_criterion_6_u_rewriting(report, params):
    t0 = time.perf_counter()
    results = [verify_u(n, params, mode="rewrite-proof") for n in range(1, 5)]
    results.append(verify_u(2, params, mode="dehn"))
    elapsed = time.perf_counter() - t0
    ok = all(res.passed and res.abelian is Abelian.INCONCLUSIVE for res in results)
    detail = ", ".join(f"u{res.n}/{res.mode} {'ok' if res.passed else 'FAILED'} "
                       f"({res.abelian.value})" for res in results)
    assert report(6, ok, elapsed, 600, detail)


def test_criterion_7_mitra_table(report, params):
    t0 = time.perf_counter()
    rep = run_ct_experiment(params, 10)
    elapsed = time.perf_counter() - t0
    h = [row.h_distance for row in rep.rows]
    g = [row.g_distance for row in rep.rows]
    text = rep.to_dict()["verdict_text"]
    ok = h == list(range(1, 11)) and g == [0] * 10 and rep.verdict and text == VERDICT_TEXT
    assert report(7, ok, elapsed, 60, f"H-distances {h}, G-distances {g}, verdict: {text}")


def test_criterion_8_H_freeness(report, params):
    t0 = time.perf_counter()
    rep = sample_H_freeness(params, 10_000, 30, DEFAULT_SEED)
    elapsed = time.perf_counter() - t0
    assert report(8, rep.passed, elapsed, 600,
                  f"{rep.trials} reduced words, {len(rep.failures)} trivial")


def test_criterion_9_distortion(report, params):
    t0 = time.perf_counter()
    r1 = RipsParams(1)
    model = GrowthModel(r1)
    exact_ok = all(model.length_w(n)[0] == len(materialize_w(model.slp.materialize(model.u(n)), r1))
                   for n in (1, 2))
    rows = distortion_table(9, params)
    logs = [row.w_len_log10 for row in rows]
    ratios = [logs[n] / logs[n - 1] for n in range(1, 9)]
    tol_ok = all(abs(math.log10(row.w_len_exact) - row.w_len_log10) <= 1e-6 * row.w_len_log10
                 for row in rows if row.w_len_exact is not None)
    elapsed = time.perf_counter() - t0
    ok = exact_ok and tol_ok and all(x > 1.5 for x in ratios)
    assert report(9, ok, elapsed, 60,
                  f"r=1 exact match {exact_ok}; log ratios n=1..8 "
                  + ", ".join(f"{x:.3g}" for x in ratios))


PROPERTY_SUITES = [
    "test_words.py::test_free_reduce_matches_flat_stack",
    "test_words.py::test_run_length_and_flat_agree",
    "test_words.py::test_cyclic_reduce_of_random_conjugates",
    "test_stallings.py::test_membership_against_enumeration",
    "test_stallings.py::test_express_round_trip_on_random_members",
    "test_stallings.py::test_folding_is_confluent",
    "test_hnn.py::test_pinch_insertion_invariance",
    "test_hnn.py::test_stable_count_independent_of_order",
    "test_experiment.py::test_gromov_product_is_tree_distance",
    "test_experiment.py::test_gromov_product_symmetry",
]


def test_criterion_10_property_suites(report):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           *(str(TESTS / s) for s in PROPERTY_SUITES)],
                          capture_output=True, text=True, cwd=TESTS.parent)
    elapsed = time.perf_counter() - t0
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr
    assert report(10, proc.returncode == 0, elapsed, 300,
                  f"{len(PROPERTY_SUITES)} suites: {summary}")
