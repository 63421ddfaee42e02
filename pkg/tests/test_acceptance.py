"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v``; the lines are collected in the
"acceptance criteria" section of the terminal summary (and printed inline with
``-s``).
"""

import time
import warnings

import numpy as np
import pytest

from eqloc.characters import (
    Bump,
    character_weight_sum_oracle,
    noncompact_character,
    orbit_fourier_sum,
    pair_distribution,
    weyl_character,
)
from eqloc.errors import QuadratureWarning
from eqloc.dh import dh_measure, verify_fourier_inversion
from eqloc.fixtures import load_fixture, sl2r_split_spec, sl2r_tables
from eqloc.localization import LocalizedIntegrand, euler_characteristic, localize_integral, random_regular_parameter
from eqloc.oracles import check_hamiltonian_identity, histogram_l1, monte_carlo_pushforward, quadrature_integral_s2, surface_fixture
from eqloc.roots import RootSystem, dominant_weights_up_to

EXP = LocalizedIntegrand.exponential_of_moment()
ROOT_SYSTEMS = {k: RootSystem.named(k) for k in ("A1", "A2", "B2")}


def complex_regular(rs, rng, margin=0.1):
    while True:
        X = rng.normal(size=rs.rank) + 1j * rng.normal(size=rs.rank)
        if np.min(np.abs(np.sinh(rs.positive_root_array @ X / 2))) > margin:
            return X


def test_criterion_01_stationary_phase_s2(acceptance):
    spec = load_fixture("s2").spec
    start = time.perf_counter()
    errs = [abs(localize_integral(spec, [t], EXP) - quadrature_integral_s2(t)) / quadrature_integral_s2(t) for t in (0.1, 1.0, 5.0)]
    elapsed = time.perf_counter() - start
    ok = max(errs) < 1e-9 and elapsed < 1.0
    assert acceptance(1, ok, f"max rel err {max(errs):.2e} (< 1e-9), runtime {elapsed:.3f}s (< 1s)")


def test_criterion_02_degree_zero_vanishing(acceptance):
    rng = np.random.default_rng(2)
    const = LocalizedIntegrand.constant(1.0)
    worst = 0.0
    for name in ("s2", "cp2", "a2-flag"):
        spec = load_fixture(name).spec
        for _ in range(20):
            worst = max(worst, abs(localize_integral(spec, random_regular_parameter(spec, rng), const)))
    assert acceptance(2, worst < 1e-12, f"max |integral of 1| {worst:.2e} (< 1e-12) on s2, cp2, a2-flag x 20")


def test_criterion_03_euler_characteristics(acceptance):
    got = {name: euler_characteristic(load_fixture(name).spec) for name in ("s2", "cp2", "a2-flag")}
    ok = got == {"s2": 2, "cp2": 3, "a2-flag": 6} and all(type(v) is int for v in got.values())
    assert acceptance(3, ok, f"chi = {got}")


def test_criterion_04_dh_against_monte_carlo(acceptance):
    start = time.perf_counter()
    errs = {}
    for name in ("s2", "cp2"):
        m = dh_measure(load_fixture(name).spec)
        hist = monte_carlo_pushforward(surface_fixture(name), 10**6, 20, seed=0)
        errs[name] = histogram_l1(hist, m)
    elapsed = time.perf_counter() - start
    ok = errs["s2"] < 0.01 and errs["cp2"] < 0.02 and elapsed < 30
    detail = f"L1/mass s2 {errs['s2']:.4f} (< 0.01), cp2 {errs['cp2']:.4f} (< 0.02), runtime {elapsed:.1f}s (< 30s)"
    assert acceptance(4, ok, detail)


def test_criterion_05_fourier_inversion(acceptance):
    rng = np.random.default_rng(5)
    worst = {}
    for name in ("s2", "cp2"):
        spec = load_fixture(name).spec
        m = dh_measure(spec)
        worst[name] = max(verify_fourier_inversion(m, spec, random_regular_parameter(spec, rng)) for _ in range(10))
    ok = worst["s2"] < 1e-10 and worst["cp2"] < 1e-8
    assert acceptance(5, ok, f"max residual s2 {worst['s2']:.2e} (< 1e-10), cp2 {worst['cp2']:.2e} (< 1e-8)")


def test_criterion_06_character_oracle_equivalence(acceptance):
    rng = np.random.default_rng(6)
    start = time.perf_counter()
    worst, count = 0.0, 0
    for rs in ROOT_SYSTEMS.values():
        for lam in dominant_weights_up_to(rs, 8):
            for _ in range(20):
                X = complex_regular(rs, rng)
                a, b = weyl_character(rs, lam, X), character_weight_sum_oracle(rs, lam, X, max_height=8)
                worst = max(worst, abs(a - b) / abs(b))
                count += 1
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 10
    assert acceptance(6, ok, f"max rel diff {worst:.2e} (< 1e-10) over {count} evaluations, runtime {elapsed:.2f}s (< 10s)")


def test_criterion_07_matching_identity(acceptance):
    rng = np.random.default_rng(7)
    worst = 0.0
    for rs in ROOT_SYSTEMS.values():
        weights = dominant_weights_up_to(rs, 6)
        for _ in range(50):
            lam = np.array(weights[rng.integers(len(weights))], dtype=float)
            X = complex_regular(rs, rng)
            lhs = orbit_fourier_sum(rs, lam + rs.rho, X) * np.prod(rs.positive_root_array @ X)
            rhs = weyl_character(rs, lam, X) * rs.alternating_sum(rs.rho, X)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    assert acceptance(7, worst < 1e-10, f"max rel diff {worst:.2e} (< 1e-10), 50 trials x A1, A2, B2")


def test_criterion_08_reduction_bit_for_bit(acceptance):
    rng = np.random.default_rng(8)
    problems = {name: load_fixture(name) for name in ("s2", "cp1", "cp2", "a1-flag", "a2-flag")}
    split = sl2r_split_spec()
    problems["sl2r-split"] = (split, sl2r_tables(split)["principal"])
    mismatches = 0
    for problem in problems.values():
        spec, table = problem if isinstance(problem, tuple) else (problem.spec, problem.multiplicities)
        for _ in range(100):
            X = random_regular_parameter(spec, rng)
            mismatches += noncompact_character(spec, table, X, EXP) != localize_integral(spec, X, EXP)
    ok = mismatches == 0
    assert acceptance(8, ok, f"{mismatches} bitwise mismatches over 100 X x {len(problems)} fixtures")


def test_criterion_09_noncompact_nonvanishing(acceptance):
    problem = load_fixture("sl2r-split")
    spec, table = problem.spec, sl2r_tables(problem.spec)["discrete"]
    points = np.concatenate([np.linspace(0.2, 3.0, 5), -np.linspace(0.2, 3.0, 5)])
    values = [noncompact_character(spec, table, [t], EXP) for t in points]
    phi = Bump((1.0,), 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error", QuadratureWarning)
        coarse = pair_distribution(spec, table, EXP, phi, quad=8)
        fine = pair_distribution(spec, table, EXP, phi, quad=64)
    drift = abs(coarse - fine) / abs(fine)
    ok = min(abs(v) for v in values) > 0 and fine != 0 and drift < 1e-6
    detail = f"min |F| {min(abs(v) for v in values):.3g} at 10 points, pairing {fine:.10g}, refinement drift {drift:.1e} (< 1e-6)"
    assert acceptance(9, ok, detail)


def test_criterion_10_hamiltonian_identity(acceptance):
    surface = surface_fixture("s2")
    residual = check_hamiltonian_identity(surface, [1.0], 10**4, 1e-5).max_residual
    coarse = check_hamiltonian_identity(surface, [1.0], 10**4, 1e-3).max_residual
    fine = check_hamiltonian_identity(surface, [1.0], 10**4, 5e-4).max_residual
    ratio = coarse / fine
    ok = residual < 1e-6 and 3.5 <= ratio <= 4.5
    assert acceptance(10, ok, f"residual {residual:.2e} at h=1e-5 (< 1e-6), halving ratio {ratio:.3f} (in [3.5, 4.5])")
