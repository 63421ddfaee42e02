import math

import numpy as np
import pytest

from eqloc.dh import dh_measure
from eqloc.fixtures import cp1_spec, cp2_spec, s2_spec
from eqloc.oracles import (
    broken_s2_surface,
    chart_transition_defect,
    check_hamiltonian_identity,
    cpn_surface,
    histogram_l1,
    induced_character_sl2r,
    monte_carlo_pushforward,
    philox_block,
    quadrature_integral_cpn,
    quadrature_integral_s2,
    s2_surface,
    surface_fixture,
)


def test_quadrature_s2_values():
    # closed form of 2 pi int_{-1}^{1} e^{tz} dz
    assert quadrature_integral_s2(1.0) == pytest.approx(2 * math.pi * (math.e - 1 / math.e), rel=1e-13)
    assert quadrature_integral_s2(0.0) == pytest.approx(4 * math.pi, rel=1e-14)
    assert quadrature_integral_s2(5.0) == pytest.approx(2 * math.pi * (math.exp(5) - math.exp(-5)) / 5, rel=1e-13)
    assert quadrature_integral_s2(5.0) == pytest.approx(186.493, abs=1e-3)


def test_quadrature_cpn_values():
    assert quadrature_integral_cpn(1, [2.0]) == pytest.approx(2 * math.pi * (math.exp(2) - 1) / 2, rel=1e-13)
    assert quadrature_integral_cpn(2, [0.0, 0.0]) == pytest.approx((2 * math.pi) ** 2 / 2, rel=1e-13)
    with pytest.raises(NotImplementedError):
        quadrature_integral_cpn(3, [1.0, 2.0, 3.0])


@pytest.mark.parametrize("name", ["s2", "cp1", "cp2"])
def test_sampler_mass(name):
    surface = surface_fixture(name)
    n = 10**6
    hist = monte_carlo_pushforward(surface, n, 4, seed=3)
    # every sample lands in the moment image, so the counted mass is the declared volume
    assert hist.masses.sum() == pytest.approx(surface.volume, rel=1e-12)
    # marginal of the first moment coordinate: binomial errors within 3 sigma of the exact bin masses
    m = dh_measure({"s2": s2_spec, "cp1": cp1_spec, "cp2": cp2_spec}[name]())
    exact = m.bin_masses(hist.edges)
    p = exact / surface.volume
    sigma = np.sqrt(n * p * (1 - p)) * surface.volume / n
    assert np.all(np.abs(hist.masses - exact) <= 3 * sigma + 1e-12)


def test_sampler_on_manifold():
    pts = s2_surface().sample(5000, seed=1)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
    Z = cpn_surface(2).sample(5000, seed=1)
    assert np.allclose(np.linalg.norm(Z, axis=1), 1)


@pytest.mark.parametrize("name", ["s2", "cp1", "cp2"])
def test_chart_transitions(name):
    assert chart_transition_defect(surface_fixture(name), 2000) < 1e-8


@pytest.mark.parametrize("name", ["s2", "cp1", "cp2"])
def test_chart_round_trip(name):
    surface = surface_fixture(name)
    P = surface.sample(1000, seed=5)
    for chart in surface.charts:
        mask = chart.preferred(P)
        back = chart.to_ambient(chart.from_ambient(P[mask]))
        if np.iscomplexobj(back):
            # projective points agree up to a phase
            overlap = np.abs(np.sum(np.conj(back) * P[mask], axis=1))
            assert np.allclose(overlap, 1)
        else:
            assert np.allclose(back, P[mask])


def test_determinism_and_workers():
    surface = surface_fixture("cp2")
    a = monte_carlo_pushforward(surface, 600_000, 10, seed=11)
    b = monte_carlo_pushforward(surface, 600_000, 10, seed=11, workers=3)
    c = monte_carlo_pushforward(surface, 600_000, 10, seed=12)
    assert np.array_equal(a.masses, b.masses)
    assert not np.array_equal(a.masses, c.masses)


def test_blocks_are_independent_streams():
    x = philox_block(5, 0).random(4)
    y = philox_block(5, 1).random(4)
    assert not np.allclose(x, y)
    assert np.array_equal(x, philox_block(5, 0).random(4))


def test_min_samples():
    with pytest.raises(ValueError):
        monte_carlo_pushforward(s2_surface(), 100)


def test_histogram_densities():
    hist = monte_carlo_pushforward(s2_surface(), 10**5, 10, seed=0)
    assert hist.densities.mean() == pytest.approx(2 * math.pi, rel=1e-12)


def test_monte_carlo_error_scaling():
    surface, m = s2_surface(), dh_measure(s2_spec())
    e1 = histogram_l1(monte_carlo_pushforward(surface, 10**6, 20, seed=0), m)
    e4 = histogram_l1(monte_carlo_pushforward(surface, 4 * 10**6, 20, seed=0), m)
    assert e4 <= 0.6 * e1


def test_hamiltonian_s2():
    report = check_hamiltonian_identity(s2_surface(), [1.0], 10**4, 1e-5)
    assert report.max_residual < 1e-6
    assert report.checked + report.skipped == 10**4
    assert float(report) == report.max_residual


def test_hamiltonian_zero_parameter():
    assert check_hamiltonian_identity(s2_surface(), [0.0], 2000, 1e-5).max_residual == 0.0


def test_hamiltonian_broken():
    # with mu = z^2 the defect is |2z - 1| |dz|, far above any truncation error
    assert check_hamiltonian_identity(broken_s2_surface(), [1.0], 2000, 1e-5).max_residual > 0.1


@pytest.mark.parametrize("name, X", [("cp1", [1.3]), ("cp2", [1.0, -2.0]), ("cp2", [0.5, 0.25])])
def test_hamiltonian_cpn(name, X):
    assert check_hamiltonian_identity(surface_fixture(name), X, 5000, 1e-5).max_residual < 1e-6


def test_hamiltonian_second_order():
    surface = s2_surface()
    coarse = check_hamiltonian_identity(surface, [1.0], 10**4, 1e-3).max_residual
    fine = check_hamiltonian_identity(surface, [1.0], 10**4, 5e-4).max_residual
    assert 3.5 <= coarse / fine <= 4.5


def test_hamiltonian_step_range():
    with pytest.raises(ValueError):
        check_hamiltonian_identity(s2_surface(), [1.0], 100, 1e-2)
    with pytest.raises(ValueError):
        check_hamiltonian_identity(s2_surface(), [1.0], 100, 1e-9)


def test_unknown_surface():
    with pytest.raises(KeyError):
        surface_fixture("a2-flag")


@pytest.mark.parametrize("nu, t", [(0.0, 1.0), (0.5, 0.7), (0.3, -1.5), (0.5, 2.0)])
def test_induced_character(nu, t):
    closed = (math.exp(nu * t) + math.exp(-nu * t)) / abs(math.exp(t) - math.exp(-t))
    assert induced_character_sl2r(nu, t) == pytest.approx(closed, rel=1e-8)


def test_induced_character_identity_rejected():
    with pytest.raises(ValueError):
        induced_character_sl2r(0.5, 0.0)
