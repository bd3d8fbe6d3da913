
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anthill.normattain.model.measure import ComplexMeasure, MeasureError, WeightFunction, \
    total_variation, polar_decompose, weighted_variation, dual_sup_bruteforce, dual_sup_closed_form, \
    dual_gap_bound, scale_by_function, variation_identity_check, duality_report

from strategies import measures, random_atoms


def test_measure_validation():
    with pytest.raises(MeasureError):
        ComplexMeasure([])
    with pytest.raises(MeasureError):
        ComplexMeasure([1.0, float("nan")])
    with pytest.raises(MeasureError):
        ComplexMeasure([[1.0], [2.0]])


def test_measure_is_immutable():
    nu = ComplexMeasure([1, 2j])
    with pytest.raises(ValueError):
        nu.atoms[0] = 5


def test_measure_arithmetic():
    nu = ComplexMeasure([1, 2j, -1])
    assert nu.mass() == 2j
    assert nu.integrate([1, 1j, 0]) == -1
    assert nu + ComplexMeasure.zero(3) == nu
    assert nu - nu == ComplexMeasure.zero(3)
    assert ComplexMeasure.dirac(3, 1, 2.5) == ComplexMeasure([0, 2.5, 0])

    with pytest.raises(MeasureError):
        nu.integrate([1, 1])


def test_total_variation():
    assert total_variation(ComplexMeasure([3 + 4j, -1])) == 6.0
    assert total_variation(ComplexMeasure.zero(4)) == 0.0


def test_polar_decomposition_of_zero_atoms():
    polar = polar_decompose(ComplexMeasure([0, -2, 3j]))
    assert np.allclose(polar.phases, [1, -1, 1j])
    assert np.allclose(polar.variation, [0, 2, 3])
    assert polar.reconstruct() == ComplexMeasure([0, -2, 3j])
    assert np.all(np.abs(np.abs(polar.phases) - 1) < 1e-15)


def test_weighted_variation():
    nu = ComplexMeasure([2j, -4])
    assert weighted_variation([1.0, 0.5], nu) == 4.0
    assert weighted_variation(WeightFunction.constant(2), nu) == total_variation(nu)

    with pytest.raises(MeasureError):
        weighted_variation([1.0], nu)


def test_weight_function():
    with pytest.raises(MeasureError):
        WeightFunction([0.5, -0.1])
    assert np.array_equal(WeightFunction([0.25, 1.5]).complement().values, [0.75, 0.0])


def test_dual_sup_bruteforce_on_grid_points():
    assert dual_sup_bruteforce([1.0], ComplexMeasure([1j]), 4) == pytest.approx(1.0)
    assert dual_sup_bruteforce([2.0, 1.0], ComplexMeasure([-1, 1j]), 8) == pytest.approx(3.0)


def test_dual_sup_bruteforce_rejects_coarse_grid():
    with pytest.raises(MeasureError):
        dual_sup_bruteforce([1.0], ComplexMeasure([1]), 3)


def test_dual_gap_bound():
    nu = ComplexMeasure([1, 1j])
    assert dual_gap_bound([1.0, 1.0], nu, 4) == pytest.approx(2 * (1 - math.cos(math.pi / 4)))

    # atoms halfway between grid points realize the bound
    nu = ComplexMeasure([np.exp(1j * np.pi / 4)])
    gap = weighted_variation([1.0], nu) - dual_sup_bruteforce([1.0], nu, 4)
    assert gap == pytest.approx(dual_gap_bound([1.0], nu, 4))


def test_scale_by_function_and_variation_identity():
    nu = ComplexMeasure([1, 1j, -2])
    scaled = scale_by_function([0.5, 1j, 0], nu)
    assert scaled == ComplexMeasure([0.5, -1, 0])

    passed, deviation = variation_identity_check([0.5, 0.25, 1.0], nu)
    assert passed
    assert deviation < 1e-15


def test_weighted_duality_acceptance():
    rng = np.random.default_rng(2024)
    grid = 720

    for _ in range(500):
        k_size = int(rng.integers(1, 9))
        nu = ComplexMeasure(random_atoms(rng, k_size, float(rng.uniform(0.01, 5.0))))
        f = rng.random(k_size)

        weighted = weighted_variation(f, nu)
        closed = dual_sup_closed_form(f, nu)
        brute = dual_sup_bruteforce(f, nu, grid)
        norm = total_variation(nu)

        assert abs(closed - weighted) <= 1e-12 * max(weighted, 1e-300) + 1e-15
        assert brute <= weighted + 1e-12 * norm
        assert weighted - brute <= norm * (1 - math.cos(math.pi / grid)) + 1e-12 * norm


def test_duality_report_passes():
    rng = np.random.default_rng(7)
    for _ in range(20):
        k_size = int(rng.integers(1, 9))
        nu = ComplexMeasure(random_atoms(rng, k_size))
        sheet = duality_report(WeightFunction(rng.random(k_size)), nu, 720)
        assert sheet.passed, sheet.lines()


@given(measures(), st.data())
@settings(max_examples=100, deadline=None)
def test_dual_sup_never_exceeds_weighted_variation(nu, data):
    f = np.array(data.draw(st.lists(st.floats(min_value=0.0, max_value=1.0),
                                    min_size=nu.k_size, max_size=nu.k_size)))

    weighted = weighted_variation(f, nu)
    norm = total_variation(nu)

    assert weighted <= norm * (1 + 1e-12)
    assert dual_sup_bruteforce(f, nu, 64) <= weighted + 1e-12 * max(norm, 1.0)
    assert weighted - dual_sup_bruteforce(f, nu, 64) <= dual_gap_bound(f, nu, 64) + 1e-12 * max(norm, 1.0)


@given(measures())
@settings(max_examples=100, deadline=None)
def test_conjugate_phases_attain_variation(nu):
    polar = polar_decompose(nu)
    assert nu.integrate(polar.conjugate_phases).real == pytest.approx(total_variation(nu), rel=1e-12)
    assert np.allclose(polar.reconstruct().atoms, nu.atoms, rtol=0, atol=1e-12 * max(total_variation(nu), 1.0))
