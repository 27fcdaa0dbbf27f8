import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zyglab.analytic import (BoundaryLog, EvaluationSettings, Polynomial, cauchy_derivative,
                             derivative, evaluate, make_test_function, monomial, path_integral,
                             peaking, random_poly)
from zyglab.errors import BadSpec, ConvergenceFailure, PointOutsideDisc
from zyglab.rng import SplitMix64


def disc_points(max_r=0.95):
    return st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)),
                     st.floats(0.0, max_r), st.floats(0.0, 2 * math.pi))


def test_eval_examples():
    assert evaluate(monomial(2), 0.5) == pytest.approx(0.125, abs=1e-16)
    assert abs(evaluate(peaking(0.5), 0j)) == 0.0
    z = 0.3 + 0.4j
    assert abs(evaluate(monomial(3), z) - z * z * z / 6) <= 1e-14


def test_derivative_examples():
    assert derivative(monomial(2), 0.37 - 0.2j, 2) == 1
    assert derivative(peaking(0.5), 0j, 2) == pytest.approx(0.75, abs=1e-15)
    assert derivative(monomial(3), 0.3, 2) == pytest.approx(0.3, abs=1e-15)


def test_path_integral_examples():
    assert path_integral(lambda x: x, 0.8) == pytest.approx(0.32, abs=1e-15)
    assert path_integral(lambda x: np.ones_like(x), 0.5j) == pytest.approx(0.5j, abs=1e-15)
    f0 = peaking(0.5)
    got = path_integral(lambda x: derivative(f0, x, 2), 0.4)
    assert got == pytest.approx(0.375, abs=1e-13)


def test_factory_examples():
    m2 = monomial(2)
    assert evaluate(m2, 0j) == 0 and derivative(m2, 0j, 1) == 0
    assert list(random_poly(5, 42).coefficients) == list(random_poly(5, 42).coefficients)
    f0 = peaking(0.5)
    assert abs(evaluate(f0, 0j)) <= 1e-16
    assert abs(derivative(f0, 0j, 1)) <= 1e-16


def test_outside_disc_rejected():
    with pytest.raises(PointOutsideDisc):
        evaluate(monomial(2), 1.0)
    with pytest.raises(PointOutsideDisc):
        derivative(monomial(2), 0.8 + 0.8j, 2)


@pytest.mark.parametrize("spec", [{"kind": "monomial", "k": 1}, {"kind": "peaking", "z0": 1.2},
                                  {"kind": "random_poly", "degree": 1, "seed": 0},
                                  {"kind": "nope"}, {"k": 3}])
def test_bad_specs(spec):
    with pytest.raises(BadSpec):
        make_test_function(spec)


def test_spec_complex_forms():
    a = make_test_function({"kind": "peaking", "z0": [0.0, 0.7]})
    b = make_test_function({"kind": "peaking", "z0": {"re": 0.0, "im": 0.7}})
    assert a.z0 == b.z0 == 0.7j


def test_peaking_zero_convention():
    f = peaking(0)
    assert isinstance(f, Polynomial)
    assert derivative(f, 0.2, 2) == 1


def test_peaking_closed_forms_against_cauchy():
    z0 = 0.6 - 0.3j
    f0 = peaking(z0)
    z = np.array([0.1, -0.4 + 0.2j, 0.5j, 0.7 - 0.1j])
    for k in (1, 2, 3):
        exact = derivative(f0, z, k, method="direct")
        assert np.max(np.abs(exact - cauchy_derivative(f0, z, k))) <= 1e-11
    fp = (1 - abs(z0) ** 2) * z / (1 - z0.conjugate() * z)
    assert np.max(np.abs(derivative(f0, z, 1) - fp)) <= 1e-15


def test_peaking_series_branch_continuous():
    f0 = peaking(0.9)
    # |conj(z0) z| straddles the series switch at 0.1
    a, b = evaluate(f0, 0.1111110), evaluate(f0, 0.1111112)
    assert abs(a - b) <= 1e-6


def test_boundary_log():
    f = BoundaryLog()
    z = np.array([0.2, 0.9, -0.5j])
    assert np.max(np.abs(derivative(f, z, 2) - 1 / (1 - z))) <= 1e-15
    assert np.max(np.abs(cauchy_derivative(f, z, 2) - 1 / (1 - z))) <= 1e-10


def test_convergence_failure_when_nodes_starved():
    starved = EvaluationSettings(derivative_nodes=4, abs_tolerance=1e-14)
    with pytest.raises(ConvergenceFailure):
        cauchy_derivative(monomial(9), 0.3, 2, starved)


def test_settings_validation():
    with pytest.raises(BadSpec):
        EvaluationSettings(derivative_circle_fraction=1.5)
    with pytest.raises(BadSpec):
        derivative(monomial(3), 0.1, 4)


def test_linear_combination():
    f = monomial(2) * 2 + monomial(3) - monomial(4)
    z = 0.3 - 0.6j
    want = z ** 2 + z ** 3 / 6 - z ** 4 / 24
    assert abs(evaluate(f, z) - want) <= 1e-15
    assert abs(derivative(f, z, 2, method="direct") - (2 + z - z ** 2 / 2)) <= 1e-15


def test_splitmix_reference_stream():
    # published SplitMix64 outputs for seed 0
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


@given(st.integers(2, 9), disc_points())
@settings(max_examples=60, deadline=None)
def test_cauchy_matches_polynomial_derivatives(k, z):
    f = monomial(k)
    for order in (1, 2, 3):
        exact = derivative(f, z, order)
        assert abs(cauchy_derivative(f, z, order) - exact) <= 1e-10


@given(st.integers(0, 2 ** 64 - 1), disc_points(0.99))
@settings(max_examples=60, deadline=None)
def test_path_integral_inverts_derivative(seed, z):
    f = random_poly(6, seed)
    got = path_integral(lambda x: derivative(f, x, 1), z)
    assert abs(got - evaluate(f, z)) <= 1e-12 * max(1.0, abs(evaluate(f, z)))
