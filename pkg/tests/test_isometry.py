import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zyglab.analytic import Polynomial, derivative, evaluate, monomial, peaking, random_poly
from zyglab.errors import NotInSpace
from zyglab.isometry import (CanonicalIsometry, FullIsometry, HermitianDiagonal,
                             adjoint_on_extreme, apply_canonical, apply_full, compose_isometries,
                             hermitian_apply, hermitian_exponential, invert_isometry,
                             parallel_map, second_derivative_direct, verify_isometry)
from zyglab.moebius import DiscAutomorphism, random_automorphism
from zyglab.rng import SplitMix64
from zyglab.zygmund import zygmund_norm

FLIP = DiscAutomorphism(-1, 0)


def isometries():
    return st.builds(
        lambda al, t, r, s: CanonicalIsometry(al, DiscAutomorphism(cmath.exp(1j * t),
                                                                   r * cmath.exp(1j * s))),
        st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, 0.8),
        st.floats(0, 2 * math.pi))


def random_isometry(rng):
    return CanonicalIsometry(rng.uniform(0, 2 * math.pi), random_automorphism(rng))


def test_apply_canonical_examples():
    z = np.array([0.1, -0.5 + 0.3j, 0.8j])
    f = random_poly(5, 11)
    tf = apply_canonical(CanonicalIsometry.identity(), f)
    assert np.max(np.abs(tf(z) - f(z))) <= 1e-14
    tf = apply_canonical(CanonicalIsometry(0, FLIP), monomial(2))
    assert np.max(np.abs(tf(z) + z ** 2 / 2)) <= 1e-15


def test_canonical_rejects_outside_subspace():
    with pytest.raises(NotInSpace):
        apply_canonical(CanonicalIsometry.identity(), Polynomial([0, 1, 1]))


def test_closed_form_consistency_example():
    T = CanonicalIsometry(math.pi / 3, DiscAutomorphism(1, 0.5))
    f = monomial(3)
    z = np.array(SplitMix64(5).disc_points(1000, 0.95))
    numeric = derivative(apply_canonical(T, f), z, 2)
    assert np.max(np.abs(numeric - second_derivative_direct(T, f, z))) <= 1e-8


def test_second_derivative_direct_examples():
    f = monomial(3)
    z = 0.3 - 0.2j
    assert second_derivative_direct(CanonicalIsometry.identity(), f, z) == z
    assert second_derivative_direct(CanonicalIsometry(0, FLIP), f, z) == pytest.approx(z)
    T = CanonicalIsometry(0, DiscAutomorphism(1, 0.5))
    assert second_derivative_direct(T, monomial(2), 0) == pytest.approx(0.75)


def test_compose_and_invert_examples():
    T = CanonicalIsometry(1.2, DiscAutomorphism(cmath.exp(0.4j), 0.3 + 0.1j))
    e = compose_isometries(T, invert_isometry(T))
    assert min(e.alpha, 2 * math.pi - e.alpha) <= 1e-12 and e.sigma.is_identity()
    r = compose_isometries(CanonicalIsometry(0.5), CanonicalIsometry(0.9))
    assert r.alpha == pytest.approx(1.4) and r.sigma.is_identity()
    assert invert_isometry(CanonicalIsometry.identity()) == CanonicalIsometry.identity()
    inv = invert_isometry(CanonicalIsometry(math.pi / 2, DiscAutomorphism(1j, 0)))
    assert inv.alpha == pytest.approx(3 * math.pi / 2)
    assert abs(inv.sigma.lam + 1j) <= 1e-16


def test_compose_matches_sequential():
    rng = SplitMix64(21)
    T1, T2 = random_isometry(rng), random_isometry(rng)
    f = monomial(3)
    z = np.array(rng.disc_points(50, 0.9))
    two = apply_canonical(T1, apply_canonical(T2, f), check=False)
    one = apply_canonical(compose_isometries(T1, T2), f)
    assert np.max(np.abs(two(z) - one(z))) <= 1e-9


def test_inverse_round_trip_norm():
    T = random_isometry(SplitMix64(99))
    f = monomial(4) * 2  # z^4/12
    back = apply_canonical(invert_isometry(T), apply_canonical(T, f), check=False)
    assert zygmund_norm(back - f).total <= 1e-8


def test_adjoint_examples():
    z = 0.3 + 0.2j
    assert adjoint_on_extreme(CanonicalIsometry.identity(), 0, z) == (0, z)
    T = CanonicalIsometry(0.5, DiscAutomorphism.rotation(0.7))
    phase, w = adjoint_on_extreme(T, 0, z)
    assert phase == pytest.approx(1.2) and w == pytest.approx(cmath.exp(0.7j) * z)


def test_adjoint_transport_seeded():
    T = random_isometry(SplitMix64(4))
    z, theta = 0.3 + 0.2j, 0.4
    phase, w = adjoint_on_extreme(T, theta, z)
    for f in (monomial(2), monomial(3), peaking(0.5)):
        lhs = (1 - abs(z) ** 2) * cmath.exp(1j * theta) * second_derivative_direct(T, f, z)
        rhs = cmath.exp(1j * phase) * (1 - abs(w) ** 2) * derivative(f, w, 2)
        assert abs(lhs - rhs) <= 1e-9


def test_apply_full_examples():
    T = FullIsometry(0.3, 1.1, 2.0, DiscAutomorphism(1j, 0.2))
    one = apply_full(T, Polynomial([1]))
    assert one(0.5j) == pytest.approx(cmath.exp(0.3j))
    assert zygmund_norm(one).total == pytest.approx(1)
    ident = FullIsometry(0.3, 1.1, 2.0)
    lin = apply_full(ident, Polynomial([0, 1]))
    assert lin(0.4) == pytest.approx(cmath.exp(1.1j) * 0.4)
    assert zygmund_norm(lin).total == pytest.approx(1)
    f = Polynomial([1, 1, 0.5])
    S = FullIsometry(*(SplitMix64(8).uniform(0, 6) for _ in range(3)),
                     random_automorphism(SplitMix64(9)))
    assert zygmund_norm(apply_full(S, f)).total == pytest.approx(zygmund_norm(f).total, rel=1e-7)


def test_hermitian_examples():
    S = HermitianDiagonal(1.0, 2.0, 0.5)
    z = 0.2 - 0.6j
    assert hermitian_apply(S, Polynomial([1]))(z) == pytest.approx(1.5)
    assert hermitian_apply(S, Polynomial([0, 1]))(z) == pytest.approx(2.5 * z)
    assert hermitian_apply(S, monomial(2))(z) == pytest.approx(0.25 * z * z)


def test_hermitian_exponential_examples():
    f = Polynomial([1, 1, 0.5])
    z = np.array([0.1, 0.5j, -0.7 + 0.1j])
    E0 = apply_full(hermitian_exponential(HermitianDiagonal(1.0, 2.0, 0.5), 0.0), f)
    assert np.max(np.abs(E0(z) - f(z))) <= 1e-15
    E = apply_full(hermitian_exponential(HermitianDiagonal(0, 0, 1), math.pi), f)
    assert np.max(np.abs(E(z) + f(z))) <= 1e-14
    E = apply_full(hermitian_exponential(HermitianDiagonal(1, 2, 0.5), 0.3), f)
    assert abs(zygmund_norm(E).total - zygmund_norm(f).total) <= 1e-10


def test_hermitian_exponential_is_exp_of_generator():
    # d/dt e^{itS} f at t = 0 equals i S f
    S, f = HermitianDiagonal(0.4, -1.3, 0.9), Polynomial([0.5j, 1, 0.3, 0.2])
    z, h = 0.3 + 0.3j, 1e-6
    plus = apply_full(hermitian_exponential(S, h), f)(z)
    minus = apply_full(hermitian_exponential(S, -h), f)(z)
    assert (plus - minus) / (2 * h) == pytest.approx(1j * hermitian_apply(S, f)(z), abs=1e-8)


def test_verify_isometry_examples():
    suite = [monomial(2), monomial(3), random_poly(4, 1)]
    rep = verify_isometry(CanonicalIsometry.identity(), suite)
    assert rep["max_relative_deviation"] == 0
    rep = verify_isometry(CanonicalIsometry(0, FLIP), [monomial(2)])
    assert rep["max_relative_deviation"] <= 1e-10
    rng = SplitMix64(12)
    polys = [random_poly(3 + k % 4, rng.next_u64()) for k in range(10)]
    rep = verify_isometry(random_isometry(rng), polys)
    assert rep["max_relative_deviation"] <= 1e-6 and len(rep["table"]) == 10


def test_parallel_map_is_ordered(monkeypatch):
    monkeypatch.setenv("ZYGLAB_THREADS", "4")
    assert parallel_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    monkeypatch.setenv("ZYGLAB_THREADS", "junk")
    assert parallel_map(str, [1, 2]) == ["1", "2"]


@given(isometries(), st.integers(0, 2 ** 64 - 1))
@settings(max_examples=30, deadline=None)
def test_norm_preserved(T, seed):
    f = random_poly(5, seed)
    assert zygmund_norm(apply_canonical(T, f)).total == pytest.approx(
        zygmund_norm(f).total, rel=1e-6)


@given(isometries(), st.floats(0, 2 * math.pi),
       st.builds(lambda r, t: r * cmath.exp(1j * t), st.floats(0, 0.95),
                 st.floats(0, 2 * math.pi)))
@settings(max_examples=100, deadline=None)
def test_adjoint_transport(T, theta, z):
    phase, w = adjoint_on_extreme(T, theta, z)
    f = random_poly(5, 3)
    lhs = (1 - abs(z) ** 2) * cmath.exp(1j * theta) * second_derivative_direct(T, f, z)
    rhs = cmath.exp(1j * phase) * (1 - abs(w) ** 2) * derivative(f, w, 2)
    assert abs(lhs - rhs) <= 1e-9


@given(isometries())
@settings(max_examples=30, deadline=None)
def test_canonical_output_stays_in_subspace(T):
    tf = apply_canonical(T, monomial(4))
    assert abs(evaluate(tf, 0j)) <= 1e-15
    assert abs(derivative(tf, 0j, 1, method="direct")) <= 1e-15
