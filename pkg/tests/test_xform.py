import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from eberlein.errors import DomainError, InvalidInput
from eberlein.xform import (ExpPolyFunction, cauchy_riemann_residual, cayley, cayley_inv, cone_cofactor,
                            disc_grid, disc_max_modulus, gn_pullback, halfplane_grid, laplace,
                            laplace_basis, sample_spectrum_csv_rows, shifted_cone_transform,
                            silov_max_modulus, span_equality_rank)


def quad_transform(f, z, lower=0.0):
    """Oracle: adaptive quadrature of int_lower^inf f(t) exp(izt) dt."""
    re = quad(lambda t: (f(t) * np.exp(1j * z * t)).real, lower, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    im = quad(lambda t: (f(t) * np.exp(1j * z * t)).imag, lower, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    return complex(re, im)


def random_exppoly(rng, max_terms=3, max_power=5):
    k = int(rng.integers(1, max_terms + 1))
    return ExpPolyFunction(tuple((complex(rng.normal(), rng.normal()), int(rng.integers(0, max_power + 1)),
                                  float(rng.uniform(0.5, 3.0))) for _ in range(k)))


def test_laplace_examples():
    assert laplace(ExpPolyFunction.basis(0), 0) == pytest.approx(1)
    assert laplace(ExpPolyFunction.basis(1), 0) == pytest.approx(1)
    assert laplace_basis(0, 0) == 1
    assert abs(laplace_basis(1, 0)) == pytest.approx(1)
    assert abs(laplace_basis(2, 1j)) == pytest.approx(0.25)


def test_laplace_matches_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(10):
        f = random_exppoly(rng)
        z = complex(rng.uniform(-3, 3), rng.uniform(0, 2))
        exact = laplace(f, z)
        assert abs(exact - quad_transform(f, z)) <= 1e-8 * max(1.0, abs(exact))


def test_laplace_rejects_lower_half_plane():
    with pytest.raises(DomainError):
        laplace(ExpPolyFunction.basis(0), -0.1j)


def test_exppoly_validation():
    with pytest.raises(InvalidInput):
        ExpPolyFunction(((1.0, 0, -1.0),))
    with pytest.raises(InvalidInput):
        ExpPolyFunction(((1.0, 1.5, 1.0),))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.floats(-5, 5), st.floats(0, 5))
def test_l1_bound_and_linearity(seed, x, y):
    rng = np.random.default_rng(seed)
    f, g = random_exppoly(rng), random_exppoly(rng)
    z = complex(x, y)
    assert abs(laplace(f, z)) <= f.l1_bound() * (1 + 1e-12)
    alpha = complex(*rng.normal(size=2))
    combo = laplace(f + g.scale(alpha), z)
    assert abs(combo - laplace(f, z) - alpha * laplace(g, z)) <= 1e-12 * max(1.0, abs(combo))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.floats(-5, 5), st.floats(0, 5))
def test_conjugate_symmetry(seed, x, y):
    # conj(f^(z)) is the transform of conj(f) at -conj(z), the mirror point
    f = random_exppoly(np.random.default_rng(seed))
    z = complex(x, y)
    assert laplace(f.conjugate(), -z.conjugate()) == pytest.approx(laplace(f, z).conjugate(), rel=1e-12, abs=1e-14)


def test_cauchy_riemann_and_decay():
    rng = np.random.default_rng(4)
    for _ in range(30):
        f = random_exppoly(rng)
        z = complex(rng.uniform(-3, 3), rng.uniform(0.5, 3))
        F = lambda w: laplace(f, w)
        scale = max(1.0, abs(F(z)))
        assert cauchy_riemann_residual(F, z) <= 1e-6 * scale
    f = ExpPolyFunction(((1.0, 2, 1.0), (0.5, 0, 2.0)))
    mods = [abs(laplace(f, 1j * y)) for y in (1, 10, 100)]
    assert mods[0] > mods[1] > mods[2]


def test_cauchy_riemann_detects_non_analytic():
    assert cauchy_riemann_residual(lambda w: np.conj(w), 0.3 + 1j) == pytest.approx(2.0)


def test_cayley_examples():
    assert cayley(1j) == 0
    assert cayley(0) == -1
    assert cayley(1) == pytest.approx(-1j)
    z = 0.7 + 2.1j
    assert abs(cayley_inv(cayley(z)) - z) <= 1e-12
    with pytest.raises(DomainError):
        cayley(-1j)
    with pytest.raises(DomainError):
        cayley_inv(1)


def test_cayley_maps_half_plane_into_disc():
    pts = halfplane_grid(20, 20)
    assert np.all(np.abs(cayley(pts)) <= 1)


def test_gn_examples():
    assert gn_pullback(1, 1j) == 0
    assert gn_pullback(1, 0) == pytest.approx(-2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.floats(-5, 5), st.floats(0, 5))
def test_modulus_of_printed_closed_forms(n, x, y):
    z = complex(x, y)
    closed_laplace = math.factorial(n) / abs(z + 1j) ** (n + 1)
    assert abs(abs(laplace_basis(n, z)) - closed_laplace) <= 1e-10 * closed_laplace
    closed_gn = 2 * abs(z - 1j) ** n / abs(z + 1j) ** (n + 1)
    assert abs(abs(gn_pullback(n, z)) - closed_gn) <= 1e-10 * max(closed_gn, 1e-300) + 1e-300


def test_span_rank_examples():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-3, 3, 12) + 1j * rng.uniform(0.1, 3, 12)
    assert tuple(span_equality_rank(1, pts[:4])) == (1, 1, 1)
    assert tuple(span_equality_rank(4, pts)) == (4, 4, 4)
    family = [lambda z: 1 / (z + 2j) ** 3] + [lambda z, k=k: gn_pullback(k, z) for k in range(1, 4)]
    ranks = span_equality_rank(4, pts, family_b=family)
    assert ranks.rank_joint == 5


def test_span_rank_needs_enough_points():
    with pytest.raises(InvalidInput):
        span_equality_rank(3, [1j, 2j, 3j])


def test_silov_examples():
    f = ExpPolyFunction.basis(0)
    s_in, s_bd = silov_max_modulus(f, halfplane_grid(30, 30), np.linspace(-5, 5, 101))
    assert s_bd == pytest.approx(1.0) and s_in < s_bd
    rng = np.random.default_rng(8)
    for _ in range(10):
        f = ExpPolyFunction(tuple((complex(*rng.normal(size=2)), k, 1.0) for k in range(6)))
        s_in, s_bd = silov_max_modulus(f, halfplane_grid(40, 40), np.linspace(-10, 10, 400))
        assert s_in <= s_bd * (1 + 1e-6)


def test_disc_max_modulus():
    rng = np.random.default_rng(3)
    for _ in range(10):
        coeffs = {int(s): complex(*rng.normal(size=2)) for s in rng.choice(np.arange(1, 12), 4, replace=False)}
        s_in, s_bd = disc_max_modulus(coeffs, disc_grid(40, 40), np.linspace(0, 2 * np.pi, 300, endpoint=False))
        assert s_in <= s_bd * (1 + 1e-6)


def test_shifted_cone_transform():
    f = ExpPolyFunction.basis(0)
    for a in (0.5, 2.0):
        for z in (0.3 + 0.2j, -1 + 1j, 2.0):
            closed = np.exp(1j * a * z) * np.exp(-a) / (1 - 1j * z)
            assert shifted_cone_transform(a, f, z) == pytest.approx(closed, rel=1e-12)
    rng = np.random.default_rng(6)
    for _ in range(5):
        f, a = random_exppoly(rng), float(rng.uniform(0.1, 2))
        z = complex(rng.uniform(-2, 2), rng.uniform(0, 2))
        value = shifted_cone_transform(a, f, z)
        assert abs(value - quad_transform(f, z, lower=a)) <= 1e-8 * max(1.0, abs(value))
        assert abs(value) <= math.exp(-a * z.imag) * f.l1_bound() * (1 + 1e-12)
    assert shifted_cone_transform(1e-9, f, 0.5j) == pytest.approx(laplace(f, 0.5j), rel=1e-6)
    with pytest.raises(DomainError):
        shifted_cone_transform(0.0, f, 1j)


def test_cofactor_is_bounded_analytic():
    f = ExpPolyFunction(((1.0, 2, 1.0), (-0.5, 0, 0.5)))
    g = cone_cofactor(1.5, f)
    s_in, s_bd = silov_max_modulus(g, halfplane_grid(30, 30), np.linspace(-10, 10, 400))
    assert s_in <= s_bd * (1 + 1e-6)
    z = 0.4 + 0.9j
    assert shifted_cone_transform(1.5, f, z) == pytest.approx(np.exp(1.5j * z) * laplace(g, z))


def test_csv_rows():
    rows = list(sample_spectrum_csv_rows([1 + 2j], [3 - 4j]))
    assert rows == [(1.0, 2.0, 3.0, -4.0)]
