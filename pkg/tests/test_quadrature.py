import math

import numpy as np
import pytest

from chordgeo.geometry import sphere_area, unit_ball_volume
from chordgeo.quadrature import (
    SphereQuadrature,
    gauss_legendre_01,
    grundmann_moeller,
    hemisphere_jacobi_quadrature,
    hemisphere_quadrature,
    simplex_rule_points,
)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_product_grid_weight_sum(n):
    quad = SphereQuadrature.product_grid(n, 32, 64)
    assert quad.weights.sum() == pytest.approx(sphere_area(n), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_product_grid_quadratic_moment(n):
    # integral of (u . e1)^2 over S^{n-1} equals area / n
    quad = SphereQuadrature.product_grid(n, 32, 64)
    val = float(np.sum(quad.weights * quad.nodes[:, 0] ** 2))
    assert val == pytest.approx(sphere_area(n) / n, rel=1e-10)


def test_monte_carlo_antithetic_kills_odd_moments():
    quad = SphereQuadrature.monte_carlo(3, samples=10_000, seed=5)
    val = float(np.sum(quad.weights * quad.nodes[:, 2]))
    assert abs(val) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hemisphere_weight_sum(n):
    pole = np.eye(n)[0]
    nodes, w, t = hemisphere_quadrature(pole, 32, 64)
    assert w.sum() == pytest.approx(sphere_area(n) / 2.0, rel=1e-12)
    assert np.all(nodes @ pole > 0)
    assert t == pytest.approx(nodes @ pole, abs=1e-12)


def test_hemisphere_jacobi_integrates_singular_factor():
    # integral of t^beta over the hemisphere, beta in (-1, 0)
    n, beta = 3, -0.5
    pole = np.array([0.0, 0.0, 1.0])
    nodes, w, t = hemisphere_jacobi_quadrature(pole, beta, 48, 96)
    # g = 1: sum w = int t^beta dS = 2 pi int_0^1 t^beta dt (n=3, dS = 2 pi dt)
    assert w.sum() == pytest.approx(2.0 * math.pi / (beta + 1.0), rel=1e-10)


@pytest.mark.parametrize("d,s", [(1, 2), (2, 2), (2, 3), (3, 2)])
def test_grundmann_moeller_polynomial_exactness(d, s):
    # degree 2s+1 rule on the unit simplex; check monomials x1^a via the
    # closed form a! d! / (a + d)! for the unit simplex
    pts, w = grundmann_moeller(d, s)
    verts = np.vstack([np.zeros(d), np.eye(d)])
    x = pts @ verts
    for a in range(2 * s + 2):
        exact = math.factorial(a) * math.factorial(d) / math.factorial(a + d)
        assert float(np.dot(w, x[:, 0] ** a)) == pytest.approx(exact, rel=1e-10)


def test_simplex_rule_points_shape():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    pts, w = simplex_rule_points(verts, 2)
    assert pts.shape[1] == 2
    assert w.sum() == pytest.approx(1.0)


def test_gauss_legendre_01():
    x, w = gauss_legendre_01(8)
    assert w.sum() == pytest.approx(1.0)
    assert float(np.dot(w, x**7)) == pytest.approx(1.0 / 8.0, rel=1e-12)
