"""Quadrature rules on spheres, hemispheres and simplices.

All spherical rules integrate against the (unnormalized) surface measure, so
weights sum to the sphere area n*omega_n (or half of it for hemisphere rules).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .geometry import sphere_area, unit_ball_volume


# ---------------------------------------------------------------------------
# full-sphere rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes and weights for integration over S^{n-1}.

    ``scheme`` is "product_grid" or "monte_carlo"; weights sum to n*omega_n.
    """

    scheme: str
    nodes: np.ndarray
    weights: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        total = float(np.sum(self.weights))
        target = sphere_area(self.dim)
        if abs(total - target) > 1e-9 * target:
            raise ValueError(f"weights sum {total} != sphere area {target}")

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @classmethod
    def product_grid(cls, n: int, polar: int = 128, azimuth: int = 256) -> "SphereQuadrature":
        nodes, weights = _product_rule(n, polar, azimuth)
        # remove grid-construction drift so the invariant holds exactly
        weights = weights * (sphere_area(n) / weights.sum())
        return cls("product_grid", nodes, weights)

    @classmethod
    def monte_carlo(cls, n: int, samples: int = 200_000, seed: int = 0) -> "SphereQuadrature":
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(71,)))
        half = (samples + 1) // 2
        g = rng.standard_normal((half, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        nodes = np.vstack([g, -g])  # antithetic pairs
        weights = np.full(nodes.shape[0], sphere_area(n) / nodes.shape[0])
        return cls("monte_carlo", nodes, weights, seed=seed)

    @classmethod
    def default(cls, n: int, seed: int = 0) -> "SphereQuadrature":
        if n <= 3:
            return cls.product_grid(n)
        return cls.monte_carlo(n, seed=seed)


def _circle_rule(m: int):
    ang = (np.arange(m) + 0.5) * (2 * math.pi / m)
    nodes = np.column_stack([np.cos(ang), np.sin(ang)])
    weights = np.full(m, 2 * math.pi / m)
    return nodes, weights


def _product_rule(n: int, polar: int, azimuth: int):
    """Recursive product rule: S^{n-1} = [polar angle] x S^{n-2}."""
    if n == 2:
        return _circle_rule(max(polar, azimuth))
    sub_nodes, sub_weights = _product_rule(n - 1, polar, azimuth) if n > 3 else _circle_rule(azimuth)
    # integrate over t = cos(theta) with weight (1-t^2)^{(n-3)/2} by
    # Gauss-Jacobi so the rule is exact for polynomials in t
    a = (n - 3) / 2
    x, w = roots_jacobi(polar, a, a)
    t = x
    s = np.sqrt(np.maximum(1.0 - t * t, 0.0))
    nodes = np.concatenate(
        [s[:, None, None] * sub_nodes[None, :, :], np.broadcast_to(t[:, None, None], (polar, sub_nodes.shape[0], 1))],
        axis=2,
    ).reshape(-1, n)
    weights = (w[:, None] * sub_weights[None, :]).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# hemisphere rules about a pole
# ---------------------------------------------------------------------------


def _orthonormal_frame(pole: np.ndarray) -> np.ndarray:
    """Rows: n-1 tangent vectors completing ``pole`` to an orthonormal basis."""
    n = pole.shape[0]
    idx = int(np.argmax(np.abs(pole)))
    basis = [pole]
    for i in range(n):
        if i == idx:
            continue
        e = np.zeros(n)
        e[i] = 1.0
        for b in basis:
            e = e - (e @ b) * b
        basis.append(e / np.linalg.norm(e))
    return np.asarray(basis[1:])


def hemisphere_quadrature(pole, polar: int = 64, azimuth: int = 128):
    """Rule on the open hemisphere {u : u . pole > 0}.

    Returns (nodes, weights, t) with t = u . pole; weights sum to half the
    sphere area. Gauss-Legendre in the polar angle keeps the rule well
    behaved for integrands that are merely continuous at the equator.
    """
    pole = np.asarray(pole, dtype=float)
    n = pole.shape[0]
    frame = _orthonormal_frame(pole)
    if n == 2:
        sub_nodes = np.array([[1.0], [-1.0]])
        sub_weights = np.array([1.0, 1.0])
    else:
        sub_nodes, sub_weights = _product_rule(n - 1, polar, azimuth)
    x, w = roots_legendre(polar)
    theta = (x + 1.0) * (math.pi / 4)  # [0, pi/2]
    wt = w * (math.pi / 4) * np.sin(theta) ** (n - 2)
    t = np.cos(theta)
    s = np.sin(theta)
    tangent = sub_nodes @ frame  # (M, n)
    nodes = (t[:, None, None] * pole[None, None, :] + s[:, None, None] * tangent[None, :, :]).reshape(-1, n)
    weights = (wt[:, None] * sub_weights[None, :]).ravel()
    tvals = np.repeat(t, tangent.shape[0])
    weights = weights * (0.5 * sphere_area(n) / weights.sum())
    return nodes, weights, tvals


def hemisphere_jacobi_quadrature(pole, beta: float, polar: int = 64, azimuth: int = 128):
    """Hemisphere rule adapted to an integrand ~ t^beta near the equator.

    For -1 < beta < 0 the product f(u) = g(u) * t^beta with g bounded is
    integrated as sum w_i g(u_i): the singular factor t^beta is folded into
    the weights via a Gauss-Jacobi rule in t = u . pole.
    """
    if not -1 < beta:
        raise ValueError("beta must exceed -1 for an integrable singularity")
    pole = np.asarray(pole, dtype=float)
    n = pole.shape[0]
    frame = _orthonormal_frame(pole)
    if n == 2:
        sub_nodes = np.array([[1.0], [-1.0]])
        sub_weights = np.array([1.0, 1.0])
    else:
        sub_nodes, sub_weights = _product_rule(n - 1, polar, azimuth)
    a = (n - 3) / 2
    # weight (1-x)^a (1+x)^beta on [-1,1]; map t = (1+x)/2 onto [0,1]
    x, w = roots_jacobi(polar, a, beta)
    t = (x + 1.0) / 2.0
    # dt measure: (1-t^2)^a t^beta dt = (1-t)^a (1+t)^a t^beta dt
    #           = 2^{-(a+beta+1)} (1-x)^a (1+x)^beta (1+t)^a dx
    smooth = (1.0 + t) ** a * 2.0 ** (-(a + beta + 1.0))
    wt = w * smooth
    s = np.sqrt(np.maximum(1.0 - t * t, 0.0))
    tangent = sub_nodes @ frame
    nodes = (t[:, None, None] * pole[None, None, :] + s[:, None, None] * tangent[None, :, :]).reshape(-1, n)
    weights = (wt[:, None] * sub_weights[None, :]).ravel()
    tvals = np.repeat(t, tangent.shape[0])
    return nodes, weights, tvals


# ---------------------------------------------------------------------------
# simplex rules (Grundmann-Moeller)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def grundmann_moeller(d: int, s: int):
    """Symmetric rule of degree 2s+1 on the d-simplex.

    Returns (barycentric points (M, d+1), weights) with weights summing to 1,
    so that integral over T of f = vol(T) * sum w_j f(points_j @ vertices).
    """
    points = []
    weights = []
    for i in range(s + 1):
        denom = d + 1 + 2 * (s - i)
        coeff = (
            (-1) ** i
            * 2.0 ** (-2 * s)
            * denom ** (2 * s + 1)
            / (math.factorial(i) * math.factorial(d + 1 + 2 * s - i))
        )
        for combo in combinations_with_replacement(range(d + 1), s - i):
            beta = np.zeros(d + 1, dtype=int)
            for c in combo:
                beta[c] += 1
            points.append((2 * beta + 1) / denom)
            weights.append(coeff)
    points = np.asarray(points)
    weights = np.asarray(weights)
    weights = weights * (math.factorial(d) / 1.0)  # normalize unit-simplex volume to 1
    weights = weights / weights.sum()
    return points, weights


def simplex_rule_points(verts: np.ndarray, s: int):
    """Physical nodes and normalized weights of the degree-(2s+1) rule."""
    d = verts.shape[0] - 1
    bary, w = grundmann_moeller(d, s)
    return bary @ verts, w


def gauss_legendre_01(m: int):
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = roots_legendre(m)
    return (x + 1.0) / 2.0, w / 2.0


def geometric_subintervals(levels: int = 6):
    """Partition of [0,1] refined geometrically toward 1 (ratio 1/2)."""
    cuts = [0.0, 0.5]
    for k in range(1, levels):
        cuts.append(1.0 - 2.0 ** (-k - 1))
    cuts.append(1.0)
    return list(zip(cuts[:-1], cuts[1:]))
