"""Dual quermassintegrals Ṽ_q(K, z) and related evaluators.

Ṽ_q(K, z) = (1/n) ∫_{S^{n-1}} ρ_{K,z}(u)^q du, with the spherical integral
evaluated by quadrature. Interior base points admit any real q; boundary base
points need q > -1 (with q = 0 fixed by convention to half the interior
value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import (
    Ball,
    Body,
    Ellipsoid,
    HPolytope,
    VPolytope,
    _hrep,
    boundary_point_info,
    contains,
    line_clip_batch,
    radial_batch,
    support,
    unit_ball_volume,
)
from .quadrature import (
    SphereQuadrature,
    hemisphere_jacobi_quadrature,
    hemisphere_quadrature,
)


class DivergentIndex(ValueError):
    """The requested (z, q) combination gives a divergent integral."""


class OutsideBody(ValueError):
    """Base point lies outside the body where a point of K is required."""


@lru_cache(maxsize=8)
def _default_quad(n: int) -> SphereQuadrature:
    return SphereQuadrature.default(n)


def _power(rho: np.ndarray, q: float) -> np.ndarray:
    """rho^q with the convention 0^q = 0 (any q)."""
    if q == 0:
        return (rho > 0).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(rho > 0, rho, 1.0) ** q
    return np.where(rho > 0, out, 0.0)


def boundary_dual_v(K: Body, z, exponent: float, nu, polar: int = 96, azimuth: int = 192) -> float:
    """Ṽ_exponent(K, z) for z ∈ ∂K with outward normal nu, exponent > -1.

    Uses a hemisphere rule about the inward normal. For smooth bodies with a
    negative exponent the ρ^exponent ~ t^exponent equator singularity is
    absorbed into Gauss-Jacobi weights; for polytope base points in a facet's
    relative interior the integrand is bounded and a plain rule suffices.
    """
    n = K.dim
    pole = -np.asarray(nu, dtype=float)
    if exponent <= -1:
        raise DivergentIndex(f"exponent {exponent} <= -1 diverges at the boundary")
    if exponent < 0 and isinstance(K, (Ball, Ellipsoid)):
        nodes, w, t = hemisphere_jacobi_quadrature(pole, exponent, polar, azimuth)
        rho = np.maximum(radial_batch(K, z, nodes), 0.0)
        g = _power(rho / t, exponent)
        return float(np.sum(w * g) / n)
    nodes, w, _ = hemisphere_quadrature(pole, polar, azimuth)
    rho = np.maximum(radial_batch(K, z, nodes), 0.0)
    return float(np.sum(w * _power(rho, exponent)) / n)


def dual_v(K: Body, z, q: float, quad: SphereQuadrature | None = None) -> float:
    """q-th dual quermassintegral Ṽ_q(K, z) for z ∈ K."""
    z = np.asarray(z, dtype=float)
    n = K.dim
    on_boundary, nu = boundary_point_info(K, z)
    if on_boundary:
        if q == 0:
            return unit_ball_volume(n) / 2.0
        if q <= -1:
            raise DivergentIndex(f"q = {q} diverges for boundary base points")
        return boundary_dual_v(K, z, q, nu)
    if not contains(K, z[None])[0]:
        raise OutsideBody("base point must lie in K; use dual_v_signed for exterior points")
    if q == 0:
        return unit_ball_volume(n)
    quad = quad if quad is not None else _default_quad(n)
    rho = radial_batch(K, z, quad.nodes)
    return float(np.sum(quad.weights * _power(rho, q)) / n)


def dual_v_signed(K: Body, z, q: float, quad: SphereQuadrature | None = None):
    """Signed split (Ṽ_q^+, Ṽ_q^-) valid for arbitrary base points, q > 0.

    The plus part integrates ρ^q over directions whose ray meets K with
    positive exit parameter; the minus part integrates |ρ|^q where the whole
    intersection lies behind z. Their difference extends Ṽ_q off the body.
    """
    if q <= 0:
        raise ValueError("signed dual quermassintegral requires q > 0")
    z = np.asarray(z, dtype=float)
    n = K.dim
    quad = quad if quad is not None else _default_quad(n)
    Z = np.broadcast_to(z, quad.nodes.shape)
    lo, hi, hit = line_clip_batch(K, Z, quad.nodes)
    plus = np.where(hit & (hi > 0), _power(np.maximum(hi, 0.0), q), 0.0)
    minus = np.where(hit & (hi < 0), np.abs(hi) ** q, 0.0)
    return float(np.sum(quad.weights * plus) / n), float(np.sum(quad.weights * minus) / n)


@dataclass(frozen=True)
class RieszEstimate:
    value: float
    std_error: float
    samples: int


def riesz_dual_v(K: Body, z, q: float, N: int = 200_000, seed: int = 0) -> RieszEstimate:
    """Monte Carlo evaluation of Ṽ_q(K,z) = (q/n) ∫_K |x-z|^{q-n} dx, q > 0.

    Rejection sampling in the bounding box of K; the volume factor enters
    through the acceptance rate, so accepted and rejected draws both count.
    """
    if q <= 0:
        raise ValueError("Riesz representation requires q > 0")
    z = np.asarray(z, dtype=float)
    n = K.dim
    lo = np.array([-support(K, -e) for e in np.eye(n)])
    hi = np.array([support(K, e) for e in np.eye(n)])
    box_vol = float(np.prod(hi - lo))
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(17,)))
    pts = lo + rng.uniform(size=(N, n)) * (hi - lo)
    inside = contains(K, pts)
    r = np.linalg.norm(pts - z, axis=1)
    with np.errstate(divide="ignore"):
        vals = np.where(inside & (r > 0), np.where(r > 0, r, 1.0) ** (q - n), 0.0)
    vals = vals * (q / n) * box_vol
    value = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(N))
    return RieszEstimate(value, stderr, N)


def mean_curvature_limit(K: Body, z, q_seq, residual_bound: float | None = None):
    """Extrapolate q ↦ q·Ṽ_{q-1}(K, z) to q = 0 for a boundary point z.

    The limit equals (n-1)·ω_{n-1}·H(z)/(2n) with H the arithmetic mean
    curvature of ∂K at z. Fits an affine model in q over q_seq and reports
    (extrapolate, max fit residual).
    """
    if not isinstance(K, (Ball, Ellipsoid)):
        raise TypeError("mean-curvature limit requires a smooth body (ball or ellipsoid)")
    z = np.asarray(z, dtype=float)
    on_boundary, nu = boundary_point_info(K, z, tol=1e-6)
    if not on_boundary:
        raise ValueError("z must lie on the boundary of K")
    q_seq = np.asarray(sorted(q_seq, reverse=True), dtype=float)
    if np.any(q_seq <= 0) or np.any(q_seq > 0.5):
        raise ValueError("q_seq entries must lie in (0, 0.5]")
    vals = np.array(
        [q * boundary_dual_v(K, z, q - 1.0, nu, polar=160, azimuth=256) for q in q_seq]
    )
    coeffs = np.polyfit(q_seq, vals, 1)
    fit = np.polyval(coeffs, q_seq)
    residual = float(np.max(np.abs(fit - vals)))
    estimate = float(coeffs[-1])
    if residual_bound is not None and residual > residual_bound:
        raise PoorFit(f"affine fit residual {residual:.3e} exceeds bound {residual_bound:.3e}")
    return estimate, residual


class PoorFit(RuntimeError):
    """Affine extrapolation in q did not fit the sampled values."""


# ---------------------------------------------------------------------------
# batched facet evaluation (workhorse for chord measures)
# ---------------------------------------------------------------------------


def facet_dual_v_values(
    P: HPolytope | VPolytope,
    Z: np.ndarray,
    exponent: float,
    nodes: np.ndarray,
    weights: np.ndarray,
    chunk: int = 256,
) -> np.ndarray:
    """Ṽ_exponent(P, z_j) for many base points on one facet, shared node set.

    ``nodes``/``weights`` should come from a hemisphere rule about the
    facet's inward normal so that missed directions carry no weight.
    """
    normals, offsets = _hrep(P)
    n = P.dim
    du = nodes @ normals.T  # (N, m)
    pos = du > 1e-13
    inv_du = np.where(pos, 1.0 / np.where(pos, du, 1.0), 0.0)
    out = np.empty(Z.shape[0])
    for start in range(0, Z.shape[0], chunk):
        zc = Z[start : start + chunk]
        slack = np.maximum(offsets[None, :] - zc @ normals.T, 0.0)  # (C, m)
        # t_plus[j, i] = min over facets with du > 0 of slack/du, accumulated
        # per facet to avoid materializing the (C, N, m) ratio tensor
        t_plus = np.full((zc.shape[0], nodes.shape[0]), np.inf)
        for i in range(normals.shape[0]):
            if not np.any(pos[:, i]):
                continue
            ratio = slack[:, i : i + 1] * inv_du[None, :, i]
            np.minimum(t_plus, np.where(pos[None, :, i], ratio, np.inf), out=t_plus)
        rho = np.maximum(t_plus, 0.0)
        out[start : start + chunk] = (_power(rho, exponent) @ weights) / n
    return out


def dual_v_batch(
    K: Body,
    Z: np.ndarray,
    exponent: float,
    quad: SphereQuadrature,
    chunk: int = 64,
) -> np.ndarray:
    """Ṽ_exponent(K, z_j) for many interior base points, shared quadrature."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    if isinstance(K, (HPolytope, VPolytope)):
        return facet_dual_v_values(K, Z, exponent, quad.nodes, quad.weights, chunk=chunk)
    n = K.dim
    N = quad.nodes.shape[0]
    out = np.empty(Z.shape[0])
    for start in range(0, Z.shape[0], chunk):
        zc = Z[start : start + chunk]
        C = zc.shape[0]
        Zt = np.repeat(zc, N, axis=0)
        Ut = np.tile(quad.nodes, (C, 1))
        _, hi, hit = line_clip_batch(K, Zt, Ut)
        rho = np.where(hit, np.maximum(hi, 0.0), 0.0).reshape(C, N)
        out[start : start + chunk] = (_power(rho, exponent) @ quad.weights) / n
    return out
