"""Chord measures F_q, cone-chord measures G_q and L_p chord measures.

For a polytope these are discrete measures on the sphere: one atom per facet
normal, with mass (2q/ω_n) ∫_facet Ṽ_{q-1}(P, z) dH^{n-1}(z). Smooth-body
totals (needed for the q → 0 limit) are computed by boundary quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .geometry import (
    Ball,
    Body,
    Ellipsoid,
    FacetGeometry,
    HPolytope,
    VPolytope,
    direction_grid,
    ellipsoid_mean_curvature,
    facet_decomposition,
    support_batch,
    surface_area,
    unit_ball_volume,
    volume,
    wulff,
)
from .dual_quermass import boundary_dual_v, facet_dual_v_values
from .quadrature import gauss_legendre_01, hemisphere_quadrature
from .chord_integral import chord_closed


class QuadratureNonconvergence(RuntimeError):
    """Two refinement levels of a facet integral disagree beyond tolerance."""


class OriginOutside(ValueError):
    pass


class OriginNotInterior(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteSphericalMeasure:
    directions: np.ndarray  # (m, n) unit vectors
    masses: np.ndarray  # (m,) nonnegative
    tol: float = 0.0  # achieved relative quadrature error estimate

    def __post_init__(self):
        directions = np.atleast_2d(np.asarray(self.directions, dtype=float))
        masses = np.asarray(self.masses, dtype=float).ravel()
        if directions.shape[0] != masses.shape[0]:
            raise ValueError("directions and masses length mismatch")
        norms = np.linalg.norm(directions, axis=1)
        directions = directions / norms[:, None]
        if not np.all(np.isfinite(masses)):
            raise ValueError("masses must be finite")
        dists = np.linalg.norm(directions[:, None, :] - directions[None, :, :], axis=2)
        np.fill_diagonal(dists, np.inf)
        if np.min(dists) < 1e-9:
            raise ValueError("atom directions must be pairwise distinct")
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [
                {"u": u.tolist(), "mass": float(m)}
                for u, m in zip(self.directions, self.masses)
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DiscreteSphericalMeasure":
        atoms = doc["atoms"]
        dirs = np.array([a["u"] for a in atoms], dtype=float)
        masses = np.array([a["mass"] for a in atoms], dtype=float)
        if dirs.shape[1] != doc["dim"]:
            raise ValueError("measure dim field does not match atom vectors")
        return cls(dirs, masses)


@dataclass(frozen=True)
class MeasureDiagnostics:
    total_mass: float
    centroid_vector: np.ndarray
    hemisphere_margin: float

    def to_json(self) -> dict:
        return {
            "total_mass": self.total_mass,
            "centroid_vector": self.centroid_vector.tolist(),
            "hemisphere_margin": self.hemisphere_margin,
        }


@dataclass(frozen=True)
class MeasureConfig:
    tol: float = 1e-3  # relative error budget per atom
    polar: int = 32  # hemisphere rule resolution
    azimuth: int = 64
    radial_points: int = 8  # Gauss order per fan-parameter segment
    kappa: float = 3.0  # boundary-clustering strength, scaled by 1/q for q < 1
    refine: bool = True  # two-level error estimate; off inside solver loops

    @classmethod
    def for_dim(cls, n: int) -> "MeasureConfig":
        """Defaults trading resolution for runtime as the dimension grows."""
        if n <= 3:
            return cls()
        return cls(tol=5e-3, polar=10, azimuth=20, radial_points=5, refine=False)


# ---------------------------------------------------------------------------
# facet integrals
# ---------------------------------------------------------------------------


def _interval_rule(m: int, kappa: float | None):
    """Rule on [0, 1]; with kappa set, nodes cluster toward 1 via the power
    substitution s = 1 - (1-x)^kappa / 2, taming (1-s)^{q-1} singularities."""
    x, w = gauss_legendre_01(m)
    if kappa is None:
        return x, w
    left = 0.5 * x
    wl = 0.5 * w
    right = 1.0 - 0.5 * (1.0 - x) ** kappa
    wr = w * 0.5 * kappa * (1.0 - x) ** (kappa - 1.0)
    return np.concatenate([left, right]), np.concatenate([wl, wr])


def _cone_rule(apex: np.ndarray, base: np.ndarray, m: int, kappa: float | None):
    """Positive product rule on the cone conv({apex} ∪ base simplex).

    Recursively fans the base from its centroid, so nodes cluster toward the
    cone's base face (and its relative boundary) when kappa is set. Weights
    sum to the cone volume. All weights positive: unlike high-degree simplex
    rules this does not amplify noise in the integrand.
    """
    d = base.shape[0]  # cone dimension
    s, ws = _interval_rule(m, kappa)
    if base.shape[0] == 1:
        bp, bw = base, np.array([1.0])
    else:
        c = base.mean(axis=0)
        # decay the order with recursion depth: the fan parameter dominates
        # the error, the base directions are progressively smoother
        m_sub = max(m - 3, 4)
        parts = [
            _cone_rule(c, np.delete(base, i, axis=0), m_sub, kappa)
            for i in range(base.shape[0])
        ]
        bp = np.vstack([p for p, _ in parts])
        bw = np.concatenate([w for _, w in parts])
    diff = base[0] - apex
    if base.shape[0] > 1:
        edges = base[1:] - base[0]
        qmat, _ = np.linalg.qr(edges.T)
        diff = diff - qmat @ (qmat.T @ diff)
    h = float(np.linalg.norm(diff))
    z = apex[None, None, :] + s[:, None, None] * (bp[None, :, :] - apex[None, None, :])
    w = h * (ws * s ** (d - 1))[:, None] * bw[None, :]
    return z.reshape(-1, apex.shape[0]), w.ravel()


def _facet_nodes(f: FacetGeometry, m: int, kappa: float | None):
    pts, wts = [], []
    for simplex in f.simplices:
        p, w = _cone_rule(simplex[0], simplex[1:], m, kappa)
        pts.append(p)
        wts.append(w)
    if not pts:
        n = f.normal.shape[0]
        return np.zeros((0, n)), np.zeros(0)
    return np.vstack(pts), np.concatenate(wts)


def _hemisphere_rule_cached(pole: np.ndarray, polar: int, azimuth: int):
    key = (tuple(np.round(pole, 14)), polar, azimuth)
    return _hemisphere_rule_impl(key)


@lru_cache(maxsize=512)
def _hemisphere_rule_impl(key):
    pole_t, polar, azimuth = key
    nodes, w, _ = hemisphere_quadrature(np.array(pole_t), polar, azimuth)
    return nodes, w


def _facet_mass(P: HPolytope, f: FacetGeometry, q: float, cfg: MeasureConfig):
    """((2q/ω_n)·∫_facet Ṽ_{q-1}, relative error estimate)."""
    n = P.dim
    exponent = q - 1.0
    kappa = cfg.kappa / q if q < 1 else (cfg.kappa if q < 2 else None)
    nodes, w = _hemisphere_rule_cached(-f.normal, cfg.polar, cfg.azimuth)

    def integrate(m):
        z_pts, z_w = _facet_nodes(f, m, kappa)
        if z_pts.shape[0] == 0:
            return 0.0
        vals = facet_dual_v_values(P, z_pts, exponent, nodes, w)
        return float(np.dot(z_w, vals))

    fine = integrate(cfg.radial_points)
    scale = 2.0 * q / unit_ball_volume(n)
    mass = scale * fine
    if not cfg.refine:
        return mass, 0.0
    coarse = integrate(max(cfg.radial_points - 3, 4))
    err = abs(fine - coarse) / max(abs(fine), 1e-300)
    return mass, err


def _as_hpolytope(P: Body) -> HPolytope:
    if isinstance(P, VPolytope):
        return P.as_hpolytope()
    if not isinstance(P, HPolytope):
        raise TypeError("discrete chord measures require a polytope")
    return P


def chord_measure_polytope(
    P: HPolytope | VPolytope, q: float, cfg: MeasureConfig | None = None
) -> DiscreteSphericalMeasure:
    """Chord measure F_q(P, ·) as one atom per facet normal."""
    if q <= 0:
        raise ValueError("chord measure requires q > 0")
    cfg = cfg or MeasureConfig.for_dim(P.dim)
    P = _as_hpolytope(P)
    facets = facet_decomposition(P)
    masses = np.zeros(len(facets))
    if q == 1:
        # Ṽ_0 ≡ ω_n/2 on facet interiors, so each atom is exactly the area
        for i, f in enumerate(facets):
            if not f.redundant:
                masses[i] = f.area
        return DiscreteSphericalMeasure(P.normals, masses, tol=0.0)
    if q == P.dim + 1:
        # Ṽ_n(P, z) = V(P) everywhere, so each atom is (2(n+1)/ω_n) V · area_i
        scale = 2.0 * q * volume(P) / unit_ball_volume(P.dim)
        for i, f in enumerate(facets):
            if not f.redundant:
                masses[i] = scale * f.area
        return DiscreteSphericalMeasure(P.normals, masses, tol=0.0)
    worst = 0.0
    for i, f in enumerate(facets):
        if f.redundant:
            continue
        masses[i], err = _facet_mass(P, f, q, cfg)
        worst = max(worst, err)
        if err > 10 * cfg.tol:
            raise QuadratureNonconvergence(
                f"facet {i} refinement gap {err:.2e} exceeds 10x budget {cfg.tol:.2e}"
            )
    return DiscreteSphericalMeasure(P.normals, masses, tol=worst)


def cone_chord_measure(
    P: HPolytope | VPolytope, q: float, cfg: MeasureConfig | None = None, eps: float = 1e-12
) -> DiscreteSphericalMeasure:
    """Cone-chord measure G_q = h_K F_q / (n+q-1); needs the origin in P."""
    P = _as_hpolytope(P)
    if np.any(P.offsets < -eps * max(1.0, float(np.max(np.abs(P.offsets))))):
        raise OriginOutside("cone-chord measure needs the origin inside the body")
    F = chord_measure_polytope(P, q, cfg)
    n = P.dim
    masses = np.maximum(P.offsets, 0.0) * F.masses / (n + q - 1.0)
    return DiscreteSphericalMeasure(P.normals, masses, tol=F.tol)


def lp_chord_measure(
    P: HPolytope | VPolytope, p: float, q: float, cfg: MeasureConfig | None = None, eps: float = 1e-12
) -> DiscreteSphericalMeasure:
    """L_p chord measure h_K^{1-p} F_q."""
    P = _as_hpolytope(P)
    F = chord_measure_polytope(P, q, cfg)
    if p == 1:
        return F
    if np.any(P.offsets <= eps):
        raise OriginNotInterior("h^{1-p} weighting needs strictly positive support numbers")
    masses = P.offsets ** (1.0 - p) * F.masses
    return DiscreteSphericalMeasure(P.normals, masses, tol=F.tol)


def measure_diagnostics(mu: DiscreteSphericalMeasure, resolution: int = 2048) -> MeasureDiagnostics:
    """Total mass, centroid vector and worst hemisphere margin of μ."""
    cvec = mu.masses @ mu.directions
    grid = np.vstack([direction_grid(mu.dim, resolution), mu.directions, -mu.directions])
    dots = grid @ mu.directions.T
    margins = np.maximum(dots, 0.0) @ mu.masses
    return MeasureDiagnostics(mu.total_mass, cvec, float(np.min(margins)))


# ---------------------------------------------------------------------------
# identity / limit checks
# ---------------------------------------------------------------------------


def polytope_chord_integral(P: HPolytope | VPolytope, q: float, cfg: MeasureConfig | None = None):
    """Deterministic I_q(P) via (n+q-1) I_q = ∫ h dF_q; exact at q ∈ {1, n+1}."""
    closed = chord_closed(P, q)
    if closed is not None:
        return closed.value
    P = _as_hpolytope(P)
    F = chord_measure_polytope(P, q, cfg)
    return float(np.dot(P.offsets, F.masses)) / (P.dim + q - 1.0)


def variational_check(
    K: HPolytope,
    L: HPolytope,
    q: float,
    t_seq,
    cfg: MeasureConfig | None = None,
):
    """Finite differences of t ↦ I_q(K + tL) against the measure pairing.

    K and L must share a normal set (Minkowski sums realized by adding
    offsets). Returns rows (t, finite_difference, pairing, mismatch).
    """
    K = _as_hpolytope(K)
    L = _as_hpolytope(L)
    if K.normals.shape != L.normals.shape or np.max(np.abs(K.normals - L.normals)) > 1e-12:
        raise ValueError("K and L must share a normal set")
    F = chord_measure_polytope(K, q, cfg)
    pairing = float(np.dot(L.offsets, F.masses))
    base = polytope_chord_integral(K, q, cfg)
    rows = []
    for t in t_seq:
        Kt = wulff(K.normals, K.offsets + t * L.offsets)
        diff = (polytope_chord_integral(Kt, q, cfg) - base) / t
        rows.append({"t": float(t), "finite_difference": diff, "pairing": pairing, "mismatch": abs(diff - pairing)})
    return rows


def log_variational_check(
    K: HPolytope,
    g,
    q: float,
    t_seq,
    cfg: MeasureConfig | None = None,
):
    """d/dt I_q of h_i exp(t g_i) Wulff shapes vs (n+q-1) ∫ g dG_q."""
    K = _as_hpolytope(K)
    g = np.asarray(g, dtype=float)
    n = K.dim
    G = cone_chord_measure(K, q, cfg)
    pairing = (n + q - 1.0) * float(np.dot(g, G.masses))
    base = polytope_chord_integral(K, q, cfg)
    rows = []
    for t in t_seq:
        Kt = wulff(K.normals, K.offsets * np.exp(t * g))
        diff = (polytope_chord_integral(Kt, q, cfg) - base) / t
        rows.append({"t": float(t), "finite_difference": diff, "pairing": pairing, "mismatch": abs(diff - pairing)})
    return rows


def _ellipsoid_surface_nodes(E: Ellipsoid, polar: int = 24, azimuth: int = 48):
    """Surface points, area weights, outward normals and mean curvature."""
    if E.dim != 3:
        raise NotImplementedError("smooth-body surface quadrature implemented for n = 3")
    a = E.semi_axes
    from scipy.special import roots_legendre

    x, wx = roots_legendre(polar)
    theta = np.arccos(x)  # cos-theta Gauss nodes
    phi = (np.arange(azimuth) + 0.5) * (2 * math.pi / azimuth)
    wphi = 2 * math.pi / azimuth
    st, ct = np.sin(theta), np.cos(theta)
    pts, wts, nus, curv = [], [], [], []
    for i in range(polar):
        sp, cp = np.sin(phi), np.cos(phi)
        local = np.column_stack([a[0] * st[i] * cp, a[1] * st[i] * sp, a[2] * np.full_like(phi, ct[i])])
        # surface element for the cos-theta parametrization
        gfac = np.sqrt(
            (a[1] * a[2] * st[i] * cp) ** 2
            + (a[0] * a[2] * st[i] * sp) ** 2
            + (a[0] * a[1] * ct[i]) ** 2
        )
        grad = 2.0 * local / a**2
        nu = grad / np.linalg.norm(grad, axis=1, keepdims=True)
        world = local @ E.frame + E.center
        pts.append(world)
        # dA = g dθ dφ with dθ = dx / sinθ for the cos-θ Gauss nodes
        wts.append(wx[i] * wphi * gfac / max(st[i], 1e-300))
        nus.append(nu @ E.frame)
        curv.extend(ellipsoid_mean_curvature(E, p) for p in world)
    return np.vstack(pts), np.concatenate(wts), np.vstack(nus), np.asarray(curv)


def smooth_chord_measure_total(K: Ball | Ellipsoid, q: float, polar: int = 24, azimuth: int = 48) -> float:
    """Total chord-measure mass F_q(K, S^{n-1}) of a smooth body."""
    n = K.dim
    scale = 2.0 * q / unit_ball_volume(n)
    if isinstance(K, Ball):
        z = K.center + K.radius * np.eye(n)[0]
        v = boundary_dual_v(K, z, q - 1.0, np.eye(n)[0], polar=128, azimuth=256)
        return scale * v * surface_area(K)
    if n == 2:
        ang = (np.arange(azimuth * 4) + 0.5) * (2 * math.pi / (azimuth * 4))
        local = np.column_stack([K.semi_axes[0] * np.cos(ang), K.semi_axes[1] * np.sin(ang)])
        d_ds = np.column_stack([-K.semi_axes[0] * np.sin(ang), K.semi_axes[1] * np.cos(ang)])
        w = np.linalg.norm(d_ds, axis=1) * (2 * math.pi / (azimuth * 4))
        world = local @ K.frame + K.center
        total = 0.0
        for p, wi in zip(world, w):
            grad = 2.0 * (K.frame @ (p - K.center)) / K.semi_axes**2
            nu = (grad / np.linalg.norm(grad)) @ K.frame
            total += wi * boundary_dual_v(K, p, q - 1.0, nu, polar=96, azimuth=2)
        return scale * total
    pts, wts, nus, _ = _ellipsoid_surface_nodes(K, polar, azimuth)
    vals = np.array(
        [boundary_dual_v(K, p, q - 1.0, nu, polar=64, azimuth=128) for p, nu in zip(pts, nus)]
    )
    return scale * float(np.dot(wts, vals))


def q_zero_limit_check(K: Ball | Ellipsoid, q_seq):
    """Track F_q(K, S^{n-1}) toward its q → 0 limit, the mean-curvature
    surface integral scaled by (n-1)ω_{n-1}/(nω_n)."""
    if not isinstance(K, (Ball, Ellipsoid)):
        raise TypeError("q_zero_limit_check requires a smooth body")
    n = K.dim
    coeff = (n - 1) * unit_ball_volume(n - 1) / (n * unit_ball_volume(n))
    if isinstance(K, Ball):
        target = coeff * surface_area(K) / K.radius
    elif n == 2:
        # ∮ κ ds = 2π for any convex curve
        target = coeff * 2 * math.pi
    else:
        pts, wts, _, curv = _ellipsoid_surface_nodes(K)
        target = coeff * float(np.dot(wts, curv))
    rows = []
    for q in q_seq:
        total = smooth_chord_measure_total(K, q)
        rows.append(
            {"q": float(q), "total": total, "target": target, "rel_err": abs(total / target - 1.0)}
        )
    return rows
